#include "nbrshap/subprocess.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <csignal>
#include <cstdlib>
#include <cstring>
#include <mutex>

#include "nbrshap/errors.hpp"

namespace nbrshap {

SubprocessBlackBox::SubprocessBlackBox(std::string command) : command_(std::move(command)) {
    // A dead adapter must surface as EPIPE on write, not kill the engine.
    static std::once_flag sigpipe_once;
    std::call_once(sigpipe_once, [] { std::signal(SIGPIPE, SIG_IGN); });

    int to_child[2], from_child[2];
    if (pipe(to_child) != 0 || pipe(from_child) != 0) {
        throw Error(std::string("adapter pipe failed: ") + std::strerror(errno));
    }
    pid_ = fork();
    if (pid_ < 0) {
        throw Error(std::string("adapter fork failed: ") + std::strerror(errno));
    }
    if (pid_ == 0) {
        dup2(to_child[0], STDIN_FILENO);
        dup2(from_child[1], STDOUT_FILENO);
        close(to_child[0]);
        close(to_child[1]);
        close(from_child[0]);
        close(from_child[1]);
        execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
        std::perror("nbrshap adapter exec");
        _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    to_child_ = fdopen(to_child[1], "w");
    from_child_ = fdopen(from_child[0], "r");
    if (!to_child_ || !from_child_) {
        shutdown();
        throw Error("adapter fdopen failed");
    }
}

SubprocessBlackBox::~SubprocessBlackBox() { shutdown(); }

void SubprocessBlackBox::shutdown() noexcept {
    if (to_child_) {
        fclose(to_child_);
        to_child_ = nullptr;
    }
    if (from_child_) {
        fclose(from_child_);
        from_child_ = nullptr;
    }
    if (pid_ > 0) {
        int status = 0;
        waitpid(pid_, &status, 0);
        pid_ = -1;
    }
}

void SubprocessBlackBox::evaluate_batch(const double* rows, std::size_t n, std::size_t m,
                                        double* out) const {
    if (n == 0) return;  // empty batch: no protocol exchange
    std::lock_guard lock(mu_);
    if (!to_child_ || !from_child_) {
        throw ProtocolError("adapter process not running", 0);
    }

    if (std::fprintf(to_child_, "NBRSHAP-EVAL 1 %zu %zu\n", n, m) < 0) {
        throw ProtocolError("adapter process closed its input", 0);
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (std::fprintf(to_child_, j == 0 ? "%.17g" : ",%.17g", rows[i * m + j]) < 0) {
                throw ProtocolError("adapter process closed its input", i);
            }
        }
        if (std::fputc('\n', to_child_) == EOF) {
            throw ProtocolError("adapter process closed its input", i);
        }
    }
    if (std::fflush(to_child_) != 0) {
        throw ProtocolError("adapter flush failed", 0);
    }

    char* line = nullptr;
    std::size_t cap = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const ssize_t len = getline(&line, &cap, from_child_);
        if (len < 0) {
            free(line);
            throw ProtocolError(
                "adapter exited after " + std::to_string(i) + " of " + std::to_string(n) +
                    " responses",
                i);
        }
        char* text = line;
        while (*text == ' ' || *text == '\t') ++text;
        char* end = nullptr;
        errno = 0;
        const double v = std::strtod(text, &end);
        while (end && (*end == ' ' || *end == '\t' || *end == '\n' || *end == '\r')) ++end;
        if (end == text || (end && *end != '\0') || errno == ERANGE) {
            std::string token(line, static_cast<std::size_t>(len));
            if (!token.empty() && token.back() == '\n') token.pop_back();
            free(line);
            throw MalformedResponse(token, i);
        }
        out[i] = v;
    }
    free(line);
}

}  // namespace nbrshap
