#pragma once

#include <cstdio>
#include <mutex>
#include <string>
#include <sys/types.h>

#include "nbrshap/blackbox.hpp"

namespace nbrshap {

// Black box served by a child process over a line protocol:
//
//   engine -> adapter:  NBRSHAP-EVAL 1 <n_rows> <n_cols>\n
//                       n_rows lines of %.17g values, comma-separated
//   adapter -> engine:  exactly n_rows lines, each one %.17g value
//
// stderr passes through for diagnostics. One adapter process serves one
// engine run; batches are serialized (no interleaving). Protocol breaches
// abort the run: a process exit mid-batch, a non-numeric token or a row
// count mismatch each raise a distinct error naming the batch offset.
class SubprocessBlackBox final : public BlackBox {
public:
    explicit SubprocessBlackBox(std::string command);
    ~SubprocessBlackBox() override;

    SubprocessBlackBox(const SubprocessBlackBox&) = delete;
    SubprocessBlackBox& operator=(const SubprocessBlackBox&) = delete;

    void evaluate_batch(const double* rows, std::size_t n, std::size_t m,
                        double* out) const override;

    const std::string& command() const { return command_; }

private:
    void shutdown() noexcept;

    std::string command_;
    pid_t pid_ = -1;
    FILE* to_child_ = nullptr;
    FILE* from_child_ = nullptr;
    mutable std::mutex mu_;
};

}  // namespace nbrshap
