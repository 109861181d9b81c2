// Test adapter speaking the NBRSHAP-EVAL line protocol. The mode argument
// selects the behaviour:
//   col0      reply with the first column
//   sum       reply with the row sum
//   index     reply with the row index within the batch (order check)
//   malformed reply "banana" on the third row of every batch
//   truncate  reply to half the rows, then exit
//   noisy     col0, with diagnostics on stderr
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

int main(int argc, char** argv) {
    const std::string mode = argc > 1 ? argv[1] : "col0";
    char* line = nullptr;
    size_t cap = 0;
    while (getline(&line, &cap, stdin) > 0) {
        unsigned long version = 0, n_rows = 0, n_cols = 0;
        if (std::sscanf(line, "NBRSHAP-EVAL %lu %lu %lu", &version, &n_rows, &n_cols) != 3) {
            std::fprintf(stderr, "adapter: bad header: %s", line);
            return 2;
        }
        std::vector<std::vector<double>> rows(n_rows, std::vector<double>(n_cols));
        for (unsigned long i = 0; i < n_rows; ++i) {
            if (getline(&line, &cap, stdin) <= 0) return 3;
            char* tok = std::strtok(line, ",\n");
            for (unsigned long j = 0; j < n_cols && tok; ++j) {
                rows[i][j] = std::strtod(tok, nullptr);
                tok = std::strtok(nullptr, ",\n");
            }
        }
        const unsigned long limit = mode == "truncate" ? n_rows / 2 : n_rows;
        for (unsigned long i = 0; i < limit; ++i) {
            if (mode == "malformed" && i == 2) {
                std::printf("banana\n");
            } else if (mode == "index") {
                std::printf("%.17g\n", static_cast<double>(i));
            } else if (mode == "sum") {
                double s = 0.0;
                for (double v : rows[i]) s += v;
                std::printf("%.17g\n", s);
            } else {
                std::printf("%.17g\n", rows[i][0]);
            }
        }
        std::fflush(stdout);
        if (mode == "truncate") return 0;
        if (mode == "noisy") std::fprintf(stderr, "adapter: served %lu rows\n", n_rows);
    }
    free(line);
    return 0;
}
