#pragma once

#include <cstdint>
#include <string>

namespace fse {

enum class CostAlgorithm { ofse, fofse };

std::string to_string(CostAlgorithm a);

// Analytic per-block operation counts for runtime-optimized realizations of
// the two compensated variants. M x N is the extrapolated block, T the
// transform size, I the iteration count.
struct CostReport {
    CostAlgorithm algorithm{};
    int m = 0;
    int n = 0;
    int t = 0;
    std::int64_t iterations = 0;

    std::int64_t mul = 0;   // multiplications
    std::int64_t mem = 0;   // memory accesses
    std::int64_t add = 0;   // additions
    std::int64_t func = 0;  // function evaluations

    std::int64_t fft_transforms = 0;  // 1D FFTs of length T in the setup

    std::int64_t total() const { return mul + mem + add + func; }
};

CostReport count_ops(CostAlgorithm algorithm, int m, int n, int t, std::int64_t iterations);

}  // namespace fse
