#include "fse/cost_model.hpp"

#include <stdexcept>

namespace fse {

std::string to_string(CostAlgorithm a) {
    return a == CostAlgorithm::ofse ? "ofse" : "fofse";
}

CostReport count_ops(CostAlgorithm algorithm, int m, int n, int t, std::int64_t iterations) {
    if (m < 1 || n < 1 || t < 1 || iterations < 0)
        throw std::invalid_argument("count_ops: M, N, T must be >= 1 and I >= 0");

    const std::int64_t mn = static_cast<std::int64_t>(m) * n;
    const std::int64_t t2 = static_cast<std::int64_t>(t) * t;
    const std::int64_t i = iterations;

    CostReport r;
    r.algorithm = algorithm;
    r.m = m;
    r.n = n;
    r.t = t;
    r.iterations = iterations;
    r.fft_transforms = 2 * static_cast<std::int64_t>(t);

    if (algorithm == CostAlgorithm::ofse) {
        r.mul = mn + i * (49 * t2 / 2 - 16);
        r.mem = 2 * mn + i * (10 * t2 + 2);
        r.add = i * (14 * t2 - 16);
        r.func = i * (9 * t2 / 2 - 1);
    } else {
        r.mul = mn + i * (9 * t2 - 12);
        r.mem = 2 * mn + i * (7 * t2 / 2 + 10);
        r.add = i * (6 * t2 + 5);
        r.func = i * (3 * t2 / 2 + 4);
    }
    return r;
}

}  // namespace fse
