#include <doctest.h>

#include <cstdint>
#include <stdexcept>

#include "fse/cost_model.hpp"

using namespace fse;

namespace {

// Independent re-statement of the per-block counts used as the reference.
struct Ref {
    std::int64_t mul, mem, add, func;
};

Ref ref_ofse(std::int64_t m, std::int64_t n, std::int64_t t, std::int64_t i) {
    const std::int64_t t2 = t * t;
    return {m * n + i * (49 * t2 / 2 - 16), 2 * m * n + i * (10 * t2 + 2), i * (14 * t2 - 16),
            i * (9 * t2 / 2 - 1)};
}

Ref ref_fofse(std::int64_t m, std::int64_t n, std::int64_t t, std::int64_t i) {
    const std::int64_t t2 = t * t;
    return {m * n + i * (9 * t2 - 12), 2 * m * n + i * (7 * t2 / 2 + 10), i * (6 * t2 + 5),
            i * (3 * t2 / 2 + 4)};
}

void check_tuple(int m, int n, int t, std::int64_t i) {
    const CostReport o = count_ops(CostAlgorithm::ofse, m, n, t, i);
    const Ref ro = ref_ofse(m, n, t, i);
    CHECK(o.mul == ro.mul);
    CHECK(o.mem == ro.mem);
    CHECK(o.add == ro.add);
    CHECK(o.func == ro.func);
    CHECK(o.fft_transforms == 2 * t);
    CHECK(o.total() == ro.mul + ro.mem + ro.add + ro.func);

    const CostReport f = count_ops(CostAlgorithm::fofse, m, n, t, i);
    const Ref rf = ref_fofse(m, n, t, i);
    CHECK(f.mul == rf.mul);
    CHECK(f.mem == rf.mem);
    CHECK(f.add == rf.add);
    CHECK(f.func == rf.func);
    CHECK(f.fft_transforms == 2 * t);
}

}  // namespace

TEST_CASE("operation counts match the closed forms at ten parameter tuples") {
    check_tuple(16, 16, 64, 200);
    check_tuple(16, 16, 64, 20);
    check_tuple(16, 16, 32, 100);
    check_tuple(8, 8, 16, 10);
    check_tuple(8, 16, 32, 50);
    check_tuple(32, 32, 64, 500);
    check_tuple(4, 4, 8, 1);
    check_tuple(16, 16, 128, 200);
    check_tuple(1, 1, 2, 7);
    check_tuple(24, 24, 64, 333);
}

TEST_CASE("standard-parameter multiplication counts hit the frozen values") {
    const CostReport o = count_ops(CostAlgorithm::ofse, 16, 16, 64, 200);
    CHECK(o.mul == 20067456);
    const CostReport f = count_ops(CostAlgorithm::fofse, 16, 16, 64, 200);
    CHECK(f.mul == 7370656);
}

TEST_CASE("counts are affine in the iteration number") {
    for (auto algo : {CostAlgorithm::ofse, CostAlgorithm::fofse}) {
        const CostReport base = count_ops(algo, 16, 16, 64, 0);
        const CostReport a = count_ops(algo, 16, 16, 64, 30);
        const CostReport b = count_ops(algo, 16, 16, 64, 70);
        const CostReport ab = count_ops(algo, 16, 16, 64, 100);
        CHECK(ab.mul == a.mul + b.mul - base.mul);
        CHECK(ab.mem == a.mem + b.mem - base.mem);
        CHECK(ab.add == a.add + b.add - base.add);
        CHECK(ab.func == a.func + b.func - base.func);
    }
}

TEST_CASE("zero iterations leaves only the block transform setup") {
    const CostReport o = count_ops(CostAlgorithm::ofse, 16, 16, 64, 0);
    CHECK(o.mul == 16 * 16);
    CHECK(o.mem == 2 * 16 * 16);
    CHECK(o.add == 0);
    CHECK(o.func == 0);
}

TEST_CASE("summed-ops ratio stays near one third at standard parameters") {
    for (std::int64_t i : {10, 20, 50, 100, 200, 500}) {
        const auto o = count_ops(CostAlgorithm::ofse, 16, 16, 64, i);
        const auto f = count_ops(CostAlgorithm::fofse, 16, 16, 64, i);
        const double ratio = static_cast<double>(f.total()) / static_cast<double>(o.total());
        CHECK(ratio > 0.25);
        CHECK(ratio < 0.45);
    }
}

TEST_CASE("per-iteration counts never favor the slower variant") {
    for (int t : {8, 16, 32, 64, 128}) {
        const auto o = count_ops(CostAlgorithm::ofse, 16, 16, t, 100);
        const auto f = count_ops(CostAlgorithm::fofse, 16, 16, t, 100);
        CHECK(f.total() < o.total());
    }
}

TEST_CASE("count_ops rejects out-of-range parameters") {
    CHECK_THROWS_AS(count_ops(CostAlgorithm::ofse, 0, 16, 64, 10), std::invalid_argument);
    CHECK_THROWS_AS(count_ops(CostAlgorithm::ofse, 16, 0, 64, 10), std::invalid_argument);
    CHECK_THROWS_AS(count_ops(CostAlgorithm::ofse, 16, 16, 0, 10), std::invalid_argument);
    CHECK_THROWS_AS(count_ops(CostAlgorithm::fofse, 16, 16, 64, -1), std::invalid_argument);
}

TEST_CASE("algorithm labels round-trip") {
    CHECK(to_string(CostAlgorithm::ofse) == "ofse");
    CHECK(to_string(CostAlgorithm::fofse) == "fofse");
}
