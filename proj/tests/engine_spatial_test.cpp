#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "fse/engine_spatial.hpp"
#include "helpers.hpp"

using namespace fse;
using std::complex;

namespace {

ExtrapolationConfig config_for(int t, SelectionRule sel, Compensation comp, double gamma = 0.2,
                               int iterations = 200) {
    ExtrapolationConfig cfg;
    cfg.iterations = iterations;
    cfg.transform_size = t;
    cfg.selection = sel;
    cfg.compensation = comp;
    cfg.gamma = gamma;
    return cfg;
}

// Brute-force picks recomputed from the definitions, canonical bins only,
// first index winning ties.
size_t brute_max_portion(const SampleGrid& r, const WeightField& w, BasisKind kind, int t,
                         const std::vector<Index>& active, const BasisSet& basis) {
    size_t best = 0;
    double best_val = -1.0;
    for (size_t i = 0; i < active.size(); ++i) {
        if (!basis.canonical(active[i])) continue;
        const double mag = std::abs(oracle::naive_correlation(r, w, kind, t, active[i]));
        if (mag > best_val) {
            best_val = mag;
            best = i;
        }
    }
    return best;
}

size_t brute_min_distance(const SampleGrid& r, const WeightField& w, BasisKind kind, int t,
                          const std::vector<Index>& active, const BasisSet& basis) {
    size_t best = 0;
    double best_val = -1.0;
    for (size_t i = 0; i < active.size(); ++i) {
        if (!basis.canonical(active[i])) continue;
        const double norm = oracle::naive_norm(w, kind, t, active[i]);
        if (!(norm > 0.0)) continue;
        const double removed = std::norm(oracle::naive_correlation(r, w, kind, t, active[i])) / norm;
        if (removed > best_val) {
            best_val = removed;
            best = i;
        }
    }
    return best;
}

}  // namespace

TEST_CASE("init_state zeroes everything off the support") {
    std::mt19937_64 rng(101);
    const SampleGrid f = testutil::random_grid(rng, 6, 6, 1.0, 2.0);
    const RegionMask mask =
        build_region_mask(6, 6, std::vector<Rect>{Rect{1, 1, 2, 2}}, std::vector<Rect>{Rect{4, 4, 1, 1}});
    const spatial::ModelState st = spatial::init_state(f, mask);
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c) {
            if (mask.at(r, c) == Region::support) {
                CHECK(st.residual.at(r, c) == f.at(r, c));
            } else {
                CHECK(st.residual.at(r, c) == 0.0);
            }
        }
    CHECK(st.nu == 0);
    CHECK(!st.converged);
}

TEST_CASE("projection of a basis function onto itself is one") {
    const int t = 4;
    const BasisSet basis(BasisKind::dct2d, t);
    const RegionMask mask = testutil::all_support(t, t);
    const WeightField w = testutil::uniform_weight(mask);
    SampleGrid f(t, t, 0.0);
    for (int m = 0; m < t; ++m)
        for (int n = 0; n < t; ++n) f.at(m, n) = basis.value(Index{1, 2}, m, n).real();
    const complex<double> p = spatial::project_coefficient(f, w, basis, Index{1, 2});
    CHECK(std::abs(p - complex<double>(1.0, 0.0)) < 1e-12);
}

TEST_CASE("projection of zero is zero and of a constant is the DC value") {
    const int t = 8;
    const BasisSet basis(BasisKind::dft2d, t);
    std::mt19937_64 rng(103);
    const RegionMask mask = testutil::random_mask(rng, t, t);
    const WeightField w = build_isotropic_weight(mask, 0.8);
    const SampleGrid zero(t, t, 0.0);
    CHECK(std::abs(spatial::project_coefficient(zero, w, basis, Index{3, 5})) == 0.0);

    const double c = 7.5;
    SampleGrid constant(t, t, 0.0);
    for (int m = 0; m < t; ++m)
        for (int n = 0; n < t; ++n)
            if (mask.at(m, n) == Region::support) constant.at(m, n) = c;
    const complex<double> p = spatial::project_coefficient(constant, w, basis, Index{0, 0});
    CHECK(std::abs(p - complex<double>(c, 0.0)) < 1e-12);
}

TEST_CASE("projection rejects a weight field that vanishes everywhere") {
    const int t = 4;
    const BasisSet basis(BasisKind::dft2d, t);
    WeightField w;
    w.width = t;
    w.height = t;
    w.w.assign(16, 0.0);
    const SampleGrid f(t, t, 1.0);
    CHECK_THROWS_AS(spatial::project_coefficient(f, w, basis, Index{0, 0}), std::domain_error);
}

TEST_CASE("correlation vector matches the naive sum for both bases") {
    const int t = 8;
    std::mt19937_64 rng(107);
    const RegionMask mask = testutil::random_mask(rng, t, t);
    const WeightField w = build_isotropic_weight(mask, 0.8);
    const SampleGrid r = testutil::random_grid(rng, t, t);
    for (BasisKind kind : {BasisKind::dft2d, BasisKind::dct2d}) {
        const BasisSet basis(kind, t);
        const auto active = full_index_list(t);
        const auto num = spatial::weighted_residual_coeffs(r, w, basis, active);
        for (size_t i = 0; i < active.size(); ++i) {
            const complex<double> want = oracle::naive_correlation(r, w, kind, t, active[i]);
            CHECK(std::abs(num[i] - want) < 1e-10);
        }
    }
}

TEST_CASE("dft norms equal the total weight and dct norms the literal sum") {
    const int t = 8;
    std::mt19937_64 rng(109);
    const RegionMask mask = testutil::random_mask(rng, t, t);
    const WeightField w = build_isotropic_weight(mask, 0.8);
    const auto active = full_index_list(t);
    {
        const BasisSet basis(BasisKind::dft2d, t);
        const auto norms = spatial::weighted_basis_norms(w, basis, active);
        for (double v : norms) CHECK(v == doctest::Approx(w.sum()).epsilon(1e-14));
    }
    {
        const BasisSet basis(BasisKind::dct2d, t);
        const auto norms = spatial::weighted_basis_norms(w, basis, active);
        for (size_t i = 0; i < active.size(); ++i)
            CHECK(norms[i] ==
                  doctest::Approx(oracle::naive_norm(w, BasisKind::dct2d, t, active[i]))
                      .epsilon(1e-10));
    }
}

TEST_CASE("selection picks the brute-force argmax for both rules") {
    const int t = 8;
    std::mt19937_64 rng(113);
    const BasisSet basis(BasisKind::dct2d, t);
    const auto active = full_index_list(t);
    for (int trial = 0; trial < 10; ++trial) {
        const RegionMask mask = testutil::random_mask(rng, t, t);
        const WeightField w = build_isotropic_weight(mask, 0.8);
        SampleGrid r = testutil::random_grid(rng, t, t);
        for (int m = 0; m < t; ++m)
            for (int n = 0; n < t; ++n)
                if (mask.at(m, n) != Region::support) r.at(m, n) = 0.0;

        const auto num = spatial::weighted_residual_coeffs(r, w, basis, active);
        const auto norms = spatial::weighted_basis_norms(w, basis, active);
        const auto mp = spatial::select_max_portion(num, basis, active);
        REQUIRE(mp.has_value());
        CHECK(*mp == brute_max_portion(r, w, BasisKind::dct2d, t, active, basis));
        CHECK(spatial::select_min_distance(num, norms, basis, active) ==
              brute_min_distance(r, w, BasisKind::dct2d, t, active, basis));
        CHECK(spatial::select_min_distance(r, w, basis, active) ==
              spatial::select_min_distance(num, norms, basis, active));
    }
}

TEST_CASE("selection rules coincide for the dft set") {
    const int t = 8;
    std::mt19937_64 rng(127);
    const BasisSet basis(BasisKind::dft2d, t);
    const auto active = full_index_list(t);
    for (int trial = 0; trial < 20; ++trial) {
        const RegionMask mask = testutil::random_mask(rng, t, t);
        const WeightField w = build_isotropic_weight(mask, 0.8);
        SampleGrid r = testutil::random_grid(rng, t, t);
        const auto num = spatial::weighted_residual_coeffs(r, w, basis, active);
        const auto norms = spatial::weighted_basis_norms(w, basis, active);
        const auto mp = spatial::select_max_portion(num, basis, active);
        REQUIRE(mp.has_value());
        CHECK(*mp == spatial::select_min_distance(num, norms, basis, active));
    }
}

TEST_CASE("selection rules can disagree for the dct set under uneven weights") {
    const int t = 4;
    const BasisSet basis(BasisKind::dct2d, t);
    const auto active = full_index_list(t);
    std::mt19937_64 rng(131);
    std::uniform_real_distribution<double> wdist(0.05, 2.0);
    int disagreements = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const RegionMask mask = testutil::random_mask(rng, t, t, 0.5);
        WeightField w = testutil::uniform_weight(mask);
        for (double& v : w.w)
            if (v > 0.0) v = wdist(rng);
        SampleGrid r = testutil::random_grid(rng, t, t);
        for (int m = 0; m < t; ++m)
            for (int n = 0; n < t; ++n)
                if (mask.at(m, n) != Region::support) r.at(m, n) = 0.0;

        const auto num = spatial::weighted_residual_coeffs(r, w, basis, active);
        const auto norms = spatial::weighted_basis_norms(w, basis, active);
        const auto mp = spatial::select_max_portion(num, basis, active);
        if (!mp.has_value()) continue;
        const size_t md = spatial::select_min_distance(num, norms, basis, active);
        CHECK(*mp == brute_max_portion(r, w, BasisKind::dct2d, t, active, basis));
        CHECK(md == brute_min_distance(r, w, BasisKind::dct2d, t, active, basis));
        if (*mp != md) ++disagreements;
    }
    CHECK(disagreements > 0);
}

TEST_CASE("select_max_portion reports an all-zero correlation vector") {
    const int t = 4;
    const BasisSet basis(BasisKind::dft2d, t);
    const auto active = full_index_list(t);
    const std::vector<complex<double>> num(active.size(), complex<double>{0.0, 0.0});
    CHECK(!spatial::select_max_portion(num, basis, active).has_value());
}

TEST_CASE("constant compensation scales the projection") {
    const CompensationResult r = spatial::compensate_constant(complex<double>(5.0, 0.0), 0.2);
    CHECK(std::abs(r.c - complex<double>(1.0, 0.0)) < 1e-15);
    CHECK(r.gamma_effective == 0.2);
    CHECK(!r.degenerate);
    const CompensationResult id = spatial::compensate_constant(complex<double>(2.0, -3.0), 1.0);
    CHECK(std::abs(id.c - complex<double>(2.0, -3.0)) == 0.0);
    CHECK_THROWS_AS(spatial::compensate_constant(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(spatial::compensate_constant(1.0, 1.5), std::invalid_argument);
}

TEST_CASE("full compensation with an identity row returns the projection") {
    std::vector<complex<double>> p{{0.4, 0.1}, {1.2, -0.3}, {0.0, 0.5}};
    std::vector<complex<double>> row{{0.0, 0.0}, {1.0, 0.0}, {0.0, 0.0}};
    const CompensationResult r = spatial::compensate_full(p, 1, row);
    CHECK(std::abs(r.c - p[1]) < 1e-15);
    CHECK(r.gamma_effective == doctest::Approx(1.0));
    CHECK(!r.degenerate);
}

TEST_CASE("full compensation damps interference from a second projection") {
    std::vector<complex<double>> p{{1.0, 0.0}, {1.0, 0.0}};
    std::vector<complex<double>> row{{1.0, 0.0}, {0.5, 0.0}};
    const CompensationResult r = spatial::compensate_full(p, 0, row);
    CHECK(r.gamma_effective == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(std::abs(r.c - complex<double>(2.0 / 3.0, 0.0)) < 1e-12);
    CHECK(!r.degenerate);
}

TEST_CASE("full compensation caps the factor at one") {
    std::vector<complex<double>> p{{1.0, 0.0}, {-0.9, 0.0}};
    std::vector<complex<double>> row{{1.0, 0.0}, {1.0, 0.0}};
    const CompensationResult r = spatial::compensate_full(p, 0, row);
    CHECK(r.gamma_effective == 1.0);
    CHECK(std::abs(r.c - p[0]) < 1e-15);
    CHECK(!r.degenerate);
}

TEST_CASE("full compensation flags a vanishing denominator") {
    std::vector<complex<double>> p{{1.0, 0.0}, {1.0, 0.0}};
    std::vector<complex<double>> row{{1.0, 0.0}, {-1.0, 0.0}};
    const CompensationResult r = spatial::compensate_full(p, 0, row);
    CHECK(r.degenerate);
    CHECK(r.gamma_effective == 1.0);
    CHECK(std::abs(r.c - p[0]) < 1e-15);
}

TEST_CASE("full compensation accepts a normalized gram matrix") {
    const int t = 4;
    std::mt19937_64 rng(137);
    const RegionMask mask = testutil::random_mask(rng, t, t);
    const WeightField w = build_isotropic_weight(mask, 0.8);
    const BasisSet basis(BasisKind::dct2d, t);
    const auto active = full_index_list(t);
    const GramMatrix khat = normalize_gram(build_gram(basis, w, active));

    const SampleGrid r = testutil::random_grid(rng, t, t);
    const auto num = spatial::weighted_residual_coeffs(r, w, basis, active);
    const auto norms = spatial::weighted_basis_norms(w, basis, active);
    std::vector<complex<double>> proj(num.size());
    for (size_t i = 0; i < num.size(); ++i) proj[i] = num[i] / norms[i];

    const size_t u = 5;
    const CompensationResult via_matrix = spatial::compensate_full(proj, u, khat);
    const CompensationResult via_row = spatial::compensate_full(proj, u, khat.row(u));
    CHECK(via_matrix.c == via_row.c);
    CHECK(via_matrix.gamma_effective == via_row.gamma_effective);

    GramMatrix raw = build_gram(basis, w, active);
    CHECK_THROWS_AS(spatial::compensate_full(proj, u, raw), std::invalid_argument);
}

TEST_CASE("one uncompensated step fills a constant window from its DC term") {
    const int t = 8;
    const double c = 4.5;
    const RegionMask mask = build_region_mask(6, 6, std::vector<Rect>{Rect{2, 2, 2, 2}});
    SampleGrid f(6, 6, c);
    const ExtrapolationConfig cfg =
        config_for(t, SelectionRule::min_distance, Compensation::none, 0.2, 1);
    const spatial::RunResult res = spatial::run(f, mask, cfg, BasisKind::dft2d);
    REQUIRE(res.trace.records.size() == 1);
    CHECK(res.trace.records[0].u == Index{0, 0});
    CHECK(std::abs(res.trace.records[0].p - complex<double>(c, 0.0)) < 1e-12);
    for (int m = 0; m < 6; ++m)
        for (int n = 0; n < 6; ++n) CHECK(res.model.at(m, n) == doctest::Approx(c).epsilon(1e-12));
}

TEST_CASE("one exact step removes an isolated orthogonal component") {
    const int t = 4;
    const BasisSet basis(BasisKind::dct2d, t);
    const RegionMask mask = testutil::all_support(t, t);
    const WeightField w = testutil::uniform_weight(mask);
    SampleGrid f(t, t, 0.0);
    for (int m = 0; m < t; ++m)
        for (int n = 0; n < t; ++n) f.at(m, n) = 3.7 * basis.value(Index{1, 2}, m, n).real();

    spatial::ModelState st = spatial::init_state(f, mask);
    const ExtrapolationConfig cfg =
        config_for(t, SelectionRule::min_distance, Compensation::none, 0.2, 1);
    REQUIRE(spatial::step(st, cfg, basis, w));
    REQUIRE(st.trace.records.size() == 1);
    CHECK(st.trace.records[0].u == Index{1, 2});
    CHECK(std::abs(st.trace.records[0].p - complex<double>(3.7, 0.0)) < 1e-12);
    CHECK(st.trace.records[0].weighted_energy < 1e-20);
}

TEST_CASE("orthogonal step removes exactly the predicted energy share") {
    const int t = 8;
    const double gamma = 0.5;
    const BasisSet basis(BasisKind::dct2d, t);
    const RegionMask mask = testutil::all_support(t, t);
    const WeightField w = testutil::uniform_weight(mask);
    std::mt19937_64 rng(139);
    const SampleGrid f = testutil::random_grid(rng, t, t);

    spatial::ModelState st = spatial::init_state(f, mask);
    const double e0 = oracle::weighted_energy(f, w);
    const ExtrapolationConfig cfg =
        config_for(t, SelectionRule::min_distance, Compensation::constant_gamma, gamma, 1);
    REQUIRE(spatial::step(st, cfg, basis, w));
    const auto& rec = st.trace.records.at(0);
    const double removed = (2.0 * gamma - gamma * gamma) * std::norm(rec.p);
    CHECK(e0 - rec.weighted_energy == doctest::Approx(removed).epsilon(1e-9));
}

TEST_CASE("residual stays exactly zero off the support") {
    const int t = 8;
    std::mt19937_64 rng(149);
    const SampleGrid f = testutil::random_grid(rng, t, t, 1.0, 2.0);
    const RegionMask mask = testutil::random_mask(rng, t, t);
    const WeightField w = build_isotropic_weight(mask, 0.8);
    const BasisSet basis(BasisKind::dft2d, t);
    spatial::ModelState st = spatial::init_state(f, mask);
    const ExtrapolationConfig cfg =
        config_for(t, SelectionRule::max_weighted_portion, Compensation::constant_gamma, 0.3, 10);
    for (int i = 0; i < 10; ++i) {
        if (!spatial::step(st, cfg, basis, w)) break;
        for (int m = 0; m < t; ++m)
            for (int n = 0; n < t; ++n)
                if (mask.at(m, n) != Region::support) CHECK(st.residual.at(m, n) == 0.0);
    }
    CHECK(st.nu == 10);
}

TEST_CASE("weighted energy never increases across iterations") {
    const int t = 8;
    std::mt19937_64 rng(151);
    for (auto comp : {Compensation::constant_gamma, Compensation::full_od, Compensation::none}) {
        const SampleGrid f = testutil::random_grid(rng, t, t);
        const RegionMask mask = testutil::random_mask(rng, t, t);
        const ExtrapolationConfig cfg = config_for(
            t, SelectionRule::min_distance, comp, comp == Compensation::none ? 1.0 : 0.2, 30);
        const spatial::RunResult res = spatial::run(f, mask, cfg, BasisKind::dft2d);
        REQUIRE(!res.trace.records.empty());
        const double e0 = res.trace.records.front().weighted_energy;
        double prev = e0 * 2.0;
        bool first = true;
        for (const auto& rec : res.trace.records) {
            if (!first) CHECK(rec.weighted_energy <= prev * (1.0 + 1e-12) + 1e-15);
            prev = rec.weighted_energy;
            first = false;
        }
    }
}

TEST_CASE("uncompensated updates equal constant compensation at one") {
    const int t = 8;
    std::mt19937_64 rng(157);
    const SampleGrid f = testutil::random_grid(rng, t, t);
    const RegionMask mask = testutil::random_mask(rng, t, t);
    const auto a = spatial::run(
        f, mask, config_for(t, SelectionRule::min_distance, Compensation::none, 0.7, 15),
        BasisKind::dft2d);
    const auto b = spatial::run(
        f, mask, config_for(t, SelectionRule::min_distance, Compensation::constant_gamma, 1.0, 15),
        BasisKind::dft2d);
    REQUIRE(a.trace.records.size() == b.trace.records.size());
    for (size_t i = 0; i < a.trace.records.size(); ++i) {
        const auto& ra = a.trace.records[i];
        const auto& rb = b.trace.records[i];
        CHECK(ra.u == rb.u);
        CHECK(ra.p == rb.p);
        CHECK(ra.c == rb.c);
        CHECK(ra.gamma_effective == rb.gamma_effective);
        CHECK(ra.weighted_energy == rb.weighted_energy);
    }
    CHECK(a.model.samples == b.model.samples);
}

TEST_CASE("positive scaling preserves selections and scales coefficients") {
    const int t = 8;
    const double scale = 2.5;
    std::mt19937_64 rng(163);
    const SampleGrid f = testutil::random_grid(rng, t, t);
    SampleGrid g = f;
    for (double& v : g.samples) v *= scale;
    const RegionMask mask = testutil::random_mask(rng, t, t);

    struct Variant {
        SelectionRule sel;
        Compensation comp;
        double gamma;
    };
    const Variant variants[] = {
        {SelectionRule::min_distance, Compensation::none, 1.0},
        {SelectionRule::max_weighted_portion, Compensation::constant_gamma, 0.2},
        {SelectionRule::min_distance, Compensation::full_od, 0.2},
    };
    for (const Variant& v : variants) {
        const auto a =
            spatial::run(f, mask, config_for(t, v.sel, v.comp, v.gamma, 12), BasisKind::dft2d);
        const auto b =
            spatial::run(g, mask, config_for(t, v.sel, v.comp, v.gamma, 12), BasisKind::dft2d);
        REQUIRE(a.trace.records.size() == b.trace.records.size());
        for (size_t i = 0; i < a.trace.records.size(); ++i) {
            CHECK(a.trace.records[i].u == b.trace.records[i].u);
            CHECK(std::abs(b.trace.records[i].c - scale * a.trace.records[i].c) <=
                  1e-12 * std::abs(b.trace.records[i].c) + 1e-15);
            CHECK(a.trace.records[i].gamma_effective ==
                  doctest::Approx(b.trace.records[i].gamma_effective).epsilon(1e-12));
        }
    }
}

TEST_CASE("runs are deterministic") {
    const int t = 16;
    std::mt19937_64 rng(167);
    const SampleGrid f = testutil::random_grid(rng, 12, 10);
    RegionMask mask = testutil::random_mask(rng, 12, 10);
    const ExtrapolationConfig cfg =
        config_for(t, SelectionRule::max_weighted_portion, Compensation::constant_gamma, 0.2, 25);
    const auto a = spatial::run(f, mask, cfg, BasisKind::dft2d);
    const auto b = spatial::run(f, mask, cfg, BasisKind::dft2d);
    CHECK(a.model.samples == b.model.samples);
    REQUIRE(a.trace.records.size() == b.trace.records.size());
    for (size_t i = 0; i < a.trace.records.size(); ++i) {
        CHECK(a.trace.records[i].u == b.trace.records[i].u);
        CHECK(a.trace.records[i].c == b.trace.records[i].c);
        CHECK(a.trace.records[i].weighted_energy == b.trace.records[i].weighted_energy);
    }
}

TEST_CASE("a complete pass reproduces a fully supported window") {
    const int t = 4;
    std::mt19937_64 rng(173);
    const RegionMask mask = testutil::all_support(t, t);
    const WeightField w = testutil::uniform_weight(mask);
    const SampleGrid f = testutil::random_grid(rng, t, t);
    const double e0 = oracle::weighted_energy(f, w);

    for (BasisKind kind : {BasisKind::dct2d, BasisKind::dft2d}) {
        const BasisSet basis(kind, t);
        spatial::ModelState st = spatial::init_state(f, mask);
        const ExtrapolationConfig cfg =
            config_for(t, SelectionRule::min_distance, Compensation::none, 1.0, t * t);
        for (int i = 0; i < t * t; ++i)
            if (!spatial::step(st, cfg, basis, w)) break;
        CHECK(oracle::weighted_energy(st.residual, w) < 1e-8 * e0);
    }
}

TEST_CASE("a zero signal converges before the first selection") {
    const int t = 4;
    const BasisSet basis(BasisKind::dft2d, t);
    const RegionMask mask = testutil::all_support(t, t);
    const WeightField w = testutil::uniform_weight(mask);
    spatial::ModelState st = spatial::init_state(SampleGrid(t, t, 0.0), mask);
    const ExtrapolationConfig cfg =
        config_for(t, SelectionRule::min_distance, Compensation::none, 1.0, 5);
    CHECK(!spatial::step(st, cfg, basis, w));
    CHECK(st.converged);
    CHECK(st.trace.converged);
    CHECK(st.trace.records.empty());
    CHECK(st.nu == 0);
    CHECK(!spatial::step(st, cfg, basis, w));
}

TEST_CASE("config validation rejects out-of-range values") {
    ExtrapolationConfig cfg;
    cfg.iterations = -1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.rho_hat = 1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.compensation = Compensation::constant_gamma;
    cfg.gamma = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.gamma = 1.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.compensation = Compensation::none;
    cfg.gamma = 5.0;
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("trace csv lists one row per update with a fingerprint comment") {
    const int t = 8;
    std::mt19937_64 rng(179);
    const SampleGrid f = testutil::random_grid(rng, t, t);
    const RegionMask mask = testutil::random_mask(rng, t, t);
    const auto res = spatial::run(
        f, mask, config_for(t, SelectionRule::max_weighted_portion, Compensation::constant_gamma, 0.2, 6),
        BasisKind::dft2d);

    std::ostringstream os;
    res.trace.write_csv(os, "config: unit=1");
    const std::string text = os.str();
    CHECK(text.rfind("# config: unit=1\n", 0) == 0);
    CHECK(text.find("nu,u_k1,u_k2,p_abs,c_abs,gamma_effective,weighted_energy\n") !=
          std::string::npos);
    size_t rows = 0;
    for (char ch : text)
        if (ch == '\n') ++rows;
    CHECK(rows == 2 + res.trace.records.size());

    std::ostringstream again;
    res.trace.write_csv(again, "config: unit=1");
    CHECK(again.str() == text);
}
