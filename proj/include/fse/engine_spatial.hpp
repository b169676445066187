#pragma once

#include <complex>
#include <map>
#include <optional>
#include <span>

#include "fse/basis.hpp"
#include "fse/grid.hpp"
#include "fse/trace.hpp"

namespace fse {

enum class SelectionRule { min_distance, max_weighted_portion };
enum class Compensation { none, constant_gamma, full_od };

struct ExtrapolationConfig {
    int iterations = 200;
    int transform_size = 64;
    double rho_hat = 0.8;
    SelectionRule selection = SelectionRule::min_distance;
    Compensation compensation = Compensation::constant_gamma;
    double gamma = 0.2;

    void validate() const;  // throws std::invalid_argument on out-of-range values
};

struct CompensationResult {
    std::complex<double> c;
    double gamma_effective = 1.0;
    bool degenerate = false;
};

// Direct-summation engine. Every operator is evaluated literally from its
// definition over the window samples; no fast transforms anywhere.
namespace spatial {

struct ModelState {
    std::map<int, std::complex<double>> coefficients;  // row-major index -> c
    SampleGrid residual;  // window-sized, zero outside the support
    int nu = 0;
    bool converged = false;
    double initial_energy = -1.0;  // captured on the first step
    double initial_max = -1.0;     // largest |correlation| on the first step
    Trace trace;
};

ModelState init_state(const SampleGrid& f, const RegionMask& mask);

// sum w * r * conj(phi_k) / sum w * |phi_k|^2 for a single index.
std::complex<double> project_coefficient(const SampleGrid& residual, const WeightField& weight,
                                         const BasisSet& basis, Index k);

// Correlations num[k] = sum w * r * conj(phi_k) for every active index.
std::vector<std::complex<double>> weighted_residual_coeffs(const SampleGrid& residual,
                                                           const WeightField& weight,
                                                           const BasisSet& basis,
                                                           std::span<const Index> active);

// Norms sum w * |phi_k|^2 per active index.
std::vector<double> weighted_basis_norms(const WeightField& weight, const BasisSet& basis,
                                         std::span<const Index> active);

// Largest |num[k]|, the biggest portion of the weighted residual. Returns
// nullopt when every correlation vanishes (the residual is orthogonal to the
// whole set). For complex sets only canonical pair representatives compete;
// ties resolve to the lowest row-major index.
std::optional<size_t> select_max_portion(std::span<const std::complex<double>> num,
                                         const BasisSet& basis, std::span<const Index> active);

// Distance-minimizing selection: argmax of |num[k]|^2 / norm[k], the weighted
// error removed by an exact single-function update. Coincides with
// select_max_portion whenever the weighted norms are k-independent (DFT).
size_t select_min_distance(std::span<const std::complex<double>> num,
                           std::span<const double> norms, const BasisSet& basis,
                           std::span<const Index> active);
size_t select_min_distance(const SampleGrid& residual, const WeightField& weight,
                           const BasisSet& basis, std::span<const Index> active);

CompensationResult compensate_constant(std::complex<double> p_u, double gamma);

// Interference-aware estimate from the full projection vector and the
// normalized scalar-product row khat_row[l] = K[u,l] / K[u,u]. The damping
// magnitude is capped at 1; a vanishing denominator (|sum| below
// 1e-12 * |p_u|) falls back to c = p_u and sets the degenerate flag.
CompensationResult compensate_full(std::span<const std::complex<double>> p, size_t u,
                                   std::span<const std::complex<double>> khat_row);
CompensationResult compensate_full(std::span<const std::complex<double>> p, size_t u,
                                   const GramMatrix& k_hat);

// One selection + model update. Returns false once converged (state is then
// left untouched).
bool step(ModelState& state, const ExtrapolationConfig& config, const BasisSet& basis,
          const WeightField& weight);

struct RunResult {
    SampleGrid model;  // parametric model evaluated over the window
    Trace trace;
};

RunResult run(const SampleGrid& f, const RegionMask& mask, const ExtrapolationConfig& config,
              BasisKind kind = BasisKind::dft2d);

}  // namespace spatial
}  // namespace fse
