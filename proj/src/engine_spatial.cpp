#include "fse/engine_spatial.hpp"

#include <cmath>
#include <stdexcept>

namespace fse {

void ExtrapolationConfig::validate() const {
    if (iterations < 0) throw std::invalid_argument("config: iterations must be >= 0");
    if (transform_size < 1) throw std::invalid_argument("config: transform size must be >= 1");
    if (!(rho_hat > 0.0) || !(rho_hat < 1.0))
        throw std::invalid_argument("config: rho_hat must lie in (0, 1)");
    if (compensation == Compensation::constant_gamma && (!(gamma > 0.0) || gamma > 1.0))
        throw std::invalid_argument("config: gamma must lie in (0, 1]");
}

namespace spatial {

namespace {

struct SupportList {
    std::vector<int> m, n;
    std::vector<double> w;
    size_t size() const { return w.size(); }
};

SupportList collect_support(const WeightField& weight) {
    SupportList s;
    for (int r = 0; r < weight.height; ++r)
        for (int c = 0; c < weight.width; ++c) {
            const double wv = weight.at(r, c);
            if (wv == 0.0) continue;
            s.m.push_back(r);
            s.n.push_back(c);
            s.w.push_back(wv);
        }
    return s;
}

// All-k correlations out[k] = sum_s z_s * exp(-j*2*pi*(k1*m_s + k2*n_s)/T),
// reorganized into per-axis factors so the inner loop is a plain dot product.
// Still a literal summation over the samples.
std::vector<std::complex<double>> dft_correlations(const BasisSet& basis, const SupportList& sup,
                                                   std::span<const std::complex<double>> z) {
    const int t = basis.transform_size();
    const size_t s = sup.size();
    std::vector<std::complex<double>> out(static_cast<size_t>(t) * t);

    std::vector<std::complex<double>> col(static_cast<size_t>(t) * s);
    for (int k2 = 0; k2 < t; ++k2)
        for (size_t i = 0; i < s; ++i)
            col[static_cast<size_t>(k2) * s + i] = basis.conj_twiddle((k2 * sup.n[i]) % t);

    std::vector<std::complex<double>> tmp(s);
    for (int k1 = 0; k1 < t; ++k1) {
        for (size_t i = 0; i < s; ++i) tmp[i] = z[i] * basis.conj_twiddle((k1 * sup.m[i]) % t);
        for (int k2 = 0; k2 < t; ++k2) {
            const std::complex<double>* c = col.data() + static_cast<size_t>(k2) * s;
            std::complex<double> acc{0.0, 0.0};
            for (size_t i = 0; i < s; ++i) acc += tmp[i] * c[i];
            out[static_cast<size_t>(k1) * t + k2] = acc;
        }
    }
    return out;
}

std::complex<double> correlation_single(const SupportList& sup,
                                        std::span<const std::complex<double>> z,
                                        const BasisSet& basis, Index k) {
    std::complex<double> acc{0.0, 0.0};
    for (size_t i = 0; i < sup.size(); ++i)
        acc += z[i] * std::conj(basis.value(k, sup.m[i], sup.n[i]));
    return acc;
}

bool is_full_list(std::span<const Index> active, int t) {
    if (active.size() != static_cast<size_t>(t) * t) return false;
    for (size_t i = 0; i < active.size(); ++i)
        if (active[i].k1 != static_cast<int>(i) / t || active[i].k2 != static_cast<int>(i) % t)
            return false;
    return true;
}

std::vector<std::complex<double>> correlations(const SupportList& sup,
                                               std::span<const std::complex<double>> z,
                                               const BasisSet& basis,
                                               std::span<const Index> active) {
    const int t = basis.transform_size();
    if (basis.kind() == BasisKind::dft2d && is_full_list(active, t))
        return dft_correlations(basis, sup, z);
    std::vector<std::complex<double>> out(active.size());
    for (size_t i = 0; i < active.size(); ++i) out[i] = correlation_single(sup, z, basis, active[i]);
    return out;
}

double weighted_energy_of(const SampleGrid& residual, const WeightField& weight) {
    double e = 0.0;
    for (int r = 0; r < residual.height; ++r)
        for (int c = 0; c < residual.width; ++c) {
            const double v = residual.at(r, c);
            e += weight.at(r, c) * v * v;
        }
    return e;
}

void check_window(const SampleGrid& g, const WeightField& w, const BasisSet& basis) {
    if (g.height != w.height || g.width != w.width)
        throw std::invalid_argument("engine: residual and weight shapes differ");
    if (g.height > basis.transform_size() || g.width > basis.transform_size())
        throw std::invalid_argument("engine: window exceeds the transform grid");
}

}  // namespace

ModelState init_state(const SampleGrid& f, const RegionMask& mask) {
    if (f.height != mask.height || f.width != mask.width)
        throw std::invalid_argument("init_state: signal and mask shapes differ");
    ModelState st;
    st.residual = f;
    for (int r = 0; r < f.height; ++r)
        for (int c = 0; c < f.width; ++c)
            if (mask.at(r, c) != Region::support) st.residual.at(r, c) = 0.0;
    return st;
}

std::complex<double> project_coefficient(const SampleGrid& residual, const WeightField& weight,
                                         const BasisSet& basis, Index k) {
    check_window(residual, weight, basis);
    std::complex<double> num{0.0, 0.0};
    double den = 0.0;
    for (int r = 0; r < residual.height; ++r)
        for (int c = 0; c < residual.width; ++c) {
            const double wv = weight.at(r, c);
            if (wv == 0.0) continue;
            const std::complex<double> phi = basis.value(k, r, c);
            num += wv * residual.at(r, c) * std::conj(phi);
            den += wv * std::norm(phi);
        }
    if (!(den > 0.0))
        throw std::domain_error("project_coefficient: basis function vanishes on the support");
    return num / den;
}

std::vector<std::complex<double>> weighted_residual_coeffs(const SampleGrid& residual,
                                                           const WeightField& weight,
                                                           const BasisSet& basis,
                                                           std::span<const Index> active) {
    check_window(residual, weight, basis);
    const SupportList sup = collect_support(weight);
    std::vector<std::complex<double>> z(sup.size());
    for (size_t i = 0; i < sup.size(); ++i) z[i] = sup.w[i] * residual.at(sup.m[i], sup.n[i]);
    return correlations(sup, z, basis, active);
}

std::vector<double> weighted_basis_norms(const WeightField& weight, const BasisSet& basis,
                                         std::span<const Index> active) {
    std::vector<double> out(active.size());
    if (basis.kind() == BasisKind::dft2d) {
        const double total = weight.sum();  // |phi| == 1 everywhere
        for (double& v : out) v = total;
        return out;
    }
    const SupportList sup = collect_support(weight);
    for (size_t i = 0; i < active.size(); ++i) {
        double acc = 0.0;
        for (size_t s = 0; s < sup.size(); ++s)
            acc += sup.w[s] * std::norm(basis.value(active[i], sup.m[s], sup.n[s]));
        out[i] = acc;
    }
    return out;
}

std::optional<size_t> select_max_portion(std::span<const std::complex<double>> num,
                                         const BasisSet& basis, std::span<const Index> active) {
    if (num.size() != active.size())
        throw std::invalid_argument("select_max_portion: vector sizes differ");
    size_t best = active.size();
    double best_val = 0.0;
    for (size_t i = 0; i < active.size(); ++i) {
        if (!basis.canonical(active[i])) continue;
        const double mag = std::abs(num[i]);
        if (mag > best_val) {
            best_val = mag;
            best = i;
        }
    }
    if (best == active.size() || best_val == 0.0) return std::nullopt;
    return best;
}

size_t select_min_distance(std::span<const std::complex<double>> num,
                           std::span<const double> norms, const BasisSet& basis,
                           std::span<const Index> active) {
    if (num.size() != active.size() || norms.size() != active.size())
        throw std::invalid_argument("select_min_distance: vector sizes differ");
    size_t best = 0;
    double best_val = -1.0;
    for (size_t i = 0; i < active.size(); ++i) {
        if (!basis.canonical(active[i])) continue;
        if (!(norms[i] > 0.0)) continue;
        const double removed = std::norm(num[i]) / norms[i];
        if (removed > best_val) {
            best_val = removed;
            best = i;
        }
    }
    return best;
}

size_t select_min_distance(const SampleGrid& residual, const WeightField& weight,
                           const BasisSet& basis, std::span<const Index> active) {
    const auto num = weighted_residual_coeffs(residual, weight, basis, active);
    const auto norms = weighted_basis_norms(weight, basis, active);
    return select_min_distance(num, norms, basis, active);
}

CompensationResult compensate_constant(std::complex<double> p_u, double gamma) {
    if (!(gamma > 0.0) || gamma > 1.0)
        throw std::invalid_argument("compensate_constant: gamma must lie in (0, 1]");
    return {gamma * p_u, gamma, false};
}

CompensationResult compensate_full(std::span<const std::complex<double>> p, size_t u,
                                   std::span<const std::complex<double>> khat_row) {
    if (p.size() != khat_row.size())
        throw std::invalid_argument("compensate_full: vector sizes differ");
    if (u >= p.size()) throw std::invalid_argument("compensate_full: selected index out of range");

    std::complex<double> d{0.0, 0.0};
    for (size_t l = 0; l < p.size(); ++l) d += p[l] * khat_row[l];

    const double pu_mag = std::abs(p[u]);
    CompensationResult res;
    if (std::abs(d) < 1e-12 * pu_mag) {
        res.c = p[u];
        res.gamma_effective = 1.0;
        res.degenerate = true;
        return res;
    }
    res.gamma_effective = std::min(std::abs(p[u] / d), 1.0);
    res.c = res.gamma_effective * p[u];
    return res;
}

CompensationResult compensate_full(std::span<const std::complex<double>> p, size_t u,
                                   const GramMatrix& k_hat) {
    if (!k_hat.normalized)
        throw std::invalid_argument("compensate_full: matrix must be normalized (unit diagonal)");
    if (k_hat.order() != p.size())
        throw std::invalid_argument("compensate_full: matrix order and vector size differ");
    return compensate_full(p, u, k_hat.row(u));
}

bool step(ModelState& state, const ExtrapolationConfig& config, const BasisSet& basis,
          const WeightField& weight) {
    config.validate();
    if (state.converged) return false;
    check_window(state.residual, weight, basis);

    const int t = basis.transform_size();
    const std::vector<Index> active = full_index_list(t);
    const std::vector<std::complex<double>> num =
        weighted_residual_coeffs(state.residual, weight, basis, active);
    const std::vector<double> norms = weighted_basis_norms(weight, basis, active);
    const double energy = weighted_energy_of(state.residual, weight);

    double max_mag = 0.0;
    for (size_t i = 0; i < num.size(); ++i)
        if (basis.canonical(active[i])) max_mag = std::max(max_mag, std::abs(num[i]));

    if (state.initial_energy < 0.0) {
        state.initial_energy = energy;
        state.initial_max = max_mag;
    }
    if (state.initial_energy <= 0.0 || energy < 1e-12 * state.initial_energy ||
        max_mag <= 0.0 || max_mag < 1e-12 * state.initial_max) {
        state.converged = true;
        state.trace.converged = true;
        return false;
    }

    size_t u;
    if (config.selection == SelectionRule::max_weighted_portion) {
        const auto pick = select_max_portion(num, basis, active);
        if (!pick) {
            state.converged = true;
            state.trace.converged = true;
            return false;
        }
        u = *pick;
    } else {
        u = select_min_distance(num, norms, basis, active);
    }

    const Index uk = active[u];
    const std::complex<double> p_u = num[u] / norms[u];

    CompensationResult comp;
    switch (config.compensation) {
        case Compensation::none:
            comp = compensate_constant(p_u, 1.0);
            break;
        case Compensation::constant_gamma:
            comp = compensate_constant(p_u, config.gamma);
            break;
        case Compensation::full_od: {
            // K[u,l] = sum w * phi_l * conj(phi_u) = conj(sum w * phi_u * conj(phi_l)),
            // so one correlation pass with z = w * phi_u yields the whole row.
            const SupportList sup = collect_support(weight);
            std::vector<std::complex<double>> z(sup.size());
            for (size_t i = 0; i < sup.size(); ++i)
                z[i] = sup.w[i] * basis.value(uk, sup.m[i], sup.n[i]);
            const std::vector<std::complex<double>> row = correlations(sup, z, basis, active);
            std::vector<std::complex<double>> khat(row.size());
            std::vector<std::complex<double>> proj(row.size());
            for (size_t l = 0; l < row.size(); ++l) {
                khat[l] = std::conj(row[l]) / norms[u];
                proj[l] = norms[l] > 0.0 ? num[l] / norms[l] : std::complex<double>{0.0, 0.0};
            }
            comp = compensate_full(proj, u, khat);
            break;
        }
    }

    const bool paired = basis.kind() == BasisKind::dft2d && !basis.self_conjugate(uk);
    std::complex<double> c = comp.c;
    if (!paired) c = {c.real(), 0.0};

    const int key = uk.k1 * t + uk.k2;
    state.coefficients[key] += c;
    if (paired) {
        const Index vk = basis.conj_partner(uk);
        state.coefficients[vk.k1 * t + vk.k2] += std::conj(c);
    }

    for (int r = 0; r < state.residual.height; ++r)
        for (int col = 0; col < state.residual.width; ++col) {
            if (weight.at(r, col) == 0.0) continue;
            const std::complex<double> phi = basis.value(uk, r, col);
            state.residual.at(r, col) -=
                paired ? 2.0 * (c * phi).real() : c.real() * phi.real();
        }

    state.nu += 1;
    IterationRecord rec;
    rec.nu = state.nu;
    rec.u = uk;
    rec.p = p_u;
    rec.c = c;
    rec.gamma_effective = comp.gamma_effective;
    rec.weighted_energy = weighted_energy_of(state.residual, weight);
    rec.compensation_degenerate = comp.degenerate;
    state.trace.records.push_back(rec);
    return true;
}

RunResult run(const SampleGrid& f, const RegionMask& mask, const ExtrapolationConfig& config,
              BasisKind kind) {
    config.validate();
    const BasisSet basis(kind, config.transform_size);
    const WeightField weight = build_isotropic_weight(mask, config.rho_hat);
    ModelState state = init_state(f, mask);
    check_window(state.residual, weight, basis);

    for (int i = 0; i < config.iterations; ++i)
        if (!step(state, config, basis, weight)) break;

    SampleGrid model(f.width, f.height, 0.0);
    const int t = config.transform_size;
    for (const auto& [key, c] : state.coefficients) {
        const Index k{key / t, key % t};
        if (basis.kind() == BasisKind::dft2d && !basis.canonical(k)) continue;
        const bool paired = basis.kind() == BasisKind::dft2d && !basis.self_conjugate(k);
        for (int r = 0; r < f.height; ++r)
            for (int col = 0; col < f.width; ++col) {
                const std::complex<double> phi = basis.value(k, r, col);
                model.at(r, col) += paired ? 2.0 * (c * phi).real() : c.real() * phi.real();
            }
    }
    return {std::move(model), std::move(state.trace)};
}

}  // namespace spatial
}  // namespace fse
