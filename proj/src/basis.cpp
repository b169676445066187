#include "fse/basis.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fse/transform.hpp"

namespace fse {

BasisSet::BasisSet(BasisKind kind, int transform_size) : kind_(kind), t_(transform_size) {
    if (transform_size < 1) throw std::invalid_argument("BasisSet: transform size must be >= 1");
    if (kind_ == BasisKind::dft2d) {
        conj_twiddle_.resize(t_);
        for (int i = 0; i < t_; ++i) {
            const double ang = -2.0 * std::numbers::pi * i / t_;
            conj_twiddle_[i] = {std::cos(ang), std::sin(ang)};
        }
    } else {
        cosine_.resize(static_cast<size_t>(t_) * t_);
        const double a0 = std::sqrt(1.0 / t_);
        const double ak = std::sqrt(2.0 / t_);
        for (int k = 0; k < t_; ++k)
            for (int m = 0; m < t_; ++m)
                cosine_[static_cast<size_t>(k) * t_ + m] =
                    (k == 0 ? a0 : ak) * std::cos(std::numbers::pi * (2 * m + 1) * k / (2.0 * t_));
    }
}

std::complex<double> BasisSet::value(Index k, int m, int n) const {
    if (kind_ == BasisKind::dft2d) {
        const int idx = static_cast<int>((static_cast<long long>(k.k1) * m +
                                          static_cast<long long>(k.k2) * n) % t_);
        return std::conj(conj_twiddle_[idx]);
    }
    return {dct_axis(k.k1, m) * dct_axis(k.k2, n), 0.0};
}

Index BasisSet::conj_partner(Index k) const {
    if (kind_ == BasisKind::dct2d) return k;
    return {(t_ - k.k1) % t_, (t_ - k.k2) % t_};
}

bool BasisSet::canonical(Index k) const {
    const Index p = conj_partner(k);
    return static_cast<long long>(k.k1) * t_ + k.k2 <= static_cast<long long>(p.k1) * t_ + p.k2;
}

std::vector<Index> full_index_list(int transform_size) {
    std::vector<Index> out;
    out.reserve(static_cast<size_t>(transform_size) * transform_size);
    for (int k1 = 0; k1 < transform_size; ++k1)
        for (int k2 = 0; k2 < transform_size; ++k2) out.push_back({k1, k2});
    return out;
}

CoeffGrid decompose(const SampleGrid& signal, const BasisSet& basis) {
    const int t = basis.transform_size();
    if (signal.height > t || signal.width > t)
        throw std::invalid_argument("decompose: signal exceeds the transform grid");

    CoeffGrid out(t);
    if (basis.kind() == BasisKind::dft2d) {
        std::vector<std::complex<double>> in(static_cast<size_t>(t) * t);
        for (int r = 0; r < signal.height; ++r)
            for (int c = 0; c < signal.width; ++c)
                in[static_cast<size_t>(r) * t + c] = signal.at(r, c);
        dft2d_forward(t, in.data(), out.c.data());
        return out;
    }

    // Separable type-II DCT of the zero-padded signal.
    std::vector<double> tmp(static_cast<size_t>(t) * signal.width, 0.0);
    for (int k1 = 0; k1 < t; ++k1)
        for (int c = 0; c < signal.width; ++c) {
            double acc = 0.0;
            for (int r = 0; r < signal.height; ++r) acc += basis.dct_axis(k1, r) * signal.at(r, c);
            tmp[static_cast<size_t>(k1) * signal.width + c] = acc;
        }
    for (int k1 = 0; k1 < t; ++k1)
        for (int k2 = 0; k2 < t; ++k2) {
            double acc = 0.0;
            for (int c = 0; c < signal.width; ++c)
                acc += tmp[static_cast<size_t>(k1) * signal.width + c] * basis.dct_axis(k2, c);
            out.at(k1, k2) = acc;
        }
    return out;
}

SampleGrid synthesize(const CoeffGrid& coeffs, const BasisSet& basis, double* max_imag) {
    const int t = basis.transform_size();
    if (coeffs.t != t) throw std::invalid_argument("synthesize: coefficient grid size mismatch");

    SampleGrid out;
    out.width = t;
    out.height = t;
    out.samples.assign(static_cast<size_t>(t) * t, 0.0);

    if (basis.kind() == BasisKind::dft2d) {
        std::vector<std::complex<double>> full(static_cast<size_t>(t) * t);
        dft2d_inverse(t, coeffs.c.data(), full.data());
        const double scale = 1.0 / (static_cast<double>(t) * t);
        double worst = 0.0;
        for (size_t i = 0; i < full.size(); ++i) {
            const std::complex<double> v = full[i] * scale;
            worst = std::max(worst, std::abs(v.imag()));
            out.samples[i] = v.real();
        }
        if (max_imag) *max_imag = worst;
        return out;
    }

    std::vector<double> tmp(static_cast<size_t>(t) * t, 0.0);
    for (int k1 = 0; k1 < t; ++k1)
        for (int n = 0; n < t; ++n) {
            double acc = 0.0;
            for (int k2 = 0; k2 < t; ++k2) acc += coeffs.at(k1, k2).real() * basis.dct_axis(k2, n);
            tmp[static_cast<size_t>(k1) * t + n] = acc;
        }
    for (int m = 0; m < t; ++m)
        for (int n = 0; n < t; ++n) {
            double acc = 0.0;
            for (int k1 = 0; k1 < t; ++k1) acc += basis.dct_axis(k1, m) * tmp[static_cast<size_t>(k1) * t + n];
            out.at(m, n) = acc;
        }
    if (max_imag) *max_imag = 0.0;
    return out;
}

GramMatrix build_gram(const BasisSet& basis, const WeightField& weight,
                      std::span<const Index> active) {
    const int t = basis.transform_size();
    if (weight.height > t || weight.width > t)
        throw std::invalid_argument("build_gram: weight field exceeds the transform grid");

    GramMatrix k;
    k.active.assign(active.begin(), active.end());
    const size_t order = k.active.size();
    k.entries.assign(order * order, {0.0, 0.0});

    for (int r = 0; r < weight.height; ++r)
        for (int c = 0; c < weight.width; ++c) {
            const double wv = weight.at(r, c);
            if (wv == 0.0) continue;
            std::vector<std::complex<double>> vals(order);
            for (size_t i = 0; i < order; ++i) vals[i] = basis.value(k.active[i], r, c);
            for (size_t u = 0; u < order; ++u) {
                const std::complex<double> lhs = wv * std::conj(vals[u]);
                for (size_t l = 0; l < order; ++l) k.entries[u * order + l] += lhs * vals[l];
            }
        }
    return k;
}

GramMatrix normalize_gram(const GramMatrix& k) {
    GramMatrix out = k;
    const size_t order = k.order();
    for (size_t u = 0; u < order; ++u) {
        const double diag = k.at(u, u).real();
        if (!(diag > 0.0))
            throw std::domain_error("normalize_gram: degenerate basis function on the support");
        for (size_t l = 0; l < order; ++l) out.entries[u * order + l] = k.at(u, l) / diag;
    }
    out.normalized = true;
    return out;
}

}  // namespace fse
