#pragma once

#include <complex>
#include <span>
#include <vector>

#include "fse/grid.hpp"

namespace fse {

// 2D frequency index into a T x T function family.
struct Index {
    int k1 = 0;
    int k2 = 0;
    friend bool operator==(const Index&, const Index&) = default;
};

enum class BasisKind { dft2d, dct2d };

// Indexed family of T^2 basis functions over the T x T grid. The DFT set is
// complex exponentials exp(+j*2*pi*(k1*m + k2*n)/T); the DCT set is the
// orthonormal type-II cosine family. Values are table-driven.
class BasisSet {
  public:
    BasisSet(BasisKind kind, int transform_size);

    BasisKind kind() const { return kind_; }
    int transform_size() const { return t_; }
    bool real_valued() const { return kind_ == BasisKind::dct2d; }

    std::complex<double> value(Index k, int m, int n) const;

    // Index whose function is the complex conjugate of k's. Real sets are
    // their own partners.
    Index conj_partner(Index k) const;
    bool self_conjugate(Index k) const { return conj_partner(k) == k; }
    // True for the representative of each conjugate pair (row-major order).
    bool canonical(Index k) const;

    // Axis table access for separable evaluation (DCT only).
    double dct_axis(int k, int m) const { return cosine_[static_cast<size_t>(k) * t_ + m]; }
    // e^{-j*2*pi*t/T}, the conjugate twiddle (DFT only).
    std::complex<double> conj_twiddle(int t) const { return conj_twiddle_[t]; }

  private:
    BasisKind kind_;
    int t_;
    std::vector<std::complex<double>> conj_twiddle_;
    std::vector<double> cosine_;
};

std::vector<Index> full_index_list(int transform_size);

// Coefficient vector of a T x T decomposition, row-major over (k1, k2).
struct CoeffGrid {
    int t = 0;
    std::vector<std::complex<double>> c;

    CoeffGrid() = default;
    explicit CoeffGrid(int transform_size)
        : t(transform_size), c(static_cast<size_t>(transform_size) * transform_size) {}

    std::complex<double>& at(int k1, int k2) { return c[static_cast<size_t>(k1) * t + k2]; }
    std::complex<double> at(int k1, int k2) const { return c[static_cast<size_t>(k1) * t + k2]; }
};

// Transform of a signal embedded at offset (0,0) of the T x T grid and
// zero-padded. DFT: unnormalized, negative exponent. DCT: orthonormal.
CoeffGrid decompose(const SampleGrid& signal, const BasisSet& basis);

// Inverse of decompose over the full T x T grid. For the DFT the imaginary
// part is discarded after optionally reporting its maximum magnitude.
SampleGrid synthesize(const CoeffGrid& coeffs, const BasisSet& basis,
                      double* max_imag = nullptr);

// Weighted scalar products K[u,l] = sum_w w * phi_l * conj(phi_u) over an
// active index list. Hermitian; entries are row-major order x order.
struct GramMatrix {
    std::vector<Index> active;
    std::vector<std::complex<double>> entries;
    bool normalized = false;

    size_t order() const { return active.size(); }
    std::complex<double> at(size_t u, size_t l) const { return entries[u * order() + l]; }
    std::span<const std::complex<double>> row(size_t u) const {
        return {entries.data() + u * order(), order()};
    }
};

GramMatrix build_gram(const BasisSet& basis, const WeightField& weight,
                      std::span<const Index> active);

// K_hat = diag(diag(K))^-1 * K; requires strictly positive diagonal.
GramMatrix normalize_gram(const GramMatrix& k);

}  // namespace fse
