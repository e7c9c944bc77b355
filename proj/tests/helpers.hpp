#pragma once

#include <complex>
#include <random>
#include <vector>

#include "diqkd/complex_matrix.hpp"
#include "diqkd/qmat.hpp"
#include "diqkd/reduction.hpp"

namespace test_helpers {

using diqkd::qmat::cplx;
using diqkd::qmat::Matrix;

inline Matrix random_gaussian_matrix(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix m(dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) m(i, j) = cplx(gauss(rng), gauss(rng));
    return m;
}

inline Matrix random_hermitian(int dim, std::mt19937_64& rng) {
    const Matrix g = random_gaussian_matrix(dim, rng);
    Matrix h = g + g.adjoint();
    h *= cplx(0.5, 0.0);
    return h;
}

/// Haar-ish random unitary via modified Gram-Schmidt on a Gaussian matrix.
inline Matrix random_unitary(int dim, std::mt19937_64& rng) {
    Matrix g = random_gaussian_matrix(dim, rng);
    for (int k = 0; k < dim; ++k) {
        for (int prev = 0; prev < k; ++prev) {
            cplx overlap(0.0, 0.0);
            for (int i = 0; i < dim; ++i) overlap += std::conj(g(i, prev)) * g(i, k);
            for (int i = 0; i < dim; ++i) g(i, k) -= overlap * g(i, prev);
        }
        double n2 = 0.0;
        for (int i = 0; i < dim; ++i) n2 += std::norm(g(i, k));
        const double inv = 1.0 / std::sqrt(n2);
        for (int i = 0; i < dim; ++i) g(i, k) *= inv;
    }
    return g;
}

/// Full-rank random state rho = G G^dagger / tr.
inline diqkd::qmat::DensityMatrix random_density(int dim, std::mt19937_64& rng) {
    const Matrix g = random_gaussian_matrix(dim, rng);
    Matrix m = g * g.adjoint();
    m *= cplx(1.0 / m.trace().real(), 0.0);
    return diqkd::qmat::DensityMatrix(std::move(m));
}

inline diqkd::qmat::PureState random_pure(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<cplx> amps(static_cast<std::size_t>(dim));
    double n2 = 0.0;
    for (cplx& z : amps) {
        z = cplx(gauss(rng), gauss(rng));
        n2 += std::norm(z);
    }
    const double inv = 1.0 / std::sqrt(n2);
    for (cplx& z : amps) z *= inv;
    return diqkd::qmat::PureState(std::move(amps));
}

inline diqkd::qmat::BellDiagonalSpectrum random_spectrum(std::mt19937_64& rng) {
    std::exponential_distribution<double> expo(1.0);
    std::array<double, 4> raw{};
    double total = 0.0;
    for (double& x : raw) {
        x = expo(rng);
        total += x;
    }
    return diqkd::qmat::BellDiagonalSpectrum(raw[0] / total, raw[1] / total, raw[2] / total,
                                             raw[3] / total);
}

/// Direct sum of planted blocks conjugated by a (given) unitary. Each rank-2
/// entry theta plants a block with the first observable sigma_z and the second
/// cos(theta) sigma_z + sin(theta) sigma_x; each rank-1 entry plants the pair
/// of deterministic outcomes.
struct PlantedPair {
    Matrix a1;
    Matrix a2;
};

inline PlantedPair plant_observables(int dim, const std::vector<double>& thetas,
                                     const std::vector<std::pair<int, int>>& scalars,
                                     const Matrix& frame) {
    Matrix a1(dim);
    Matrix a2(dim);
    int offset = 0;
    for (double theta : thetas) {
        a1(offset, offset) = 1.0;
        a1(offset + 1, offset + 1) = -1.0;
        a2(offset, offset) = std::cos(theta);
        a2(offset, offset + 1) = std::sin(theta);
        a2(offset + 1, offset) = std::sin(theta);
        a2(offset + 1, offset + 1) = -std::cos(theta);
        offset += 2;
    }
    for (const auto& [s1, s2] : scalars) {
        a1(offset, offset) = s1;
        a2(offset, offset) = s2;
        ++offset;
    }
    if (offset != dim) throw diqkd::DimensionError("planted blocks do not fill the space");
    return PlantedPair{frame * a1 * frame.adjoint(), frame * a2 * frame.adjoint()};
}

}  // namespace test_helpers
