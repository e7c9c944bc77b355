#include "diqkd/complex_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace diqkd::qmat {

Matrix::Matrix(int dim) : dim_(dim) {
    if (dim < 1) {
        throw DimensionError("matrix dimension must be >= 1, got " + std::to_string(dim));
    }
    a_.assign(static_cast<std::size_t>(dim) * dim, cplx(0.0, 0.0));
}

Matrix::Matrix(int dim, std::vector<cplx> entries) : dim_(dim), a_(std::move(entries)) {
    if (dim < 1) {
        throw DimensionError("matrix dimension must be >= 1, got " + std::to_string(dim));
    }
    if (a_.size() != static_cast<std::size_t>(dim) * dim) {
        throw DimensionError("entry count does not match dim*dim");
    }
}

Matrix Matrix::identity(int dim) {
    Matrix m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(std::span<const double> values) {
    Matrix m(static_cast<int>(values.size()));
    for (int i = 0; i < m.dim(); ++i) m(i, i) = values[static_cast<std::size_t>(i)];
    return m;
}

Matrix Matrix::adjoint() const {
    Matrix r(dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) r(i, j) = std::conj((*this)(j, i));
    return r;
}

Matrix Matrix::conjugate() const {
    Matrix r(dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) r(i, j) = std::conj((*this)(i, j));
    return r;
}

Matrix Matrix::transpose() const {
    Matrix r(dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) r(i, j) = (*this)(j, i);
    return r;
}

cplx Matrix::trace() const {
    cplx t(0.0, 0.0);
    for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
}

double Matrix::frobenius_norm() const {
    double s = 0.0;
    for (const cplx& z : a_) s += std::norm(z);
    return std::sqrt(s);
}

double Matrix::max_abs() const {
    double m = 0.0;
    for (const cplx& z : a_) m = std::max(m, std::abs(z));
    return m;
}

double Matrix::hermiticity_defect() const {
    double d = 0.0;
    for (int i = 0; i < dim_; ++i)
        for (int j = i; j < dim_; ++j)
            d = std::max(d, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return d;
}

std::vector<cplx> Matrix::apply(std::span<const cplx> v) const {
    if (static_cast<int>(v.size()) != dim_) {
        throw DimensionError("vector length does not match matrix dimension");
    }
    std::vector<cplx> out(static_cast<std::size_t>(dim_), cplx(0.0, 0.0));
    for (int i = 0; i < dim_; ++i) {
        cplx acc(0.0, 0.0);
        for (int j = 0; j < dim_; ++j) acc += (*this)(i, j) * v[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

Matrix& Matrix::operator+=(const Matrix& rhs) {
    if (dim_ != rhs.dim_) throw DimensionError("matrix dimensions differ in +");
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += rhs.a_[k];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& rhs) {
    if (dim_ != rhs.dim_) throw DimensionError("matrix dimensions differ in -");
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= rhs.a_[k];
    return *this;
}

Matrix& Matrix::operator*=(cplx s) {
    for (cplx& z : a_) z *= s;
    return *this;
}

Matrix operator*(const Matrix& lhs, const Matrix& rhs) {
    if (lhs.dim_ != rhs.dim_) throw DimensionError("matrix dimensions differ in *");
    const int n = lhs.dim_;
    Matrix r(n);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            const cplx lik = lhs(i, k);
            if (lik == cplx(0.0, 0.0)) continue;
            for (int j = 0; j < n; ++j) r(i, j) += lik * rhs(k, j);
        }
    }
    return r;
}

double frobenius_distance(const Matrix& a, const Matrix& b) {
    Matrix d = a;
    d -= b;
    return d.frobenius_norm();
}

Matrix kron(const Matrix& a, const Matrix& b) {
    const int da = a.dim();
    const int db = b.dim();
    Matrix r(da * db);
    for (int ia = 0; ia < da; ++ia)
        for (int ja = 0; ja < da; ++ja) {
            const cplx aij = a(ia, ja);
            if (aij == cplx(0.0, 0.0)) continue;
            for (int ib = 0; ib < db; ++ib)
                for (int jb = 0; jb < db; ++jb)
                    r(ia * db + ib, ja * db + jb) = aij * b(ib, jb);
        }
    return r;
}

namespace {

double offdiagonal_norm(const Matrix& a) {
    double s = 0.0;
    const int n = a.dim();
    for (int p = 0; p < n; ++p)
        for (int q = p + 1; q < n; ++q) s += std::norm(a(p, q));
    return std::sqrt(2.0 * s);
}

}  // namespace

EighResult eigh(const Matrix& op, double hermitian_tol) {
    if (op.hermiticity_defect() > hermitian_tol) {
        throw NotHermitianError("eigh: input is not Hermitian within tolerance");
    }
    const int n = op.dim();

    // Work on the exactly-Hermitian part; the defect is below tolerance anyway.
    Matrix a(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = 0.5 * (op(i, j) + std::conj(op(j, i)));
    Matrix v = Matrix::identity(n);

    const double scale = std::max(1.0, a.max_abs());
    const double stop = 1e-15 * scale * n;
    constexpr int kMaxSweeps = 60;

    int sweep = 0;
    for (; sweep < kMaxSweeps; ++sweep) {
        if (offdiagonal_norm(a) <= stop) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const cplx apq = a(p, q);
                const double abs_apq = std::abs(apq);
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                if (abs_apq <= 1e-18 * (std::abs(app) + std::abs(aqq) + 1e-300)) {
                    a(p, q) = cplx(0.0, 0.0);
                    a(q, p) = cplx(0.0, 0.0);
                    continue;
                }
                // Unitary on the (p,q) plane that zeroes a(p,q): a phase to make
                // the pivot real, then a real Jacobi rotation.
                const cplx phase = apq / abs_apq;  // e^{i arg apq}
                const double tau = (aqq - app) / (2.0 * abs_apq);
                // smaller-magnitude root of t^2 - 2 tau t - 1 = 0
                const double t =
                    (tau >= 0.0 ? -1.0 : 1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const cplx s_col = s * std::conj(phase);

                for (int i = 0; i < n; ++i) {
                    const cplx aip = a(i, p);
                    const cplx aiq = a(i, q);
                    a(i, p) = c * aip + s_col * aiq;
                    a(i, q) = -s * aip + c * std::conj(phase) * aiq;
                }
                for (int j = 0; j < n; ++j) {
                    const cplx apj = a(p, j);
                    const cplx aqj = a(q, j);
                    a(p, j) = c * apj + s * phase * aqj;
                    a(q, j) = -s * apj + c * phase * aqj;
                }
                a(p, q) = cplx(0.0, 0.0);
                a(q, p) = cplx(0.0, 0.0);
                for (int i = 0; i < n; ++i) {
                    const cplx vip = v(i, p);
                    const cplx viq = v(i, q);
                    v(i, p) = c * vip + s_col * viq;
                    v(i, q) = -s * vip + c * std::conj(phase) * viq;
                }
            }
        }
    }
    if (sweep == kMaxSweeps && offdiagonal_norm(a) > stop * 100.0) {
        throw ConvergenceError("eigh: Jacobi sweeps did not converge");
    }

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&a](int x, int y) { return a(x, x).real() > a(y, y).real(); });

    EighResult result;
    result.eigenvalues.resize(static_cast<std::size_t>(n));
    result.eigenvectors = Matrix(n);
    for (int k = 0; k < n; ++k) {
        const int src = order[static_cast<std::size_t>(k)];
        result.eigenvalues[static_cast<std::size_t>(k)] = a(src, src).real();
        for (int i = 0; i < n; ++i) result.eigenvectors(i, k) = v(i, src);
    }
    return result;
}

}  // namespace diqkd::qmat
