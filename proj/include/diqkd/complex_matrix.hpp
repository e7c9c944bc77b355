#pragma once

#include <complex>
#include <span>
#include <vector>

#include "diqkd/errors.hpp"

namespace diqkd::qmat {

using cplx = std::complex<double>;

/// Dense complex square matrix, row-major. This is the only matrix type the
/// library needs: every operator here lives on a space of dimension <= 256
/// (single systems up to d = 16, joint systems up to 16 x 16), so a flat
/// vector with O(d^3) algorithms is both simplest and fast enough.
class Matrix {
public:
    Matrix() = default;

    /// Zero matrix of the given dimension.
    explicit Matrix(int dim);

    /// From row-major entries; entries.size() must equal dim*dim.
    Matrix(int dim, std::vector<cplx> entries);

    static Matrix identity(int dim);
    static Matrix diagonal(std::span<const double> values);

    int dim() const { return dim_; }

    cplx& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * dim_ + j]; }
    const cplx& operator()(int i, int j) const {
        return a_[static_cast<std::size_t>(i) * dim_ + j];
    }

    const std::vector<cplx>& data() const { return a_; }

    Matrix adjoint() const;
    Matrix conjugate() const;
    Matrix transpose() const;

    cplx trace() const;
    double frobenius_norm() const;
    double max_abs() const;

    /// max_ij |a(i,j) - conj(a(j,i))|
    double hermiticity_defect() const;
    bool is_hermitian(double tol) const { return hermiticity_defect() <= tol; }

    /// Matrix-vector product.
    std::vector<cplx> apply(std::span<const cplx> v) const;

    Matrix& operator+=(const Matrix& rhs);
    Matrix& operator-=(const Matrix& rhs);
    Matrix& operator*=(cplx s);

    friend Matrix operator+(Matrix lhs, const Matrix& rhs) { return lhs += rhs; }
    friend Matrix operator-(Matrix lhs, const Matrix& rhs) { return lhs -= rhs; }
    friend Matrix operator*(Matrix lhs, cplx s) { return lhs *= s; }
    friend Matrix operator*(cplx s, Matrix rhs) { return rhs *= s; }
    friend Matrix operator*(Matrix lhs, double s) { return lhs *= cplx(s, 0.0); }
    friend Matrix operator*(double s, Matrix rhs) { return rhs *= cplx(s, 0.0); }
    friend Matrix operator*(const Matrix& lhs, const Matrix& rhs);

private:
    int dim_ = 0;
    std::vector<cplx> a_;
};

/// Frobenius distance ||a - b||_F.
double frobenius_distance(const Matrix& a, const Matrix& b);

/// Tensor (Kronecker) product; the first factor is the most significant
/// subsystem, i.e. kron(a, b)(i_a*db + i_b, j_a*db + j_b) = a(i_a,j_a) b(i_b,j_b).
Matrix kron(const Matrix& a, const Matrix& b);

/// Eigendecomposition of a Hermitian matrix.
struct EighResult {
    std::vector<double> eigenvalues;  // sorted descending
    Matrix eigenvectors;              // orthonormal columns, matching order
};

/// Cyclic Jacobi diagonalization for complex Hermitian matrices. Chosen over
/// heavier factorizations because every matrix here is tiny (d <= 256) and the
/// orthogonality of the result is directly testable.
///
/// Throws NotHermitianError if the input's hermiticity defect exceeds
/// hermitian_tol, ConvergenceError if the sweep budget is exhausted.
EighResult eigh(const Matrix& op, double hermitian_tol = 1e-10);

}  // namespace diqkd::qmat
