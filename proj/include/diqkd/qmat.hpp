#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "diqkd/complex_matrix.hpp"
#include "diqkd/errors.hpp"

namespace diqkd::qmat {

/// Validation tolerance for Hermiticity / trace / involution checks.
inline constexpr double kValidationTol = 1e-10;
/// Construction-time clamping tolerance for probabilities and norms.
inline constexpr double kConstructTol = 1e-12;
/// Largest tolerated negative eigenvalue of a density matrix.
inline constexpr double kNegativityTol = 1e-10;

Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();

/// Normalized pure state on a d-dimensional space.
///
/// Subsystem ordering is fixed globally as A (x) B (x) E with the first factor
/// most significant: the amplitude of |i_A i_B i_E> sits at index
/// (i_A * d_B + i_B) * d_E + i_E.
class PureState {
public:
    /// Validates that the Euclidean norm is 1 within 1e-10, then renormalizes.
    explicit PureState(std::vector<cplx> amplitudes);

    int dim() const { return static_cast<int>(amps_.size()); }
    const std::vector<cplx>& amplitudes() const { return amps_; }

private:
    std::vector<cplx> amps_;
};

/// Positive unit-trace Hermitian operator.
///
/// Construction accepts inputs Hermitian within 1e-10 with trace within 1e-10
/// of one and smallest eigenvalue >= -1e-10, and repairs them: the stored
/// operator is exactly Hermitian and trace-normalized. Residual eigenvalue
/// negativity below 1e-10 is kept and clamped to zero wherever a spectrum is
/// consumed (entropy, purification).
class DensityMatrix {
public:
    explicit DensityMatrix(Matrix op);

    const Matrix& op() const { return op_; }
    int dim() const { return op_.dim(); }

private:
    Matrix op_;
};

DensityMatrix density(const PureState& psi);

/// Dichotomic qubit observable cos(angle) sigma_z + sin(angle) sigma_x.
struct PlanarMeasurement {
    double angle = 0.0;  // radians, normalized into [0, 2*pi)

    PlanarMeasurement() = default;
    explicit PlanarMeasurement(double phi);
};

/// The induced operator cos(angle) sigma_z + sin(angle) sigma_x.
Matrix observable(PlanarMeasurement m);

/// Eigenvectors of observable(m): column 0 for outcome +1, column 1 for -1.
std::array<std::array<cplx, 2>, 2> measurement_eigenvectors(PlanarMeasurement m);

/// Reduced state on the kept subsystems. `dims` lists the subsystem dimensions
/// (first factor most significant); `keep` lists the kept subsystem indices in
/// increasing order. Trace and positivity are preserved.
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> dims,
                            std::span<const int> keep);

/// Same index arithmetic on a raw operator; no normalization or validation.
Matrix partial_trace_matrix(const Matrix& m, std::span<const int> dims,
                            std::span<const int> keep);

/// h(p) = -p log2 p - (1-p) log2 (1-p), with h(0) = h(1) = 0.
/// p is clamped into [0,1] when within 1e-12 of it; farther values throw.
double binary_entropy(double p);

/// Shannon entropy in bits of a probability vector; entries within 1e-12
/// below zero are clamped, farther values throw.
double shannon_entropy(std::span<const double> probs);

/// Von Neumann entropy in bits; eigenvalues are clamped to [0, 1].
double von_neumann_entropy(const DensityMatrix& rho);

/// Canonical purification from the spectral decomposition: for rho with
/// eigenpairs (w_i, v_i), returns sum_i sqrt(w_i) |v_i>|i> on dim d*d, with the
/// purifying (environment) system as the second, least significant factor.
PureState purify(const DensityMatrix& rho);

/// Re tr[rho (A (x) B)] for subsystem operators A, B with
/// A.dim() * B.dim() == rho.dim(). Contracted directly, without forming the
/// Kronecker product.
double tensor_expectation(const DensityMatrix& rho, const Matrix& a, const Matrix& b);

struct CorrelatorResult {
    double ab;  // <A (x) B>
    double a;   // <A (x) I>
    double b;   // <I (x) B>
};

/// Correlator and marginals of two planar measurements on a two-qubit state.
CorrelatorResult correlator_full(const DensityMatrix& rho, PlanarMeasurement a,
                                 PlanarMeasurement b);
double correlator(const DensityMatrix& rho, PlanarMeasurement a, PlanarMeasurement b);

/// <a1 b1> + <a1 b2> + <a2 b1> - <a2 b2> on a two-qubit state.
double chsh_value(const DensityMatrix& rho, PlanarMeasurement a1, PlanarMeasurement a2,
                  PlanarMeasurement b1, PlanarMeasurement b2);

/// Joint outcome probabilities p(a_out, b_out) for planar measurements on a
/// tripartite pure state with dims 2*2*dE, plus the conditional states of the
/// third (eavesdropper) system given Bob's outcome. Outcome index 0 means +1,
/// index 1 means -1. A zero-probability branch leaves the conditional state
/// unset; it carries weight zero in any average.
struct BornTable {
    std::array<std::array<double, 2>, 2> p{};  // [a_out][b_out]
    std::array<double, 2> p_a{};
    std::array<double, 2> p_b{};
    std::array<std::optional<DensityMatrix>, 2> rho_e_given_b{};
};

BornTable born_probabilities(const PureState& psi_abe, PlanarMeasurement a,
                             PlanarMeasurement b);

/// (rho + (sy (x) sy) rho (sy (x) sy)) / 2. The output commutes with
/// sy (x) sy; planar correlators are unchanged and planar marginals flip sign
/// in the averaged term, so they are driven to zero.
DensityMatrix y_twirl(const DensityMatrix& rho);

/// (rho + conj(rho)) / 2, conjugation in the computational basis. The output
/// has real entries; planar correlators and marginals are unchanged.
DensityMatrix real_twirl(const DensityMatrix& rho);

/// Probabilities of the four Bell states Phi+, Psi-, Phi-, Psi+ (in that
/// order). The ordered (canonical) form puts the largest weight on Phi+, the
/// second largest on Phi-, then Psi+, and the smallest on Psi-; this satisfies
/// phi_plus >= psi_minus and phi_plus >= phi_minus >= psi_plus, and makes
/// s_lambda the largest CHSH value the state can reach.
struct BellDiagonalSpectrum {
    double phi_plus = 1.0;
    double psi_minus = 0.0;
    double phi_minus = 0.0;
    double psi_plus = 0.0;

    BellDiagonalSpectrum() = default;
    /// Validates each entry in [0,1] and the sum equal to 1 within 1e-12.
    BellDiagonalSpectrum(double phi_plus, double psi_minus, double phi_minus,
                         double psi_plus);

    /// Values in basis order {Phi+, Psi-, Phi-, Psi+}.
    std::array<double, 4> values() const { return {phi_plus, psi_minus, phi_minus, psi_plus}; }

    /// Same multiset of weights, reordered to the canonical form.
    BellDiagonalSpectrum canonical() const;

    /// Checks the documented ordering inequalities.
    bool is_ordered(double tol = 0.0) const;
};

/// Bell basis vectors, index order {Phi+, Psi-, Phi-, Psi+}.
std::array<std::array<cplx, 4>, 4> bell_basis();

/// The two-qubit state sum_k lambda_k |B_k><B_k|.
DensityMatrix bell_diagonal_state(const BellDiagonalSpectrum& spec);

/// Diagonal of a two-qubit state in the Bell basis (the candidate spectrum).
BellDiagonalSpectrum bell_spectrum(const DensityMatrix& rho);

/// Largest |<B_j| rho |B_k>| over j != k; zero iff rho is Bell-diagonal.
double max_bell_offdiagonal(const DensityMatrix& rho);

}  // namespace diqkd::qmat
