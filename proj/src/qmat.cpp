#include "diqkd/qmat.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace diqkd::qmat {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Cheap sufficient positivity certificate: Cholesky of op + ridge*I succeeds
// only if the smallest eigenvalue exceeds -ridge. A failure proves nothing
// (the pivot may merely graze zero), so callers must fall back to the exact
// spectral check.
bool cholesky_certifies_psd(const Matrix& op, double ridge) {
    const int n = op.dim();
    Matrix l(n);
    for (int j = 0; j < n; ++j) {
        double diag = op(j, j).real() + ridge;
        for (int k = 0; k < j; ++k) diag -= std::norm(l(j, k));
        if (diag <= 0.0) return false;
        const double root = std::sqrt(diag);
        l(j, j) = root;
        for (int i = j + 1; i < n; ++i) {
            cplx acc = op(i, j);
            for (int k = 0; k < j; ++k) acc -= l(i, k) * std::conj(l(j, k));
            l(i, j) = acc / root;
        }
    }
    return true;
}

}  // namespace

Matrix pauli_x() {
    Matrix m(2);
    m(0, 1) = 1.0;
    m(1, 0) = 1.0;
    return m;
}

Matrix pauli_y() {
    Matrix m(2);
    m(0, 1) = cplx(0.0, -1.0);
    m(1, 0) = cplx(0.0, 1.0);
    return m;
}

Matrix pauli_z() {
    Matrix m(2);
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    return m;
}

PureState::PureState(std::vector<cplx> amplitudes) : amps_(std::move(amplitudes)) {
    if (amps_.empty()) throw DimensionError("pure state needs at least one amplitude");
    double n2 = 0.0;
    for (const cplx& z : amps_) n2 += std::norm(z);
    const double n = std::sqrt(n2);
    if (std::abs(n - 1.0) > kValidationTol) {
        throw DomainError("pure state norm " + std::to_string(n) + " is not 1");
    }
    for (cplx& z : amps_) z /= n;
}

DensityMatrix::DensityMatrix(Matrix op) : op_(std::move(op)) {
    const int d = op_.dim();
    if (op_.hermiticity_defect() > kValidationTol) {
        throw NotHermitianError("density matrix is not Hermitian within tolerance");
    }
    // Store the exactly-Hermitian part with exactly unit trace.
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
            const cplx m = 0.5 * (op_(i, j) + std::conj(op_(j, i)));
            op_(i, j) = m;
            op_(j, i) = std::conj(m);
        }
        op_(i, i) = cplx(op_(i, i).real(), 0.0);
    }
    const double tr = op_.trace().real();
    if (std::abs(tr - 1.0) > kValidationTol) {
        throw DomainError("density matrix trace " + std::to_string(tr) + " is not 1");
    }
    op_ *= cplx(1.0 / tr, 0.0);

    if (!cholesky_certifies_psd(op_, kNegativityTol)) {
        const EighResult e = eigh(op_, kValidationTol);
        if (e.eigenvalues.back() < -kNegativityTol) {
            throw DomainError("density matrix has eigenvalue " +
                              std::to_string(e.eigenvalues.back()) + " below -1e-10");
        }
    }
}

DensityMatrix density(const PureState& psi) {
    const int d = psi.dim();
    Matrix m(d);
    const auto& a = psi.amplitudes();
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            m(i, j) = a[static_cast<std::size_t>(i)] * std::conj(a[static_cast<std::size_t>(j)]);
    return DensityMatrix(std::move(m));
}

PlanarMeasurement::PlanarMeasurement(double phi) {
    angle = std::fmod(phi, kTwoPi);
    if (angle < 0.0) angle += kTwoPi;
}

Matrix observable(PlanarMeasurement m) {
    Matrix o(2);
    const double c = std::cos(m.angle);
    const double s = std::sin(m.angle);
    o(0, 0) = c;
    o(0, 1) = s;
    o(1, 0) = s;
    o(1, 1) = -c;
    return o;
}

std::array<std::array<cplx, 2>, 2> measurement_eigenvectors(PlanarMeasurement m) {
    const double c = std::cos(m.angle / 2.0);
    const double s = std::sin(m.angle / 2.0);
    // (c, s) has eigenvalue +1, (-s, c) eigenvalue -1.
    return {{{cplx(c, 0.0), cplx(s, 0.0)}, {cplx(-s, 0.0), cplx(c, 0.0)}}};
}

namespace {

struct TraceIndexing {
    std::vector<int> dims;
    std::vector<int> keep;
    std::vector<int> traced;
    std::vector<long> stride;
    int keep_dim = 1;

    TraceIndexing(int total_dim, std::span<const int> dims_in, std::span<const int> keep_in) {
        dims.assign(dims_in.begin(), dims_in.end());
        keep.assign(keep_in.begin(), keep_in.end());
        if (keep.empty()) throw DimensionError("partial_trace: keep set is empty");
        long prod = 1;
        for (int d : dims) {
            if (d < 1) throw DimensionError("partial_trace: subsystem dims must be >= 1");
            prod *= d;
        }
        if (prod != total_dim) {
            throw DimensionError("partial_trace: product of dims does not match dimension");
        }
        std::vector<bool> kept(dims.size(), false);
        for (int k : keep) {
            if (k < 0 || k >= static_cast<int>(dims.size()) || kept[static_cast<std::size_t>(k)]) {
                throw DimensionError("partial_trace: bad keep index");
            }
            kept[static_cast<std::size_t>(k)] = true;
        }
        if (!std::is_sorted(keep.begin(), keep.end())) {
            throw DimensionError("partial_trace: keep indices must be increasing");
        }
        for (int i = 0; i < static_cast<int>(dims.size()); ++i) {
            if (!kept[static_cast<std::size_t>(i)]) traced.push_back(i);
        }
        stride.assign(dims.size(), 1);
        for (int i = static_cast<int>(dims.size()) - 2; i >= 0; --i) {
            stride[static_cast<std::size_t>(i)] =
                stride[static_cast<std::size_t>(i + 1)] * dims[static_cast<std::size_t>(i + 1)];
        }
        for (int k : keep) keep_dim *= dims[static_cast<std::size_t>(k)];
    }

    // Packs the kept components of a full index; -1 if unused.
    int kept_part(long full) const {
        int out = 0;
        for (int k : keep) {
            const int comp = static_cast<int>(full / stride[static_cast<std::size_t>(k)]) %
                             dims[static_cast<std::size_t>(k)];
            out = out * dims[static_cast<std::size_t>(k)] + comp;
        }
        return out;
    }

    long traced_part(long full) const {
        long out = 0;
        for (int t : traced) {
            const int comp = static_cast<int>(full / stride[static_cast<std::size_t>(t)]) %
                             dims[static_cast<std::size_t>(t)];
            out = out * dims[static_cast<std::size_t>(t)] + comp;
        }
        return out;
    }
};

}  // namespace

Matrix partial_trace_matrix(const Matrix& m, std::span<const int> dims,
                            std::span<const int> keep) {
    const TraceIndexing ix(m.dim(), dims, keep);
    Matrix out(ix.keep_dim);
    const int total = m.dim();
    for (long i = 0; i < total; ++i) {
        const long ti = ix.traced_part(i);
        const int ki = ix.kept_part(i);
        for (long j = 0; j < total; ++j) {
            if (ix.traced_part(j) != ti) continue;
            out(ki, ix.kept_part(j)) += m(static_cast<int>(i), static_cast<int>(j));
        }
    }
    return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> dims,
                            std::span<const int> keep) {
    return DensityMatrix(partial_trace_matrix(rho.op(), dims, keep));
}

double binary_entropy(double p) {
    if (p < -kConstructTol || p > 1.0 + kConstructTol) {
        throw DomainError("binary_entropy: p = " + std::to_string(p) + " outside [0,1]");
    }
    p = std::clamp(p, 0.0, 1.0);
    if (p == 0.0 || p == 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double shannon_entropy(std::span<const double> probs) {
    double h = 0.0;
    for (double p : probs) {
        if (p < -kConstructTol) {
            throw DomainError("shannon_entropy: negative probability " + std::to_string(p));
        }
        if (p <= 0.0) continue;
        h -= p * std::log2(std::min(p, 1.0));
    }
    return std::max(h, 0.0);
}

double von_neumann_entropy(const DensityMatrix& rho) {
    const EighResult e = eigh(rho.op(), kValidationTol);
    std::vector<double> w(e.eigenvalues.size());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::clamp(e.eigenvalues[k], 0.0, 1.0);
    return shannon_entropy(w);
}

PureState purify(const DensityMatrix& rho) {
    const int d = rho.dim();
    const EighResult e = eigh(rho.op(), kValidationTol);
    std::vector<cplx> amps(static_cast<std::size_t>(d) * d, cplx(0.0, 0.0));
    for (int k = 0; k < d; ++k) {
        const double w = e.eigenvalues[static_cast<std::size_t>(k)];
        if (w <= 0.0) continue;
        const double root = std::sqrt(w);
        for (int s = 0; s < d; ++s) {
            amps[static_cast<std::size_t>(s) * d + k] = root * e.eigenvectors(s, k);
        }
    }
    return PureState(std::move(amps));
}

double tensor_expectation(const DensityMatrix& rho, const Matrix& a, const Matrix& b) {
    const int da = a.dim();
    const int db = b.dim();
    if (da * db != rho.dim()) {
        throw DimensionError("tensor_expectation: operator dims do not factor the state");
    }
    // tr[rho (A (x) B)] = sum rho((i,k),(j,l)) A(j,i) B(l,k)
    cplx acc(0.0, 0.0);
    const Matrix& r = rho.op();
    for (int i = 0; i < da; ++i)
        for (int j = 0; j < da; ++j) {
            const cplx aji = a(j, i);
            if (aji == cplx(0.0, 0.0)) continue;
            for (int k = 0; k < db; ++k)
                for (int l = 0; l < db; ++l) acc += r(i * db + k, j * db + l) * aji * b(l, k);
        }
    return acc.real();
}

CorrelatorResult correlator_full(const DensityMatrix& rho, PlanarMeasurement a,
                                 PlanarMeasurement b) {
    if (rho.dim() != 4) throw DimensionError("correlator: state must be two-qubit");
    const Matrix oa = observable(a);
    const Matrix ob = observable(b);
    const Matrix id = Matrix::identity(2);
    return CorrelatorResult{tensor_expectation(rho, oa, ob), tensor_expectation(rho, oa, id),
                            tensor_expectation(rho, id, ob)};
}

double correlator(const DensityMatrix& rho, PlanarMeasurement a, PlanarMeasurement b) {
    return correlator_full(rho, a, b).ab;
}

double chsh_value(const DensityMatrix& rho, PlanarMeasurement a1, PlanarMeasurement a2,
                  PlanarMeasurement b1, PlanarMeasurement b2) {
    return correlator(rho, a1, b1) + correlator(rho, a1, b2) + correlator(rho, a2, b1) -
           correlator(rho, a2, b2);
}

BornTable born_probabilities(const PureState& psi_abe, PlanarMeasurement a,
                             PlanarMeasurement b) {
    const int dim = psi_abe.dim();
    if (dim % 4 != 0) {
        throw DimensionError("born_probabilities: state dimension must factor as 2*2*dE");
    }
    const int de = dim / 4;
    const auto& amps = psi_abe.amplitudes();
    const auto va = measurement_eigenvectors(a);
    const auto vb = measurement_eigenvectors(b);

    BornTable table;
    for (int ao = 0; ao < 2; ++ao) {
        for (int bo = 0; bo < 2; ++bo) {
            // phi[e] = <u_a (x) u_b| psi>_AB, a vector on E.
            double p = 0.0;
            for (int e = 0; e < de; ++e) {
                cplx amp(0.0, 0.0);
                for (int sa = 0; sa < 2; ++sa)
                    for (int sb = 0; sb < 2; ++sb) {
                        amp += std::conj(va[static_cast<std::size_t>(ao)]
                                           [static_cast<std::size_t>(sa)]) *
                               std::conj(vb[static_cast<std::size_t>(bo)]
                                           [static_cast<std::size_t>(sb)]) *
                               amps[static_cast<std::size_t>((sa * 2 + sb) * de + e)];
                    }
                p += std::norm(amp);
            }
            table.p[static_cast<std::size_t>(ao)][static_cast<std::size_t>(bo)] = p;
        }
    }
    for (int ao = 0; ao < 2; ++ao)
        table.p_a[static_cast<std::size_t>(ao)] =
            table.p[static_cast<std::size_t>(ao)][0] + table.p[static_cast<std::size_t>(ao)][1];
    for (int bo = 0; bo < 2; ++bo)
        table.p_b[static_cast<std::size_t>(bo)] =
            table.p[0][static_cast<std::size_t>(bo)] + table.p[1][static_cast<std::size_t>(bo)];

    for (int bo = 0; bo < 2; ++bo) {
        const double pb = table.p_b[static_cast<std::size_t>(bo)];
        if (pb <= 1e-14) continue;  // zero-probability branch: left undefined
        // xi[sa][e] = <u_b| psi>_B  (contracting Bob only)
        std::vector<cplx> xi(static_cast<std::size_t>(2 * de), cplx(0.0, 0.0));
        for (int sa = 0; sa < 2; ++sa)
            for (int e = 0; e < de; ++e) {
                cplx amp(0.0, 0.0);
                for (int sb = 0; sb < 2; ++sb) {
                    amp += std::conj(
                               vb[static_cast<std::size_t>(bo)][static_cast<std::size_t>(sb)]) *
                           amps[static_cast<std::size_t>((sa * 2 + sb) * de + e)];
                }
                xi[static_cast<std::size_t>(sa * de + e)] = amp;
            }
        Matrix cond(de);
        for (int e = 0; e < de; ++e)
            for (int f = 0; f < de; ++f) {
                cplx acc(0.0, 0.0);
                for (int sa = 0; sa < 2; ++sa)
                    acc += xi[static_cast<std::size_t>(sa * de + e)] *
                           std::conj(xi[static_cast<std::size_t>(sa * de + f)]);
                cond(e, f) = acc / pb;
            }
        table.rho_e_given_b[static_cast<std::size_t>(bo)] = DensityMatrix(std::move(cond));
    }
    return table;
}

namespace {

Matrix y_on_both() {
    return kron(pauli_y(), pauli_y());
}

}  // namespace

DensityMatrix y_twirl(const DensityMatrix& rho) {
    if (rho.dim() != 4) throw DimensionError("y_twirl: state must be two-qubit");
    const Matrix yy = y_on_both();
    Matrix out = rho.op() + yy * rho.op() * yy;
    out *= cplx(0.5, 0.0);
    return DensityMatrix(std::move(out));
}

DensityMatrix real_twirl(const DensityMatrix& rho) {
    if (rho.dim() != 4) throw DimensionError("real_twirl: state must be two-qubit");
    Matrix out = rho.op() + rho.op().conjugate();
    out *= cplx(0.5, 0.0);
    return DensityMatrix(std::move(out));
}

BellDiagonalSpectrum::BellDiagonalSpectrum(double phi_plus_in, double psi_minus_in,
                                           double phi_minus_in, double psi_plus_in)
    : phi_plus(phi_plus_in),
      psi_minus(psi_minus_in),
      phi_minus(phi_minus_in),
      psi_plus(psi_plus_in) {
    double sum = 0.0;
    for (double* lam : {&phi_plus, &psi_minus, &phi_minus, &psi_plus}) {
        if (*lam < -kConstructTol || *lam > 1.0 + kConstructTol) {
            throw DomainError("Bell spectrum entry outside [0,1]");
        }
        *lam = std::clamp(*lam, 0.0, 1.0);
        sum += *lam;
    }
    if (std::abs(sum - 1.0) > 1e-10) {
        throw DomainError("Bell spectrum does not sum to 1");
    }
    for (double* lam : {&phi_plus, &psi_minus, &phi_minus, &psi_plus}) *lam /= sum;
}

BellDiagonalSpectrum BellDiagonalSpectrum::canonical() const {
    std::array<double, 4> v = values();
    std::sort(v.begin(), v.end(), std::greater<double>());
    // Largest to Phi+, second to Phi-, third to Psi+, smallest to Psi-.
    return BellDiagonalSpectrum(v[0], v[3], v[1], v[2]);
}

bool BellDiagonalSpectrum::is_ordered(double tol) const {
    return phi_plus >= psi_minus - tol && phi_plus >= phi_minus - tol &&
           phi_minus >= psi_plus - tol;
}

std::array<std::array<cplx, 4>, 4> bell_basis() {
    const double r = 1.0 / std::numbers::sqrt2;
    return {{
        {cplx(r, 0), cplx(0, 0), cplx(0, 0), cplx(r, 0)},    // Phi+
        {cplx(0, 0), cplx(r, 0), cplx(-r, 0), cplx(0, 0)},   // Psi-
        {cplx(r, 0), cplx(0, 0), cplx(0, 0), cplx(-r, 0)},   // Phi-
        {cplx(0, 0), cplx(r, 0), cplx(r, 0), cplx(0, 0)},    // Psi+
    }};
}

DensityMatrix bell_diagonal_state(const BellDiagonalSpectrum& spec) {
    const auto basis = bell_basis();
    const auto lam = spec.values();
    Matrix m(4);
    for (int k = 0; k < 4; ++k) {
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                m(i, j) += lam[static_cast<std::size_t>(k)] *
                           basis[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] *
                           std::conj(
                               basis[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)]);
    }
    return DensityMatrix(std::move(m));
}

namespace {

cplx bell_element(const DensityMatrix& rho, int j, int k) {
    const auto basis = bell_basis();
    cplx acc(0.0, 0.0);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            acc += std::conj(basis[static_cast<std::size_t>(j)][static_cast<std::size_t>(r)]) *
                   rho.op()(r, c) *
                   basis[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)];
    return acc;
}

}  // namespace

BellDiagonalSpectrum bell_spectrum(const DensityMatrix& rho) {
    if (rho.dim() != 4) throw DimensionError("bell_spectrum: state must be two-qubit");
    return BellDiagonalSpectrum(bell_element(rho, 0, 0).real(), bell_element(rho, 1, 1).real(),
                                bell_element(rho, 2, 2).real(), bell_element(rho, 3, 3).real());
}

double max_bell_offdiagonal(const DensityMatrix& rho) {
    if (rho.dim() != 4) throw DimensionError("max_bell_offdiagonal: state must be two-qubit");
    double m = 0.0;
    for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) {
            if (j == k) continue;
            m = std::max(m, std::abs(bell_element(rho, j, k)));
        }
    return m;
}

}  // namespace diqkd::qmat
