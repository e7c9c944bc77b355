#include "diqkd/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace diqkd::reduction {

using qmat::cplx;
using qmat::DensityMatrix;
using qmat::Matrix;
using qmat::PlanarMeasurement;

DichotomicObservable::DichotomicObservable(Matrix o, double hermitian_tol,
                                           double involution_tol)
    : op(std::move(o)) {
    if (op.hermiticity_defect() > hermitian_tol) {
        throw NotHermitianError("dichotomic observable is not Hermitian within tolerance");
    }
    const Matrix square = op * op;
    if (frobenius_distance(square, Matrix::identity(op.dim())) > involution_tol) {
        throw NotDichotomicError("observable squared deviates from the identity");
    }
}

Matrix Block::projector() const {
    const int d = basis.dim();
    Matrix p(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            cplx acc(0.0, 0.0);
            for (int k = 0; k < rank; ++k) acc += basis(i, k) * std::conj(basis(j, k));
            p(i, j) = acc;
        }
    return p;
}

PlanarMeasurement Block::reduced_a1() const { return PlanarMeasurement(0.0); }

PlanarMeasurement Block::reduced_a2() const {
    if (rank == 2) return PlanarMeasurement(theta);
    return PlanarMeasurement(a2_outcome == a1_outcome ? 0.0 : std::numbers::pi);
}

namespace {

// Column k of m as a vector.
std::vector<cplx> column(const Matrix& m, int k) {
    std::vector<cplx> v(static_cast<std::size_t>(m.dim()));
    for (int i = 0; i < m.dim(); ++i) v[static_cast<std::size_t>(i)] = m(i, k);
    return v;
}

cplx inner(std::span<const cplx> x, std::span<const cplx> y) {
    cplx acc(0.0, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) acc += std::conj(x[i]) * y[i];
    return acc;
}

void normalize(std::vector<cplx>& v) {
    double n2 = 0.0;
    for (const cplx& z : v) n2 += std::norm(z);
    const double n = std::sqrt(n2);
    for (cplx& z : v) z /= n;
}

// Basis columns of the subspace spanned by the given eigenvector indices.
Matrix stack_columns(int dim, const std::vector<std::vector<cplx>>& cols) {
    Matrix m(dim);  // only the first cols.size() columns are meaningful
    for (std::size_t k = 0; k < cols.size(); ++k)
        for (int i = 0; i < dim; ++i) m(i, static_cast<int>(k)) = cols[k][static_cast<std::size_t>(i)];
    return m;
}

// Restriction V^dagger M V for an isometry given as a list of columns.
Matrix restrict_to(const Matrix& m, const std::vector<std::vector<cplx>>& cols) {
    const int r = static_cast<int>(cols.size());
    Matrix out(r);
    for (int j = 0; j < r; ++j) {
        const std::vector<cplx> mj = m.apply(cols[static_cast<std::size_t>(j)]);
        for (int i = 0; i < r; ++i) out(i, j) = inner(cols[static_cast<std::size_t>(i)], mj);
    }
    return out;
}

std::vector<cplx> lift(const std::vector<std::vector<cplx>>& cols, std::span<const cplx> w) {
    std::vector<cplx> v(cols.front().size(), cplx(0.0, 0.0));
    for (std::size_t k = 0; k < cols.size(); ++k)
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += w[k] * cols[k][i];
    return v;
}

Block make_rank1_block(int dim, const std::vector<cplx>& vec, const Matrix& a1_op,
                       const Matrix& a2_op) {
    Block block;
    block.rank = 1;
    block.basis = stack_columns(dim, {vec});
    const double m1 = inner(vec, a1_op.apply(vec)).real();
    const double m2 = inner(vec, a2_op.apply(vec)).real();
    if (std::abs(std::abs(m1) - 1.0) > 1e-6 || std::abs(std::abs(m2) - 1.0) > 1e-6) {
        throw NotDichotomicError("rank-1 block outcome is not deterministic");
    }
    block.a1_outcome = m1 >= 0.0 ? 1 : -1;
    block.a2_outcome = m2 >= 0.0 ? 1 : -1;
    return block;
}

}  // namespace

BlockDecomposition jordan_blocks(const DichotomicObservable& a1, const DichotomicObservable& a2,
                                 double phase_tol) {
    const int d = a1.op.dim();
    if (a2.op.dim() != d) throw DimensionError("jordan_blocks: observable dims differ");

    const Matrix u = a1.op * a2.op;
    // u is unitary; its Hermitian part has eigenvalues cos(theta) and commutes
    // with both observables, so its eigenspaces are the invariant sectors.
    Matrix cos_part = u + u.adjoint();
    cos_part *= cplx(0.5, 0.0);
    Matrix sin_part(d);  // (u - u^dagger) / 2i
    {
        Matrix diff = u - u.adjoint();
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) sin_part(i, j) = diff(i, j) / cplx(0.0, 2.0);
    }

    const qmat::EighResult ce = eigh(cos_part, 1e-8);

    BlockDecomposition decomposition;
    decomposition.dim = d;

    // Cluster the cos(theta) eigenvalues; they are sorted descending.
    const double cos_cluster_tol = std::max(1e-10, phase_tol * 1e-2);
    int start = 0;
    while (start < d) {
        int stop = start + 1;
        while (stop < d && ce.eigenvalues[static_cast<std::size_t>(start)] -
                                   ce.eigenvalues[static_cast<std::size_t>(stop)] <=
                               cos_cluster_tol) {
            ++stop;
        }
        std::vector<std::vector<cplx>> sector;
        for (int k = start; k < stop; ++k) sector.push_back(column(ce.eigenvectors, k));
        const double c = ce.eigenvalues[static_cast<std::size_t>(start)];

        // The commuting test must run in cos space: acos is ill-conditioned at
        // +-1, where eigenvalue noise of 1e-15 already shifts the angle by 1e-7.
        const double commuting_tol = std::max(1e-12, 0.5 * phase_tol * phase_tol);
        if (1.0 - std::abs(c) <= commuting_tol) {
            // Commuting sector (u = +-I here): split by diagonalizing a1 on it.
            const Matrix a1_restricted = restrict_to(a1.op, sector);
            const qmat::EighResult ae = eigh(a1_restricted, 1e-8);
            for (int k = 0; k < static_cast<int>(sector.size()); ++k) {
                std::vector<cplx> vec = lift(sector, column(ae.eigenvectors, k));
                decomposition.blocks.push_back(make_rank1_block(d, vec, a1.op, a2.op));
            }
        } else {
            if (sector.size() % 2 != 0) {
                throw NotDichotomicError(
                    "rotation sector has odd dimension; eigenphases do not pair");
            }
            // Split the sector by the sign of the sine part; the positive half
            // holds the e^{+i theta} eigenvectors of u.
            const Matrix sin_restricted = restrict_to(sin_part, sector);
            const qmat::EighResult se = eigh(sin_restricted, 1e-8);
            const int pairs = static_cast<int>(sector.size()) / 2;
            for (int k = 0; k < pairs; ++k) {
                if (se.eigenvalues[static_cast<std::size_t>(k)] <= 0.0) {
                    throw NotDichotomicError("rotation sector is not balanced between phases");
                }
                const std::vector<cplx> v = lift(sector, column(se.eigenvectors, k));
                const std::vector<cplx> a1v = a1.op.apply(v);

                // Block basis in which a1 = sigma_z and a2 is planar:
                // f1 = (v + a1 v)/sqrt 2,  f2 = -i (v - a1 v)/sqrt 2.
                std::vector<cplx> f1(v.size()), f2(v.size());
                for (std::size_t i = 0; i < v.size(); ++i) {
                    f1[i] = v[i] + a1v[i];
                    f2[i] = cplx(0.0, -1.0) * (v[i] - a1v[i]);
                }
                normalize(f1);
                const cplx overlap = inner(f1, f2);
                for (std::size_t i = 0; i < f2.size(); ++i) f2[i] -= overlap * f1[i];
                normalize(f2);

                Block block;
                block.rank = 2;
                block.basis = stack_columns(d, {f1, f2});
                const std::vector<cplx> a2f1 = a2.op.apply(f1);
                block.theta = std::atan2(inner(f2, a2f1).real(), inner(f1, a2f1).real());
                decomposition.blocks.push_back(std::move(block));
            }
        }
        start = stop;
    }
    return decomposition;
}

double verify_pinching(const DichotomicObservable& a1, const DichotomicObservable& a2,
                       const BlockDecomposition& decomposition) {
    const int d = decomposition.dim;
    double worst = 0.0;
    for (const Matrix* obs : {&a1.op, &a2.op}) {
        Matrix pinched(d);
        for (const Block& block : decomposition.blocks) {
            const Matrix p = block.projector();
            pinched += p * (*obs) * p;
        }
        worst = std::max(worst, frobenius_distance(pinched, *obs));
    }
    return worst;
}

namespace {

// W^dagger rho W for W = basisA (x) basisB without forming the Kronecker
// product; returns the (rA*rB) x (rA*rB) compressed operator.
Matrix compress_state(const Matrix& rho, const Matrix& basis_a, int rank_a,
                      const Matrix& basis_b, int rank_b) {
    const int da = basis_a.dim();
    const int db = basis_b.dim();
    const int r = rank_a * rank_b;
    // First contract the row side: tmp[(a,alpha), (j,l)] = conj(W(i k),(a alpha)) rho((ik),(jl))
    std::vector<cplx> tmp(static_cast<std::size_t>(r) * da * db, cplx(0.0, 0.0));
    for (int a = 0; a < rank_a; ++a)
        for (int alpha = 0; alpha < rank_b; ++alpha) {
            const std::size_t row = static_cast<std::size_t>(a * rank_b + alpha);
            for (int i = 0; i < da; ++i) {
                const cplx wa = std::conj(basis_a(i, a));
                if (wa == cplx(0.0, 0.0)) continue;
                for (int k = 0; k < db; ++k) {
                    const cplx w = wa * std::conj(basis_b(k, alpha));
                    if (w == cplx(0.0, 0.0)) continue;
                    for (int col = 0; col < da * db; ++col) {
                        tmp[row * static_cast<std::size_t>(da * db) +
                            static_cast<std::size_t>(col)] += w * rho(i * db + k, col);
                    }
                }
            }
        }
    Matrix out(r);
    for (int row = 0; row < r; ++row)
        for (int b = 0; b < rank_a; ++b)
            for (int beta = 0; beta < rank_b; ++beta) {
                cplx acc(0.0, 0.0);
                for (int j = 0; j < da; ++j) {
                    const cplx wb = basis_a(j, b);
                    if (wb == cplx(0.0, 0.0)) continue;
                    for (int l = 0; l < db; ++l) {
                        acc += wb * basis_b(l, beta) *
                               tmp[static_cast<std::size_t>(row) *
                                       static_cast<std::size_t>(da * db) +
                                   static_cast<std::size_t>(j * db + l)];
                    }
                }
                out(row, b * rank_b + beta) = acc;
            }
    return out;
}

// Embeds the compressed block state into the full two-qubit space, placing
// rank-1 sides at the sigma_z eigenstate matching their deterministic outcome.
Matrix embed_two_qubit(const Matrix& sub, const Block& block_a, const Block& block_b) {
    const auto qubit_index = [](const Block& block, int local) {
        return block.rank == 2 ? local : block.embedded_state_index();
    };
    Matrix out(4);
    for (int a = 0; a < block_a.rank; ++a)
        for (int alpha = 0; alpha < block_b.rank; ++alpha)
            for (int b = 0; b < block_a.rank; ++b)
                for (int beta = 0; beta < block_b.rank; ++beta) {
                    const int row = qubit_index(block_a, a) * 2 + qubit_index(block_b, alpha);
                    const int col = qubit_index(block_a, b) * 2 + qubit_index(block_b, beta);
                    out(row, col) = sub(a * block_b.rank + alpha, b * block_b.rank + beta);
                }
    return out;
}

double chsh_general(const DensityMatrix& rho, const Matrix& a1, const Matrix& a2,
                    const Matrix& b1, const Matrix& b2) {
    return qmat::tensor_expectation(rho, a1, b1) + qmat::tensor_expectation(rho, a1, b2) +
           qmat::tensor_expectation(rho, a2, b1) - qmat::tensor_expectation(rho, a2, b2);
}

}  // namespace

ReducedStrategy reduce_strategy(const DensityMatrix& rho, const DichotomicObservable& alice1,
                                const DichotomicObservable& alice2,
                                const DichotomicObservable& bob1,
                                const DichotomicObservable& bob2, double drop_weight) {
    const int da = alice1.op.dim();
    const int db = bob1.op.dim();
    if (da * db != rho.dim()) {
        throw DimensionError("reduce_strategy: observable dims do not factor the state");
    }

    ReducedStrategy result;
    result.alice = jordan_blocks(alice1, alice2);
    result.bob = jordan_blocks(bob1, bob2);
    result.global_chsh = chsh_general(rho, alice1.op, alice2.op, bob1.op, bob2.op);

    for (std::size_t ia = 0; ia < result.alice.blocks.size(); ++ia) {
        const Block& block_a = result.alice.blocks[ia];
        for (std::size_t ib = 0; ib < result.bob.blocks.size(); ++ib) {
            const Block& block_b = result.bob.blocks[ib];
            const Matrix sub =
                compress_state(rho.op(), block_a.basis, block_a.rank, block_b.basis,
                               block_b.rank);
            const double weight = sub.trace().real();
            if (weight <= drop_weight) continue;

            Matrix embedded = embed_two_qubit(sub, block_a, block_b);
            embedded *= cplx(1.0 / weight, 0.0);

            QubitStrategyTerm term{
                .weight = weight,
                .state = DensityMatrix(std::move(embedded)),
                .a1 = block_a.reduced_a1(),
                .a2 = block_a.reduced_a2(),
                .b1 = block_b.reduced_a1(),
                .b2 = block_b.reduced_a2(),
                .chsh = 0.0,
                .alice_block = static_cast<int>(ia),
                .bob_block = static_cast<int>(ib),
            };
            term.chsh = qmat::chsh_value(term.state, term.a1, term.a2, term.b1, term.b2);
            result.total_weight += term.weight;
            result.weighted_chsh += term.weight * term.chsh;
            result.terms.push_back(std::move(term));
        }
    }
    return result;
}

}  // namespace diqkd::reduction
