#pragma once

#include <vector>

#include "diqkd/qmat.hpp"

namespace diqkd::reduction {

/// Hermitian operator with eigenvalues +-1 (a von Neumann binary observable).
struct DichotomicObservable {
    qmat::Matrix op;

    /// Validates Hermiticity within 1e-10 and op^2 = I within 1e-9.
    explicit DichotomicObservable(qmat::Matrix o, double hermitian_tol = 1e-10,
                                  double involution_tol = 1e-9);
};

/// One invariant block of a pair of dichotomic observables.
///
/// Rank-2 blocks carry an orthonormal 2-column basis in which the first
/// observable acts as sigma_z and the second as cos(theta) sigma_z +
/// sin(theta) sigma_x, theta in (0, pi). Rank-1 blocks carry the joint
/// eigenvector and the two deterministic outcomes.
struct Block {
    int rank = 0;
    qmat::Matrix basis;  // dim x rank, orthonormal columns
    double theta = 0.0;
    int a1_outcome = 0;  // rank-1 only: +-1
    int a2_outcome = 0;  // rank-1 only: +-1

    qmat::Matrix projector() const;

    /// Reduced observables in the planar-qubit embedding. Rank-1 blocks embed
    /// as the sigma_z eigenstate matching a1_outcome, so the first observable
    /// reads at angle 0 and the second at 0 or pi.
    qmat::PlanarMeasurement reduced_a1() const;
    qmat::PlanarMeasurement reduced_a2() const;

    /// Basis index of the embedded deterministic qubit state (rank-1 only).
    int embedded_state_index() const { return a1_outcome >= 0 ? 0 : 1; }
};

struct BlockDecomposition {
    int dim = 0;
    std::vector<Block> blocks;
};

/// Splits C^d into invariant subspaces of rank 1 or 2 shared by both
/// observables, from the spectral structure of the unitary a1*a2: eigenphase
/// pairs e^{+-i theta} with theta away from {0, pi} give rank-2 blocks
/// span{v, a1 v}; eigenphases within phase_tol of 0 or pi give commuting
/// sectors that split into rank-1 blocks.
BlockDecomposition jordan_blocks(const DichotomicObservable& a1,
                                 const DichotomicObservable& a2, double phase_tol = 1e-8);

/// Largest Frobenius deviation of a_j from sum_c P_c a_j P_c. Diagnostic; the
/// decomposition is valid when this is at numerical-noise scale.
double verify_pinching(const DichotomicObservable& a1, const DichotomicObservable& a2,
                       const BlockDecomposition& decomposition);

/// One term of the qubit-strategy mixture.
struct QubitStrategyTerm {
    double weight = 0.0;
    qmat::DensityMatrix state;  // embedded two-qubit state
    qmat::PlanarMeasurement a1, a2, b1, b2;
    double chsh = 0.0;
    int alice_block = 0;
    int bob_block = 0;
};

struct ReducedStrategy {
    BlockDecomposition alice;
    BlockDecomposition bob;
    std::vector<QubitStrategyTerm> terms;
    double total_weight = 0.0;   // sum of kept weights
    double global_chsh = 0.0;    // CHSH of the original strategy
    double weighted_chsh = 0.0;  // sum of weight * per-term CHSH
};

/// Decomposes an arbitrary finite-dimensional CHSH strategy into a convex
/// mixture of two-qubit strategies with planar settings. Block pairs with
/// weight at or below drop_weight are discarded.
ReducedStrategy reduce_strategy(const qmat::DensityMatrix& rho,
                                const DichotomicObservable& alice1,
                                const DichotomicObservable& alice2,
                                const DichotomicObservable& bob1,
                                const DichotomicObservable& bob2,
                                double drop_weight = 1e-14);

}  // namespace diqkd::reduction
