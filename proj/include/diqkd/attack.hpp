#pragma once

#include <vector>

#include "diqkd/bounds.hpp"
#include "diqkd/qmat.hpp"

namespace diqkd::attack {

/// Classical noise on the key setting: with probability 1 - flip_to_random_prob
/// the key outcome is the sigma_z outcome, otherwise it is replaced by a fair
/// coin. With flip_to_random_prob = 2Q this makes prob(a0 != b1) = Q on a
/// state whose sigma_z (x) sigma_z correlation is +1.
struct A0NoiseChannel {
    double flip_to_random_prob = 0.0;
};

/// The collective attack that meets the Holevo bound: a rank-two Bell-diagonal
/// state with weights (1 +- C)/2 on Phi+ / Phi-, C = sqrt((S/2)^2 - 1),
/// measured at b1 = sigma_z, b2 = sigma_x and a1/a2 at angles +-atan(C),
/// with the key setting realized as sigma_z followed by the noise channel.
struct AttackSpec {
    double target_s = 0.0;
    double target_q = 0.0;
    qmat::DensityMatrix rho_ab;
    qmat::PlanarMeasurement a1, a2, b1, b2;
    A0NoiseChannel a0;

    /// CHSH value of the stored state and settings.
    double chsh() const;

    /// Exact prob(a0 != b1) from the sigma_z correlator and the channel.
    double a0_b1_disagreement() const;

    /// Checks the defining invariants: CHSH reproduces target_s within
    /// chsh_tol and the state is Bell-diagonal with the expected spectrum
    /// within spectrum_tol. Throws DomainError on failure.
    void validate(double chsh_tol = 1e-9, double spectrum_tol = 1e-10) const;
};

/// Concurrence of the attack state for a given violation: the spectrum gap
/// C = sqrt((S/2)^2 - 1). Diagnostic only.
double concurrence_for_violation(double s);

/// Builds the attack reaching CHSH value s and error rate q.
/// Requires s in [2, 2 sqrt 2] (tolerance 1e-9 at both ends) and q in [0, 1/2].
AttackSpec build_optimal_attack(double s, double q);

/// chi(B1:E) = S(rho_E) - sum_b p(b) S(rho_E|b) computed from first
/// principles: purifies rho_ab with the eavesdropper holding the purifying
/// system and measures b1 on Bob. Weights are the observed p(b), which reduce
/// to 1/2 each when Bob's marginal is uniform.
double holevo_exact(const qmat::DensityMatrix& rho_ab, qmat::PlanarMeasurement b1);

struct SaturationPoint {
    double s = 0.0;
    double chsh_deviation = 0.0;     // |chsh - s|
    double holevo_deviation = 0.0;   // |holevo_exact - holevo_bound(s)|
    double max_marginal = 0.0;       // largest |<a_i>| or |<b_j>|
    double chi_exact = 0.0;
    double chi_bound = 0.0;
    bool pass = false;
};

struct SaturationReport {
    std::vector<SaturationPoint> points;
    double max_chsh_deviation = 0.0;
    double max_holevo_deviation = 0.0;
    double max_marginal = 0.0;
    bool all_pass = true;
};

/// For each grid value of S: builds the attack and checks that (a) the CHSH
/// value reproduces S within chsh_tol, (b) holevo_exact equals holevo_bound(S)
/// within holevo_tol, (c) all setting marginals vanish within marginal_tol.
SaturationReport verify_saturation(const std::vector<double>& s_grid, double q = 0.0,
                                   double chsh_tol = 1e-9, double holevo_tol = 1e-9,
                                   double marginal_tol = 1e-12);

}  // namespace diqkd::attack
