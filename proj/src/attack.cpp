#include "diqkd/attack.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace diqkd::attack {

using qmat::DensityMatrix;
using qmat::Matrix;
using qmat::PlanarMeasurement;

double AttackSpec::chsh() const { return qmat::chsh_value(rho_ab, a1, a2, b1, b2); }

double AttackSpec::a0_b1_disagreement() const {
    // a0 is the sigma_z outcome kept with probability 1 - flip, else a coin.
    const double zz = qmat::correlator(rho_ab, PlanarMeasurement(0.0), b1);
    const double p_disagree_z = 0.5 * (1.0 - zz);
    const double flip = a0.flip_to_random_prob;
    return (1.0 - flip) * p_disagree_z + flip * 0.5;
}

void AttackSpec::validate(double chsh_tol, double spectrum_tol) const {
    const double s = chsh();
    if (std::abs(s - target_s) > chsh_tol) {
        throw DomainError("attack CHSH " + std::to_string(s) + " does not reproduce target " +
                          std::to_string(target_s));
    }
    if (qmat::max_bell_offdiagonal(rho_ab) > spectrum_tol) {
        throw DomainError("attack state is not Bell-diagonal within tolerance");
    }
    const double c = concurrence_for_violation(target_s);
    const qmat::BellDiagonalSpectrum lam = qmat::bell_spectrum(rho_ab);
    const double dev = std::max(
        std::max(std::abs(lam.phi_plus - 0.5 * (1.0 + c)), std::abs(lam.psi_minus)),
        std::max(std::abs(lam.phi_minus - 0.5 * (1.0 - c)), std::abs(lam.psi_plus)));
    if (dev > spectrum_tol) {
        throw DomainError("attack state spectrum deviates from ((1+C)/2, 0, (1-C)/2, 0)");
    }
}

double concurrence_for_violation(double s) {
    const double x = (s / 2.0) * (s / 2.0) - 1.0;
    return std::sqrt(std::max(x, 0.0));
}

AttackSpec build_optimal_attack(double s, double q) {
    if (!(s >= 2.0 - 1e-9) || s > bounds::kTsirelson + 1e-9) {
        throw DomainError("attack CHSH target " + std::to_string(s) +
                          " outside [2, 2 sqrt 2]");
    }
    if (q < 0.0 || q > 0.5) {
        throw DomainError("attack QBER target " + std::to_string(q) + " outside [0, 1/2]");
    }
    s = std::clamp(s, 2.0, bounds::kTsirelson);
    const double c = concurrence_for_violation(s);

    AttackSpec spec{
        .target_s = s,
        .target_q = q,
        .rho_ab = qmat::bell_diagonal_state(
            qmat::BellDiagonalSpectrum(0.5 * (1.0 + c), 0.0, 0.5 * (1.0 - c), 0.0)),
        .a1 = PlanarMeasurement(std::atan(c)),
        .a2 = PlanarMeasurement(-std::atan(c)),
        .b1 = PlanarMeasurement(0.0),
        .b2 = PlanarMeasurement(std::numbers::pi / 2.0),
        .a0 = A0NoiseChannel{2.0 * q},
    };
    return spec;
}

double holevo_exact(const DensityMatrix& rho_ab, PlanarMeasurement b1) {
    if (rho_ab.dim() != 4) throw DimensionError("holevo_exact: state must be two-qubit");
    const qmat::PureState psi = purify(rho_ab);  // dim 16 = 2*2*4, Eve holds the mirror
    const std::array<int, 2> dims{4, 4};
    const std::array<int, 1> keep_env{1};
    const DensityMatrix rho_e = qmat::partial_trace(qmat::density(psi), dims, keep_env);

    const qmat::BornTable table = qmat::born_probabilities(psi, PlanarMeasurement(0.0), b1);
    double chi = qmat::von_neumann_entropy(rho_e);
    for (int bo = 0; bo < 2; ++bo) {
        const auto& cond = table.rho_e_given_b[static_cast<std::size_t>(bo)];
        if (!cond) continue;  // zero-probability branch carries weight zero
        chi -= table.p_b[static_cast<std::size_t>(bo)] * qmat::von_neumann_entropy(*cond);
    }
    return std::max(chi, 0.0);
}

SaturationReport verify_saturation(const std::vector<double>& s_grid, double q, double chsh_tol,
                                   double holevo_tol, double marginal_tol) {
    SaturationReport report;
    report.points.reserve(s_grid.size());
    for (double s : s_grid) {
        const AttackSpec spec = build_optimal_attack(s, q);
        SaturationPoint point;
        point.s = s;
        point.chsh_deviation = std::abs(spec.chsh() - s);
        point.chi_exact = holevo_exact(spec.rho_ab, spec.b1);
        point.chi_bound = bounds::holevo_bound(s);
        point.holevo_deviation = std::abs(point.chi_exact - point.chi_bound);

        double max_marg = 0.0;
        for (const PlanarMeasurement& ma : {spec.a1, spec.a2}) {
            for (const PlanarMeasurement& mb : {spec.b1, spec.b2}) {
                const qmat::CorrelatorResult corr = qmat::correlator_full(spec.rho_ab, ma, mb);
                max_marg = std::max({max_marg, std::abs(corr.a), std::abs(corr.b)});
            }
        }
        point.max_marginal = max_marg;
        point.pass = point.chsh_deviation <= chsh_tol && point.holevo_deviation <= holevo_tol &&
                     point.max_marginal <= marginal_tol;

        report.max_chsh_deviation = std::max(report.max_chsh_deviation, point.chsh_deviation);
        report.max_holevo_deviation =
            std::max(report.max_holevo_deviation, point.holevo_deviation);
        report.max_marginal = std::max(report.max_marginal, point.max_marginal);
        report.all_pass = report.all_pass && point.pass;
        report.points.push_back(point);
    }
    return report;
}

}  // namespace diqkd::attack
