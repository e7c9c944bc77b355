#pragma once

#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <utility>

#include "diqkd/errors.hpp"
#include "diqkd/qmat.hpp"

namespace diqkd::bounds {

/// Tsirelson bound 2*sqrt(2), the largest CHSH value quantum states reach.
inline const double kTsirelson = 2.0 * std::numbers::sqrt2;

/// The two parameters available to bound the eavesdropper: the CHSH value S
/// and the bit error rate Q = prob(a0 != b1).
struct ObservedStatistics {
    double s = 0.0;
    double q = 0.0;

    ObservedStatistics() = default;
    /// Validates |s| <= 4 and q in [0, 1/2].
    ObservedStatistics(double s, double q);
};

struct KeyRateReport {
    double s = 0.0;
    double q = 0.0;
    double iab = 0.0;     // I(A0:B1) = 1 - h(Q)
    double chi_di = 0.0;  // device-independent Holevo bound
    double r_di = 0.0;    // iab - chi_di, reported raw (may be negative)
    std::optional<double> chi_std;  // tomographic-scenario bound, when defined
    std::optional<double> r_std;
};

/// Tight bound on the eavesdropper's Holevo information given a CHSH value S,
/// in bits:
///   for |S| <= 2:            1  (no violation constrains nothing beyond one bit)
///   for 2 < |S| <= 2sqrt(2): h((1 + sqrt((S/2)^2 - 1)) / 2)
/// Continuous at S = 2, zero at S = 2sqrt(2).
/// Throws UnphysicalViolationError for |S| > 2sqrt(2) + 1e-9.
double holevo_bound(double s);

/// h(Q + S / (2 sqrt 2)): the phase-error bound of the trusted-device
/// scenario. Throws UndefinedInRegimeError when Q + S/(2 sqrt 2) is outside
/// [0, 1] by more than 1e-9.
double standard_holevo_bound(const ObservedStatistics& stats);

/// Devetak-Winter rate r = 1 - h(Q) - chi for both scenarios.
KeyRateReport dw_rate(const ObservedStatistics& stats);

/// Largest CHSH value reachable by the Bell-diagonal state with the given
/// (ordered) spectrum: 2 sqrt 2 * sqrt((lPhi+ - lPsi-)^2 + (lPhi- - lPsi+)^2).
double s_lambda(const qmat::BellDiagonalSpectrum& spec);

/// H(lambda) - h(lPhi+ + lPhi-): bound on the Holevo information of any
/// planar measurement on the Bell-diagonal state, in bits. Tight for b1 at
/// angle zero.
double chi_lambda_upper(const qmat::BellDiagonalSpectrum& spec);

enum class BoundKind { device_independent, standard_scenario };

/// S(Q) = 2 sqrt 2 (1 - 2Q): the violation of a maximally entangled state
/// sent through a depolarizing channel, measured at the CHSH-optimal angles.
double default_s_line(double q);

/// Root of r(Q) = 0 along a given S(Q) curve, found by bisection on
/// [q_lo, q_hi] to absolute tolerance tol. Throws NoRootError when r does not
/// change sign on the bracket.
double critical_qber(BoundKind kind, const std::function<double(double)>& s_of_q,
                     double q_lo = 0.0, double q_hi = 0.25, double tol = 1e-6);

/// Same, along the default line.
double critical_qber(BoundKind kind);

/// Same, with S(Q) given as sampled (Q, S) pairs with increasing Q; linear
/// interpolation between samples.
double critical_qber(BoundKind kind, std::span<const std::pair<double, double>> samples,
                     double tol = 1e-6);

}  // namespace diqkd::bounds
