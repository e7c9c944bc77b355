#include "diqkd/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace diqkd::bounds {

ObservedStatistics::ObservedStatistics(double s_in, double q_in) : s(s_in), q(q_in) {
    if (!std::isfinite(s) || std::abs(s) > 4.0) {
        throw DomainError("CHSH value " + std::to_string(s) + " outside [-4, 4]");
    }
    if (!std::isfinite(q) || q < -qmat::kConstructTol || q > 0.5 + qmat::kConstructTol) {
        throw DomainError("QBER " + std::to_string(q) + " outside [0, 1/2]");
    }
    q = std::clamp(q, 0.0, 0.5);
}

double holevo_bound(double s) {
    s = std::abs(s);
    if (s > kTsirelson + 1e-9) {
        throw UnphysicalViolationError("CHSH value " + std::to_string(s) +
                                       " exceeds the Tsirelson bound");
    }
    if (s <= 2.0) return 1.0;
    s = std::min(s, kTsirelson);
    const double x = (s / 2.0) * (s / 2.0) - 1.0;
    return qmat::binary_entropy(0.5 * (1.0 + std::sqrt(x)));
}

double standard_holevo_bound(const ObservedStatistics& stats) {
    const double x = stats.q + std::abs(stats.s) / kTsirelson;
    if (x < -1e-9 || x > 1.0 + 1e-9) {
        throw UndefinedInRegimeError("phase error argument " + std::to_string(x) +
                                     " outside [0, 1]");
    }
    return qmat::binary_entropy(std::clamp(x, 0.0, 1.0));
}

KeyRateReport dw_rate(const ObservedStatistics& stats) {
    KeyRateReport report;
    report.s = stats.s;
    report.q = stats.q;
    report.iab = 1.0 - qmat::binary_entropy(stats.q);
    report.chi_di = holevo_bound(stats.s);
    report.r_di = report.iab - report.chi_di;
    try {
        report.chi_std = standard_holevo_bound(stats);
        report.r_std = report.iab - *report.chi_std;
    } catch (const UndefinedInRegimeError&) {
        // outside the trusted-device regime: report the fields as absent
    }
    return report;
}

double s_lambda(const qmat::BellDiagonalSpectrum& spec) {
    const double s =
        kTsirelson * std::hypot(spec.phi_plus - spec.psi_minus, spec.phi_minus - spec.psi_plus);
    return std::min(s, kTsirelson);
}

double chi_lambda_upper(const qmat::BellDiagonalSpectrum& spec) {
    const auto lam = spec.values();
    return qmat::shannon_entropy(lam) -
           qmat::binary_entropy(std::min(spec.phi_plus + spec.phi_minus, 1.0));
}

double default_s_line(double q) { return kTsirelson * (1.0 - 2.0 * q); }

namespace {

double rate_at(BoundKind kind, double q, const std::function<double(double)>& s_of_q) {
    const ObservedStatistics stats(s_of_q(q), q);
    const double iab = 1.0 - qmat::binary_entropy(q);
    if (kind == BoundKind::device_independent) return iab - holevo_bound(stats.s);
    return iab - standard_holevo_bound(stats);
}

}  // namespace

double critical_qber(BoundKind kind, const std::function<double(double)>& s_of_q, double q_lo,
                     double q_hi, double tol) {
    double r_lo = rate_at(kind, q_lo, s_of_q);
    double r_hi = rate_at(kind, q_hi, s_of_q);
    // Roots sitting on a bracket endpoint give no sign change.
    if (std::abs(r_lo) <= 1e-12) return q_lo;
    if (std::abs(r_hi) <= 1e-12) return q_hi;
    if ((r_lo > 0.0) == (r_hi > 0.0)) {
        throw NoRootError("rate does not change sign on [" + std::to_string(q_lo) + ", " +
                          std::to_string(q_hi) + "]");
    }
    while (q_hi - q_lo > tol) {
        const double mid = 0.5 * (q_lo + q_hi);
        const double r_mid = rate_at(kind, mid, s_of_q);
        if (r_mid == 0.0) return mid;
        if ((r_mid > 0.0) == (r_lo > 0.0)) {
            q_lo = mid;
            r_lo = r_mid;
        } else {
            q_hi = mid;
        }
    }
    return 0.5 * (q_lo + q_hi);
}

double critical_qber(BoundKind kind) { return critical_qber(kind, default_s_line); }

double critical_qber(BoundKind kind, std::span<const std::pair<double, double>> samples,
                     double tol) {
    if (samples.size() < 2) throw DomainError("curve needs at least two (Q, S) samples");
    for (std::size_t i = 1; i < samples.size(); ++i) {
        if (samples[i].first <= samples[i - 1].first) {
            throw DomainError("curve samples must have strictly increasing Q");
        }
    }
    const auto interpolate = [samples](double q) {
        if (q <= samples.front().first) return samples.front().second;
        if (q >= samples.back().first) return samples.back().second;
        std::size_t hi = 1;
        while (samples[hi].first < q) ++hi;
        const auto& [q0, s0] = samples[hi - 1];
        const auto& [q1, s1] = samples[hi];
        return s0 + (s1 - s0) * (q - q0) / (q1 - q0);
    };
    return critical_qber(kind, interpolate, samples.front().first, samples.back().first, tol);
}

}  // namespace diqkd::bounds
