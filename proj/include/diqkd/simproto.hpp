#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "diqkd/attack.hpp"
#include "diqkd/bounds.hpp"
#include "diqkd/qmat.hpp"

namespace diqkd::simproto {

/// Counter-based pseudorandom substream: the state for draw k of stream
/// (seed, stream, index) is a pure function of those four integers, so rounds
/// can be generated in any order (or in parallel) with identical results.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

    std::uint64_t next_u64();
    /// Uniform double in [0, 1) with 53 random bits.
    double next_unit();

private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

enum class AliceSetting : std::uint8_t { a0 = 0, a1 = 1, a2 = 2 };
enum class BobSetting : std::uint8_t { b1 = 0, b2 = 1 };

struct RoundRecord {
    std::uint64_t index = 0;
    AliceSetting alice = AliceSetting::a0;
    BobSetting bob = BobSetting::b1;
    std::int8_t a_out = 0;  // +-1
    std::int8_t b_out = 0;  // +-1
};

struct ProtocolConfig {
    std::uint64_t n_rounds = 100000;
    std::array<double, 3> alice_probs{0.5, 0.25, 0.25};  // over (A0, A1, A2)
    std::array<double, 2> bob_probs{0.5, 0.5};           // over (B1, B2)
    std::uint64_t seed = 0;
    bool symmetrize = true;

    /// Throws DomainError unless both distributions sum to 1 within 1e-12 and
    /// n_rounds >= 1.
    void validate() const;
};

/// Finite-sample estimates and the key rates they imply.
struct EstimationReport {
    std::uint64_t n_rounds = 0;
    std::uint64_t n_key = 0;        // (A0, B1) rounds
    std::uint64_t n_discarded = 0;  // (A0, B2) rounds: sampled but unused
    std::array<std::array<std::uint64_t, 2>, 2> n_test{};  // [A1|A2][B1|B2]

    double q_hat = 0.0;
    double q_se = 0.0;
    std::array<std::array<double, 2>, 2> correlators{};
    std::array<std::array<double, 2>, 2> correlator_se{};
    double s_hat = 0.0;
    double s_se = 0.0;

    std::array<double, 3> alice_marginals{};  // outcome mean per setting
    std::array<double, 2> bob_marginals{};

    bounds::KeyRateReport rates;
    bool s_clamped = false;  // |s_hat| exceeded 2 sqrt 2 and was clamped for the rates
    bool q_clamped = false;
};

/// Draws the per-round settings and outcomes for the given attack. Outcomes
/// follow the Born probabilities of the attack state; the key setting is the
/// sigma_z outcome passed through the attack's noise channel. Deterministic
/// for a fixed config.
std::vector<RoundRecord> sample_transcript(const attack::AttackSpec& attack,
                                           const ProtocolConfig& config);

/// Per-round public-coin flips of both outcomes. Flipping both bits of a
/// round preserves every outcome product and every agree/disagree indicator,
/// so all correlators and the error-rate estimate are exactly unchanged,
/// while per-setting marginal means are driven toward zero. flip_prob = 0 is
/// the identity.
void symmetrize_transcript(std::vector<RoundRecord>& records, std::uint64_t seed,
                           double flip_prob = 0.5);

/// Estimators over a transcript: Q from the (A0,B1) rounds, S from the four
/// test pairs, standard errors from binomial variances (setting pairs are
/// disjoint, so the four correlator variances add). Counts accumulate in
/// integers, so the estimates do not depend on the round order.
/// Throws EstimationUndefinedError naming the first setting pair with no
/// samples.
EstimationReport estimate_parameters(const std::vector<RoundRecord>& records);

/// sample -> (symmetrize when configured) -> estimate.
EstimationReport run_protocol(const attack::AttackSpec& attack, const ProtocolConfig& config);

struct OracleInstance {
    qmat::BellDiagonalSpectrum spectrum;
    double a1 = 0.0, a2 = 0.0, b1 = 0.0, b2 = 0.0;  // setting angles
    double s_achieved = 0.0;
    double chi_exact = 0.0;
    double f_bound = 0.0;
    double eq_bound = 0.0;  // H(lambda) - h(lPhi+ + lPhi-)
};

struct OracleReport {
    std::uint64_t n_samples = 0;
    std::uint64_t violations_f = 0;
    std::uint64_t violations_chi = 0;
    double min_slack_f = 0.0;    // min of f_bound - chi_exact
    double min_slack_chi = 0.0;  // min of eq_bound - chi_exact
    OracleInstance argmin_f;
    OracleInstance argmin_chi;
};

/// Brute-force sweep: random Bell-diagonal spectra (flat Dirichlet, reordered
/// to canonical form) and random planar setting quadruples; for each sample
/// checks chi_exact <= holevo_bound(S_achieved) + tol and
/// chi_exact <= chi_lambda_upper(lambda) + tol, and reports the minimum
/// slacks with their witnesses.
OracleReport oracle_step3_sweep(std::uint64_t n_samples, std::uint64_t seed,
                                double tol = 1e-9);

}  // namespace diqkd::simproto
