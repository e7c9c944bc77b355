#include "diqkd/simproto.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace diqkd::simproto {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// splitmix64 finalizer
std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

// Stream tags for the independent substreams drawn from one master seed.
enum : std::uint64_t { kStreamRounds = 1, kStreamSymmetrize = 2, kStreamOracle = 3 };

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    key_ = mix(mix(mix(seed + kGolden) ^ stream) ^ index);
}

std::uint64_t CounterRng::next_u64() { return mix(key_ + (++counter_) * kGolden); }

double CounterRng::next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

void ProtocolConfig::validate() const {
    if (n_rounds < 1) throw DomainError("n_rounds must be >= 1");
    for (const auto& probs : {std::vector<double>(alice_probs.begin(), alice_probs.end()),
                              std::vector<double>(bob_probs.begin(), bob_probs.end())}) {
        double sum = 0.0;
        for (double p : probs) {
            if (p < 0.0 || p > 1.0) throw DomainError("setting probability outside [0, 1]");
            sum += p;
        }
        if (std::abs(sum - 1.0) > qmat::kConstructTol) {
            throw DomainError("setting probabilities sum to " + std::to_string(sum));
        }
    }
}

namespace {

struct OutcomeTable {
    // Cumulative probabilities of the outcome pairs (+,+), (+,-), (-,+), (-,-).
    std::array<double, 4> cumulative{};
};

OutcomeTable make_outcome_table(const qmat::DensityMatrix& rho, qmat::PlanarMeasurement a,
                                qmat::PlanarMeasurement b) {
    const qmat::CorrelatorResult corr = qmat::correlator_full(rho, a, b);
    OutcomeTable table;
    double acc = 0.0;
    int k = 0;
    for (int sa : {+1, -1}) {
        for (int sb : {+1, -1}) {
            const double p =
                0.25 * (1.0 + sa * corr.a + sb * corr.b + sa * sb * corr.ab);
            acc += std::max(p, 0.0);
            table.cumulative[static_cast<std::size_t>(k++)] = acc;
        }
    }
    // Normalize away rounding residue so sampling can never fall off the end.
    for (double& c : table.cumulative) c /= acc;
    table.cumulative[3] = 1.0;
    return table;
}

int sample_cumulative(std::span<const double> cumulative, double u) {
    for (std::size_t k = 0; k + 1 < cumulative.size(); ++k) {
        if (u < cumulative[k]) return static_cast<int>(k);
    }
    return static_cast<int>(cumulative.size()) - 1;
}

}  // namespace

std::vector<RoundRecord> sample_transcript(const attack::AttackSpec& attack,
                                           const ProtocolConfig& config) {
    config.validate();

    const qmat::PlanarMeasurement sigma_z(0.0);
    const std::array<qmat::PlanarMeasurement, 3> alice_meas{sigma_z, attack.a1, attack.a2};
    const std::array<qmat::PlanarMeasurement, 2> bob_meas{attack.b1, attack.b2};

    // Joint outcome tables for all setting pairs; A0 uses the sigma_z table
    // and the noise channel is applied to its outcome per round.
    std::array<std::array<OutcomeTable, 2>, 3> tables;
    for (int ai = 0; ai < 3; ++ai)
        for (int bi = 0; bi < 2; ++bi)
            tables[static_cast<std::size_t>(ai)][static_cast<std::size_t>(bi)] =
                make_outcome_table(attack.rho_ab, alice_meas[static_cast<std::size_t>(ai)],
                                   bob_meas[static_cast<std::size_t>(bi)]);

    const std::array<double, 3> alice_cum{config.alice_probs[0],
                                          config.alice_probs[0] + config.alice_probs[1], 1.0};
    const std::array<double, 2> bob_cum{config.bob_probs[0], 1.0};
    const double flip = attack.a0.flip_to_random_prob;

    std::vector<RoundRecord> records(config.n_rounds);
    for (std::uint64_t r = 0; r < config.n_rounds; ++r) {
        CounterRng rng(config.seed, kStreamRounds, r);
        const int ai = sample_cumulative(alice_cum, rng.next_unit());
        const int bi = sample_cumulative(bob_cum, rng.next_unit());
        const int outcome = sample_cumulative(
            tables[static_cast<std::size_t>(ai)][static_cast<std::size_t>(bi)].cumulative,
            rng.next_unit());
        int a_out = (outcome < 2) ? +1 : -1;
        const int b_out = (outcome % 2 == 0) ? +1 : -1;
        if (ai == 0 && flip > 0.0) {
            if (rng.next_unit() < flip) a_out = (rng.next_unit() < 0.5) ? +1 : -1;
        }
        records[r] = RoundRecord{r, static_cast<AliceSetting>(ai), static_cast<BobSetting>(bi),
                                 static_cast<std::int8_t>(a_out),
                                 static_cast<std::int8_t>(b_out)};
    }
    return records;
}

void symmetrize_transcript(std::vector<RoundRecord>& records, std::uint64_t seed,
                           double flip_prob) {
    if (flip_prob < 0.0 || flip_prob > 1.0) {
        throw DomainError("flip probability outside [0, 1]");
    }
    if (flip_prob == 0.0) return;
    for (RoundRecord& rec : records) {
        CounterRng rng(seed, kStreamSymmetrize, rec.index);
        if (rng.next_unit() < flip_prob) {
            rec.a_out = static_cast<std::int8_t>(-rec.a_out);
            rec.b_out = static_cast<std::int8_t>(-rec.b_out);
        }
    }
}

EstimationReport estimate_parameters(const std::vector<RoundRecord>& records) {
    EstimationReport report;
    report.n_rounds = records.size();

    std::uint64_t disagreements = 0;
    std::array<std::array<std::int64_t, 2>, 2> product_sums{};
    std::array<std::int64_t, 3> alice_sums{};
    std::array<std::uint64_t, 3> alice_counts{};
    std::array<std::int64_t, 2> bob_sums{};
    std::array<std::uint64_t, 2> bob_counts{};

    for (const RoundRecord& rec : records) {
        const auto ai = static_cast<std::size_t>(rec.alice);
        const auto bi = static_cast<std::size_t>(rec.bob);
        alice_sums[ai] += rec.a_out;
        ++alice_counts[ai];
        bob_sums[bi] += rec.b_out;
        ++bob_counts[bi];
        if (rec.alice == AliceSetting::a0) {
            if (rec.bob == BobSetting::b1) {
                ++report.n_key;
                if (rec.a_out != rec.b_out) ++disagreements;
            } else {
                ++report.n_discarded;  // (A0, B2): the protocol uses neither
            }
        } else {
            ++report.n_test[ai - 1][bi];
            product_sums[ai - 1][bi] += rec.a_out * rec.b_out;
        }
    }

    if (report.n_key == 0) {
        throw EstimationUndefinedError("no rounds with setting pair (A0, B1)");
    }
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            if (report.n_test[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] == 0) {
                throw EstimationUndefinedError("no rounds with setting pair (A" +
                                               std::to_string(a + 1) + ", B" +
                                               std::to_string(b + 1) + ")");
            }
        }

    report.q_hat =
        static_cast<double>(disagreements) / static_cast<double>(report.n_key);
    report.q_se = std::sqrt(report.q_hat * (1.0 - report.q_hat) /
                            static_cast<double>(report.n_key));

    double s = 0.0;
    double var = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            const auto n = static_cast<double>(
                report.n_test[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]);
            const double e = static_cast<double>(
                                 product_sums[static_cast<std::size_t>(a)]
                                             [static_cast<std::size_t>(b)]) /
                             n;
            report.correlators[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = e;
            const double se = std::sqrt(std::max(1.0 - e * e, 0.0) / n);
            report.correlator_se[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = se;
            s += (a == 1 && b == 1) ? -e : e;
            var += se * se;
        }
    report.s_hat = s;
    report.s_se = std::sqrt(var);

    for (std::size_t ai = 0; ai < 3; ++ai) {
        report.alice_marginals[ai] =
            alice_counts[ai] == 0 ? 0.0
                                  : static_cast<double>(alice_sums[ai]) /
                                        static_cast<double>(alice_counts[ai]);
    }
    for (std::size_t bi = 0; bi < 2; ++bi) {
        report.bob_marginals[bi] = bob_counts[bi] == 0
                                       ? 0.0
                                       : static_cast<double>(bob_sums[bi]) /
                                             static_cast<double>(bob_counts[bi]);
    }

    // Finite-sample estimates can stray outside the physical region; the rate
    // computation sees the clamped values, the raw estimates stay in the report.
    double s_for_rates = report.s_hat;
    if (std::abs(s_for_rates) > bounds::kTsirelson) {
        s_for_rates = std::copysign(bounds::kTsirelson, s_for_rates);
        report.s_clamped = true;
    }
    double q_for_rates = report.q_hat;
    if (q_for_rates > 0.5) {
        q_for_rates = 0.5;
        report.q_clamped = true;
    }
    report.rates = bounds::dw_rate(bounds::ObservedStatistics(s_for_rates, q_for_rates));
    return report;
}

EstimationReport run_protocol(const attack::AttackSpec& attack, const ProtocolConfig& config) {
    std::vector<RoundRecord> records = sample_transcript(attack, config);
    if (config.symmetrize) symmetrize_transcript(records, config.seed);
    return estimate_parameters(records);
}

OracleReport oracle_step3_sweep(std::uint64_t n_samples, std::uint64_t seed, double tol) {
    if (n_samples < 1) throw DomainError("oracle sweep needs at least one sample");

    OracleReport report;
    report.n_samples = n_samples;
    report.min_slack_f = std::numeric_limits<double>::infinity();
    report.min_slack_chi = std::numeric_limits<double>::infinity();

    for (std::uint64_t k = 0; k < n_samples; ++k) {
        CounterRng rng(seed, kStreamOracle, k);

        // Flat Dirichlet sample over the four Bell weights.
        std::array<double, 4> raw{};
        double total = 0.0;
        do {
            total = 0.0;
            for (double& x : raw) {
                x = -std::log(1.0 - rng.next_unit());
                total += x;
            }
        } while (total <= 0.0);
        for (double& x : raw) x /= total;

        const qmat::BellDiagonalSpectrum lambda =
            qmat::BellDiagonalSpectrum(raw[0], raw[1], raw[2], raw[3]).canonical();
        const qmat::DensityMatrix rho = qmat::bell_diagonal_state(lambda);

        OracleInstance inst;
        inst.spectrum = lambda;
        inst.a1 = rng.next_unit() * 2.0 * std::numbers::pi;
        inst.a2 = rng.next_unit() * 2.0 * std::numbers::pi;
        inst.b1 = rng.next_unit() * 2.0 * std::numbers::pi;
        inst.b2 = rng.next_unit() * 2.0 * std::numbers::pi;

        inst.s_achieved = qmat::chsh_value(rho, qmat::PlanarMeasurement(inst.a1),
                                           qmat::PlanarMeasurement(inst.a2),
                                           qmat::PlanarMeasurement(inst.b1),
                                           qmat::PlanarMeasurement(inst.b2));
        inst.chi_exact = attack::holevo_exact(rho, qmat::PlanarMeasurement(inst.b1));
        inst.f_bound = bounds::holevo_bound(inst.s_achieved);
        inst.eq_bound = bounds::chi_lambda_upper(lambda);

        const double slack_f = inst.f_bound - inst.chi_exact;
        const double slack_chi = inst.eq_bound - inst.chi_exact;
        if (slack_f < -tol) ++report.violations_f;
        if (slack_chi < -tol) ++report.violations_chi;
        if (slack_f < report.min_slack_f) {
            report.min_slack_f = slack_f;
            report.argmin_f = inst;
        }
        if (slack_chi < report.min_slack_chi) {
            report.min_slack_chi = slack_chi;
            report.argmin_chi = inst;
        }
    }
    return report;
}

}  // namespace diqkd::simproto
