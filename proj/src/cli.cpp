#include "diqkd/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "diqkd/attack.hpp"
#include "diqkd/json_io.hpp"
#include "diqkd/reduction.hpp"
#include "diqkd/simproto.hpp"
#include "diqkd/version.hpp"

namespace diqkd::cli {

namespace {

std::string fmt_g(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", x);
    return buf;
}

// Resolves --out: either the given stream or a file.
class OutputTarget {
public:
    OutputTarget(std::ostream& fallback, const std::string& path) : fallback_(fallback) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw Error("cannot open output file: " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : fallback_; }

private:
    std::ostream& fallback_;
    std::ofstream file_;
};

io::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open input file: " + path);
    io::json j;
    in >> j;
    return j;
}

std::vector<double> parse_grid(const std::string& spec) {
    double start = 0.0, stop = 0.0, step = 0.0;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &start, &stop, &step) != 3 || step <= 0.0) {
        throw DomainError("grid must be start:stop:step with step > 0, got \"" + spec + "\"");
    }
    std::vector<double> grid;
    for (double s = start; s <= stop + 1e-12; s += step) grid.push_back(std::min(s, stop));
    if (grid.empty()) throw DomainError("grid \"" + spec + "\" is empty");
    return grid;
}

void print_key_rates(std::ostream& out, const bounds::KeyRateReport& report) {
    out << "s         = " << fmt_g(report.s) << "\n"
        << "q         = " << fmt_g(report.q) << "\n"
        << "I(A0:B1)  = " << fmt_g(report.iab) << "\n"
        << "chi_DI    = " << fmt_g(report.chi_di) << "\n"
        << "r_DI      = " << fmt_g(report.r_di) << "\n";
    if (report.chi_std) {
        out << "chi_std   = " << fmt_g(*report.chi_std) << "\n"
            << "r_std     = " << fmt_g(*report.r_std) << "\n";
    } else {
        out << "chi_std   = undefined in this regime\n";
    }
    out << "secure    = " << (report.r_di > 0.0 ? "yes" : "no") << "\n";
}

int cmd_keyrate(double s, double q, const std::string& state_path,
                const std::vector<double>& angles, bool as_json, const std::string& out_path,
                std::ostream& out_stream) {
    io::json config{{"s", nullptr}, {"q", nullptr}};
    if (!state_path.empty()) {
        const qmat::DensityMatrix rho = io::state_from_json(read_json_file(state_path));
        std::vector<double> a = angles;
        if (a.empty()) {
            a = {std::numbers::pi / 4.0, -std::numbers::pi / 4.0, 0.0, std::numbers::pi / 2.0};
        }
        if (a.size() != 4) throw DomainError("--angles needs four values a1,a2,b1,b2");
        s = qmat::chsh_value(rho, qmat::PlanarMeasurement(a[0]), qmat::PlanarMeasurement(a[1]),
                             qmat::PlanarMeasurement(a[2]), qmat::PlanarMeasurement(a[3]));
        // Key correlation: both key settings measure sigma_z.
        q = 0.5 * (1.0 - qmat::correlator(rho, qmat::PlanarMeasurement(0.0),
                                          qmat::PlanarMeasurement(0.0)));
        config["state"] = state_path;
        config["angles_rad"] = a;
    }
    config["s"] = s;
    config["q"] = q;

    const bounds::KeyRateReport report = bounds::dw_rate(bounds::ObservedStatistics(s, q));
    OutputTarget target(out_stream, out_path);
    if (as_json) {
        target.stream() << io::wrap_document("keyrate", config, io::key_rate_to_json(report))
                               .dump(2)
                        << "\n";
    } else {
        print_key_rates(target.stream(), report);
    }
    return report.r_di > 0.0 ? 0 : 2;
}

int cmd_curve(const CurveRequest& request, bool as_json, const std::string& out_path,
              std::ostream& out_stream) {
    const std::vector<CurveRow> rows = compute_curve(request);
    OutputTarget target(out_stream, out_path);
    if (as_json) {
        io::json jrows = io::json::array();
        for (const CurveRow& row : rows) {
            jrows.push_back(io::json{{"q", row.q},
                                     {"s", row.s},
                                     {"r_di", row.r_di},
                                     {"r_std", row.r_std ? io::json(*row.r_std)
                                                         : io::json(nullptr)}});
        }
        io::json config{{"q_min", request.q_min},
                        {"q_max", request.q_max},
                        {"steps", request.steps},
                        {"clamp_zero", request.clamp_zero}};
        target.stream() << io::wrap_document("curve", config, jrows).dump(2) << "\n";
    } else {
        write_curve_csv(target.stream(), rows, request.clamp_zero);
    }
    return 0;
}

int cmd_attack(const std::string& grid_spec, double q, bool as_json,
               const std::string& out_path, std::ostream& out_stream) {
    const std::vector<double> grid = parse_grid(grid_spec);
    const attack::SaturationReport report = attack::verify_saturation(grid, q);
    OutputTarget target(out_stream, out_path);
    if (as_json) {
        io::json config{{"s_grid", grid_spec}, {"q", q}};
        target.stream() << io::wrap_document("attack", config, io::saturation_to_json(report))
                               .dump(2)
                        << "\n";
    } else {
        target.stream() << "points             = " << report.points.size() << "\n"
                        << "max chsh deviation = " << fmt_g(report.max_chsh_deviation) << "\n"
                        << "max chi deviation  = " << fmt_g(report.max_holevo_deviation) << "\n"
                        << "max marginal       = " << fmt_g(report.max_marginal) << "\n"
                        << "saturation         = " << (report.all_pass ? "pass" : "FAIL")
                        << "\n";
    }
    return report.all_pass ? 0 : 1;
}

int cmd_reduce(const std::string& in_path, const std::string& out_path,
               std::ostream& out_stream) {
    const io::json j = read_json_file(in_path);
    const reduction::DichotomicObservable a1(io::operator_from_json(j.at("a1")));
    const reduction::DichotomicObservable a2(io::operator_from_json(j.at("a2")));
    const reduction::BlockDecomposition decomposition = reduction::jordan_blocks(a1, a2);
    const double deviation = reduction::verify_pinching(a1, a2, decomposition);
    OutputTarget target(out_stream, out_path);
    target.stream() << io::wrap_document("reduce", io::json{{"in", in_path}},
                                         io::block_report_to_json(decomposition, deviation))
                           .dump(2)
                    << "\n";
    return deviation <= 1e-9 ? 0 : 1;
}

void write_transcript_csv(std::ostream& out, const std::vector<simproto::RoundRecord>& records) {
    out << "round_index,alice_setting,bob_setting,a_out,b_out\n";
    static const char* alice_names[] = {"A0", "A1", "A2"};
    static const char* bob_names[] = {"B1", "B2"};
    for (const simproto::RoundRecord& rec : records) {
        out << rec.index << ',' << alice_names[static_cast<int>(rec.alice)] << ','
            << bob_names[static_cast<int>(rec.bob)] << ',' << static_cast<int>(rec.a_out) << ','
            << static_cast<int>(rec.b_out) << "\n";
    }
}

int cmd_simulate(double s, double q, const simproto::ProtocolConfig& config, bool as_json,
                 bool as_csv, const std::string& out_path, std::ostream& out_stream) {
    const attack::AttackSpec spec = attack::build_optimal_attack(s, q);
    std::vector<simproto::RoundRecord> records = simproto::sample_transcript(spec, config);
    if (config.symmetrize) simproto::symmetrize_transcript(records, config.seed);

    OutputTarget target(out_stream, out_path);
    if (as_csv) {
        write_transcript_csv(target.stream(), records);
        return 0;
    }
    const simproto::EstimationReport report = simproto::estimate_parameters(records);
    if (as_json) {
        io::json config_json{{"s", s},
                             {"q", q},
                             {"rounds", config.n_rounds},
                             {"seed", config.seed},
                             {"alice_probs", config.alice_probs},
                             {"bob_probs", config.bob_probs},
                             {"symmetrize", config.symmetrize}};
        target.stream() << io::wrap_document("simulate", config_json,
                                             io::estimation_to_json(report))
                               .dump(2)
                        << "\n";
    } else {
        target.stream() << "rounds    = " << report.n_rounds << "\n"
                        << "key pairs = " << report.n_key << "\n"
                        << "discarded = " << report.n_discarded << "\n"
                        << "q_hat     = " << fmt_g(report.q_hat) << " +- "
                        << fmt_g(report.q_se) << "\n"
                        << "s_hat     = " << fmt_g(report.s_hat) << " +- "
                        << fmt_g(report.s_se) << "\n"
                        << "r_DI      = " << fmt_g(report.rates.r_di) << "\n";
    }
    return 0;
}

int cmd_oracle(std::uint64_t samples, std::uint64_t seed, double tol, bool as_json,
               const std::string& out_path, std::ostream& out_stream) {
    const simproto::OracleReport report = simproto::oracle_step3_sweep(samples, seed, tol);
    OutputTarget target(out_stream, out_path);
    const std::uint64_t violations = report.violations_f + report.violations_chi;
    if (as_json) {
        io::json config{{"samples", samples}, {"seed", seed}, {"tol", tol}};
        target.stream() << io::wrap_document("oracle", config, io::oracle_to_json(report))
                               .dump(2)
                        << "\n";
    } else {
        target.stream() << violations << " violations, min slack vs F = "
                        << fmt_g(report.min_slack_f)
                        << ", min slack vs chi_lambda = " << fmt_g(report.min_slack_chi)
                        << " (" << report.n_samples << " samples)\n";
    }
    return violations == 0 ? 0 : 1;
}

}  // namespace

void CurveRequest::validate() const {
    if (!(q_min < q_max) || q_max > 0.5) {
        throw DomainError("curve needs q_min < q_max <= 0.5");
    }
    if (steps < 2) throw DomainError("curve needs at least 2 steps");
    if (s_rule == SRule::file && samples.size() < 2) {
        throw DomainError("curve file rule needs at least two (q, s) samples");
    }
}

std::vector<CurveRow> compute_curve(const CurveRequest& request) {
    request.validate();
    std::vector<CurveRow> rows;
    rows.reserve(static_cast<std::size_t>(request.steps));
    for (int i = 0; i < request.steps; ++i) {
        const double q =
            request.q_min + (request.q_max - request.q_min) * i / (request.steps - 1);
        double s = 0.0;
        switch (request.s_rule) {
            case SRule::line: s = bounds::default_s_line(q); break;
            case SRule::fixed: s = request.s_fixed; break;
            case SRule::file: {
                const auto& samples = request.samples;
                if (q <= samples.front().first) {
                    s = samples.front().second;
                } else if (q >= samples.back().first) {
                    s = samples.back().second;
                } else {
                    std::size_t hi = 1;
                    while (samples[hi].first < q) ++hi;
                    const auto& [q0, s0] = samples[hi - 1];
                    const auto& [q1, s1] = samples[hi];
                    s = s0 + (s1 - s0) * (q - q0) / (q1 - q0);
                }
                break;
            }
        }
        const bounds::KeyRateReport report =
            bounds::dw_rate(bounds::ObservedStatistics(s, q));
        rows.push_back(CurveRow{q, s, report.r_di, report.r_std});
    }
    return rows;
}

void write_curve_csv(std::ostream& out, const std::vector<CurveRow>& rows, bool clamp_zero) {
    out << "q,s,r_di,r_std\n";
    for (const CurveRow& row : rows) {
        const double r_di = clamp_zero ? std::max(row.r_di, 0.0) : row.r_di;
        out << fmt_g(row.q) << ',' << fmt_g(row.s) << ',' << fmt_g(r_di) << ',';
        if (row.r_std) out << fmt_g(clamp_zero ? std::max(*row.r_std, 0.0) : *row.r_std);
        out << "\n";
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Device-independent QKD security analysis: collective-attack key rates from "
                 "CHSH statistics"};
    app.set_version_flag("--version", std::string("diqkd ") + kVersion);
    app.require_subcommand(1);

    // keyrate
    auto* keyrate = app.add_subcommand("keyrate", "Key rates from observed (S, Q)");
    double kr_s = 0.0, kr_q = 0.0;
    std::string kr_state, kr_out;
    std::vector<double> kr_angles;
    bool kr_json = false;
    auto* kr_s_opt = keyrate->add_option("--s", kr_s, "observed CHSH value");
    auto* kr_q_opt = keyrate->add_option("--q", kr_q, "observed error rate (probability)");
    auto* kr_state_opt =
        keyrate->add_option("--state", kr_state, "two-qubit state JSON; S and Q are computed");
    keyrate->add_option("--angles", kr_angles, "a1,a2,b1,b2 angles in radians (with --state)")
        ->delimiter(',');
    keyrate->add_flag("--json", kr_json, "emit a JSON document");
    keyrate->add_option("--out", kr_out, "write output to a file");
    kr_state_opt->excludes(kr_s_opt)->excludes(kr_q_opt);

    // curve
    auto* curve = app.add_subcommand("curve", "Key-rate curve over an error-rate grid (CSV)");
    CurveRequest curve_request;
    std::string curve_rule = "line", curve_file, curve_out;
    double curve_s_fixed = bounds::kTsirelson;
    bool curve_json = false;
    curve->add_option("--q-min", curve_request.q_min, "grid start")->capture_default_str();
    curve->add_option("--q-max", curve_request.q_max, "grid end")->capture_default_str();
    curve->add_option("--steps", curve_request.steps, "grid points")->capture_default_str();
    curve->add_option("--s-rule", curve_rule, "line | fixed | file")->capture_default_str();
    curve->add_option("--s-value", curve_s_fixed, "S for --s-rule fixed");
    curve->add_option("--s-file", curve_file, "CSV of q,s samples for --s-rule file");
    curve->add_flag("--clamp-zero", curve_request.clamp_zero,
                    "render negative rates as zero");
    curve->add_flag("--json", curve_json, "emit a JSON document instead of CSV");
    curve->add_option("--out", curve_out, "write output to a file");

    // attack
    auto* attack_cmd = app.add_subcommand("attack", "Verify the optimal attack saturates the "
                                                    "Holevo bound on an S grid");
    std::string at_grid = "2.1:2.8:0.1", at_out;
    double at_q = 0.0;
    bool at_json = false;
    attack_cmd->add_option("--s-grid", at_grid, "grid start:stop:step")->capture_default_str();
    attack_cmd->add_option("--q", at_q, "error rate of the attack")->capture_default_str();
    attack_cmd->add_flag("--json", at_json, "emit a JSON document");
    attack_cmd->add_option("--out", at_out, "write output to a file");

    // reduce
    auto* reduce = app.add_subcommand("reduce", "Block-diagonalize a pair of dichotomic "
                                                "observables (JSON in, JSON out)");
    std::string rd_in, rd_out;
    reduce->add_option("--in", rd_in, "JSON file with operators \"a1\" and \"a2\"")->required();
    reduce->add_flag("--json", "output is always JSON; accepted for symmetry");
    reduce->add_option("--out", rd_out, "write output to a file");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo protocol rounds against the "
                                                    "optimal attack");
    double sim_s = bounds::kTsirelson, sim_q = 0.0;
    simproto::ProtocolConfig sim_config;
    std::vector<double> sim_alice, sim_bob;
    bool sim_no_symmetrize = false, sim_json = false, sim_csv = false;
    std::string sim_out;
    simulate->add_option("--s", sim_s, "attack CHSH value")->capture_default_str();
    simulate->add_option("--q", sim_q, "attack error rate")->capture_default_str();
    simulate->add_option("--rounds", sim_config.n_rounds, "number of rounds")
        ->capture_default_str();
    simulate->add_option("--seed", sim_config.seed, "master seed")->capture_default_str();
    simulate->add_option("--alice-probs", sim_alice, "p(A0),p(A1),p(A2)")->delimiter(',');
    simulate->add_option("--bob-probs", sim_bob, "p(B1),p(B2)")->delimiter(',');
    simulate->add_flag("--no-symmetrize", sim_no_symmetrize, "skip marginal symmetrization");
    auto* sim_json_flag = simulate->add_flag("--json", sim_json, "emit a JSON report");
    auto* sim_csv_flag =
        simulate->add_flag("--csv", sim_csv, "emit the transcript as CSV instead of a report");
    sim_csv_flag->excludes(sim_json_flag);
    simulate->add_option("--out", sim_out, "write output to a file");

    // oracle
    auto* oracle = app.add_subcommand("oracle", "Random-state sweep checking the Holevo bound "
                                                "from first principles");
    std::uint64_t or_samples = 100000, or_seed = 0;
    double or_tol = 1e-9;
    bool or_json = false;
    std::string or_out;
    oracle->add_option("--samples", or_samples, "number of random instances")
        ->capture_default_str();
    oracle->add_option("--seed", or_seed, "master seed")->capture_default_str();
    oracle->add_option("--tol", or_tol, "violation tolerance")->capture_default_str();
    oracle->add_flag("--json", or_json, "emit a JSON document");
    oracle->add_option("--out", or_out, "write output to a file");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (keyrate->parsed()) {
            if (kr_state.empty() && (kr_s_opt->count() == 0 || kr_q_opt->count() == 0)) {
                throw DomainError("keyrate needs --s and --q, or --state");
            }
            return cmd_keyrate(kr_s, kr_q, kr_state, kr_angles, kr_json, kr_out, out);
        }
        if (curve->parsed()) {
            if (curve_rule == "line") {
                curve_request.s_rule = SRule::line;
            } else if (curve_rule == "fixed") {
                curve_request.s_rule = SRule::fixed;
                curve_request.s_fixed = curve_s_fixed;
            } else if (curve_rule == "file") {
                curve_request.s_rule = SRule::file;
                std::ifstream in(curve_file);
                if (!in) throw Error("cannot open --s-file: " + curve_file);
                double q, s;
                char comma;
                while (in >> q >> comma >> s) curve_request.samples.emplace_back(q, s);
            } else {
                throw DomainError("unknown --s-rule: " + curve_rule);
            }
            return cmd_curve(curve_request, curve_json, curve_out, out);
        }
        if (attack_cmd->parsed()) return cmd_attack(at_grid, at_q, at_json, at_out, out);
        if (reduce->parsed()) return cmd_reduce(rd_in, rd_out, out);
        if (simulate->parsed()) {
            if (!sim_alice.empty()) {
                if (sim_alice.size() != 3) throw DomainError("--alice-probs needs 3 values");
                std::copy(sim_alice.begin(), sim_alice.end(), sim_config.alice_probs.begin());
            }
            if (!sim_bob.empty()) {
                if (sim_bob.size() != 2) throw DomainError("--bob-probs needs 2 values");
                std::copy(sim_bob.begin(), sim_bob.end(), sim_config.bob_probs.begin());
            }
            sim_config.symmetrize = !sim_no_symmetrize;
            return cmd_simulate(sim_s, sim_q, sim_config, sim_json, sim_csv, sim_out, out);
        }
        if (oracle->parsed()) {
            return cmd_oracle(or_samples, or_seed, or_tol, or_json, or_out, out);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    err << "error: no command\n";
    return 1;
}

}  // namespace diqkd::cli
