#include "diqkd/json_io.hpp"

#include <cmath>

#include "diqkd/version.hpp"

namespace diqkd::io {

using qmat::cplx;
using qmat::Matrix;

json operator_to_json(const Matrix& m) {
    const int d = m.dim();
    json re = json::array();
    json im = json::array();
    for (int i = 0; i < d; ++i) {
        json re_row = json::array();
        json im_row = json::array();
        for (int j = 0; j < d; ++j) {
            re_row.push_back(m(i, j).real());
            im_row.push_back(m(i, j).imag());
        }
        re.push_back(std::move(re_row));
        im.push_back(std::move(im_row));
    }
    return json{{"dim", d}, {"re", std::move(re)}, {"im", std::move(im)}};
}

Matrix operator_from_json(const json& j) {
    if (!j.contains("dim") || !j.contains("re")) {
        throw DomainError("operator JSON needs \"dim\" and \"re\" fields");
    }
    const int d = j.at("dim").get<int>();
    if (d < 1) throw DimensionError("operator JSON has dim < 1");
    const json& re = j.at("re");
    const json* im = j.contains("im") && !j.at("im").is_null() ? &j.at("im") : nullptr;
    if (static_cast<int>(re.size()) != d || (im != nullptr && static_cast<int>(im->size()) != d)) {
        throw DimensionError("operator JSON row count does not match dim");
    }
    Matrix m(d);
    for (int i = 0; i < d; ++i) {
        const json& re_row = re.at(static_cast<std::size_t>(i));
        if (static_cast<int>(re_row.size()) != d) {
            throw DimensionError("operator JSON column count does not match dim");
        }
        for (int jcol = 0; jcol < d; ++jcol) {
            double real = re_row.at(static_cast<std::size_t>(jcol)).get<double>();
            double imag = 0.0;
            if (im != nullptr) {
                imag = im->at(static_cast<std::size_t>(i))
                           .at(static_cast<std::size_t>(jcol))
                           .get<double>();
            }
            m(i, jcol) = cplx(real, imag);
        }
    }
    return m;
}

json state_to_json(const qmat::DensityMatrix& rho) { return operator_to_json(rho.op()); }

qmat::DensityMatrix state_from_json(const json& j) {
    return qmat::DensityMatrix(operator_from_json(j));
}

json attack_to_json(const attack::AttackSpec& spec) {
    return json{
        {"target_s", spec.target_s},
        {"target_q", spec.target_q},
        {"state", state_to_json(spec.rho_ab)},
        {"angles_rad",
         json{{"a1", spec.a1.angle},
              {"a2", spec.a2.angle},
              {"b1", spec.b1.angle},
              {"b2", spec.b2.angle}}},
        {"a0_flip_to_random_prob", spec.a0.flip_to_random_prob},
    };
}

attack::AttackSpec attack_from_json(const json& j) {
    const json& angles = j.at("angles_rad");
    attack::AttackSpec spec{
        .target_s = j.at("target_s").get<double>(),
        .target_q = j.at("target_q").get<double>(),
        .rho_ab = state_from_json(j.at("state")),
        .a1 = qmat::PlanarMeasurement(angles.at("a1").get<double>()),
        .a2 = qmat::PlanarMeasurement(angles.at("a2").get<double>()),
        .b1 = qmat::PlanarMeasurement(angles.at("b1").get<double>()),
        .b2 = qmat::PlanarMeasurement(angles.at("b2").get<double>()),
        .a0 = attack::A0NoiseChannel{j.at("a0_flip_to_random_prob").get<double>()},
    };
    return spec;
}

json key_rate_to_json(const bounds::KeyRateReport& report) {
    json j{
        {"s", report.s},       {"q", report.q},         {"iab", report.iab},
        {"chi_di", report.chi_di}, {"r_di", report.r_di},
    };
    j["chi_std"] = report.chi_std ? json(*report.chi_std) : json(nullptr);
    j["r_std"] = report.r_std ? json(*report.r_std) : json(nullptr);
    return j;
}

json block_report_to_json(const reduction::BlockDecomposition& decomposition,
                          double pinching_deviation) {
    json blocks = json::array();
    for (const reduction::Block& block : decomposition.blocks) {
        json b{{"rank", block.rank}};
        if (block.rank == 2) {
            b["phase_rad"] = block.theta;
            b["a1_bloch"] = json{{"x", 0.0}, {"z", 1.0}};
            b["a2_bloch"] = json{{"x", std::sin(block.theta)}, {"z", std::cos(block.theta)}};
        } else {
            b["a1_scalar"] = block.a1_outcome;
            b["a2_scalar"] = block.a2_outcome;
        }
        blocks.push_back(std::move(b));
    }
    return json{{"dim", decomposition.dim},
                {"pinching_deviation", pinching_deviation},
                {"blocks", std::move(blocks)}};
}

json saturation_to_json(const attack::SaturationReport& report) {
    json points = json::array();
    for (const attack::SaturationPoint& p : report.points) {
        points.push_back(json{{"s", p.s},
                              {"chsh_deviation", p.chsh_deviation},
                              {"holevo_deviation", p.holevo_deviation},
                              {"max_marginal", p.max_marginal},
                              {"chi_exact", p.chi_exact},
                              {"chi_bound", p.chi_bound},
                              {"pass", p.pass}});
    }
    return json{{"all_pass", report.all_pass},
                {"max_chsh_deviation", report.max_chsh_deviation},
                {"max_holevo_deviation", report.max_holevo_deviation},
                {"max_marginal", report.max_marginal},
                {"points", std::move(points)}};
}

json estimation_to_json(const simproto::EstimationReport& report) {
    return json{
        {"n_rounds", report.n_rounds},
        {"n_key", report.n_key},
        {"n_discarded", report.n_discarded},
        {"n_test",
         json{{"a1b1", report.n_test[0][0]},
              {"a1b2", report.n_test[0][1]},
              {"a2b1", report.n_test[1][0]},
              {"a2b2", report.n_test[1][1]}}},
        {"q_hat", report.q_hat},
        {"q_se", report.q_se},
        {"s_hat", report.s_hat},
        {"s_se", report.s_se},
        {"correlators",
         json{{"a1b1", report.correlators[0][0]},
              {"a1b2", report.correlators[0][1]},
              {"a2b1", report.correlators[1][0]},
              {"a2b2", report.correlators[1][1]}}},
        {"alice_marginals", report.alice_marginals},
        {"bob_marginals", report.bob_marginals},
        {"s_clamped", report.s_clamped},
        {"q_clamped", report.q_clamped},
        {"key_rates", key_rate_to_json(report.rates)},
    };
}

namespace {

json oracle_instance_to_json(const simproto::OracleInstance& inst) {
    const auto lam = inst.spectrum.values();
    return json{
        {"lambda", json{{"phi_plus", lam[0]},
                        {"psi_minus", lam[1]},
                        {"phi_minus", lam[2]},
                        {"psi_plus", lam[3]}}},
        {"angles_rad", json{{"a1", inst.a1}, {"a2", inst.a2}, {"b1", inst.b1}, {"b2", inst.b2}}},
        {"s_achieved", inst.s_achieved},
        {"chi_exact", inst.chi_exact},
        {"f_bound", inst.f_bound},
        {"chi_lambda_upper", inst.eq_bound},
    };
}

}  // namespace

json oracle_to_json(const simproto::OracleReport& report) {
    return json{
        {"n_samples", report.n_samples},
        {"violations_f", report.violations_f},
        {"violations_chi_upper", report.violations_chi},
        {"min_slack_f", report.min_slack_f},
        {"min_slack_chi_upper", report.min_slack_chi},
        {"argmin_f", oracle_instance_to_json(report.argmin_f)},
        {"argmin_chi_upper", oracle_instance_to_json(report.argmin_chi)},
    };
}

json wrap_document(const std::string& command, json config, json result) {
    return json{{"tool", "diqkd"},
                {"version", kVersion},
                {"command", command},
                {"config", std::move(config)},
                {"result", std::move(result)}};
}

}  // namespace diqkd::io
