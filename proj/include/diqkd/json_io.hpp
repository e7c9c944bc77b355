#pragma once

#include <string>

#include <json.hpp>

#include "diqkd/attack.hpp"
#include "diqkd/bounds.hpp"
#include "diqkd/qmat.hpp"
#include "diqkd/reduction.hpp"
#include "diqkd/simproto.hpp"

namespace diqkd::io {

using json = nlohmann::ordered_json;

/// Operator wire format: {"dim": d, "re": [[...]], "im": [[...]]}, row-major.
json operator_to_json(const qmat::Matrix& m);
qmat::Matrix operator_from_json(const json& j);

json state_to_json(const qmat::DensityMatrix& rho);
qmat::DensityMatrix state_from_json(const json& j);

json attack_to_json(const attack::AttackSpec& spec);
attack::AttackSpec attack_from_json(const json& j);

json key_rate_to_json(const bounds::KeyRateReport& report);

/// Block report: phases, ranks, per-block Bloch vectors of the reduced
/// observables, and the pinching deviation.
json block_report_to_json(const reduction::BlockDecomposition& decomposition,
                          double pinching_deviation);

json saturation_to_json(const attack::SaturationReport& report);

json estimation_to_json(const simproto::EstimationReport& report);

json oracle_to_json(const simproto::OracleReport& report);

/// Wraps a command result in the self-describing document every --json output
/// uses: tool name, version, command, resolved configuration, result.
json wrap_document(const std::string& command, json config, json result);

}  // namespace diqkd::io
