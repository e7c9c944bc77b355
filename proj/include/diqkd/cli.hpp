#pragma once

#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "diqkd/bounds.hpp"

namespace diqkd::cli {

enum class SRule { line, fixed, file };

/// Grid request for the key-rate curve.
struct CurveRequest {
    double q_min = 0.0;
    double q_max = 0.15;
    int steps = 151;
    SRule s_rule = SRule::line;
    double s_fixed = 0.0;
    std::vector<std::pair<double, double>> samples;  // (q, s), for SRule::file
    bool clamp_zero = false;

    void validate() const;
};

struct CurveRow {
    double q = 0.0;
    double s = 0.0;
    double r_di = 0.0;
    std::optional<double> r_std;
};

std::vector<CurveRow> compute_curve(const CurveRequest& request);

/// CSV with header "q,s,r_di,r_std", one row per grid point, %.10g formatting;
/// r_std renders as an empty cell where undefined. Byte-stable for fixed
/// inputs.
void write_curve_csv(std::ostream& out, const std::vector<CurveRow>& rows, bool clamp_zero);

/// Entry point shared by the binary and the tests. Returns the process exit
/// code: 0 success (for `keyrate`: positive rate), 2 zero-or-negative rate,
/// 1 any error.
int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
        std::ostream& err = std::cerr);

}  // namespace diqkd::cli
