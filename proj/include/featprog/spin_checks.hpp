#pragma once

// Exhaustive-enumeration cross-checks of a small spin gas.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "featprog/errors.hpp"
#include "featprog/spin_gas.hpp"

namespace featprog::spin {

struct CheckResult {
    std::string name;
    double value = 0.0;  // worst deviation found
    double tolerance = 0.0;
    bool asserted = true;

    [[nodiscard]] bool passed() const { return !asserted || value <= tolerance; }
};

struct ValidationReport {
    std::size_t n = 0;
    std::vector<CheckResult> checks;

    [[nodiscard]] bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed(); });
    }

    [[nodiscard]] nlohmann::json to_json() const {
        auto arr = nlohmann::json::array();
        for (const auto& c : checks) {
            arr.push_back({{"check", c.name},
                           {"max_deviation", c.value},
                           {"tolerance", c.tolerance},
                           {"asserted", c.asserted},
                           {"passed", c.passed()}});
        }
        return {{"n", n}, {"passed", passed()}, {"checks", arr}};
    }
};

/// Sum over end configurations of the L-step path probability.
[[nodiscard]] inline double path_total(const SpinGasParams& params, const SpinHistory& start, std::size_t steps) {
    double total = 0.0;
    for (std::uint64_t b = 0; b < (std::uint64_t{1} << params.n); ++b)
        total += path_probability(params, start, spins_from_bits(b, params.n), steps);
    return total;
}

/// Worst |P_L(end) - sum_mid P_1(mid) P_{L-1}(end | mid)| over end configurations.
[[nodiscard]] inline double chapman_kolmogorov_gap(const SpinGasParams& params, const SpinHistory& start,
                                                   std::size_t steps) {
    const std::uint64_t configs = std::uint64_t{1} << params.n;
    double worst = 0.0;
    for (std::uint64_t e = 0; e < configs; ++e) {
        const Spins end = spins_from_bits(e, params.n);
        double split = 0.0;
        for (std::uint64_t m = 0; m < configs; ++m) {
            const Spins mid = spins_from_bits(m, params.n);
            split += path_probability(params, start, mid, 1) *
                     path_probability(params, start.advanced(mid), end, steps - 1, 1);
        }
        worst = std::max(worst, std::abs(split - path_probability(params, start, end, steps)));
    }
    return worst;
}

/// Worst |enumerated L-step probability - (T^L)(start, end)| for memoryless params.
[[nodiscard]] inline double matrix_power_gap(const SpinGasParams& params, const Spins& start, std::size_t steps) {
    const Matrix T = transition_matrix(params);
    Matrix P = Matrix::Identity(T.rows(), T.cols());
    for (std::size_t l = 0; l < steps; ++l) P = P * T;
    const auto row = static_cast<Eigen::Index>(bits_from_spins(start));
    double worst = 0.0;
    for (std::uint64_t e = 0; e < (std::uint64_t{1} << params.n); ++e) {
        const double enumerated = path_probability(params, {start, start, start}, spins_from_bits(e, params.n), steps);
        worst = std::max(worst, std::abs(enumerated - P(row, static_cast<Eigen::Index>(e))));
    }
    return worst;
}

/// Normalization, Chapman-Kolmogorov, transition-matrix and joint-model checks.
[[nodiscard]] inline ValidationReport validate_model(const SpinGasParams& params, const SpinHistory& history,
                                                     double tolerance = 1e-10) {
    params.validate();
    if (params.n > max_joint_spins) {
        throw capacity_error("validation enumerates 2^(2N) joint states; N=" + std::to_string(params.n) +
                             " exceeds the limit of " + std::to_string(max_joint_spins));
    }
    ValidationReport r;
    r.n = params.n;
    const std::size_t max_steps = std::min<std::size_t>(4, 1 + max_path_bits / params.n);

    for (std::size_t L = 1; L <= max_steps; ++L) {
        r.checks.push_back({"path_normalization_L" + std::to_string(L),
                            std::abs(path_total(params, history, L) - 1.0), tolerance, true});
    }
    for (std::size_t L = 2; L <= max_steps; ++L) {
        r.checks.push_back({"chapman_kolmogorov_L" + std::to_string(L), chapman_kolmogorov_gap(params, history, L),
                            tolerance, true});
    }
    if (params.memoryless() && params.schedule.empty()) {
        for (std::size_t L = 1; L <= max_steps; ++L) {
            r.checks.push_back({"transition_matrix_power_L" + std::to_string(L),
                                matrix_power_gap(params, history.current, L), tolerance, true});
        }
    }
    const auto jm = build_joint(params, history.prev, history.prev2);
    const auto nc = check_node_conditionals(jm, tolerance);
    r.checks.push_back({"joint_normalization", std::abs(nc.table_sum - 1.0), 1e-12, true});
    r.checks.push_back({"next_node_conditionals", nc.max_next_deviation, tolerance, true});
    r.checks.push_back({"now_node_conditionals", nc.max_now_deviation, tolerance, nc.now_asserted});
    return r;
}

}  // namespace featprog::spin
