#pragma once

// Classical technical indicators written as plain loops over a raw series,
// independent of the operator kernels. Undefined positions are missing.

#include <cstddef>
#include <string>

#include "featprog/errors.hpp"
#include "featprog/program.hpp"
#include "featprog/series.hpp"

namespace featprog::handcrafted {

namespace detail {

inline void check_lag(std::size_t dtau) {
    if (dtau < 1) throw parameter_error("dtau must be >= 1");
}

}  // namespace detail

/// Momentum (x_t - x_{t-dtau}) / x_{t-dtau}.
[[nodiscard]] inline Series momentum(const Series& x, std::size_t dtau) {
    detail::check_lag(dtau);
    Series out(x.size());
    for (std::size_t t = dtau; t < x.size(); ++t) {
        const auto& now = x[t];
        const auto& then = x[t - dtau];
        if (now && then && *then != 0.0) out[t] = (*now - *then) / *then;
    }
    return out;
}

/// Bias against the simple moving average over the last dtau samples.
[[nodiscard]] inline Series bias(const Series& x, std::size_t dtau) {
    detail::check_lag(dtau);
    Series out(x.size());
    for (std::size_t t = dtau - 1; t < x.size(); ++t) {
        double total = 0.0;
        bool ok = true;
        for (std::size_t j = t + 1 - dtau; j <= t; ++j) {
            if (!x[j]) {
                ok = false;
                break;
            }
            total += *x[j];
        }
        if (!ok) continue;
        const double sma = total / static_cast<double>(dtau);
        if (sma != 0.0) out[t] = (*x[t] - sma) / sma;
    }
    return out;
}

/// Sum of squares over the last dtau samples.
[[nodiscard]] inline Series abs_energy(const Series& x, std::size_t dtau) {
    detail::check_lag(dtau);
    Series out(x.size());
    for (std::size_t t = dtau - 1; t < x.size(); ++t) {
        double total = 0.0;
        bool ok = true;
        for (std::size_t j = t + 1 - dtau; j <= t; ++j) {
            if (!x[j]) {
                ok = false;
                break;
            }
            total += *x[j] * *x[j];
        }
        if (ok) out[t] = total;
    }
    return out;
}

[[nodiscard]] inline Series indicator(Resemblance which, const Series& x, std::size_t dtau) {
    switch (which) {
        case Resemblance::mom: return momentum(x, dtau);
        case Resemblance::bias: return bias(x, dtau);
        case Resemblance::absenergy: return abs_energy(x, dtau);
    }
    throw parameter_error("unknown indicator");
}

}  // namespace featprog::handcrafted
