#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "featprog/errors.hpp"
#include "featprog/series.hpp"

namespace featprog {

/// Summary statistic applied by the Window operator.
enum class WindowStat { mean, max, min, sum, std, ewm };

inline constexpr WindowStat all_window_stats[] = {WindowStat::mean, WindowStat::max, WindowStat::min,
                                                  WindowStat::sum,  WindowStat::std, WindowStat::ewm};

/// Name used in program files ("mean", "max", ...).
[[nodiscard]] constexpr std::string_view stat_name(WindowStat s) noexcept {
    switch (s) {
        case WindowStat::mean: return "mean";
        case WindowStat::max: return "max";
        case WindowStat::min: return "min";
        case WindowStat::sum: return "sum";
        case WindowStat::std: return "std";
        case WindowStat::ewm: return "ewm";
    }
    return "?";
}

/// Expression function implementing the statistic ("wmean", ..., "ewm").
[[nodiscard]] constexpr std::string_view stat_function(WindowStat s) noexcept {
    switch (s) {
        case WindowStat::mean: return "wmean";
        case WindowStat::max: return "wmax";
        case WindowStat::min: return "wmin";
        case WindowStat::sum: return "wsum";
        case WindowStat::std: return "wstd";
        case WindowStat::ewm: return "ewm";
    }
    return "?";
}

[[nodiscard]] inline std::optional<WindowStat> parse_stat_name(std::string_view s) noexcept {
    for (auto k : all_window_stats)
        if (stat_name(k) == s) return k;
    return std::nullopt;
}

[[nodiscard]] inline std::optional<WindowStat> parse_stat_function(std::string_view s) noexcept {
    for (auto k : all_window_stats)
        if (stat_function(k) == s) return k;
    return std::nullopt;
}

namespace kernels {

/// Normalized windowed EWM weights; index j is the lag (j = 0 is the newest sample).
[[nodiscard]] inline std::vector<double> ewm_weights(std::size_t w) {
    const double alpha = 2.0 / (static_cast<double>(w) + 1.0);
    std::vector<double> wt(w);
    double total = 0.0;
    double p = 1.0;
    for (std::size_t j = 0; j < w; ++j) {
        wt[j] = p;
        total += p;
        p *= 1.0 - alpha;
    }
    for (auto& x : wt) x /= total;
    return wt;
}

[[nodiscard]] inline Series shift_values(const Series& s, std::size_t k) {
    Series out(s.size());
    for (std::size_t t = k; t < s.size(); ++t) out[t] = s[t - k];
    return out;
}

/// out[t] = stat(s[t-w+1..t]) if all w samples are present, else missing.
/// Each output is recomputed directly from its slice.
[[nodiscard]] inline Series window_values(const Series& s, std::size_t w, WindowStat stat) {
    const std::size_t n = s.size();
    Series out(n);
    if (w == 0 || w > n) return out;
    const auto weights = stat == WindowStat::ewm ? ewm_weights(w) : std::vector<double>{};
    const double wd = static_cast<double>(w);
    std::size_t run = 0;  // consecutive present samples ending at t
    for (std::size_t t = 0; t < n; ++t) {
        run = s[t] ? run + 1 : 0;
        if (run < w) continue;
        const std::size_t lo = t + 1 - w;
        double acc = 0.0;
        switch (stat) {
            case WindowStat::mean:
            case WindowStat::sum:
                for (std::size_t j = lo; j <= t; ++j) acc += *s[j];
                out[t] = stat == WindowStat::mean ? acc / wd : acc;
                break;
            case WindowStat::max:
                acc = *s[lo];
                for (std::size_t j = lo + 1; j <= t; ++j) acc = std::max(acc, *s[j]);
                out[t] = acc;
                break;
            case WindowStat::min:
                acc = *s[lo];
                for (std::size_t j = lo + 1; j <= t; ++j) acc = std::min(acc, *s[j]);
                out[t] = acc;
                break;
            case WindowStat::std: {
                for (std::size_t j = lo; j <= t; ++j) acc += *s[j];
                const double mean = acc / wd;
                double ss = 0.0;
                for (std::size_t j = lo; j <= t; ++j) ss += (*s[j] - mean) * (*s[j] - mean);
                out[t] = std::sqrt(ss / wd);
                break;
            }
            case WindowStat::ewm:
                for (std::size_t j = 0; j < w; ++j) acc += weights[j] * *s[t - j];
                out[t] = acc;
                break;
        }
    }
    return out;
}

namespace detail {

inline void require_same_length(const FeatureSeries& a, const FeatureSeries& b, std::string_view op) {
    if (a.values.size() != b.values.size()) {
        throw shape_error(std::string(op) + ": length mismatch (" + std::to_string(a.values.size()) +
                          " vs " + std::to_string(b.values.size()) + ")");
    }
}

inline FeatureSeries derived(std::string lineage, unsigned order, Series values, std::size_t warmup) {
    FeatureSeries f;
    f.name = lineage;
    f.lineage = std::move(lineage);
    f.order = order;
    f.values = std::move(values);
    f.warmup = warmup;
    return f;
}

}  // namespace detail

}  // namespace kernels

/// Raw variate as an order-0 feature with zero warmup.
[[nodiscard]] inline FeatureSeries raw_feature(const Series& s) {
    return kernels::detail::derived("raw", 0, s, 0);
}

/// out[t] = s[t-k]. Only positive lags are accepted (no look-ahead).
[[nodiscard]] inline FeatureSeries shift(const FeatureSeries& s, std::int64_t k) {
    if (k <= 0) throw parameter_error("shift: lag must be >= 1, got " + std::to_string(k));
    const auto lag = static_cast<std::size_t>(k);
    if (lag >= s.values.size()) {
        throw empty_output_error("shift: lag " + std::to_string(k) + " leaves no samples of " +
                                 std::to_string(s.values.size()));
    }
    return kernels::detail::derived("shift(" + s.lineage + "," + std::to_string(k) + ")", s.order,
                                    kernels::shift_values(s.values, lag), s.warmup + lag);
}

/// Trailing-window statistic over lookback `w`.
[[nodiscard]] inline FeatureSeries window(const FeatureSeries& s, std::int64_t w, WindowStat stat) {
    if (w <= 0) throw parameter_error("window: lookback must be >= 1, got " + std::to_string(w));
    const auto lb = static_cast<std::size_t>(w);
    return kernels::detail::derived(std::string(stat_function(stat)) + "(" + s.lineage + "," + std::to_string(w) + ")",
                                    s.order, kernels::window_values(s.values, lb, stat), s.warmup + lb - 1);
}

/// Smooth both inputs with a `smoothing`-sample mean, then subtract. Raises the order by one.
[[nodiscard]] inline FeatureSeries difference(const FeatureSeries& a, const FeatureSeries& b,
                                              std::int64_t smoothing = 1) {
    kernels::detail::require_same_length(a, b, "difference");
    if (smoothing <= 0) throw parameter_error("difference: smoothing must be >= 1, got " + std::to_string(smoothing));
    const auto sm = static_cast<std::size_t>(smoothing);
    Series out(a.values.size());
    if (sm == 1) {
        for (std::size_t t = 0; t < out.size(); ++t)
            if (a.values[t] && b.values[t]) out[t] = *a.values[t] - *b.values[t];
    } else {
        const auto sa = kernels::window_values(a.values, sm, WindowStat::mean);
        const auto sb = kernels::window_values(b.values, sm, WindowStat::mean);
        for (std::size_t t = 0; t < out.size(); ++t)
            if (sa[t] && sb[t]) out[t] = *sa[t] - *sb[t];
    }
    std::string lineage = "diff(" + a.lineage + "," + b.lineage;
    if (sm != 1) lineage += "," + std::to_string(smoothing);
    lineage += ")";
    return kernels::detail::derived(std::move(lineage), std::max(a.order, b.order) + 1, std::move(out),
                                    std::max(a.warmup, b.warmup) + sm - 1);
}

/// a / b; missing wherever b is exactly zero.
[[nodiscard]] inline FeatureSeries ratio(const FeatureSeries& a, const FeatureSeries& b) {
    kernels::detail::require_same_length(a, b, "ratio");
    Series out(a.values.size());
    for (std::size_t t = 0; t < out.size(); ++t)
        if (a.values[t] && b.values[t] && *b.values[t] != 0.0) out[t] = *a.values[t] / *b.values[t];
    return kernels::detail::derived("ratio(" + a.lineage + "," + b.lineage + ")", std::max(a.order, b.order),
                                    std::move(out), std::max(a.warmup, b.warmup));
}

[[nodiscard]] inline FeatureSeries square(const FeatureSeries& a) {
    Series out(a.values.size());
    for (std::size_t t = 0; t < out.size(); ++t)
        if (a.values[t]) out[t] = *a.values[t] * *a.values[t];
    return kernels::detail::derived("square(" + a.lineage + ")", a.order, std::move(out), a.warmup);
}

}  // namespace featprog
