#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "featprog/errors.hpp"

namespace featprog {

/// One scalar observation; `std::nullopt` marks a missing sample.
using Sample = std::optional<double>;
using Series = std::vector<Sample>;

[[nodiscard]] inline Series to_series(std::span<const double> raw) {
    Series out;
    out.reserve(raw.size());
    for (double v : raw) {
        out.push_back(std::isfinite(v) ? Sample{v} : std::nullopt);
    }
    return out;
}

[[nodiscard]] inline std::size_t count_missing(const Series& s) {
    return static_cast<std::size_t>(
        std::count_if(s.begin(), s.end(), [](const Sample& v) { return !v.has_value(); }));
}

/// N aligned univariate series of common length T sharing one time index.
///
/// Immutable once built; copies are cheap to share through `std::shared_ptr<const Panel>`.
class Panel {
public:
    /// Validates shape and index; non-finite samples become missing.
    /// An empty `time` defaults to 0..T-1 and empty `names` to v0..v{N-1}.
    static Panel make(const std::vector<std::vector<double>>& rows,
                      std::vector<std::int64_t> time = {},
                      std::vector<std::string> names = {}) {
        std::vector<Series> series;
        series.reserve(rows.size());
        for (const auto& r : rows) series.push_back(to_series(r));
        return Panel(std::move(series), std::move(time), std::move(names));
    }

    Panel(std::vector<Series> series, std::vector<std::int64_t> time = {},
          std::vector<std::string> names = {})
        : series_(std::move(series)), time_(std::move(time)), names_(std::move(names)) {
        if (series_.empty()) throw shape_error("panel needs at least one variate");
        const std::size_t t = series_.front().size();
        if (t == 0) throw shape_error("panel needs at least one time step");
        for (std::size_t i = 0; i < series_.size(); ++i) {
            if (series_[i].size() != t) {
                throw shape_error("variate " + std::to_string(i) + " has length " +
                                  std::to_string(series_[i].size()) + ", expected " +
                                  std::to_string(t));
            }
            for (auto& v : series_[i]) {
                if (v && !std::isfinite(*v)) v.reset();
            }
        }
        if (time_.empty()) {
            time_.resize(t);
            for (std::size_t k = 0; k < t; ++k) time_[k] = static_cast<std::int64_t>(k);
        } else if (time_.size() != t) {
            throw shape_error("time index has " + std::to_string(time_.size()) +
                              " labels for " + std::to_string(t) + " steps");
        }
        for (std::size_t k = 1; k < t; ++k) {
            if (time_[k] <= time_[k - 1]) {
                throw index_error("time index not strictly increasing at position " +
                                  std::to_string(k));
            }
        }
        if (names_.empty()) {
            for (std::size_t i = 0; i < series_.size(); ++i) names_.push_back("v" + std::to_string(i));
        } else if (names_.size() != series_.size()) {
            throw shape_error("expected " + std::to_string(series_.size()) + " variate names");
        }
    }

    [[nodiscard]] std::size_t n_variates() const noexcept { return series_.size(); }
    [[nodiscard]] std::size_t length() const noexcept { return time_.size(); }
    [[nodiscard]] const Series& variate(std::size_t i) const { return series_.at(i); }
    [[nodiscard]] const std::vector<Series>& series() const noexcept { return series_; }
    [[nodiscard]] const std::vector<std::int64_t>& time() const noexcept { return time_; }
    [[nodiscard]] const std::vector<std::string>& names() const noexcept { return names_; }

    /// Sub-panel of the given variates, in the given order.
    [[nodiscard]] Panel select(std::span<const std::size_t> variates) const {
        std::vector<Series> s;
        std::vector<std::string> n;
        for (std::size_t i : variates) {
            s.push_back(series_.at(i));
            n.push_back(names_.at(i));
        }
        return Panel(std::move(s), time_, std::move(n));
    }

    /// Time steps [begin, length()).
    [[nodiscard]] Panel tail(std::size_t begin) const {
        if (begin >= length()) throw empty_output_error("panel tail would be empty");
        std::vector<Series> s;
        for (const auto& x : series_) s.emplace_back(x.begin() + static_cast<std::ptrdiff_t>(begin), x.end());
        return Panel(std::move(s),
                     std::vector<std::int64_t>(time_.begin() + static_cast<std::ptrdiff_t>(begin), time_.end()),
                     names_);
    }

    friend bool operator==(const Panel&, const Panel&) = default;

private:
    std::vector<Series> series_;
    std::vector<std::int64_t> time_;
    std::vector<std::string> names_;
};

/// A derived series with its generalized-derivative order and provenance.
///
/// `lineage` is the canonical, fully inlined expression (only `raw` as a leaf),
/// so it regenerates `values` on its own. Every `values[t]` with `t < warmup`
/// is missing.
struct FeatureSeries {
    std::string name;
    unsigned order = 0;
    Series values;
    std::size_t warmup = 0;
    std::string lineage;

    friend bool operator==(const FeatureSeries&, const FeatureSeries&) = default;
};

struct GenerationMetadata {
    std::string program_hash;
    std::string timestamp;  // ISO-8601 UTC
};

/// Per-variate feature lists, K features each with the same names in the same order.
class FeatureMatrix {
public:
    FeatureMatrix(std::shared_ptr<const Panel> panel,
                  std::vector<std::vector<FeatureSeries>> features,
                  GenerationMetadata meta = {})
        : panel_(std::move(panel)), features_(std::move(features)), meta_(std::move(meta)) {
        if (!panel_) throw shape_error("feature matrix needs a panel");
        if (features_.size() != panel_->n_variates()) {
            throw shape_error("feature matrix has " + std::to_string(features_.size()) +
                              " variates, panel has " + std::to_string(panel_->n_variates()));
        }
        const auto& first = features_.front();
        std::unordered_set<std::string> seen;
        for (const auto& f : first) {
            if (!seen.insert(f.name).second) throw shape_error("duplicate feature name '" + f.name + "'");
        }
        for (const auto& per_var : features_) {
            if (per_var.size() != first.size()) throw shape_error("feature count differs across variates");
            for (std::size_t k = 0; k < per_var.size(); ++k) {
                const auto& f = per_var[k];
                if (f.name != first[k].name) throw shape_error("feature names differ across variates");
                if (f.values.size() != panel_->length()) {
                    throw shape_error("feature '" + f.name + "' has wrong length");
                }
                const std::size_t lim = std::min(f.warmup, f.values.size());
                for (std::size_t t = 0; t < lim; ++t) {
                    if (f.values[t]) throw shape_error("feature '" + f.name + "' defined inside its warmup");
                }
            }
        }
    }

    [[nodiscard]] const Panel& panel() const noexcept { return *panel_; }
    [[nodiscard]] std::shared_ptr<const Panel> panel_ptr() const noexcept { return panel_; }
    [[nodiscard]] std::size_t n_variates() const noexcept { return features_.size(); }
    [[nodiscard]] std::size_t n_features() const noexcept { return features_.front().size(); }
    [[nodiscard]] std::size_t length() const noexcept { return panel_->length(); }
    [[nodiscard]] const std::vector<FeatureSeries>& variate(std::size_t i) const { return features_.at(i); }
    [[nodiscard]] const std::vector<std::vector<FeatureSeries>>& features() const noexcept { return features_; }
    [[nodiscard]] const GenerationMetadata& metadata() const noexcept { return meta_; }

    [[nodiscard]] std::vector<std::string> feature_names() const {
        std::vector<std::string> out;
        for (const auto& f : features_.front()) out.push_back(f.name);
        return out;
    }

    [[nodiscard]] std::size_t max_warmup() const noexcept {
        std::size_t w = 0;
        for (const auto& per_var : features_)
            for (const auto& f : per_var) w = std::max(w, f.warmup);
        return w;
    }

private:
    std::shared_ptr<const Panel> panel_;
    std::vector<std::vector<FeatureSeries>> features_;
    GenerationMetadata meta_;
};

/// Truncates every series (and the panel) to t >= max warmup.
[[nodiscard]] inline FeatureMatrix drop_warmup(const FeatureMatrix& m) {
    const std::size_t start = m.max_warmup();
    if (start >= m.length()) {
        throw empty_output_error("max warmup " + std::to_string(start) + " leaves no rows of " +
                                 std::to_string(m.length()));
    }
    if (start == 0) return m;
    auto panel = std::make_shared<const Panel>(m.panel().tail(start));
    std::vector<std::vector<FeatureSeries>> out;
    out.reserve(m.n_variates());
    for (const auto& per_var : m.features()) {
        auto& dst = out.emplace_back();
        for (const auto& f : per_var) {
            FeatureSeries g = f;
            g.values.assign(f.values.begin() + static_cast<std::ptrdiff_t>(start), f.values.end());
            g.warmup = 0;
            dst.push_back(std::move(g));
        }
    }
    return FeatureMatrix(std::move(panel), std::move(out), m.metadata());
}

}  // namespace featprog
