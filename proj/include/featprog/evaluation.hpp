#pragma once

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "featprog/engine.hpp"
#include "featprog/errors.hpp"
#include "featprog/handcrafted.hpp"
#include "featprog/kernels.hpp"
#include "featprog/program.hpp"
#include "featprog/series.hpp"
#include "featprog/spin_gas.hpp"

namespace featprog::eval {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct RowKey {
    std::size_t variate = 0;
    std::size_t t = 0;

    friend bool operator==(const RowKey&, const RowKey&) = default;
    friend auto operator<=>(const RowKey&, const RowKey&) = default;
};

/// Pooled (variate, time) rows with complete features and one-step-ahead targets.
/// Every test row is later in time than every train row.
struct SupervisedTable {
    std::vector<std::string> feature_names;
    Matrix x_train;
    Vector y_train;
    std::vector<RowKey> train_keys;
    Matrix x_test;
    Vector y_test;
    std::vector<RowKey> test_keys;
    /// First time index assigned to the test split.
    std::size_t split_time = 0;
    std::size_t usable_steps = 0;
};

namespace detail {

inline Matrix to_matrix(const std::vector<std::vector<double>>& rows, std::size_t k) {
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(k));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < k; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    return m;
}

inline Vector to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace detail

/// Builds the table against targets already aligned to feature time:
/// the target of row (i, t) is `targets.variate(i)[t]`.
///
/// Rows start at max(max warmup, `min_start`); the last time step is never
/// used; the first ceil(split * usable) steps form the train split.
[[nodiscard]] inline SupervisedTable build_table_aligned(const std::vector<Series>& targets, const FeatureMatrix& m,
                                                         double split, std::size_t min_start = 0) {
    if (!(split > 0.0 && split < 1.0)) throw parameter_error("split must lie in (0, 1)");
    if (targets.size() != m.n_variates()) throw shape_error("targets and features differ in variate count");
    const std::size_t T = m.length();
    for (const auto& s : targets)
        if (s.size() != T) throw shape_error("targets and features differ in length");

    const std::size_t start = std::max(m.max_warmup(), min_start);
    SupervisedTable tab;
    tab.feature_names = m.feature_names();
    if (start + 1 >= T) throw insufficient_data_error("no usable time steps after warmup " + std::to_string(start));
    tab.usable_steps = T - 1 - start;
    const auto n_train_steps = static_cast<std::size_t>(std::ceil(split * static_cast<double>(tab.usable_steps)));
    tab.split_time = start + n_train_steps;

    const std::size_t k = m.n_features();
    std::vector<std::vector<double>> xtr, xte;
    std::vector<double> ytr, yte;
    for (std::size_t i = 0; i < m.n_variates(); ++i) {
        const auto& feats = m.variate(i);
        for (std::size_t t = start; t + 1 < T; ++t) {
            const auto& y = targets[i][t];
            if (!y) continue;
            std::vector<double> row(k);
            bool complete = true;
            for (std::size_t c = 0; c < k && complete; ++c) {
                if (const auto& v = feats[c].values[t]) row[c] = *v;
                else complete = false;
            }
            if (!complete) continue;
            if (t < tab.split_time) {
                xtr.push_back(std::move(row));
                ytr.push_back(*y);
                tab.train_keys.push_back({i, t});
            } else {
                xte.push_back(std::move(row));
                yte.push_back(*y);
                tab.test_keys.push_back({i, t});
            }
        }
    }
    if (xtr.size() + xte.size() < 10) {
        throw insufficient_data_error("only " + std::to_string(xtr.size() + xte.size()) + " complete rows (need >= 10)");
    }
    if (xtr.empty() || xte.empty()) throw insufficient_data_error("train or test split is empty");
    tab.x_train = detail::to_matrix(xtr, k);
    tab.y_train = detail::to_vector(ytr);
    tab.x_test = detail::to_matrix(xte, k);
    tab.y_test = detail::to_vector(yte);
    return tab;
}

/// Targets y_{i,t} = x_{i,t+1} taken from the panel itself.
[[nodiscard]] inline std::vector<Series> one_step_ahead(const Panel& p) {
    std::vector<Series> out;
    for (const auto& s : p.series()) {
        Series y(s.size());
        for (std::size_t t = 0; t + 1 < s.size(); ++t) y[t] = s[t + 1];
        out.push_back(std::move(y));
    }
    return out;
}

[[nodiscard]] inline SupervisedTable build_table(const Panel& panel, const FeatureMatrix& m, double split,
                                                 std::size_t min_start = 0) {
    return build_table_aligned(one_step_ahead(panel), m, split, min_start);
}

/// Ridge regression on train-standardized features with an unpenalized intercept.
struct RidgeModel {
    Vector weights;       // on the original feature scale
    double intercept = 0.0;
    double lambda = 0.0;
    Vector feature_mean;
    Vector feature_scale;
    bool underdetermined = false;  // fewer train rows than features

    [[nodiscard]] Vector predict(const Matrix& x) const {
        return (x * weights).array() + intercept;
    }
};

[[nodiscard]] inline RidgeModel ridge_fit(const Matrix& x, const Vector& y, double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw parameter_error("lambda must be finite and >= 0");
    if (x.rows() != y.size()) throw shape_error("ridge: row count mismatch");
    if (x.rows() == 0) throw insufficient_data_error("ridge: no training rows");
    const Eigen::Index n = x.rows();
    const Eigen::Index k = x.cols();
    RidgeModel m;
    m.lambda = lambda;
    m.underdetermined = n < k;
    m.feature_mean = x.colwise().mean().transpose();
    const Matrix centered = x.rowwise() - m.feature_mean.transpose();
    m.feature_scale = (centered.colwise().squaredNorm() / static_cast<double>(n)).cwiseSqrt().transpose();
    for (Eigen::Index c = 0; c < k; ++c)
        if (!(m.feature_scale(c) > 0.0)) m.feature_scale(c) = 1.0;
    const Matrix z = centered * m.feature_scale.cwiseInverse().asDiagonal();
    const double y_mean = y.mean();
    const Vector yc = y.array() - y_mean;

    Matrix normal = z.transpose() * z;
    normal.diagonal().array() += lambda;
    const Vector rhs = z.transpose() * yc;
    Vector beta;
    if (lambda == 0.0) {
        Eigen::FullPivLU<Matrix> lu(normal);
        if (lu.rank() < k) throw solver_error("singular normal matrix at lambda = 0; use lambda > 0");
        beta = lu.solve(rhs);
    } else {
        Eigen::LLT<Matrix> llt(normal);
        if (llt.info() != Eigen::Success) throw solver_error("normal matrix not positive definite");
        beta = llt.solve(rhs);
    }
    m.weights = beta.cwiseQuotient(m.feature_scale);
    m.intercept = y_mean - m.weights.dot(m.feature_mean);
    if (!m.weights.allFinite() || !std::isfinite(m.intercept)) throw solver_error("ridge produced non-finite weights");
    return m;
}

[[nodiscard]] inline RidgeModel ridge_fit(const SupervisedTable& t, double lambda) {
    return ridge_fit(t.x_train, t.y_train, lambda);
}

[[nodiscard]] inline Vector ridge_predict(const RidgeModel& m, const Matrix& x) { return m.predict(x); }

/// 1 - SS_res / SS_tot.
[[nodiscard]] inline double r2(const Vector& actual, const Vector& predicted) {
    if (actual.size() != predicted.size() || actual.size() < 2) throw shape_error("r2 needs two equal-length vectors of size >= 2");
    const double mean = actual.mean();
    const double ss_tot = (actual.array() - mean).square().sum();
    if (!(ss_tot > 0.0)) throw undefined_metric_error("r2 undefined for constant actual values");
    return 1.0 - (actual - predicted).squaredNorm() / ss_tot;
}

/// Sample correlation coefficient.
[[nodiscard]] inline double pearson(const Vector& actual, const Vector& predicted) {
    if (actual.size() != predicted.size() || actual.size() < 2) throw shape_error("pearson needs two equal-length vectors of size >= 2");
    const Vector a = actual.array() - actual.mean();
    const Vector p = predicted.array() - predicted.mean();
    const double saa = a.squaredNorm();
    const double spp = p.squaredNorm();
    if (!(saa > 0.0)) throw undefined_metric_error("pearson undefined for constant actual values");
    if (!(spp > 0.0)) throw undefined_metric_error("pearson undefined for constant predictions");
    return std::clamp(a.dot(p) / std::sqrt(saa * spp), -1.0, 1.0);
}

struct EvalResult {
    double r2 = 0.0;
    double pearson = 0.0;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    std::size_t n_features = 0;
    std::string program_hash;
    std::vector<RowKey> test_keys;
};

[[nodiscard]] inline EvalResult fit_and_score(const SupervisedTable& t, double lambda, std::string program_hash) {
    const auto model = ridge_fit(t, lambda);
    const Vector pred = model.predict(t.x_test);
    EvalResult r;
    r.r2 = r2(t.y_test, pred);
    r.pearson = pearson(t.y_test, pred);
    r.n_train = static_cast<std::size_t>(t.x_train.rows());
    r.n_test = static_cast<std::size_t>(t.x_test.rows());
    r.n_features = t.feature_names.size();
    r.program_hash = std::move(program_hash);
    r.test_keys = t.test_keys;
    return r;
}

struct Comparison {
    EvalResult basic;
    EvalResult extended;
    double lambda = 0.0;

    [[nodiscard]] double r2_delta() const { return extended.r2 - basic.r2; }
    [[nodiscard]] double pearson_delta() const { return extended.pearson - basic.pearson; }

    [[nodiscard]] nlohmann::json to_json() const {
        return {{"r2_basic", basic.r2},
                {"r2_ext", extended.r2},
                {"pearson_basic", basic.pearson},
                {"pearson_ext", extended.pearson},
                {"n_train", extended.n_train},
                {"n_test", extended.n_test},
                {"lambda", lambda},
                {"program_hash", extended.program_hash},
                {"basic_program_hash", basic.program_hash},
                {"n_features_basic", basic.n_features},
                {"n_features_ext", extended.n_features},
                {"r2_delta", r2_delta()},
                {"pearson_delta", pearson_delta()}};
    }

    [[nodiscard]] std::string table() const {
        char buf[512];
        std::snprintf(buf, sizeof buf,
                      "%-10s %10s %10s %8s\n"
                      "%-10s %10.6f %10.6f %8zu\n"
                      "%-10s %10.6f %10.6f %8zu\n"
                      "%-10s %+10.6f %+10.6f\n"
                      "rows: train=%zu test=%zu  lambda=%g  program=%s\n",
                      "features", "R2", "Pearson", "K", "basic", basic.r2, basic.pearson, basic.n_features, "extended",
                      extended.r2, extended.pearson, extended.n_features, "delta", r2_delta(), pearson_delta(),
                      extended.n_train, extended.n_test, lambda, extended.program_hash.c_str());
        return buf;
    }
};

/// Pairs two evaluations made on the same test rows.
[[nodiscard]] inline Comparison compare(EvalResult basic, EvalResult extended, double lambda) {
    if (basic.test_keys != extended.test_keys || basic.n_train != extended.n_train) {
        throw protocol_error("basic and extended evaluations used different rows");
    }
    return {std::move(basic), std::move(extended), lambda};
}

/// The program whose only feature is the raw series.
[[nodiscard]] inline FeatureProgram basic_program() {
    FeatureProgram p;
    p.orders = {{0, {Expr::raw()}, {}}};
    return p;
}

/// Columns of `a` followed by the columns of `b` whose lineage is not already in `a`.
[[nodiscard]] inline FeatureMatrix concat(const FeatureMatrix& a, const FeatureMatrix& b) {
    std::set<std::string> have;
    for (const auto& f : a.variate(0)) have.insert(f.lineage);
    std::vector<std::vector<FeatureSeries>> out = a.features();
    for (std::size_t i = 0; i < out.size(); ++i)
        for (const auto& f : b.variate(i))
            if (!have.contains(f.lineage)) out[i].push_back(f);
    return FeatureMatrix(a.panel_ptr(), std::move(out), b.metadata());
}

struct EvaluateOptions {
    double split = 0.8;
    double lambda = 1e-3;
};

/// Ridge on the raw series alone versus raw plus `program` features, scored
/// on identical test rows. `targets` are aligned to feature time.
[[nodiscard]] inline Comparison evaluate(std::shared_ptr<const Panel> inputs, const std::vector<Series>& targets,
                                         const FeatureProgram& program, EvaluateOptions opts = {}) {
    const auto basic_prog = basic_program();
    const auto basic = generate(inputs, basic_prog).matrix;
    const auto ext = concat(basic, generate(inputs, program).matrix);
    const std::size_t start = std::max(basic.max_warmup(), ext.max_warmup());
    const auto tb = build_table_aligned(targets, basic, opts.split, start);
    const auto te = build_table_aligned(targets, ext, opts.split, start);
    // rows dropped for interior missing values must match across the two tables
    if (tb.test_keys != te.test_keys || tb.train_keys != te.train_keys) {
        throw protocol_error("basic and extended tables kept different rows; inputs contain interior missing values");
    }
    return compare(fit_and_score(tb, opts.lambda, program_hash(basic_prog)),
                   fit_and_score(te, opts.lambda, program_hash(program)), opts.lambda);
}

// ---------------------------------------------------------------------------
// Synthetic panels

enum class TargetKind { ewm, std };

/// Recipe for the synthetic dataset. Inputs per variate are the mixture
///   u = wmean(b, smooth) + momentum_weight * d1(b) + acceleration_weight * d2(b)
/// of a spin-gas base series b; the target of row t is stat(b, lookback) at t+1.
struct SyntheticSpec {
    std::size_t smooth = 7;
    double momentum_weight = 4.0;
    double acceleration_weight = 4.0;
    TargetKind target = TargetKind::ewm;
    std::size_t target_lookback = 7;
    double x0_spread = 1.0;
};

struct SyntheticDataset {
    Panel base;
    Panel inputs;
    /// targets[i][t] is the value to predict from inputs up to t (missing at the last step).
    std::vector<Series> targets;
};

/// Base couplings used by the builtin synthetic dataset: weak random Ising
/// couplings and fields with momentum and acceleration feedback.
[[nodiscard]] inline spin::SpinGasParams synthetic_params(spin::Rng& rng, std::size_t n) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(n, 1)));
    auto p = spin::random_params(rng, n, 0.5 * scale, 0.1);
    for (Eigen::Index i = 0; i < p.h.size(); ++i) p.h(i) *= 0.5;
    p.G1 *= 4.0;
    p.G2 *= 2.0;
    return p;
}

/// `length` is the number of emitted time steps (after the input warmup is trimmed).
[[nodiscard]] inline SyntheticDataset make_synthetic(spin::Rng& rng, std::size_t n, std::size_t length,
                                                     const spin::SpinGasParams& params, const SyntheticSpec& spec = {}) {
    if (params.n != n) throw shape_error("synthetic: params describe " + std::to_string(params.n) + " spins, not " + std::to_string(n));
    if (spec.smooth < 1 || spec.target_lookback < 1) throw parameter_error("synthetic: lookbacks must be >= 1");
    const std::size_t trim = std::max<std::size_t>(spec.smooth - 1, 2);
    if (length < 2) throw parameter_error("synthetic: need at least two time steps");
    std::vector<double> x0(n);
    for (auto& v : x0) v = spec.x0_spread * (2.0 * spin::uniform01(rng) - 1.0);
    const Panel full = spin::simulate_panel(rng, params, x0, length + trim - 1);

    std::vector<Series> base, inputs, targets;
    for (const auto& b : full.series()) {
        const auto raw = raw_feature(b);
        const auto d1 = difference(raw, shift(raw, 1));
        const auto d2 = difference(d1, shift(d1, 1));
        const auto smooth = window(raw, static_cast<std::int64_t>(spec.smooth), WindowStat::mean);
        Series u(b.size());
        for (std::size_t t = 0; t < b.size(); ++t) {
            if (smooth.values[t] && d1.values[t] && d2.values[t]) {
                u[t] = *smooth.values[t] + spec.momentum_weight * *d1.values[t] + spec.acceleration_weight * *d2.values[t];
            }
        }
        const auto stat = window(raw, static_cast<std::int64_t>(spec.target_lookback),
                                 spec.target == TargetKind::ewm ? WindowStat::ewm : WindowStat::std);
        Series y(b.size());
        for (std::size_t t = 0; t + 1 < b.size(); ++t) y[t] = stat.values[t + 1];
        const auto from = static_cast<std::ptrdiff_t>(trim);
        base.emplace_back(b.begin() + from, b.end());
        inputs.emplace_back(u.begin() + from, u.end());
        targets.emplace_back(y.begin() + from, y.end());
    }
    return {Panel(std::move(base)), Panel(std::move(inputs)), std::move(targets)};
}

/// The builtin synthetic dataset for a seed.
[[nodiscard]] inline SyntheticDataset default_synthetic(std::uint64_t seed, std::size_t n = 20, std::size_t length = 2000,
                                                        const SyntheticSpec& spec = {}) {
    spin::Rng rng(seed);
    const auto params = synthetic_params(rng, n);
    return make_synthetic(rng, n, length, params, spec);
}


// ---------------------------------------------------------------------------
// Resemblance of program output to hand-crafted indicators

struct ResemblanceScore {
    std::size_t n = 0;           // positions where both are defined
    std::size_t mismatched = 0;  // positions defined in only one of the two
    double max_abs_error = 0.0;
    double max_rel_error = 0.0;
    // Empty when undefined, as for an indicator that is constant on the panel.
    std::optional<double> r2;
    std::optional<double> pearson;

    [[nodiscard]] nlohmann::json to_json() const {
        const auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); };
        return {{"n", n},
                {"mismatched", mismatched},
                {"max_abs_error", max_abs_error},
                {"max_rel_error", max_rel_error},
                {"r2", opt(r2)},
                {"pearson", opt(pearson)}};
    }
};

/// Pools every variate and scores `program_output` against `oracle`.
[[nodiscard]] inline ResemblanceScore score_agreement(const std::vector<Series>& oracle,
                                                      const std::vector<Series>& program_output) {
    if (oracle.size() != program_output.size()) throw shape_error("resemblance: variate count mismatch");
    ResemblanceScore s;
    std::vector<double> a, p;
    for (std::size_t i = 0; i < oracle.size(); ++i) {
        if (oracle[i].size() != program_output[i].size()) throw shape_error("resemblance: length mismatch");
        for (std::size_t t = 0; t < oracle[i].size(); ++t) {
            const auto& x = oracle[i][t];
            const auto& y = program_output[i][t];
            if (x.has_value() != y.has_value()) ++s.mismatched;
            if (!x || !y) continue;
            const double err = std::abs(*x - *y);
            s.max_abs_error = std::max(s.max_abs_error, err);
            const double mag = std::max(std::abs(*x), std::abs(*y));
            if (mag > 0.0) s.max_rel_error = std::max(s.max_rel_error, err / mag);
            a.push_back(*x);
            p.push_back(*y);
        }
    }
    s.n = a.size();
    const Vector va = detail::to_vector(a);
    const Vector vp = detail::to_vector(p);
    try {
        s.r2 = eval::r2(va, vp);
    } catch (const undefined_metric_error&) {
    } catch (const shape_error&) {
    }
    try {
        s.pearson = eval::pearson(va, vp);
    } catch (const undefined_metric_error&) {
    } catch (const shape_error&) {
    }
    return s;
}

/// Generates the resemblance program on `panel` and scores it against the
/// hand-crafted indicator of the same name.
[[nodiscard]] inline ResemblanceScore resemble(const Panel& panel, Resemblance which, std::int64_t dtau) {
    const auto program = resemblance_program(which, dtau);
    const auto m = generate(panel, program).matrix;
    const auto name = std::string(resemblance_name(which));
    std::vector<Series> oracle, produced;
    for (std::size_t i = 0; i < panel.n_variates(); ++i) {
        oracle.push_back(handcrafted::indicator(which, panel.variate(i), static_cast<std::size_t>(dtau)));
        const auto& feats = m.variate(i);
        const auto it = std::find_if(feats.begin(), feats.end(), [&](const FeatureSeries& f) { return f.name == name; });
        if (it == feats.end()) throw data_error("resemblance program did not emit '" + name + "'");
        produced.push_back(it->values);
    }
    return score_agreement(oracle, produced);
}

}  // namespace featprog::eval
