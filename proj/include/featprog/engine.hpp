#pragma once

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "featprog/csv.hpp"
#include "featprog/errors.hpp"
#include "featprog/expr.hpp"
#include "featprog/kernels.hpp"
#include "featprog/program.hpp"
#include "featprog/series.hpp"

namespace featprog {

struct GenerationReport {
    std::map<unsigned, std::size_t> order_counts;
    std::size_t max_warmup = 0;
    double seconds = 0.0;
    std::string program_hash;
    std::vector<std::string> warnings;

    [[nodiscard]] std::size_t total() const {
        std::size_t k = 0;
        for (const auto& [o, n] : order_counts) k += n;
        return k;
    }

    [[nodiscard]] nlohmann::json to_json() const {
        nlohmann::json counts = nlohmann::json::object();
        for (const auto& [o, n] : order_counts) counts[std::to_string(o)] = n;
        return {{"order_counts", counts},
                {"features_per_variate", total()},
                {"max_warmup", max_warmup},
                {"seconds", seconds},
                {"program_hash", program_hash},
                {"warnings", warnings}};
    }
};

struct GenerationResult {
    FeatureMatrix matrix;
    GenerationReport report;
};

struct GenerateOptions {
    /// Worker threads for per-variate generation; 0 reads FEATPROG_THREADS,
    /// falling back to the hardware concurrency.
    unsigned threads = 0;
};

namespace engine_detail {

/// Analytic warmup of an expression given the warmups of named features.
inline std::size_t warmup_of(const Expr& e, const std::map<std::string, std::size_t>& named) {
    switch (e.kind()) {
        case Expr::Kind::raw: return 0;
        case Expr::Kind::ref: return named.at(e.name());
        case Expr::Kind::call: break;
    }
    std::size_t w = 0;
    for (const auto& a : e.args()) w = std::max(w, warmup_of(a, named));
    const auto k = static_cast<std::size_t>(e.ints().empty() ? 0 : e.ints()[0]);
    switch (e.func()) {
        case Func::shift: return w + k;
        case Func::diff: return w + k - 1;
        case Func::ratio:
        case Func::square: return w;
        default: return w + k - 1;  // window functions
    }
}

/// Evaluates expressions over one raw series, caching shared subexpressions.
class Evaluator {
public:
    explicit Evaluator(const Series& raw) : raw_(raw_feature(raw)) {}

    void bind(const std::string& name, FeatureSeries f) { named_.insert_or_assign(name, std::move(f)); }

    const FeatureSeries& eval(const Expr& e) {
        if (e.kind() == Expr::Kind::raw) return raw_;
        if (e.kind() == Expr::Kind::ref) {
            const auto it = named_.find(e.name());
            if (it == named_.end()) throw program_error("unresolved reference '" + e.name() + "'");
            return it->second;
        }
        const auto key = key_of(e);
        if (const auto it = cache_.find(key); it != cache_.end()) return it->second;
        FeatureSeries out = compute(e);
        return cache_.emplace(key, std::move(out)).first->second;
    }

private:
    // Refs are keyed by their lineage so `wmean7` and `wmean(raw,7)` share a slot.
    std::string key_of(const Expr& e) const {
        if (e.kind() == Expr::Kind::raw) return "raw";
        if (e.kind() == Expr::Kind::ref) return named_.at(e.name()).lineage;
        std::string k(func_name(e.func()));
        k += '(';
        for (std::size_t i = 0; i < e.args().size(); ++i) k += (i ? "," : "") + key_of(e.args()[i]);
        for (auto i : e.ints())
            if (!(e.func() == Func::diff && i == 1)) k += "," + std::to_string(i);
        k += ')';
        return k;
    }

    FeatureSeries compute(const Expr& e) {
        const auto& a = e.args();
        switch (e.func()) {
            case Func::shift: return shift(eval(a[0]), e.ints()[0]);
            case Func::diff: {
                const FeatureSeries& x = eval(a[0]);
                return difference(x, eval(a[1]), e.ints()[0]);
            }
            case Func::ratio: {
                const FeatureSeries& x = eval(a[0]);
                return ratio(x, eval(a[1]));
            }
            case Func::square: return square(eval(a[0]));
            default: return window(eval(a[0]), e.ints()[0], *window_stat_of(e.func()));
        }
    }

    FeatureSeries raw_;
    std::unordered_map<std::string, FeatureSeries> named_;
    std::unordered_map<std::string, FeatureSeries> cache_;
};

struct PlannedFeature {
    std::string name;
    Expr expr = Expr::raw();
    unsigned order = 0;
    std::size_t warmup = 0;
    std::string lineage;
    bool is_custom = false;
};

/// Resolves names, orders, warmups and lineages once for all variates.
inline std::vector<PlannedFeature> plan(const FeatureProgram& p) {
    std::vector<PlannedFeature> out;
    std::map<std::string, Expr> inlined;
    std::map<std::string, std::size_t> warm;
    std::map<std::string, unsigned> ord;
    for (const auto& blk : p.orders) {
        if (p.flow == Flow::none) {
            inlined.clear();
            warm.clear();
            ord.clear();
        }
        auto add = [&](std::string name, const Expr& e, bool custom) {
            PlannedFeature f;
            f.name = std::move(name);
            f.expr = e;
            f.order = order_of(e, [&](const std::string& n) { return ord.at(n); });
            f.warmup = warmup_of(e, warm);
            f.lineage = to_string(inline_refs(e, inlined));
            f.is_custom = custom;
            out.push_back(f);
            return f;
        };
        for (const auto& e : blk.basic) add(to_string(e), e, false);
        for (const auto& c : blk.custom) {
            const auto f = add(c.name, c.expr, true);
            inlined.insert_or_assign(c.name, parse_expr(f.lineage));
            warm.insert_or_assign(c.name, f.warmup);
            ord.insert_or_assign(c.name, f.order);
        }
    }
    return out;
}

inline std::vector<FeatureSeries> run_variate(const Series& raw, const FeatureProgram& p,
                                              const std::vector<PlannedFeature>& plan) {
    const std::size_t t_len = raw.size();
    Evaluator ev(raw);
    std::vector<FeatureSeries> out;
    out.reserve(plan.size());
    std::size_t k = 0;
    for (const auto& blk : p.orders) {
        if (p.flow == Flow::none) ev = Evaluator(raw);
        const std::size_t n = blk.basic.size() + blk.custom.size();
        for (std::size_t j = 0; j < n; ++j, ++k) {
            const auto& pf = plan[k];
            FeatureSeries f;
            if (pf.warmup >= t_len) {
                f.values.assign(t_len, std::nullopt);
            } else {
                f.values = ev.eval(pf.expr).values;
            }
            f.name = pf.name;
            f.order = pf.order;
            f.warmup = pf.warmup;
            f.lineage = pf.lineage;
            if (pf.is_custom) ev.bind(pf.name, f);
            out.push_back(std::move(f));
        }
    }
    return out;
}

inline unsigned thread_budget(unsigned requested, std::size_t work) {
    unsigned n = requested;
    if (n == 0) {
        if (const char* env = std::getenv("FEATPROG_THREADS")) n = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
    }
    if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(work, 1)));
}

inline std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace engine_detail

/// Evaluates `program` order by order on every variate of `panel`.
///
/// Variates are independent and may be processed on several threads; the
/// output order never depends on scheduling.
[[nodiscard]] inline GenerationResult generate(std::shared_ptr<const Panel> panel, const FeatureProgram& program,
                                               GenerateOptions opts = {}) {
    validate(program);
    const auto start = std::chrono::steady_clock::now();
    const auto plan = engine_detail::plan(program);

    GenerationReport report;
    report.program_hash = program_hash(program);
    for (const auto& f : plan) {
        ++report.order_counts[f.order];
        report.max_warmup = std::max(report.max_warmup, f.warmup);
        if (f.warmup >= panel->length()) {
            report.warnings.push_back("feature '" + f.name + "' has warmup " + std::to_string(f.warmup) +
                                      " >= T=" + std::to_string(panel->length()) + "; emitted fully missing");
        }
    }

    const std::size_t n = panel->n_variates();
    std::vector<std::vector<FeatureSeries>> features(n);
    const unsigned threads = engine_detail::thread_budget(opts.threads, n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) features[i] = engine_detail::run_variate(panel->variate(i), program, plan);
    } else {
        std::vector<std::exception_ptr> errors(threads);
        {
            std::vector<std::jthread> pool;
            for (unsigned w = 0; w < threads; ++w) {
                pool.emplace_back([&, w] {
                    try {
                        for (std::size_t i = w; i < n; i += threads)
                            features[i] = engine_detail::run_variate(panel->variate(i), program, plan);
                    } catch (...) {
                        errors[w] = std::current_exception();
                    }
                });
            }
        }
        for (const auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    FeatureMatrix m(std::move(panel), std::move(features), {report.program_hash, engine_detail::utc_timestamp()});
    return {std::move(m), std::move(report)};
}

[[nodiscard]] inline GenerationResult generate(const Panel& panel, const FeatureProgram& program,
                                               GenerateOptions opts = {}) {
    return generate(std::make_shared<const Panel>(panel), program, opts);
}

/// Recomputes a feature from its lineage alone.
[[nodiscard]] inline FeatureSeries regenerate(const std::string& lineage, const Series& raw) {
    const Expr e = parse_expr(lineage);
    const std::size_t warm = engine_detail::warmup_of(e, {});
    FeatureSeries f;
    if (warm >= raw.size()) {
        f.values.assign(raw.size(), std::nullopt);
    } else {
        engine_detail::Evaluator ev(raw);
        f = ev.eval(e);
    }
    f.name = lineage;
    f.lineage = lineage;
    f.order = order_of(e);
    f.warmup = warm;
    return f;
}

/// Wide features CSV, optionally with the warmup rows removed.
[[nodiscard]] inline std::string export_features(const FeatureMatrix& m, bool drop_warmup_rows) {
    std::ostringstream out;
    if (drop_warmup_rows) {
        csv::write_features(out, drop_warmup(m));
    } else {
        csv::write_features(out, m);
    }
    return out.str();
}

}  // namespace featprog
