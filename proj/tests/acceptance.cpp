// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "featprog/featprog.hpp"
#include "program_gen.hpp"

using namespace featprog;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

Panel walk_panel(std::mt19937_64& rng, std::size_t n, std::size_t t) {
    std::normal_distribution<double> step(0.0, 1.0);
    std::vector<std::vector<double>> rows(n, std::vector<double>(t));
    for (auto& r : rows) {
        double x = 100.0;
        for (auto& v : r) v = (x += step(rng));
    }
    return Panel::make(rows);
}

long double sigmoid_up(long double g) { return 1.0L / (1.0L + std::exp(-2.0L * g)); }

Outcome resemblance() {
    std::mt19937_64 rng(20240601);
    double worst_rel = 0.0, worst_metric = 0.0;
    std::size_t degenerate = 0;
    for (int k = 0; k < 3; ++k) {
        const auto panel = walk_panel(rng, 5, 500);
        for (auto r : {Resemblance::mom, Resemblance::bias, Resemblance::absenergy}) {
            for (std::int64_t dtau : {1, 5, 25}) {
                const auto s = eval::resemble(panel, r, dtau);
                if (s.n == 0 || s.mismatched != 0) return {false, "definedness differs for " + std::string(resemblance_name(r))};
                worst_rel = std::max(worst_rel, s.max_rel_error);
                if (!s.r2 || !s.pearson) {
                    // a constant indicator has no R2 or correlation; require bitwise agreement instead
                    if (s.max_abs_error != 0.0) return {false, "constant indicator not reproduced exactly"};
                    ++degenerate;
                    continue;
                }
                worst_metric = std::max({worst_metric, std::abs(*s.r2 - 1.0), std::abs(*s.pearson - 1.0)});
            }
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "max rel err %.3g, max |metric-1| %.3g, %zu constant cases", worst_rel, worst_metric,
                  degenerate);
    return {worst_rel < 1e-12 && worst_metric <= 1e-12, buf};
}

Outcome census() {
    const auto p = default_program();
    std::vector<std::size_t> per(3, 0);
    for (const auto& blk : p.orders)
        if (blk.order < 3) per[blk.order] += blk.basic.size() + blk.custom.size();
    std::mt19937_64 rng(7);
    const auto m = generate(walk_panel(rng, 2, 60), p).matrix;
    std::vector<std::size_t> runtime(3, 0);
    for (const auto& f : m.variate(0))
        if (f.order < 3) ++runtime[f.order];
    const bool ok = feature_count(p) == 45 && m.n_features() == 45 && per == std::vector<std::size_t>{9, 18, 18} &&
                    runtime == per;
    return {ok, "K=" + std::to_string(m.n_features()) + " orders {" + std::to_string(runtime[0]) + "," +
                    std::to_string(runtime[1]) + "," + std::to_string(runtime[2]) + "}"};
}

Outcome glauber() {
    spin::Rng rng(31337);
    const int draws = 100000;
    double worst_z = 0.0;
    for (double g : {0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0}) {
        auto p = spin::SpinGasParams::zeros(1);
        p.h(0) = g;
        const auto hist = spin::SpinHistory::all_up(1);
        int ups = 0;
        for (int i = 0; i < draws; ++i) ups += spin::step_sample(rng, p, hist)[0] > 0;
        const double expect = static_cast<double>(std::exp(static_cast<long double>(g)) /
                                                  (2.0L * std::cosh(static_cast<long double>(g))));
        const double se = std::sqrt(expect * (1.0 - expect) / draws);
        worst_z = std::max(worst_z, std::abs(ups / static_cast<double>(draws) - expect) / se);
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "worst deviation %.2f standard errors", worst_z);
    return {worst_z <= 4.0, buf};
}

// T^L computed from the couplings alone, in long double.
long double memoryless_power(const spin::SpinGasParams& p, std::uint64_t from, std::uint64_t to, std::size_t L) {
    const std::size_t n = p.n;
    const std::uint64_t configs = std::uint64_t{1} << n;
    std::vector<std::vector<long double>> T(configs, std::vector<long double>(configs));
    for (std::uint64_t a = 0; a < configs; ++a) {
        const auto s = spin::spins_from_bits(a, n);
        for (std::uint64_t b = 0; b < configs; ++b) {
            const auto t = spin::spins_from_bits(b, n);
            long double prob = 1.0L;
            for (std::size_t i = 0; i < n; ++i) {
                long double g = p.h(static_cast<Eigen::Index>(i));
                for (std::size_t j = 0; j < n; ++j) g += p.J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * s[j];
                prob *= t[i] > 0 ? sigmoid_up(g) : 1.0L - sigmoid_up(g);
            }
            T[a][b] = prob;
        }
    }
    std::vector<long double> row(configs, 0.0L);
    row[from] = 1.0L;
    for (std::size_t l = 0; l < L; ++l) {
        std::vector<long double> next(configs, 0.0L);
        for (std::uint64_t a = 0; a < configs; ++a)
            for (std::uint64_t b = 0; b < configs; ++b) next[b] += row[a] * T[a][b];
        row = std::move(next);
    }
    return row[to];
}

Outcome path_integral() {
    spin::Rng rng(4242);
    double worst_norm = 0.0, worst_power = 0.0;
    std::size_t power_sets = 0;
    for (int k = 0; k < 20; ++k) {
        const std::size_t n = 1 + static_cast<std::size_t>(k % 3);
        auto p = spin::random_params(rng, n, 1.0, 0.5);
        const bool memoryless = k % 2 == 1;
        if (memoryless) {
            p.G1.setZero();
            p.G2.setZero();
        }
        const spin::SpinHistory start{spin::random_spins(rng, n), spin::random_spins(rng, n), spin::random_spins(rng, n)};
        for (std::size_t L : {2, 3, 4}) {
            worst_norm = std::max(worst_norm, std::abs(spin::path_total(p, start, L) - 1.0));
            if (!memoryless) continue;
            const auto from = spin::bits_from_spins(start.current);
            for (std::uint64_t e = 0; e < (std::uint64_t{1} << n); ++e) {
                const double enumerated = spin::path_probability(p, start, spin::spins_from_bits(e, n), L);
                worst_power = std::max(worst_power,
                                       static_cast<double>(std::abs(enumerated - memoryless_power(p, from, e, L))));
            }
        }
        power_sets += memoryless;
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "max |sum-1| %.3g, max |enum-T^L| %.3g over %zu memoryless sets", worst_norm,
                  worst_power, power_sets);
    return {worst_norm <= 1e-10 && worst_power <= 1e-10, buf};
}

Outcome joint_model() {
    spin::Rng rng(5151);
    double worst_next = 0.0, worst_now = 0.0;
    for (int k = 0; k < 20; ++k) {
        const std::size_t n = 2 + static_cast<std::size_t>(k % 2);
        auto p = spin::random_params(rng, n, 1.0, 0.5);
        const bool field_only = k >= 10;
        if (field_only) {
            p.J.setZero();
            p.G1.setZero();
            p.G2.setZero();
        }
        const auto prev = spin::random_spins(rng, n);
        const auto prev2 = spin::random_spins(rng, n);
        const auto jm = spin::build_joint(p, prev, prev2);
        const std::uint64_t half = std::uint64_t{1} << n;
        for (std::uint64_t idx = 0; idx < half * half; ++idx) {
            const auto now = spin::spins_from_bits(idx & (half - 1), n);
            const auto next = spin::spins_from_bits(idx >> n, n);
            const spin::Vector field = spin::local_field(p, {now, prev, prev2});
            for (std::size_t q = 0; q < n; ++q) {
                const long double here = jm.table[idx];
                const long double up_next = next[q] > 0 ? here : jm.table[idx ^ (std::uint64_t{1} << (n + q))];
                const long double pair_next = here + jm.table[idx ^ (std::uint64_t{1} << (n + q))];
                worst_next = std::max(worst_next, static_cast<double>(std::abs(
                                                      up_next / pair_next - sigmoid_up(field(static_cast<Eigen::Index>(q))))));
                if (!field_only) continue;
                const long double up_now = now[q] > 0 ? here : jm.table[idx ^ (std::uint64_t{1} << q)];
                const long double pair_now = here + jm.table[idx ^ (std::uint64_t{1} << q)];
                worst_now = std::max(worst_now, static_cast<double>(std::abs(
                                                    up_now / pair_now - sigmoid_up(p.h(static_cast<Eigen::Index>(q))))));
            }
        }
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "max next-slice dev %.3g, max now-slice dev %.3g", worst_next, worst_now);
    return {worst_next <= 1e-10 && worst_now <= 1e-10, buf};
}

Outcome extended_beats_basic() {
    int wins = 0;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto ds = eval::default_synthetic(seed, 20, 2000);
        const auto c = eval::evaluate(std::make_shared<const Panel>(ds.inputs), ds.targets, default_program());
        const bool win = c.extended.r2 >= c.basic.r2 + 0.005 && c.extended.pearson > c.basic.pearson;
        wins += win;
        char buf[96];
        std::snprintf(buf, sizeof buf, "%sseed %llu R2 %.4f->%.4f", seed > 1 ? "; " : "",
                      static_cast<unsigned long long>(seed), c.basic.r2, c.extended.r2);
        detail += buf;
    }
    return {wins >= 4, std::to_string(wins) + "/5 seeds: " + detail};
}

Outcome program_properties() {
    testutil::ProgramGenerator gen(909);
    std::mt19937_64 rng(90909);
    for (int i = 0; i < 100; ++i) {
        const auto p = gen.next();
        const auto panel = walk_panel(rng, 2, 80);
        const auto m = generate(panel, p).matrix;
        for (std::size_t v = 0; v < 2; ++v)
            for (const auto& f : m.variate(v)) {
                const auto g = regenerate(f.lineage, panel.variate(v));
                if (g.values != f.values || g.order != f.order) return {false, "lineage does not regenerate " + f.lineage};
            }

        const std::size_t t0 = std::uniform_int_distribution<std::size_t>(0, 78)(rng);
        auto rows = panel.series();
        std::normal_distribution<double> kick(0.0, 10.0);
        for (auto& r : rows)
            for (std::size_t t = t0 + 1; t < rows[0].size(); ++t) *r[t] += kick(rng);
        const auto b = generate(Panel(rows), p).matrix;
        for (std::size_t v = 0; v < 2; ++v)
            for (std::size_t k = 0; k < m.n_features(); ++k)
                for (std::size_t t = 0; t <= t0; ++t)
                    if (m.variate(v)[k].values[t] != b.variate(v)[k].values[t])
                        return {false, "future samples changed " + m.variate(v)[k].lineage};
    }
    for (int i = 0; i < 500; ++i) {
        const auto p = gen.next();
        const auto q = parse_program(print_program(p));
        if (!(q == p) || program_hash(q) != program_hash(p)) return {false, "round trip changed a program"};
    }
    return {true, "100 programs regenerate and are causal, 500 round trips"};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        double limit_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {"resemblance", 1.0, resemblance},
        {"default-census", 1.0, census},
        {"glauber-sampling", 5.0, glauber},
        {"path-integral", 30.0, path_integral},
        {"joint-conditionals", 60.0, joint_model},
        {"extended-vs-basic", 120.0, extended_beats_basic},
        {"program-properties", 120.0, program_properties},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto& c = criteria[i];
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > c.limit_s) {
            o.ok = false;
            o.detail += " (too slow)";
        }
        std::printf("%s AC%zu %s [%.2fs / %.0fs] %s\n", o.ok ? "PASS" : "FAIL", i + 1, c.name, secs, c.limit_s,
                    o.detail.c_str());
        failed += !o.ok;
    }
    return failed == 0 ? 0 : 1;
}
