#pragma once

// Random valid feature programs for property tests.

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "featprog/featprog.hpp"

namespace testutil {

class ProgramGenerator {
public:
    explicit ProgramGenerator(std::uint64_t seed) : rng_(seed) {}

    featprog::FeatureProgram next() {
        using namespace featprog;
        FeatureProgram p;
        p.flow = coin(0.7) ? Flow::all : Flow::none;
        const unsigned top = pick(0, 2);
        std::set<std::string> names;
        std::set<std::int64_t> lookbacks;
        std::set<WindowStat> stats;
        visible_.clear();
        int counter = 0;
        for (unsigned k = 0; k <= top; ++k) {
            if (p.flow == Flow::none) visible_.clear();
            OrderBlock blk;
            blk.order = k;
            const unsigned n_basic = pick(0, 2);
            const unsigned n_custom = pick(k == 0 && n_basic == 0 ? 1 : 0, 3);
            for (unsigned i = 0; i < n_basic; ++i) {
                Expr e = gen(k, 3);
                if (e.kind() == Expr::Kind::ref) e = Expr::square(e);
                if (!names.insert(to_string(e)).second) continue;
                blk.basic.push_back(e);
            }
            for (unsigned i = 0; i < n_custom; ++i) {
                const std::string name = "f" + std::to_string(counter++);
                blk.custom.push_back({name, gen(k, 3)});
                names.insert(name);
                visible_[name] = k;
            }
            if (blk.basic.empty() && blk.custom.empty()) {
                const std::string name = "f" + std::to_string(counter++);
                blk.custom.push_back({name, gen(k, 3)});
                visible_[name] = k;
            }
            for (const auto& e : blk.basic) collect(e, lookbacks, stats);
            for (const auto& c : blk.custom) collect(c.expr, lookbacks, stats);
            p.orders.push_back(std::move(blk));
        }
        if (coin(0.5)) p.lookbacks.assign(lookbacks.begin(), lookbacks.end());
        if (coin(0.5)) p.stats.assign(stats.begin(), stats.end());
        if (coin(0.2)) p.max_order = top + pick(0, 2);
        else p.max_order = std::max(2u, top);
        return p;
    }

private:
    unsigned pick(unsigned lo, unsigned hi) { return std::uniform_int_distribution<unsigned>(lo, hi)(rng_); }
    bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }
    std::int64_t lag() { return static_cast<std::int64_t>(pick(1, 8)); }

    std::vector<std::string> refs_of(unsigned order) const {
        std::vector<std::string> out;
        for (const auto& [n, o] : visible_)
            if (o == order) out.push_back(n);
        return out;
    }

    /// Expression of exactly `order`.
    featprog::Expr gen(unsigned order, int depth) {
        using namespace featprog;
        const auto refs = refs_of(order);
        if (depth <= 0) {
            if (order == 0) return !refs.empty() && coin(0.5) ? Expr::ref(refs[pick(0, refs.size() - 1)]) : Expr::raw();
            return Expr::diff(gen(order - 1, 0), gen(pick(0, order - 1), 0), coin(0.8) ? 1 : pick(2, 4));
        }
        switch (pick(0, 6)) {
            case 0:
                if (!refs.empty()) return Expr::ref(refs[pick(0, refs.size() - 1)]);
                [[fallthrough]];
            case 1:
                if (order == 0) return Expr::raw();
                return Expr::diff(gen(order - 1, depth - 1), gen(pick(0, order - 1), depth - 1),
                                  coin(0.8) ? 1 : pick(2, 4));
            case 2: return Expr::shift(gen(order, depth - 1), lag());
            case 3: {
                const auto st = all_window_stats[pick(0, 5)];
                return Expr::window(st, gen(order, depth - 1), lag());
            }
            case 4: return Expr::square(gen(order, depth - 1));
            case 5: {
                auto a = gen(order, depth - 1);
                auto b = gen(pick(0, order), depth - 1);
                return coin(0.5) ? Expr::ratio(std::move(a), std::move(b)) : Expr::ratio(std::move(b), std::move(a));
            }
            default:
                if (order > 0) return Expr::diff(gen(pick(0, order - 1), depth - 1), gen(order - 1, depth - 1));
                return Expr::window(featprog::WindowStat::mean, gen(0, depth - 1), lag());
        }
    }

    static void collect(const featprog::Expr& e, std::set<std::int64_t>& lookbacks, std::set<featprog::WindowStat>& stats) {
        featprog::visit(e, [&](const featprog::Expr& n) {
            if (n.kind() != featprog::Expr::Kind::call) return;
            if (const auto st = featprog::window_stat_of(n.func())) {
                stats.insert(*st);
                lookbacks.insert(n.ints()[0]);
            }
        });
    }

    std::mt19937_64 rng_;
    std::map<std::string, unsigned> visible_;
};

}  // namespace testutil
