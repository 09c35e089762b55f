#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "featprog/errors.hpp"
#include "featprog/expr.hpp"
#include "featprog/kernels.hpp"

namespace featprog {

/// Whether each order's outputs become visible to the next order.
enum class Flow { all, none };

struct NamedExpr {
    std::string name;
    Expr expr;

    friend bool operator==(const NamedExpr&, const NamedExpr&) = default;
};

/// Expressions evaluated at one order. Basic entries are named by their
/// canonical text; custom entries keep the user's name and may be referenced
/// by later entries of the same block (and by later orders under `Flow::all`).
struct OrderBlock {
    unsigned order = 0;
    std::vector<Expr> basic;
    std::vector<NamedExpr> custom;

    friend bool operator==(const OrderBlock&, const OrderBlock&) = default;
};

/// A validated feature template plus its operator palette.
///
/// `lookbacks` and `stats` restrict the window operator: when non-empty, every
/// window lookback must be listed in `lookbacks` and every statistic in `stats`.
struct FeatureProgram {
    int version = 1;
    std::vector<std::int64_t> lookbacks;
    std::vector<WindowStat> stats;
    Flow flow = Flow::all;
    unsigned max_order = 2;
    std::vector<OrderBlock> orders;

    friend bool operator==(const FeatureProgram&, const FeatureProgram&) = default;
};

namespace detail {

inline std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

inline std::string block_path(std::size_t b, std::string_view list, std::size_t i) {
    return "orders[" + std::to_string(b) + "]." + std::string(list) + "[" + std::to_string(i) + "]";
}

/// 1-based line/column of the first occurrence of `"needle"` in `text`, or {0,0}.
inline std::pair<std::size_t, std::size_t> locate_string(std::string_view text, const std::string& needle) {
    const auto pos = text.find('"' + needle + '"');
    if (pos == std::string_view::npos) return {0, 0};
    return line_column(text, pos + 1);
}

}  // namespace detail

/// Checks palette, ordering, naming, reference resolution and order consistency.
inline void validate(const FeatureProgram& p, std::string_view source = {}) {
    if (p.version != 1) throw program_error("unsupported program version " + std::to_string(p.version));
    for (auto lb : p.lookbacks)
        if (lb <= 0) throw program_error("lookbacks must be positive, got " + std::to_string(lb));
    if (p.orders.empty()) throw program_error("program has no order blocks");

    std::map<std::string, unsigned> visible;   // names usable by the current block
    std::map<std::string, unsigned> produced;  // every name produced so far
    for (std::size_t b = 0; b < p.orders.size(); ++b) {
        const auto& blk = p.orders[b];
        if (blk.order != b) {
            throw program_error("order blocks must be sorted and contiguous from 0; block " + std::to_string(b) +
                                " declares order " + std::to_string(blk.order));
        }
        if (blk.order > p.max_order) {
            throw program_error("order " + std::to_string(blk.order) + " exceeds max_order " +
                                std::to_string(p.max_order));
        }
        if (p.flow == Flow::none) visible.clear();
        std::map<std::string, unsigned> scope = visible;

        auto check = [&](const Expr& e, const std::string& path, const std::string& text) {
            auto [line, col] = detail::locate_string(source, text);
            auto fail = [&](const std::string& what) { throw program_error(path + ": " + what, line, col); };
            visit(e, [&](const Expr& n) {
                if (n.kind() == Expr::Kind::ref && !scope.contains(n.name())) {
                    fail("unresolved reference '" + n.name() + "' at order " + std::to_string(blk.order));
                }
                if (n.kind() != Expr::Kind::call) return;
                if (const auto st = window_stat_of(n.func())) {
                    if (!p.stats.empty() && std::find(p.stats.begin(), p.stats.end(), *st) == p.stats.end()) {
                        fail("window statistic '" + std::string(stat_name(*st)) + "' not in stats");
                    }
                    if (!p.lookbacks.empty() &&
                        std::find(p.lookbacks.begin(), p.lookbacks.end(), n.ints()[0]) == p.lookbacks.end()) {
                        fail("lookback " + std::to_string(n.ints()[0]) + " not in lookbacks");
                    }
                }
            });
            const unsigned got = order_of(e, [&](const std::string& n) { return scope.at(n); });
            if (got != blk.order) {
                fail("order mismatch: '" + text + "' has order " + std::to_string(got) + " but is declared in order " +
                     std::to_string(blk.order));
            }
        };
        auto claim = [&](const std::string& name, const std::string& path) {
            if (produced.contains(name)) throw program_error(path + ": duplicate feature name '" + name + "'");
            produced.emplace(name, blk.order);
        };

        for (std::size_t i = 0; i < blk.basic.size(); ++i) {
            const auto text = to_string(blk.basic[i]);
            const auto path = detail::block_path(b, "basic", i);
            check(blk.basic[i], path, text);
            claim(text, path);
        }
        for (std::size_t i = 0; i < blk.custom.size(); ++i) {
            const auto& c = blk.custom[i];
            const auto path = detail::block_path(b, "custom", i);
            if (!is_identifier(c.name)) throw program_error(path + ": invalid feature name '" + c.name + "'");
            if (is_reserved_word(c.name)) throw program_error(path + ": feature name '" + c.name + "' is reserved");
            check(c.expr, path, to_string(c.expr));
            claim(c.name, path);
            scope.emplace(c.name, blk.order);
        }
        for (const auto& [name, ord] : scope) visible.emplace(name, ord);
    }
}

/// Parses and validates a JSON program document.
[[nodiscard]] inline FeatureProgram parse_program(std::string_view text) {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto byte = e.byte > 0 ? e.byte - 1 : 0;
        auto [line, col] = detail::line_column(text, byte);
        throw program_error("JSON syntax error: " + std::string(e.what()), line, col);
    }
    auto fail = [&](const std::string& what, const std::string& needle = {}) -> void {
        auto [line, col] = needle.empty() ? std::pair<std::size_t, std::size_t>{0, 0}
                                          : detail::locate_string(text, needle);
        throw program_error(what, line, col);
    };
    if (!doc.is_object()) fail("program must be a JSON object");
    static const std::set<std::string> top_keys{"version", "lookbacks", "stats", "flow", "max_order", "orders"};
    for (const auto& [k, v] : doc.items())
        if (!top_keys.contains(k)) fail("unknown key '" + k + "'", k);

    FeatureProgram p;
    try {
        if (doc.contains("version")) p.version = doc.at("version").get<int>();
        if (doc.contains("lookbacks")) p.lookbacks = doc.at("lookbacks").get<std::vector<std::int64_t>>();
        if (doc.contains("stats")) {
            for (const auto& s : doc.at("stats")) {
                const auto name = s.get<std::string>();
                const auto st = parse_stat_name(name);
                if (!st) fail("unknown window statistic '" + name + "'", name);
                p.stats.push_back(*st);
            }
        }
        if (doc.contains("flow")) {
            const auto f = doc.at("flow").get<std::string>();
            if (f == "all") p.flow = Flow::all;
            else if (f == "none") p.flow = Flow::none;
            else fail("flow must be \"all\" or \"none\", got '" + f + "'", f);
        }
        if (doc.contains("max_order")) {
            const auto m = doc.at("max_order").get<std::int64_t>();
            if (m < 0) fail("max_order must be non-negative");
            p.max_order = static_cast<unsigned>(m);
        }
        if (!doc.contains("orders") || !doc.at("orders").is_array()) fail("program needs an \"orders\" array");
        static const std::set<std::string> block_keys{"order", "basic", "custom"};
        const auto& orders = doc.at("orders");
        for (std::size_t b = 0; b < orders.size(); ++b) {
            const auto& jb = orders[b];
            if (!jb.is_object()) fail("orders[" + std::to_string(b) + "] must be an object");
            for (const auto& [k, v] : jb.items())
                if (!block_keys.contains(k)) fail("orders[" + std::to_string(b) + "]: unknown key '" + k + "'", k);
            OrderBlock blk;
            const auto ord = jb.at("order").get<std::int64_t>();
            if (ord < 0) fail("orders[" + std::to_string(b) + "]: order must be non-negative");
            blk.order = static_cast<unsigned>(ord);
            auto parse_at = [&](const std::string& src, const std::string& path) {
                try {
                    return parse_expr(src);
                } catch (const syntax_error& e) {
                    auto [line, col] = detail::locate_string(text, src);
                    if (line != 0) col += e.offset();
                    throw syntax_error(path + ": " + e.reason(), e.offset(), line, col);
                }
            };
            if (jb.contains("basic")) {
                const auto& basic = jb.at("basic");
                for (std::size_t i = 0; i < basic.size(); ++i)
                    blk.basic.push_back(parse_at(basic[i].get<std::string>(), detail::block_path(b, "basic", i)));
            }
            if (jb.contains("custom")) {
                const auto& custom = jb.at("custom");
                for (std::size_t i = 0; i < custom.size(); ++i) {
                    const auto& c = custom[i];
                    for (const auto& [k, v] : c.items())
                        if (k != "name" && k != "expr") fail(detail::block_path(b, "custom", i) + ": unknown key '" + k + "'", k);
                    blk.custom.push_back({c.at("name").get<std::string>(),
                                          parse_at(c.at("expr").get<std::string>(), detail::block_path(b, "custom", i))});
                }
            }
            p.orders.push_back(std::move(blk));
        }
    } catch (const json::exception& e) {
        throw program_error(std::string("schema error: ") + e.what());
    }
    validate(p, text);
    return p;
}

[[nodiscard]] inline nlohmann::json to_json(const FeatureProgram& p) {
    using nlohmann::json;
    json stats = json::array();
    for (auto s : p.stats) stats.push_back(std::string(stat_name(s)));
    json orders = json::array();
    for (const auto& blk : p.orders) {
        json basic = json::array();
        for (const auto& e : blk.basic) basic.push_back(to_string(e));
        json custom = json::array();
        for (const auto& c : blk.custom) custom.push_back({{"name", c.name}, {"expr", to_string(c.expr)}});
        orders.push_back({{"order", blk.order}, {"basic", basic}, {"custom", custom}});
    }
    return {{"version", p.version},
            {"lookbacks", p.lookbacks},
            {"stats", stats},
            {"flow", p.flow == Flow::all ? "all" : "none"},
            {"max_order", p.max_order},
            {"orders", orders}};
}

/// Pretty-printed JSON that `parse_program` reads back to an equal program.
[[nodiscard]] inline std::string print_program(const FeatureProgram& p) { return to_json(p).dump(2) + "\n"; }

/// FNV-1a 64-bit digest of the compact canonical program text, as 16 hex digits.
[[nodiscard]] inline std::string program_hash(const FeatureProgram& p) {
    const std::string text = to_json(p).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

[[nodiscard]] inline std::size_t feature_count(const FeatureProgram& p) {
    std::size_t k = 0;
    for (const auto& b : p.orders) k += b.basic.size() + b.custom.size();
    return k;
}

/// The builtin 45-feature program with lookbacks {7, 25}.
///
/// order 0 (9):  raw; wmean/wmax/wmin at 7 and 25; shift at 7 and 25.
/// order 1 (18): first difference d1(x) = diff(x, shift(x,1)) of each order-0
///               feature; raw-vs-mean and mean-vs-mean cross differences;
///               wmean/wmax/wmin of d1(raw) at 7 and 25.
/// order 2 (18): d1 of each of the nine order-1 first differences; cross
///               differences among d1(raw) and its 7/25 means; wmean/wmax/wmin
///               of d2(raw) at 7 and 25.
[[nodiscard]] inline FeatureProgram default_program() {
    FeatureProgram p;
    p.lookbacks = {7, 25};
    p.stats = {WindowStat::mean, WindowStat::max, WindowStat::min};
    p.flow = Flow::all;
    const WindowStat summaries[] = {WindowStat::mean, WindowStat::max, WindowStat::min};
    const auto ref = [](const std::string& n) { return Expr::ref(n); };
    const auto d1 = [](const Expr& x) { return Expr::diff(x, Expr::shift(x, 1)); };
    const auto stat_tag = [](WindowStat s, std::int64_t w) {
        return std::string(stat_function(s)) + std::to_string(w);
    };

    OrderBlock o0{0, {Expr::raw()}, {}};
    std::vector<std::string> zeroth{"raw"};
    for (std::int64_t w : p.lookbacks) {
        for (auto s : summaries) {
            o0.custom.push_back({stat_tag(s, w), Expr::window(s, Expr::raw(), w)});
            zeroth.push_back(stat_tag(s, w));
        }
    }
    for (std::int64_t w : p.lookbacks) {
        o0.custom.push_back({"shift" + std::to_string(w), Expr::shift(Expr::raw(), w)});
        zeroth.push_back("shift" + std::to_string(w));
    }

    OrderBlock o1{1, {}, {}};
    std::vector<std::string> first_diffs;
    for (const auto& n : zeroth) {
        const auto x = n == "raw" ? Expr::raw() : ref(n);
        o1.custom.push_back({"d1_" + n, d1(x)});
        first_diffs.push_back("d1_" + n);
    }
    o1.custom.push_back({"xd_raw_wmean7", Expr::diff(Expr::raw(), ref("wmean7"))});
    o1.custom.push_back({"xd_raw_wmean25", Expr::diff(Expr::raw(), ref("wmean25"))});
    o1.custom.push_back({"xd_wmean7_wmean25", Expr::diff(ref("wmean7"), ref("wmean25"))});
    for (std::int64_t w : p.lookbacks)
        for (auto s : summaries) o1.custom.push_back({stat_tag(s, w) + "_d1", Expr::window(s, ref("d1_raw"), w)});

    OrderBlock o2{2, {}, {}};
    for (const auto& n : first_diffs) o2.custom.push_back({"d2_" + n.substr(3), d1(ref(n))});
    o2.custom.push_back({"xd_d1_wmean7d1", Expr::diff(ref("d1_raw"), ref("wmean7_d1"))});
    o2.custom.push_back({"xd_d1_wmean25d1", Expr::diff(ref("d1_raw"), ref("wmean25_d1"))});
    o2.custom.push_back({"xd_wmean7d1_wmean25d1", Expr::diff(ref("wmean7_d1"), ref("wmean25_d1"))});
    for (std::int64_t w : p.lookbacks)
        for (auto s : summaries) o2.custom.push_back({stat_tag(s, w) + "_d2", Expr::window(s, ref("d2_raw"), w)});

    p.orders = {std::move(o0), std::move(o1), std::move(o2)};
    return p;
}

/// Hand-crafted indicators reproduced exactly by a feature program.
enum class Resemblance { mom, bias, absenergy };

[[nodiscard]] inline Resemblance parse_resemblance(std::string_view s) {
    if (s == "mom") return Resemblance::mom;
    if (s == "bias") return Resemblance::bias;
    if (s == "absenergy") return Resemblance::absenergy;
    throw parameter_error("unknown resemblance target '" + std::string(s) + "' (expected mom, bias or absenergy)");
}

[[nodiscard]] constexpr std::string_view resemblance_name(Resemblance r) noexcept {
    switch (r) {
        case Resemblance::mom: return "mom";
        case Resemblance::bias: return "bias";
        case Resemblance::absenergy: return "absenergy";
    }
    return "?";
}

/// Program whose feature named after `which` equals the hand-crafted indicator:
///   mom       = ratio(diff(raw,shift(raw,dtau)),shift(raw,dtau))   (order 1)
///   bias      = ratio(diff(raw,wmean(raw,dtau)),wmean(raw,dtau))   (order 1)
///   absenergy = wsum(square(raw),dtau)                             (order 0)
[[nodiscard]] inline FeatureProgram resemblance_program(Resemblance which, std::int64_t dtau) {
    if (dtau < 1) throw parameter_error("dtau must be >= 1, got " + std::to_string(dtau));
    FeatureProgram p;
    const auto x = Expr::raw();
    switch (which) {
        case Resemblance::mom: {
            const auto lag = Expr::shift(x, dtau);
            p.orders = {{0, {}, {}}, {1, {}, {{"mom", Expr::ratio(Expr::diff(x, lag), lag)}}}};
            break;
        }
        case Resemblance::bias: {
            const auto sma = Expr::window(WindowStat::mean, x, dtau);
            p.lookbacks = {dtau};
            p.stats = {WindowStat::mean};
            p.orders = {{0, {}, {}}, {1, {}, {{"bias", Expr::ratio(Expr::diff(x, sma), sma)}}}};
            break;
        }
        case Resemblance::absenergy:
            p.lookbacks = {dtau};
            p.stats = {WindowStat::sum};
            p.orders = {{0, {}, {{"absenergy", Expr::window(WindowStat::sum, Expr::square(x), dtau)}}}};
            break;
    }
    return p;
}

}  // namespace featprog
