#pragma once

// Expression mini-language for feature programs.
//
//   expr  := "raw" | IDENT | FUNC "(" expr ("," (expr | INT))* ")"
//   IDENT := [A-Za-z_][A-Za-z0-9_]*
//
// Functions and their signatures (E = expression, I = positive integer):
//   shift(E,I)  wmean(E,I) wmax(E,I) wmin(E,I) wsum(E,I) wstd(E,I) ewm(E,I)
//   diff(E,E)   diff(E,E,I)   ratio(E,E)   square(E)

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "featprog/errors.hpp"
#include "featprog/kernels.hpp"

namespace featprog {

enum class Func { shift, wmean, wmax, wmin, wsum, wstd, ewm, diff, ratio, square };

inline constexpr Func all_funcs[] = {Func::shift, Func::wmean, Func::wmax, Func::wmin, Func::wsum,
                                     Func::wstd,  Func::ewm,   Func::diff, Func::ratio, Func::square};

[[nodiscard]] constexpr std::string_view func_name(Func f) noexcept {
    switch (f) {
        case Func::shift: return "shift";
        case Func::wmean: return "wmean";
        case Func::wmax: return "wmax";
        case Func::wmin: return "wmin";
        case Func::wsum: return "wsum";
        case Func::wstd: return "wstd";
        case Func::ewm: return "ewm";
        case Func::diff: return "diff";
        case Func::ratio: return "ratio";
        case Func::square: return "square";
    }
    return "?";
}

[[nodiscard]] inline std::optional<Func> parse_func(std::string_view s) noexcept {
    for (auto f : all_funcs)
        if (func_name(f) == s) return f;
    return std::nullopt;
}

/// The window statistic a function applies, if it is a window function.
[[nodiscard]] inline std::optional<WindowStat> window_stat_of(Func f) noexcept {
    switch (f) {
        case Func::wmean: return WindowStat::mean;
        case Func::wmax: return WindowStat::max;
        case Func::wmin: return WindowStat::min;
        case Func::wsum: return WindowStat::sum;
        case Func::wstd: return WindowStat::std;
        case Func::ewm: return WindowStat::ewm;
        default: return std::nullopt;
    }
}

[[nodiscard]] inline bool is_reserved_word(std::string_view s) noexcept {
    return s == "raw" || parse_func(s).has_value();
}

[[nodiscard]] inline bool is_identifier(std::string_view s) noexcept {
    if (s.empty()) return false;
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    return std::all_of(s.begin() + 1, s.end(),
                       [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

/// Immutable expression tree.
///
/// `diff` always carries its smoothing parameter (1 when omitted in text), so
/// printing and re-parsing yields an equal tree.
class Expr {
public:
    enum class Kind { raw, ref, call };

    [[nodiscard]] static Expr raw() { return Expr(Kind::raw); }

    [[nodiscard]] static Expr ref(std::string name) {
        Expr e(Kind::ref);
        e.name_ = std::move(name);
        return e;
    }

    [[nodiscard]] static Expr shift(Expr a, std::int64_t k) { return call(Func::shift, {std::move(a)}, {k}); }
    [[nodiscard]] static Expr window(WindowStat s, Expr a, std::int64_t w) {
        return call(*parse_func(stat_function(s)), {std::move(a)}, {w});
    }
    [[nodiscard]] static Expr diff(Expr a, Expr b, std::int64_t smoothing = 1) {
        return call(Func::diff, {std::move(a), std::move(b)}, {smoothing});
    }
    [[nodiscard]] static Expr ratio(Expr a, Expr b) { return call(Func::ratio, {std::move(a), std::move(b)}, {}); }
    [[nodiscard]] static Expr square(Expr a) { return call(Func::square, {std::move(a)}, {}); }

    [[nodiscard]] static Expr call(Func f, std::vector<Expr> args, std::vector<std::int64_t> ints) {
        Expr e(Kind::call);
        e.func_ = f;
        e.args_ = std::move(args);
        e.ints_ = std::move(ints);
        return e;
    }

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] Func func() const noexcept { return func_; }
    [[nodiscard]] const std::vector<Expr>& args() const noexcept { return args_; }
    [[nodiscard]] const std::vector<std::int64_t>& ints() const noexcept { return ints_; }

    friend bool operator==(const Expr&, const Expr&) = default;

private:
    explicit Expr(Kind k) : kind_(k) {}

    Kind kind_;
    std::string name_;
    Func func_ = Func::shift;
    std::vector<Expr> args_;
    std::vector<std::int64_t> ints_;
};

/// Canonical whitespace-free text.
[[nodiscard]] inline std::string to_string(const Expr& e) {
    switch (e.kind()) {
        case Expr::Kind::raw: return "raw";
        case Expr::Kind::ref: return e.name();
        case Expr::Kind::call: break;
    }
    std::string out(func_name(e.func()));
    out += '(';
    for (std::size_t i = 0; i < e.args().size(); ++i) {
        if (i) out += ',';
        out += to_string(e.args()[i]);
    }
    for (std::size_t i = 0; i < e.ints().size(); ++i) {
        if (e.func() == Func::diff && e.ints()[i] == 1) continue;
        out += ',';
        out += std::to_string(e.ints()[i]);
    }
    out += ')';
    return out;
}

namespace detail {

class ExprParser {
public:
    explicit ExprParser(std::string_view text) : text_(text) {}

    Expr parse() {
        skip_ws();
        Expr e = parse_expr();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return e;
    }

private:
    struct Arg {
        std::optional<Expr> expr;
        std::int64_t value = 0;
        std::size_t offset = 0;
    };

    [[noreturn]] void fail(const std::string& what, std::optional<std::size_t> at = std::nullopt) const {
        throw syntax_error(what, at.value_or(pos_));
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    std::string_view identifier() {
        const std::size_t start = pos_;
        if (pos_ < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
        }
        return text_.substr(start, pos_ - start);
    }

    Expr parse_expr() {
        const std::size_t start = pos_;
        if (pos_ >= text_.size()) fail("expected expression, found end of input");
        const auto id = identifier();
        if (id.empty()) fail("expected expression");
        skip_ws();
        const bool is_call = pos_ < text_.size() && text_[pos_] == '(';
        if (!is_call) {
            if (id == "raw") return Expr::raw();
            if (parse_func(id)) fail("function '" + std::string(id) + "' used without arguments", start);
            return Expr::ref(std::string(id));
        }
        const auto f = parse_func(id);
        if (!f) fail("unknown function '" + std::string(id) + "'", start);
        ++pos_;  // '('
        std::vector<Arg> args;
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == ')') fail("'" + std::string(id) + "' needs arguments");
        for (;;) {
            skip_ws();
            args.push_back(parse_arg());
            skip_ws();
            if (pos_ >= text_.size()) fail("expected ',' or ')', found end of input");
            if (text_[pos_] == ',') {
                ++pos_;
                continue;
            }
            if (text_[pos_] == ')') {
                ++pos_;
                break;
            }
            fail("expected ',' or ')'");
        }
        return build(*f, std::move(args), start);
    }

    Arg parse_arg() {
        Arg a;
        a.offset = pos_;
        if (pos_ < text_.size() && (text_[pos_] == '-' || std::isdigit(static_cast<unsigned char>(text_[pos_])))) {
            const std::size_t start = pos_;
            if (text_[pos_] == '-') ++pos_;
            const std::size_t digits = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            if (pos_ == digits) fail("expected digits", start);
            const auto tok = text_.substr(start, pos_ - start);
            auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), a.value);
            if (ec != std::errc{}) fail("integer out of range", start);
            return a;
        }
        a.expr = parse_expr();
        return a;
    }

    Expr build(Func f, std::vector<Arg> args, std::size_t at) const {
        const std::string fn(func_name(f));
        std::size_t n_expr = 0;
        std::size_t n_int = 0;
        std::size_t max_int = 0;
        switch (f) {
            case Func::shift: case Func::wmean: case Func::wmax: case Func::wmin:
            case Func::wsum:  case Func::wstd:  case Func::ewm:
                n_expr = 1; n_int = 1; max_int = 1;
                break;
            case Func::diff: n_expr = 2; n_int = 0; max_int = 1; break;
            case Func::ratio: n_expr = 2; break;
            case Func::square: n_expr = 1; break;
        }
        if (args.size() < n_expr + n_int || args.size() > n_expr + max_int) {
            std::string expected = std::to_string(n_expr + n_int);
            if (max_int != n_int) expected += " or " + std::to_string(n_expr + max_int);
            throw syntax_error("arity mismatch: '" + fn + "' takes " + expected + " arguments, got " +
                                   std::to_string(args.size()),
                               at);
        }
        std::vector<Expr> exprs;
        std::vector<std::int64_t> ints;
        for (std::size_t i = 0; i < args.size(); ++i) {
            auto& a = args[i];
            if (i < n_expr) {
                if (!a.expr) throw syntax_error("argument " + std::to_string(i + 1) + " of '" + fn + "' must be an expression", a.offset);
                exprs.push_back(std::move(*a.expr));
            } else {
                if (a.expr) throw syntax_error("argument " + std::to_string(i + 1) + " of '" + fn + "' must be an integer", a.offset);
                if (a.value <= 0) throw syntax_error("integer parameter of '" + fn + "' must be positive", a.offset);
                ints.push_back(a.value);
            }
        }
        if (f == Func::diff && ints.empty()) ints.push_back(1);
        return Expr::call(f, std::move(exprs), std::move(ints));
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses one expression; throws `syntax_error` carrying a byte offset.
[[nodiscard]] inline Expr parse_expr(std::string_view text) { return detail::ExprParser(text).parse(); }

/// Generalized-derivative order: `diff` adds one to the larger child order,
/// every other function keeps it. `ref_order` supplies orders of named features.
[[nodiscard]] inline unsigned order_of(const Expr& e, const std::function<unsigned(const std::string&)>& ref_order) {
    switch (e.kind()) {
        case Expr::Kind::raw: return 0;
        case Expr::Kind::ref: return ref_order(e.name());
        case Expr::Kind::call: break;
    }
    unsigned m = 0;
    for (const auto& a : e.args()) m = std::max(m, order_of(a, ref_order));
    return e.func() == Func::diff ? m + 1 : m;
}

/// Order of an expression with no named references.
[[nodiscard]] inline unsigned order_of(const Expr& e) {
    return order_of(e, [](const std::string& n) -> unsigned {
        throw program_error("order_of: unresolved reference '" + n + "'");
    });
}

/// Replaces every named reference by its definition.
[[nodiscard]] inline Expr inline_refs(const Expr& e, const std::map<std::string, Expr>& defs) {
    switch (e.kind()) {
        case Expr::Kind::raw: return e;
        case Expr::Kind::ref: {
            const auto it = defs.find(e.name());
            if (it == defs.end()) throw program_error("unresolved reference '" + e.name() + "'");
            return it->second;
        }
        case Expr::Kind::call: break;
    }
    std::vector<Expr> args;
    args.reserve(e.args().size());
    for (const auto& a : e.args()) args.push_back(inline_refs(a, defs));
    return Expr::call(e.func(), std::move(args), e.ints());
}

/// Calls `fn` on every node, parents before children.
inline void visit(const Expr& e, const std::function<void(const Expr&)>& fn) {
    fn(e);
    for (const auto& a : e.args()) visit(a, fn);
}

}  // namespace featprog
