#pragma once

// Spin-gas Glauber dynamics: a discrete-time Ising chain whose local field also
// couples to the discrete momentum and acceleration of the spin trajectory.
//
//   p_t = c (s_t - s_{t-dt}) / dt,   a_t = (p_t - p_{t-dt}) / dt
//   G_i = sum_j J_ij s_j + h_i + sum_j G1_ij p_j + sum_j G2_ij a_j   (+ optional cubic-clique terms)
//   P(s_{i,t+dt} | history) = exp(s G_i) / (2 cosh G_i), spins updated independently
//
// Panels are path sums X_l = X_{l-1} + c s_l. Inverse temperature is fixed to 1.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "featprog/errors.hpp"
#include "featprog/series.hpp"

namespace featprog::spin {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
/// Spin configuration, entries exactly +1 or -1.
using Spins = std::vector<int>;
using Rng = std::mt19937_64;

/// Per-step override of the Ising couplings (time-dependent J(t), h(t)).
struct ScheduleEntry {
    std::optional<Matrix> J;
    std::optional<Vector> h;
};

struct SpinGasParams {
    std::size_t n = 0;
    Matrix J;
    Vector h;
    Matrix G1;
    Matrix G2;
    double c = 0.1;
    double dt = 1.0;
    /// Optional third-order couplings: G1_cubic[i](m,n) multiplies p_m p_n in
    /// the field of spin i, G2_cubic likewise for accelerations. Empty = off.
    std::vector<Matrix> G1_cubic;
    std::vector<Matrix> G2_cubic;
    /// Entry l applies to the update leaving step l; the last entry persists.
    std::vector<ScheduleEntry> schedule;

    [[nodiscard]] static SpinGasParams zeros(std::size_t n) {
        SpinGasParams p;
        p.n = n;
        p.J = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        p.h = Vector::Zero(static_cast<Eigen::Index>(n));
        p.G1 = p.J;
        p.G2 = p.J;
        return p;
    }

    [[nodiscard]] const Matrix& J_at(std::size_t step) const {
        if (!schedule.empty())
            for (std::size_t k = std::min(step, schedule.size() - 1) + 1; k-- > 0;)
                if (schedule[k].J) return *schedule[k].J;
        return J;
    }

    [[nodiscard]] const Vector& h_at(std::size_t step) const {
        if (!schedule.empty())
            for (std::size_t k = std::min(step, schedule.size() - 1) + 1; k-- > 0;)
                if (schedule[k].h) return *schedule[k].h;
        return h;
    }

    /// True when the field ignores momentum and acceleration, i.e. the chain is
    /// first-order Markov in the spins.
    [[nodiscard]] bool memoryless() const {
        return G1.isZero(0.0) && G2.isZero(0.0) && G1_cubic.empty() && G2_cubic.empty();
    }

    [[nodiscard]] bool field_only() const {
        if (!memoryless() || !J.isZero(0.0)) return false;
        return std::none_of(schedule.begin(), schedule.end(), [](const ScheduleEntry& s) { return s.J && !s.J->isZero(0.0); });
    }

    void validate() const {
        const auto N = static_cast<Eigen::Index>(n);
        if (n == 0) throw parameter_error("spin count must be >= 1");
        auto check_coupling = [&](const Matrix& m, const char* what, bool symmetric) {
            if (m.rows() != N || m.cols() != N) throw shape_error(std::string(what) + " must be " + std::to_string(n) + "x" + std::to_string(n));
            if (!m.allFinite()) throw parameter_error(std::string(what) + " has non-finite entries");
            if (symmetric) {
                for (Eigen::Index i = 0; i < N; ++i) {
                    if (m(i, i) != 0.0) throw parameter_error(std::string(what) + " must have a zero diagonal");
                    for (Eigen::Index j = 0; j < i; ++j)
                        if (m(i, j) != m(j, i)) throw parameter_error(std::string(what) + " must be symmetric");
                }
            }
        };
        check_coupling(J, "J", true);
        check_coupling(G1, "G1", false);
        check_coupling(G2, "G2", false);
        if (h.size() != N) throw shape_error("h must have " + std::to_string(n) + " entries");
        if (!h.allFinite()) throw parameter_error("h has non-finite entries");
        for (const auto* cubic : {&G1_cubic, &G2_cubic}) {
            if (cubic->empty()) continue;
            if (cubic->size() != n) throw shape_error("cubic couplings need one matrix per spin");
            for (const auto& m : *cubic) check_coupling(m, "cubic coupling", false);
        }
        for (const auto& s : schedule) {
            if (s.J) check_coupling(*s.J, "schedule J", true);
            if (s.h && (s.h->size() != N || !s.h->allFinite())) throw parameter_error("schedule h is malformed");
        }
        if (!(c >= 0.0) || !std::isfinite(c)) throw parameter_error("rescale factor c must be finite and >= 0");
        if (!(dt > 0.0) || !std::isfinite(dt)) throw parameter_error("time step dt must be finite and > 0");
    }
};

/// The current configuration and the two before it.
struct SpinHistory {
    Spins current;
    Spins prev;
    Spins prev2;

    [[nodiscard]] static SpinHistory all_up(std::size_t n) { return {Spins(n, 1), Spins(n, 1), Spins(n, 1)}; }

    [[nodiscard]] SpinHistory advanced(Spins next) const { return {std::move(next), current, prev}; }

    friend bool operator==(const SpinHistory&, const SpinHistory&) = default;
};

namespace detail {

inline Vector to_vector(const Spins& s) {
    Vector v(static_cast<Eigen::Index>(s.size()));
    for (std::size_t i = 0; i < s.size(); ++i) v(static_cast<Eigen::Index>(i)) = s[i];
    return v;
}

inline void check_spins(const Spins& s, std::size_t n, const char* what) {
    if (s.size() != n) throw shape_error(std::string(what) + " must have " + std::to_string(n) + " spins");
    for (int x : s)
        if (x != 1 && x != -1) throw parameter_error(std::string(what) + " entries must be +1 or -1");
}

}  // namespace detail

/// Spin i of configuration index `bits` is +1 when bit i is set.
[[nodiscard]] inline Spins spins_from_bits(std::uint64_t bits, std::size_t n) {
    Spins s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = (bits >> i) & 1U ? 1 : -1;
    return s;
}

[[nodiscard]] inline std::uint64_t bits_from_spins(const Spins& s) {
    std::uint64_t b = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (s[i] > 0) b |= std::uint64_t{1} << i;
    return b;
}

/// P(s = +1 | field) = exp(field) / (2 cosh field), evaluated without overflow.
[[nodiscard]] inline double prob_up(double field) noexcept {
    if (field >= 0) return 1.0 / (1.0 + std::exp(-2.0 * field));
    const double e = std::exp(2.0 * field);
    return e / (1.0 + e);
}

/// P(s | field); the two outcomes share one computed value so they sum to 1.
[[nodiscard]] inline double conditional(int s, double field) noexcept {
    const double up = prob_up(field);
    return s > 0 ? up : 1.0 - up;
}

/// Effective local field of every spin for the update leaving `step`.
[[nodiscard]] inline Vector local_field(const SpinGasParams& params, const SpinHistory& hist, std::size_t step = 0) {
    const auto s = detail::to_vector(hist.current);
    const auto sp = detail::to_vector(hist.prev);
    const auto spp = detail::to_vector(hist.prev2);
    const Vector p = params.c * (s - sp) / params.dt;
    const Vector p_prev = params.c * (sp - spp) / params.dt;
    const Vector a = (p - p_prev) / params.dt;
    Vector field = params.J_at(step) * s + params.h_at(step) + params.G1 * p + params.G2 * a;
    for (std::size_t i = 0; i < params.G1_cubic.size(); ++i)
        field(static_cast<Eigen::Index>(i)) += p.dot(params.G1_cubic[i] * p);
    for (std::size_t i = 0; i < params.G2_cubic.size(); ++i)
        field(static_cast<Eigen::Index>(i)) += a.dot(params.G2_cubic[i] * a);
    return field;
}

/// Uniform double in [0, 1) from the top 53 bits of one draw.
[[nodiscard]] inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Draws the next configuration, each spin independently.
[[nodiscard]] inline Spins step_sample(Rng& rng, const SpinGasParams& params, const SpinHistory& hist,
                                       std::size_t step = 0) {
    const Vector field = local_field(params, hist, step);
    Spins next(params.n);
    for (std::size_t i = 0; i < params.n; ++i) next[i] = uniform01(rng) < prob_up(field(static_cast<Eigen::Index>(i))) ? 1 : -1;
    return next;
}

/// Path-summed panel of length L+1: X_0 = x0, X_l = X_{l-1} + c s_l.
[[nodiscard]] inline Panel simulate_panel(Rng& rng, const SpinGasParams& params, const std::vector<double>& x0,
                                          std::size_t steps, std::optional<SpinHistory> initial = std::nullopt) {
    params.validate();
    if (steps < 1) throw parameter_error("simulation needs at least one step");
    if (x0.size() != params.n) throw shape_error("x0 must have " + std::to_string(params.n) + " entries");
    SpinHistory hist = initial.value_or(SpinHistory::all_up(params.n));
    detail::check_spins(hist.current, params.n, "history.current");
    detail::check_spins(hist.prev, params.n, "history.prev");
    detail::check_spins(hist.prev2, params.n, "history.prev2");

    std::vector<std::vector<double>> rows(params.n, std::vector<double>(steps + 1));
    for (std::size_t i = 0; i < params.n; ++i) rows[i][0] = x0[i];
    for (std::size_t l = 1; l <= steps; ++l) {
        Spins next = step_sample(rng, params, hist, l - 1);
        for (std::size_t i = 0; i < params.n; ++i) rows[i][l] = rows[i][l - 1] + params.c * next[i];
        hist = hist.advanced(std::move(next));
    }
    return Panel::make(rows);
}

/// Largest N * (L - 1) accepted by `path_probability`.
inline constexpr std::size_t max_path_bits = 20;
/// Largest N accepted by `build_joint`.
inline constexpr std::size_t max_joint_spins = 6;

namespace detail {

inline double product_conditional(const Spins& next, const Vector& field) {
    double p = 1.0;
    for (std::size_t i = 0; i < next.size(); ++i) p *= conditional(next[i], field(static_cast<Eigen::Index>(i)));
    return p;
}

inline double path_sum(const SpinGasParams& params, const SpinHistory& hist, const Spins& end, std::size_t step,
                       std::size_t remaining) {
    const Vector field = local_field(params, hist, step);
    if (remaining == 1) return product_conditional(end, field);
    const std::uint64_t configs = std::uint64_t{1} << params.n;
    double total = 0.0;
    for (std::uint64_t b = 0; b < configs; ++b) {
        Spins mid = spins_from_bits(b, params.n);
        const double w = product_conditional(mid, field);
        total += w * path_sum(params, hist.advanced(std::move(mid)), end, step + 1, remaining - 1);
    }
    return total;
}

}  // namespace detail

/// P(s_{t+L} = end | history) summed exhaustively over every intermediate
/// configuration, with momentum and acceleration rolled along each path.
[[nodiscard]] inline double path_probability(const SpinGasParams& params, const SpinHistory& start, const Spins& end,
                                             std::size_t steps, std::size_t first_step = 0) {
    params.validate();
    if (steps < 1) throw parameter_error("path length must be >= 1");
    if (params.n * (steps - 1) > max_path_bits) {
        throw capacity_error("path enumeration needs 2^" + std::to_string(params.n * (steps - 1)) +
                             " terms; limit is 2^" + std::to_string(max_path_bits));
    }
    detail::check_spins(start.current, params.n, "start");
    detail::check_spins(start.prev, params.n, "history.prev");
    detail::check_spins(start.prev2, params.n, "history.prev2");
    detail::check_spins(end, params.n, "end");
    return detail::path_sum(params, start, end, first_step, steps);
}

/// One-step 2^N x 2^N transition matrix T(from, to) of a memoryless chain.
[[nodiscard]] inline Matrix transition_matrix(const SpinGasParams& params, std::size_t step = 0) {
    params.validate();
    if (!params.memoryless()) throw parameter_error("transition matrix requires G1 = G2 = 0");
    if (params.n > 12) throw capacity_error("transition matrix limited to N <= 12");
    const auto configs = static_cast<Eigen::Index>(std::uint64_t{1} << params.n);
    Matrix T(configs, configs);
    for (Eigen::Index from = 0; from < configs; ++from) {
        const Spins s = spins_from_bits(static_cast<std::uint64_t>(from), params.n);
        const Vector field = local_field(params, {s, s, s}, step);
        for (Eigen::Index to = 0; to < configs; ++to)
            T(from, to) = detail::product_conditional(spins_from_bits(static_cast<std::uint64_t>(to), params.n), field);
    }
    return T;
}

/// Exact joint distribution of (s_t, s_{t+dt}) given the two configurations
/// preceding s_t. The pairwise energy is
///   sum_{i<j} J_ij s_i s_j + sum_i h_i s_i + sum_i s'_i G_i(s, history),
/// and table index = (bits(s') << N) | bits(s).
struct JointModel {
    SpinGasParams params;
    Spins prev;
    Spins prev2;
    std::vector<double> table;
    double log_partition = 0.0;

    [[nodiscard]] std::size_t n() const noexcept { return params.n; }

    [[nodiscard]] double probability(const Spins& now, const Spins& next) const {
        return table[(bits_from_spins(next) << params.n) | bits_from_spins(now)];
    }

    /// P(s_{t+dt} = next | s_t = now), read off the table.
    [[nodiscard]] double next_given_now(const Spins& now, const Spins& next) const {
        const std::uint64_t past = bits_from_spins(now);
        double marginal = 0.0;
        for (std::uint64_t f = 0; f < (std::uint64_t{1} << params.n); ++f) marginal += table[(f << params.n) | past];
        return probability(now, next) / marginal;
    }
};

[[nodiscard]] inline double joint_energy(const SpinGasParams& params, const Spins& now, const Spins& next,
                                         const Spins& prev, const Spins& prev2) {
    const Matrix& J = params.J_at(0);
    const Vector& h = params.h_at(0);
    double e = 0.0;
    for (std::size_t i = 0; i < params.n; ++i) {
        e += h(static_cast<Eigen::Index>(i)) * now[i];
        for (std::size_t j = i + 1; j < params.n; ++j)
            e += J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * now[i] * now[j];
    }
    const Vector field = local_field(params, {now, prev, prev2});
    for (std::size_t i = 0; i < params.n; ++i) e += next[i] * field(static_cast<Eigen::Index>(i));
    return e;
}

[[nodiscard]] inline JointModel build_joint(const SpinGasParams& params, const Spins& prev, const Spins& prev2) {
    params.validate();
    if (params.n > max_joint_spins) {
        throw capacity_error("joint enumeration limited to N <= " + std::to_string(max_joint_spins) + ", got N=" +
                             std::to_string(params.n));
    }
    detail::check_spins(prev, params.n, "history.prev");
    detail::check_spins(prev2, params.n, "history.prev2");
    const std::size_t n = params.n;
    const std::uint64_t half = std::uint64_t{1} << n;
    JointModel jm{params, prev, prev2, std::vector<double>(half * half), 0.0};
    double emax = -std::numeric_limits<double>::infinity();
    for (std::uint64_t f = 0; f < half; ++f) {
        const Spins next = spins_from_bits(f, n);
        for (std::uint64_t p = 0; p < half; ++p) {
            const double e = joint_energy(params, spins_from_bits(p, n), next, prev, prev2);
            jm.table[(f << n) | p] = e;
            emax = std::max(emax, e);
        }
    }
    double z = 0.0;
    for (double e : jm.table) z += std::exp(e - emax);
    jm.log_partition = emax + std::log(z);
    for (double& e : jm.table) e = std::exp(e - jm.log_partition);
    return jm;
}

struct NodeConditionalReport {
    /// max |P_table(s'_i | rest) - exp(s' G_i)/(2 cosh G_i)| over V_{t+dt}.
    double max_next_deviation = 0.0;
    /// max |P_table(s_i | rest) - exp(s Gbar_i)/(2 cosh Gbar_i)| over V_t,
    /// with Gbar_i = sum_j J_ij s_j + h_i.
    double max_now_deviation = 0.0;
    /// V_t deviations are asserted only when J = G1 = G2 = 0.
    bool now_asserted = false;
    double table_sum = 0.0;
    double tolerance = 1e-10;

    [[nodiscard]] bool passed() const {
        return std::abs(table_sum - 1.0) <= 1e-12 && max_next_deviation <= tolerance &&
               (!now_asserted || max_now_deviation <= tolerance);
    }
};

[[nodiscard]] inline NodeConditionalReport check_node_conditionals(const JointModel& jm, double tolerance = 1e-10) {
    const std::size_t n = jm.n();
    const std::uint64_t half = std::uint64_t{1} << n;
    NodeConditionalReport r;
    r.tolerance = tolerance;
    r.now_asserted = jm.params.field_only();
    for (double p : jm.table) r.table_sum += p;

    for (std::uint64_t idx = 0; idx < half * half; ++idx) {
        const std::uint64_t past = idx & (half - 1);
        const std::uint64_t fut = idx >> n;
        const Spins now = spins_from_bits(past, n);
        const Spins next = spins_from_bits(fut, n);
        const Vector field = local_field(jm.params, {now, jm.prev, jm.prev2});
        for (std::size_t q = 0; q < n; ++q) {
            const double here = jm.table[idx];
            const double flipped = jm.table[idx ^ (std::uint64_t{1} << (n + q))];
            const double empirical = here / (here + flipped);
            r.max_next_deviation = std::max(r.max_next_deviation,
                                            std::abs(empirical - conditional(next[q], field(static_cast<Eigen::Index>(q)))));
        }
        for (std::size_t q = 0; q < n; ++q) {
            const double here = jm.table[idx];
            const double flipped = jm.table[idx ^ (std::uint64_t{1} << q)];
            const double empirical = here / (here + flipped);
            double gbar = jm.params.h_at(0)(static_cast<Eigen::Index>(q));
            for (std::size_t j = 0; j < n; ++j)
                gbar += jm.params.J_at(0)(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(j)) * now[j];
            r.max_now_deviation = std::max(r.max_now_deviation, std::abs(empirical - conditional(now[q], gbar)));
        }
    }
    return r;
}

/// Couplings drawn uniformly from [-scale, scale]; J symmetrized with a zero diagonal.
[[nodiscard]] inline SpinGasParams random_params(Rng& rng, std::size_t n, double scale = 1.0, double c = 0.1) {
    auto draw = [&] { return scale * (2.0 * uniform01(rng) - 1.0); };
    SpinGasParams p = SpinGasParams::zeros(n);
    p.c = c;
    const auto N = static_cast<Eigen::Index>(n);
    for (Eigen::Index i = 0; i < N; ++i)
        for (Eigen::Index j = i + 1; j < N; ++j) p.J(i, j) = p.J(j, i) = draw();
    for (Eigen::Index i = 0; i < N; ++i) p.h(i) = draw();
    for (Eigen::Index i = 0; i < N; ++i)
        for (Eigen::Index j = 0; j < N; ++j) p.G1(i, j) = draw();
    for (Eigen::Index i = 0; i < N; ++i)
        for (Eigen::Index j = 0; j < N; ++j) p.G2(i, j) = draw();
    return p;
}

[[nodiscard]] inline Spins random_spins(Rng& rng, std::size_t n) {
    Spins s(n);
    for (auto& x : s) x = uniform01(rng) < 0.5 ? -1 : 1;
    return s;
}

/// Contents of a simulator parameter file.
struct ParamsFile {
    SpinGasParams params;
    std::optional<std::uint64_t> seed;
    SpinHistory history;
};

namespace detail {

inline Matrix matrix_from_json(const nlohmann::json& j, std::size_t n, const char* what) {
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    if (!j.is_array() || j.size() != n) throw data_error(std::string(what) + " must be an " + std::to_string(n) + "x" + std::to_string(n) + " array");
    for (std::size_t i = 0; i < n; ++i) {
        if (!j[i].is_array() || j[i].size() != n) throw data_error(std::string(what) + " row " + std::to_string(i) + " has wrong length");
        for (std::size_t k = 0; k < n; ++k) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = j[i][k].get<double>();
    }
    return m;
}

inline Vector vector_from_json(const nlohmann::json& j, std::size_t n, const char* what) {
    if (!j.is_array() || j.size() != n) throw data_error(std::string(what) + " must have " + std::to_string(n) + " entries");
    Vector v(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    return v;
}

inline nlohmann::json matrix_to_json(const Matrix& m) {
    auto out = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        auto row = nlohmann::json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        out.push_back(row);
    }
    return out;
}

}  // namespace detail

/// Reads `{"n", "J", "h", "G1", "G2", "c", "dt", "seed", "history", "schedule"}`;
/// missing couplings default to zero, c to 0.1, dt to 1, history to all +1.
[[nodiscard]] inline ParamsFile parse_params(const nlohmann::json& j) {
    try {
        if (!j.is_object()) throw data_error("params must be a JSON object");
        const auto n_signed = j.at("n").get<std::int64_t>();
        if (n_signed < 1) throw data_error("n must be >= 1");
        const auto n = static_cast<std::size_t>(n_signed);
        ParamsFile f;
        f.params = SpinGasParams::zeros(n);
        auto& p = f.params;
        if (j.contains("J")) p.J = detail::matrix_from_json(j.at("J"), n, "J");
        if (j.contains("h")) p.h = detail::vector_from_json(j.at("h"), n, "h");
        if (j.contains("G1")) p.G1 = detail::matrix_from_json(j.at("G1"), n, "G1");
        if (j.contains("G2")) p.G2 = detail::matrix_from_json(j.at("G2"), n, "G2");
        for (auto [key, dst] : {std::pair{"G1_cubic", &p.G1_cubic}, std::pair{"G2_cubic", &p.G2_cubic}}) {
            if (!j.contains(key)) continue;
            for (const auto& m : j.at(key)) dst->push_back(detail::matrix_from_json(m, n, key));
        }
        if (j.contains("c")) p.c = j.at("c").get<double>();
        if (j.contains("dt")) p.dt = j.at("dt").get<double>();
        if (j.contains("seed")) f.seed = j.at("seed").get<std::uint64_t>();
        f.history = SpinHistory::all_up(n);
        if (j.contains("history")) {
            const auto& h = j.at("history");
            auto spins = [&](const char* key, Spins& dst) {
                if (!h.contains(key)) return;
                dst = h.at(key).get<Spins>();
                detail::check_spins(dst, n, key);
            };
            spins("current", f.history.current);
            spins("prev", f.history.prev);
            spins("prev2", f.history.prev2);
        }
        if (j.contains("schedule")) {
            for (const auto& s : j.at("schedule")) {
                ScheduleEntry e;
                if (s.contains("J")) e.J = detail::matrix_from_json(s.at("J"), n, "schedule J");
                if (s.contains("h")) e.h = detail::vector_from_json(s.at("h"), n, "schedule h");
                p.schedule.push_back(std::move(e));
            }
        }
        p.validate();
        return f;
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("malformed params: ") + e.what());
    } catch (const shape_error& e) {
        throw data_error(e.what());
    } catch (const parameter_error& e) {
        throw data_error(e.what());
    }
}

[[nodiscard]] inline nlohmann::json params_to_json(const SpinGasParams& p) {
    nlohmann::json h = nlohmann::json::array();
    for (Eigen::Index i = 0; i < p.h.size(); ++i) h.push_back(p.h(i));
    return {{"n", p.n}, {"J", detail::matrix_to_json(p.J)}, {"h", h}, {"G1", detail::matrix_to_json(p.G1)},
            {"G2", detail::matrix_to_json(p.G2)}, {"c", p.c}, {"dt", p.dt}};
}

}  // namespace featprog::spin
