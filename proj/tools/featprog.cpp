// featprog: feature programs over panels of time series, spin-gas simulation
// and the basic-vs-extended ridge evaluation.
//
// Exit codes: 0 ok, 2 usage or parse error, 3 data error, 4 capacity error,
// 5 a validate check failed.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "featprog/featprog.hpp"

namespace fs = std::filesystem;
using namespace featprog;

namespace {

enum Exit : int { ok = 0, usage = 2, data = 3, capacity = 4, check_failed = 5 };

struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spill(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write '" + path + "'");
    out << text;
}

void require_writable(const std::string& path) {
    if (path.empty() || path == "-") return;
    const auto dir = fs::path(path).parent_path();
    if (!dir.empty() && !fs::is_directory(dir)) throw usage_error("output directory does not exist: " + dir.string());
}

Panel load_panel(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot read '" + path + "'");
    return csv::read_panel(in);
}

FeatureProgram load_program(const std::string& spec) {
    if (spec == "default") return default_program();
    if (spec == "basic") return eval::basic_program();
    return parse_program(slurp(spec));
}

spin::ParamsFile load_params(const std::string& path) {
    const auto text = slurp(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw data_error("params '" + path + "': " + e.what());
    }
    return spin::parse_params(j);
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
    std::string input, program = "default", output = "-", report;
    bool drop_warmup = false;
    unsigned threads = 0;
};

int cmd_generate(const GenerateArgs& a) {
    require_writable(a.output);
    require_writable(a.report);
    const auto program = load_program(a.program);
    auto panel = std::make_shared<const Panel>(load_panel(a.input));
    const auto res = generate(panel, program, {a.threads});
    spill(a.output, export_features(res.matrix, a.drop_warmup));
    for (const auto& w : res.report.warnings) std::cerr << "warning: " << w << '\n';
    if (!a.report.empty()) spill(a.report, res.report.to_json().dump(2) + "\n");
    return ok;
}

struct SimulateArgs {
    std::string params, output = "-";
    std::size_t steps = 1000;
    std::optional<std::uint64_t> seed;
    double x0 = 0.0;
};

int cmd_simulate(const SimulateArgs& a) {
    require_writable(a.output);
    const auto pf = load_params(a.params);
    const auto seed = a.seed ? a.seed : pf.seed;
    if (!seed) throw usage_error("simulate needs --seed (or a \"seed\" entry in the params file)");
    spin::Rng rng(*seed);
    const auto panel = spin::simulate_panel(rng, pf.params, std::vector<double>(pf.params.n, a.x0), a.steps, pf.history);
    std::ostringstream out;
    csv::write_panel(out, panel);
    spill(a.output, out.str());
    return ok;
}

struct ValidateArgs {
    std::string params;
    std::optional<std::size_t> n;
    std::optional<std::uint64_t> seed;
    double scale = 1.0;
    double tolerance = 1e-10;
};

int cmd_validate(const ValidateArgs& a) {
    spin::SpinGasParams params;
    spin::SpinHistory history;
    if (!a.params.empty()) {
        auto pf = load_params(a.params);
        params = std::move(pf.params);
        history = std::move(pf.history);
    } else {
        if (!a.n) throw usage_error("validate needs --params or --n");
        if (*a.n < 1) throw usage_error("--n must be >= 1");
        if (*a.n > spin::max_joint_spins) {
            throw capacity_error("validate enumerates 2^(2N) joint states; N=" + std::to_string(*a.n) +
                                 " exceeds the limit of " + std::to_string(spin::max_joint_spins));
        }
        if (!a.seed) throw usage_error("random parameters need --seed");
        spin::Rng rng(*a.seed);
        params = spin::random_params(rng, *a.n, a.scale);
        history = {spin::random_spins(rng, *a.n), spin::random_spins(rng, *a.n), spin::random_spins(rng, *a.n)};
    }
    const auto report = spin::validate_model(params, history, a.tolerance);
    for (const auto& c : report.checks) {
        std::printf("%-28s %-4s max_dev=%.3e tol=%.0e%s\n", c.name.c_str(), c.passed() ? "ok" : "FAIL", c.value,
                    c.tolerance, c.asserted ? "" : " (informational)");
    }
    std::printf("%s\n", report.passed() ? "all asserted checks passed" : "some asserted checks FAILED");
    return report.passed() ? ok : check_failed;
}

struct EvaluateArgs {
    std::string input, targets, program = "default", json;
    std::optional<std::uint64_t> seed;
    std::size_t n = 20, length = 2000;
    double split = 0.8, lambda = 1e-3;
};

int cmd_evaluate(const EvaluateArgs& a) {
    require_writable(a.json);
    const auto program = load_program(a.program);
    std::shared_ptr<const Panel> inputs;
    std::vector<Series> targets;
    if (!a.input.empty()) {
        inputs = std::make_shared<const Panel>(load_panel(a.input));
        if (a.targets.empty()) {
            targets = eval::one_step_ahead(*inputs);
        } else {
            targets = load_panel(a.targets).series();
        }
    } else {
        if (!a.seed) throw usage_error("the synthetic dataset needs --seed (or pass --input)");
        auto ds = eval::default_synthetic(*a.seed, a.n, a.length);
        inputs = std::make_shared<const Panel>(std::move(ds.inputs));
        targets = std::move(ds.targets);
    }
    const auto cmp = eval::evaluate(inputs, targets, program, {a.split, a.lambda});
    std::cout << cmp.table();
    if (!a.json.empty()) spill(a.json, cmp.to_json().dump(2) + "\n");
    return ok;
}

struct ResembleArgs {
    std::string which, input;
    std::int64_t dtau = 5;
};

int cmd_resemble(const ResembleArgs& a) {
    const auto which = [&] {
        try {
            return parse_resemblance(a.which);
        } catch (const parameter_error& e) {
            throw usage_error(e.what());
        }
    }();
    if (a.dtau < 1) throw usage_error("--dtau must be >= 1");
    const auto score = eval::resemble(load_panel(a.input), which, a.dtau);
    std::cout << nlohmann::json{{"which", a.which}, {"dtau", a.dtau}, {"score", score.to_json()}}.dump(2) << '\n';
    return ok;
}

int cmd_program(const std::string& what, const std::string& path) {
    if (what == "default") {
        std::cout << print_program(default_program());
    } else if (what == "print" || what == "hash") {
        if (path.empty()) throw usage_error("program " + what + " needs a program file");
        const auto p = parse_program(slurp(path));
        std::cout << (what == "print" ? print_program(p) : program_hash(p) + "\n");
    } else {
        throw usage_error("unknown program action '" + what + "' (expected default, print or hash)");
    }
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Feature programs for panels of time series"};
    app.require_subcommand(1);

    GenerateArgs ga;
    auto* gen = app.add_subcommand("generate", "Evaluate a feature program over a panel CSV");
    gen->add_option("--input,-i", ga.input, "Panel CSV")->required()->check(CLI::ExistingFile);
    gen->add_option("--program,-p", ga.program, "Program JSON path, or 'default' / 'basic'");
    gen->add_option("--output,-o", ga.output, "Features CSV ('-' for stdout)");
    gen->add_option("--report", ga.report, "Write the generation report JSON here");
    gen->add_flag("--drop-warmup", ga.drop_warmup, "Remove rows inside the largest warmup");
    gen->add_option("--threads", ga.threads, "Worker threads (0 = FEATPROG_THREADS or hardware)");

    SimulateArgs sa;
    auto* sim = app.add_subcommand("simulate", "Sample a spin-gas panel");
    sim->add_option("--params", sa.params, "Simulator params JSON")->required()->check(CLI::ExistingFile);
    sim->add_option("--steps", sa.steps, "Number of update steps L (panel has L+1 rows)")->check(CLI::PositiveNumber);
    sim->add_option("--seed", sa.seed, "RNG seed");
    sim->add_option("--x0", sa.x0, "Initial value of every series");
    sim->add_option("--output,-o", sa.output, "Panel CSV ('-' for stdout)");

    ValidateArgs va;
    auto* val = app.add_subcommand("validate", "Cross-check the simulator against exhaustive enumeration");
    auto* vparams = val->add_option("--params", va.params, "Simulator params JSON")->check(CLI::ExistingFile);
    val->add_option("--n", va.n, "Draw random parameters with this many spins")->excludes(vparams);
    val->add_option("--seed", va.seed, "Seed for random parameters and history");
    val->add_option("--scale", va.scale, "Coupling magnitude for random parameters");
    val->add_option("--tolerance", va.tolerance, "Absolute tolerance of asserted checks");

    EvaluateArgs ea;
    auto* ev = app.add_subcommand("evaluate", "Ridge on basic vs. extended features");
    ev->add_option("--input,-i", ea.input, "Panel CSV (default: builtin synthetic dataset)")->check(CLI::ExistingFile);
    ev->add_option("--targets", ea.targets, "Targets CSV aligned to input time (default: next value)")
        ->check(CLI::ExistingFile);
    ev->add_option("--program,-p", ea.program, "Program JSON path, or 'default'");
    ev->add_option("--seed", ea.seed, "Seed of the synthetic dataset");
    ev->add_option("--n", ea.n, "Synthetic variates")->check(CLI::PositiveNumber);
    ev->add_option("--length", ea.length, "Synthetic time steps")->check(CLI::PositiveNumber);
    ev->add_option("--split", ea.split, "Train fraction")->check(CLI::Range(0.0, 1.0));
    ev->add_option("--lambda", ea.lambda, "Ridge penalty")->check(CLI::NonNegativeNumber);
    ev->add_option("--json", ea.json, "Write the comparison JSON here ('-' for stdout)");

    ResembleArgs ra;
    auto* res = app.add_subcommand("resemble", "Compare a program against a hand-crafted indicator");
    res->add_option("--which", ra.which, "mom, bias or absenergy")->required();
    res->add_option("--dtau", ra.dtau, "Indicator lag");
    res->add_option("--input,-i", ra.input, "Panel CSV")->required()->check(CLI::ExistingFile);

    std::string prog_action, prog_path;
    auto* prog = app.add_subcommand("program", "Print the builtin program, or canonicalize/hash a program file");
    prog->add_option("action", prog_action, "default | print | hash")->required();
    prog->add_option("path", prog_path, "Program JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : usage;
    }

    try {
        if (*gen) return cmd_generate(ga);
        if (*sim) return cmd_simulate(sa);
        if (*val) return cmd_validate(va);
        if (*ev) return cmd_evaluate(ea);
        if (*res) return cmd_resemble(ra);
        if (*prog) return cmd_program(prog_action, prog_path);
    } catch (const usage_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return usage;
    } catch (const program_error& e) {
        std::cerr << "program error: " << e.what() << '\n';
        return usage;
    } catch (const parameter_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return usage;
    } catch (const capacity_error& e) {
        std::cerr << "capacity error: " << e.what() << '\n';
        return capacity;
    } catch (const featprog::error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return data;
    }
    return usage;
}
