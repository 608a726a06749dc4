// covex: convergence experiments, the exact identity suite and builtin field listings.
// Exit codes: 0 success, 1 a slope or identity check failed, 2 usage error.

#include "covex/covex.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failed = 1;
constexpr int exit_usage = 2;

struct ConvergeArgs {
    std::string experiment;
    std::string op;
    std::optional<int> levels;
    std::optional<double> factor;
    std::optional<int> path_steps;
    std::string out;
};

struct UsageError : covex::Error {
    using covex::Error::Error;
};

std::string band_text(const covex::SlopeBand& b) {
    std::ostringstream os;
    os << '[' << b.lo << ", " << b.hi << ']';
    return os.str();
}

covex::ExperimentSpec resolve_experiment(const ConvergeArgs& a) {
    std::optional<covex::Operator> op;
    if (!a.op.empty()) {
        try {
            op = covex::parse_operator(a.op);
        } catch (const covex::Error& e) {
            throw UsageError(e.what());
        }
    }
    covex::ExperimentSpec spec;
    if (a.experiment.ends_with(".json") || std::filesystem::exists(a.experiment)) {
        spec = covex::experiment_from_json(covex::read_json_file(a.experiment));
        if (op) spec.op = *op;
    } else {
        try {
            spec = covex::builtin_experiment(a.experiment, op);
        } catch (const covex::Error& e) {
            throw UsageError(e.what());
        }
    }
    if (a.levels) spec.levels = *a.levels;
    if (a.factor) spec.factor = *a.factor;
    if (a.path_steps) spec.path_steps = *a.path_steps;
    if (spec.levels < 3) throw UsageError("--levels must be at least 3");
    if (!(spec.factor > 0 && spec.factor < 1)) throw UsageError("--factor must lie in (0, 1)");
    if (spec.path_steps < 1) throw UsageError("--path-steps must be positive");
    return spec;
}

int run_converge(const ConvergeArgs& a) {
    const covex::ExperimentSpec spec = resolve_experiment(a);
    const auto rows = covex::run_convergence(spec);
    const auto fit = covex::fit_slope(spec, rows);
    const std::string euler =
        spec.euler == covex::EulerConvention::extrinsic ? "extrinsic (Rz Ry Rx)" : "intrinsic (Rx Ry Rz)";

    std::cout << "experiment " << spec.name << ", operator " << covex::to_string(spec.op) << "\n"
              << "  " << spec.levels << " levels, factor " << spec.factor << ", " << spec.path_steps
              << " path steps per edge, euler " << euler << "\n";
    std::cout << std::scientific << std::setprecision(4);
    for (const auto& r : rows)
        std::cout << "  level " << r.level << "  h " << r.h << "  abs " << r.abs_error << "  rel " << r.rel_error << "\n";
    std::cout << std::defaultfloat << std::setprecision(4);
    const bool ok = spec.band.contains(fit.slope);
    std::cout << "  slope " << fit.slope << " (r2 " << fit.r2 << ", " << fit.used << " rows, "
              << (spec.error == covex::ErrorKind::relative ? "relative" : "absolute") << " error), band "
              << band_text(spec.band) << ": " << (ok ? "ok" : "OUT OF BAND") << "\n";

    if (!a.out.empty()) {
        covex::emit_csv(a.out, rows, fit,
                        {"experiment=" + spec.name, "operator=" + covex::to_string(spec.op),
                         std::string("euler=") +
                             (spec.euler == covex::EulerConvention::extrinsic ? "extrinsic" : "intrinsic")});
        std::cout << "  wrote " << a.out << "\n";
    }
    return ok ? exit_ok : exit_failed;
}

int run_identities(std::uint64_t seed, int trials) {
    if (trials < 1) throw UsageError("--trials must be positive");
    const auto report = covex::identity_suite(seed, trials);
    covex::print_report(std::cout, report);
    return report.passed() ? exit_ok : exit_failed;
}

int run_dump_builtin(const std::string& name) {
    for (const auto& b : covex::builtin_registry())
        if (b.name == name) {
            std::cout << b.name << " (" << b.kind << "): " << b.formula << "\n";
            return exit_ok;
        }
    throw UsageError("unknown builtin '" + name + "'; known: " + covex::builtin_names());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"discrete covariant exterior calculus experiments"};
    app.require_subcommand(1, 1);

    ConvergeArgs conv;
    auto* converge = app.add_subcommand("converge", "run a refinement study and fit its slope");
    converge->add_option("--experiment", conv.experiment, "registry name or path to a JSON spec")->required();
    converge->add_option("--operator", conv.op, "series to measure; defaults to the experiment's first");
    converge->add_option("--levels", conv.levels, "refinement levels, at least 3");
    converge->add_option("--factor", conv.factor, "scale factor per level");
    converge->add_option("--path-steps", conv.path_steps, "transport steps per edge");
    converge->add_option("--out", conv.out, "CSV output path");

    std::uint64_t seed = 0;
    int trials = 100;
    auto* identities = app.add_subcommand("identities", "check the exact discrete identities on random data");
    identities->add_option("--seed", seed);
    identities->add_option("--trials", trials);

    std::string builtin_name;
    auto* dump = app.add_subcommand("dump-builtin", "print a builtin field's registry entry");
    dump->add_option("name", builtin_name)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*converge) return run_converge(conv);
        if (*identities) return run_identities(seed, trials);
        return run_dump_builtin(builtin_name);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        if (*converge) std::cerr << "experiments: " << covex::experiment_names() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }
}
