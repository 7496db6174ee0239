#include "aniso/config.hpp"
#include "aniso/errors.hpp"
#include "aniso/runner.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

struct Overrides {
    std::string config;
    std::string epsilon_list;
    std::string basis;
    int size = 0;
    std::string out;
    std::string export_file;
    bool quiet = false;
};

void add_common(CLI::App* sub, Overrides& o, bool config_required) {
    auto* opt = sub->add_option("config", o.config, "experiment config file");
    if (config_required) opt->required();
    sub->add_option("--epsilon-list", o.epsilon_list, "comma-separated epsilons in (0,1]");
    sub->add_option("--basis", o.basis, "basis for both directions")->check(CLI::IsMember({"sine", "q1"}));
    sub->add_option("--size", o.size, "basis size for both directions")->check(CLI::PositiveNumber);
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--export", o.export_file, "solve: write the solution lattice (x1,x2,u) to this file");
    sub->add_flag("--quiet", o.quiet, "print nothing but errors");
}

int execute(const std::string& command, const Overrides& o) {
    aniso::ExperimentConfig cfg;
    if (!o.config.empty()) cfg = aniso::load_config(o.config);
    if (!o.epsilon_list.empty()) cfg.study.epsilons = aniso::parse_epsilon_list(o.epsilon_list);
    if (!o.basis.empty()) cfg.discretization.basis1 = cfg.discretization.basis2 = o.basis;
    if (o.size > 0) cfg.discretization.m1 = cfg.discretization.m2 = o.size;
    if (!o.out.empty()) cfg.output.directory = o.out;
    if (!o.export_file.empty()) cfg.output.export_file = o.export_file;
    std::optional<aniso::StudyKind> kind;
    if (command != "run") kind = aniso::parse_study_kind(command);

    const auto outcome = aniso::run_experiment(cfg, kind);
    aniso::write_outcome(outcome, cfg.output.directory, cfg.output.export_file);
    if (!o.quiet) {
        std::cout << outcome.console;
        std::cout << "outputs in " << cfg.output.directory << " (exit " << outcome.exit_code << ")\n";
    }
    return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Anisotropic singular perturbation lab"};
    app.require_subcommand(1);
    Overrides o;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"run", "run the study named in the config"},
        {"solve", "Galerkin solves with a-priori checks"},
        {"rate-study", "O(epsilon) rate and bound"},
        {"cea-check", "Galerkin error against best approximation"},
        {"ap-check", "iterated limits over epsilon and space size"},
        {"dq-check", "x1-gradient bound of the limit solution"},
        {"resolvent-study", "resolvent deviation in epsilon"},
        {"semigroup-study", "semigroup deviation in epsilon"},
        {"parabolic-study", "parabolic convergence with epsilon-dependent data"},
        {"constants", "print the constant ledger"},
    };
    for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help), o, name == "run");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : aniso::kExitUsage;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return execute(command, o);
    } catch (const aniso::ParseError& e) {
        std::cerr << (o.config.empty() ? std::string() : o.config + ": ") << e.what() << "\n";
        return aniso::kExitUsage;
    } catch (const aniso::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return aniso::kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return aniso::kExitNumerical;
    }
}
