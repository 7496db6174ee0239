#pragma once

#include "aniso/diagnostics.hpp"
#include "aniso/elliptic.hpp"
#include "aniso/semigroup.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace aniso {

enum class StudyKind { Solve, Rate, Cea, AP, DQ, Resolvent, Semigroup, Parabolic, Constants };
[[nodiscard]] std::string to_string(StudyKind k);
/// Accepts the config spelling (rate, cea, ...) and the subcommand spelling
/// (rate-study, cea-check, ...). Throws InvalidArgument otherwise.
[[nodiscard]] StudyKind parse_study_kind(std::string_view name);

/// Experiment description as read from a config file. Expressions are kept
/// as text so that emit → parse is the identity.
struct ExperimentConfig {
    struct Problem {
        std::string x1_min = "0", x1_max = "pi";
        std::string x2_min = "0", x2_max = "pi";
        std::string a11 = "1", a12 = "0", a21 = "0", a22 = "1";
        std::string da12_dx1, da12_dx2;  // empty: not declared
        double lambda = 1.0;
        std::string beta = "zero";       // zero | linear | custom
        double mu = 1.0;
        std::string beta_function;       // custom β(s)
        double beta_lipschitz = 0.0;
        double beta_growth = 0.0;
        std::string f = "0";
        std::string df_dx1;
        bool hyp_fad1 = true;
        bool hyp_fad2 = true;
        bool hyp_ad1 = true;
        bool a22_x2_only = true;
        bool hyp_a12_second = true;
        friend bool operator==(const Problem&, const Problem&) = default;
    } problem;

    struct Discretization {
        std::string basis1 = "sine", basis2 = "sine";
        int m1 = 8, m2 = 8;
        int quad_order = 0;
        std::vector<int> sizes;  // nested family for cea / ap, both directions
        int reference = 0;       // reference size for cea / ap
        int ledger_grid = 512;
        friend bool operator==(const Discretization&, const Discretization&) = default;
    } discretization;

    struct Study {
        std::string kind = "solve";
        std::vector<double> epsilons{0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625};
        bool include_limit = true;  // solve / cea
        bool bound_verdict = true;
        double min_slope = 0.95;
        std::string exact_u, exact_du_dx1, exact_du_dx2;
        std::vector<double> mus;  // rate: linear-reaction sweep when non-empty
        double mu = 1.0;          // resolvent
        double T = 1.0;
        std::string stepper = "backward-euler";
        int steps = 128;
        int max_steps = 1 << 14;
        int samples = 16;
        double yosida_mu = 1.0;
        std::string g1, g2;                  // semigroup datum
        std::string u0, u0_limit, source;    // parabolic
        double tol = 0.05;
        friend bool operator==(const Study&, const Study&) = default;
    } study;

    struct Output {
        std::string directory = "out";
        std::string formats = "csv+json";
        std::string export_file;  // solve: lattice CSV
        int export_points = 33;
        friend bool operator==(const Output&, const Output&) = default;
    } output;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// INI-style text: `[section]` headers, `key = value` lines, `#` or `;`
/// comments, strings optionally in double quotes. Every value is checked
/// (numbers, expressions, ε ∈ (0,1], enums); failures throw ParseError with
/// the line and column of the value.
[[nodiscard]] ExperimentConfig parse_config(std::string_view text);
[[nodiscard]] ExperimentConfig load_config(const std::string& path);
/// Canonical text; parse_config(emit_config(c)) == c.
[[nodiscard]] std::string emit_config(const ExperimentConfig& c);

/// Comma list of ε values, each checked against (0,1].
[[nodiscard]] std::vector<double> parse_epsilon_list(std::string_view text);

/// Builders from the textual config.
[[nodiscard]] TensorDomain make_domain(const ExperimentConfig& c);
[[nodiscard]] ProblemSpec make_problem(const ExperimentConfig& c);
[[nodiscard]] SpacePtr make_space(const ExperimentConfig& c);
[[nodiscard]] SpacePtr make_space(const ExperimentConfig& c, int m);
[[nodiscard]] BasisKind parse_basis(std::string_view name);

}  // namespace aniso
