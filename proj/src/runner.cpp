#include "aniso/runner.hpp"

#include "aniso/errors.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace aniso {

namespace {

using Json = nlohmann::ordered_json;

struct Csv {
    std::string text;
    explicit Csv(const std::string& header) : text(header + "\n") {}
    template <typename... Cells>
    void row(const Cells&... cells) {
        std::string line;
        ((line += (line.empty() ? "" : ",") + cell(cells)), ...);
        text += line + "\n";
    }
    static std::string cell(double v) { return csv_number(v); }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }
};

std::string csv_quoted(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return out + "\"";
}

std::string verdict_word(bool ok) { return ok ? "pass" : "fail"; }

Json json_number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json json_slope(const std::optional<double>& s) { return s ? Json(*s) : Json(nullptr); }

Json ledger_json(const ConstantLedger& c) {
    Json arr = Json::array();
    for (const auto& e : c.entries()) arr.push_back({{"name", e.name}, {"value", json_number(e.value)}, {"formula", e.formula}});
    return arr;
}

std::string ledger_text(const ConstantLedger& c) {
    std::string out;
    for (const auto& e : c.entries()) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%-22s = %.17g", e.name.c_str(), e.value);
        out += std::string(buf) + "   [" + e.formula + "]\n";
    }
    return out;
}

std::string slope_text(const std::optional<double>& s) {
    if (!s) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", *s);
    return buf;
}

std::string short_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

/// Collects verdicts, results, files and console lines for one study.
struct Report {
    Json verdicts = Json::object();
    Json results = Json::object();
    std::vector<std::pair<std::string, std::string>> files;
    std::string console;
    std::string export_csv;

    void verdict(const std::string& name, bool ok) {
        verdicts[name] = ok;
        console += (ok ? "PASS " : "FAIL ") + name + "\n";
    }
    void line(const std::string& s) { console += s + "\n"; }
    void file(const std::string& name, const Csv& csv) { files.emplace_back(name, csv.text); }
};

std::vector<SpacePtr> family(const ExperimentConfig& c) {
    const auto& d = c.discretization;
    if (d.sizes.empty()) throw InvalidArgument("discretization.sizes must list the nested family");
    std::vector<SpacePtr> out;
    for (int m : d.sizes) out.push_back(make_space(c, m));
    return out;
}

SpacePtr reference_space(const ExperimentConfig& c) {
    const auto& d = c.discretization;
    int largest = 0;
    for (int m : d.sizes) largest = std::max(largest, m);
    if (d.reference < largest) throw InvalidArgument("discretization.reference must be at least the largest size");
    return make_space(c, d.reference);
}

std::string lattice_csv(const GalerkinSpace& space, std::span<const double> coeffs, int points) {
    Csv csv("x1,x2,u");
    const auto& d = space.domain();
    for (int i = 0; i < points; ++i) {
        const double x1 = d.omega1.a + (d.omega1.b - d.omega1.a) * i / (points - 1);
        for (int j = 0; j < points; ++j) {
            const double x2 = d.omega2.a + (d.omega2.b - d.omega2.a) * j / (points - 1);
            csv.row(x1, x2, eval_field(space, coeffs, x1, x2).value);
        }
    }
    return csv.text;
}

void run_solve(const ExperimentConfig& c, const ProblemSpec& spec, const ConstantLedger& ledger, Report& r) {
    const auto space = make_space(c);
    const auto p = assemble_problem(space, spec.A, spec.f);
    std::vector<EpsilonValue> list;
    for (double e : c.study.epsilons) list.push_back(EpsilonValue::of(e));
    if (c.study.include_limit) list.push_back(EpsilonValue::limit());
    if (list.empty()) throw InvalidArgument("nothing to solve: empty epsilon list and include_limit = false");
    Csv csv("epsilon,picard_iterations,residual,norm_l2,norm_x1,norm_x2,apriori");
    Json rows = Json::array();
    r.results["space"] = space->describe();
    for (std::size_t k = 0; k < list.size(); ++k) {
        const auto sol = solve(spec.with_epsilon(list[k]), p);
        const auto ap = apriori_check(sol, p, spec.beta, ledger);
        const double l2 = energy_norm(p.M, sol.coeffs), g1 = energy_norm(p.G1, sol.coeffs),
                     g2 = energy_norm(p.G2, sol.coeffs);
        csv.row(list[k].to_string(), sol.picard_iterations, sol.final_residual, l2, g1, g2, verdict_word(ap.pass()));
        Json checks = Json::array();
        for (const auto& b : ap.checks) checks.push_back({{"name", b.name}, {"lhs", b.lhs}, {"rhs", b.rhs}, {"pass", b.pass}});
        rows.push_back({{"epsilon", list[k].to_string()},
                        {"picard_iterations", sol.picard_iterations},
                        {"residual", sol.final_residual},
                        {"norm_l2", l2},
                        {"norm_x1", g1},
                        {"norm_x2", g2},
                        {"apriori", checks}});
        r.verdict("apriori[" + list[k].to_string() + "]", ap.pass());
        if (k == 0 && !c.output.export_file.empty())
            r.export_csv = lattice_csv(*space, sol.coeffs, c.output.export_points);
    }
    r.results["solutions"] = rows;
    r.file("solve.csv", csv);
}

RateStudyOptions rate_options(const ExperimentConfig& c) {
    RateStudyOptions o;
    o.epsilons = c.study.epsilons;
    o.bound_verdict = c.study.bound_verdict;
    o.min_slope = c.study.min_slope;
    const auto& s = c.study;
    if (!s.exact_u.empty() || !s.exact_du_dx1.empty() || !s.exact_du_dx2.empty()) {
        if (s.exact_u.empty() || s.exact_du_dx1.empty() || s.exact_du_dx2.empty())
            throw InvalidArgument("exact_u, exact_du_dx1 and exact_du_dx2 must be given together");
        o.exact = ExactSolution{Expression::parse(s.exact_u), Expression::parse(s.exact_du_dx1),
                                Expression::parse(s.exact_du_dx2)};
    }
    return o;
}

Json rate_json(const RateStudy& st) {
    Json pts = Json::array();
    for (const auto& pt : st.points)
        pts.push_back({{"epsilon", pt.epsilon},
                       {"e_x1", pt.errors.e_x1},
                       {"e_x2", pt.errors.e_x2},
                       {"e_l2", pt.errors.e_l2},
                       {"bound", pt.bound},
                       {"verdict", pt.verdict},
                       {"weak", pt.weak}});
    return {{"space", st.space},
            {"reference", st.reference},
            {"rate_constant", st.rate_constant},
            {"slope", json_slope(st.slope)},
            {"x1_growth", st.x1_growth},
            {"points", pts}};
}

void run_rate(const ExperimentConfig& c, const ProblemSpec& spec, Report& r) {
    const auto space = make_space(c);
    const auto opts = rate_options(c);
    if (!c.study.mus.empty()) {
        const auto lr = linear_reaction_rate_study(spec, space, c.study.mus, opts);
        Csv csv("mu,epsilon,e_x1,e_x2,e_l2,scaled");
        Json studies = Json::array();
        for (std::size_t k = 0; k < lr.mus.size(); ++k) {
            for (const auto& pt : lr.studies[k].points)
                csv.row(lr.mus[k], pt.epsilon, pt.errors.e_x1, pt.errors.e_x2, pt.errors.e_l2,
                        pt.errors.e_x2 * lr.mus[k] / pt.epsilon);
            Json s = rate_json(lr.studies[k]);
            s["mu"] = lr.mus[k];
            s["scaled_max"] = lr.scaled_max[k];
            studies.push_back(s);
            r.line("mu = " + short_number(lr.mus[k]) + "  slope " + slope_text(lr.studies[k].slope));
        }
        r.results["linear_reaction"] = studies;
        r.file("rate_mu.csv", csv);
        r.verdict("scaled_error_bounded", lr.bounded_pass);
        r.verdict("error_shrinks_with_mu", lr.shrink_pass);
        r.verdict("slope", lr.slope_pass);
        return;
    }
    const auto st = rate_study(spec, space, opts);
    Csv csv("epsilon,e_x1,e_x2,e_l2,bound,verdict");
    for (const auto& pt : st.points)
        csv.row(pt.epsilon, pt.errors.e_x1, pt.errors.e_x2, pt.errors.e_l2, pt.bound,
                st.bound_requested ? verdict_word(pt.verdict) : std::string("none"));
    r.results["rate"] = rate_json(st);
    r.file("rate.csv", csv);
    r.line("space " + st.space + ", slope " + slope_text(st.slope) + ", x1 growth " + short_number(st.x1_growth));
    if (st.bound_requested) {
        r.verdict("rate_bound", st.bound_pass);
        r.verdict("slope", st.slope_pass);
    }
}

void run_cea(const ExperimentConfig& c, const ProblemSpec& spec, Report& r) {
    std::vector<EpsilonValue> list;
    if (c.study.include_limit) list.push_back(EpsilonValue::limit());
    for (double e : c.study.epsilons) list.push_back(EpsilonValue::of(e));
    const auto rep = cea_check(spec, family(c), reference_space(c), list);
    Csv csv("space,epsilon,error,best,constant,bound,verdict");
    Json rows = Json::array();
    for (const auto& row : rep.rows) {
        csv.row(row.space, row.epsilon, row.error, row.best, row.constant, row.bound, verdict_word(row.pass));
        rows.push_back({{"space", row.space},
                        {"epsilon", row.epsilon},
                        {"error", row.error},
                        {"best", row.best},
                        {"constant", row.constant},
                        {"bound", row.bound},
                        {"pass", row.pass}});
    }
    r.results["nonlinear"] = rep.nonlinear;
    r.results["rows"] = rows;
    r.file("cea.csv", csv);
    r.verdict("cea_bound", rep.pass());
}

void run_ap(const ExperimentConfig& c, const ProblemSpec& spec, Report& r) {
    const auto rep = ap_diagram(spec, c.study.epsilons, family(c), reference_space(c));
    Csv csv("epsilon,n,error");
    const auto& sizes = c.discretization.sizes;
    for (std::size_t i = 0; i < rep.epsilons.size(); ++i)
        for (std::size_t j = 0; j < sizes.size(); ++j) csv.row(rep.epsilons[i], sizes[j], rep.grid[i][j]);
    for (std::size_t j = 0; j < sizes.size(); ++j) csv.row("LIMIT", sizes[j], rep.trace_n[j]);
    r.results["spaces"] = rep.spaces;
    r.results["epsilons"] = rep.epsilons;
    r.results["grid"] = rep.grid;
    r.results["trace_eps"] = rep.trace_eps;
    r.results["trace_n"] = rep.trace_n;
    r.results["gap"] = rep.gap;
    r.results["finest"] = rep.finest;
    r.file("ap.csv", csv);
    r.verdict("trace_eps_monotone", rep.trace_eps_monotone);
    r.verdict("trace_n_monotone", rep.trace_n_monotone);
    r.verdict("gap_within_2x", rep.gap_pass);
}

void run_dq(const ExperimentConfig& c, const ProblemSpec& spec, Report& r) {
    const auto rep = difference_quotient_bound(spec, make_space(c));
    Csv csv("space,grad_x1_u,grad_x1_f,C3,C3_statement,bound,bound_statement,verdict,statement_verdict");
    csv.row(rep.space, rep.grad_x1_u, rep.grad_x1_f, rep.C3, rep.C3_statement, rep.bound, rep.bound_statement,
            verdict_word(rep.pass), verdict_word(rep.statement_pass));
    r.results = {{"space", rep.space},
                 {"grad_x1_u", rep.grad_x1_u},
                 {"grad_x1_f", rep.grad_x1_f},
                 {"C3", rep.C3},
                 {"C3_statement", rep.C3_statement},
                 {"bound", rep.bound},
                 {"bound_statement", rep.bound_statement},
                 {"statement_pass", rep.statement_pass}};
    r.file("dq.csv", csv);
    r.verdict("difference_quotient_bound", rep.pass);
    r.line(std::string("statement constant ") + (rep.statement_pass ? "also holds" : "does not hold") + " (reported only)");
}

void run_resolvent(const ExperimentConfig& c, const ProblemSpec& spec, Report& r) {
    const auto rep = resolvent_deviation(spec, make_space(c), c.study.epsilons, c.study.mu, c.study.min_slope);
    Csv csv("epsilon,mu,deviation");
    Json rows = Json::array();
    for (const auto& row : rep.rows) {
        csv.row(row.epsilon, rep.mu, row.deviation);
        rows.push_back({{"epsilon", row.epsilon}, {"deviation", row.deviation}});
    }
    r.results = {{"mu", rep.mu}, {"slope", json_slope(rep.slope)}, {"rows", rows}};
    r.file("resolvent.csv", csv);
    r.line("slope " + slope_text(rep.slope));
    r.verdict("slope", rep.pass());
}

TensorDatum datum(const ExperimentConfig& c) {
    if (c.study.g1.empty() || c.study.g2.empty()) throw InvalidArgument("semigroup study needs g1 and g2");
    return {Expression::parse(c.study.g1), Expression::parse(c.study.g2)};
}

void run_semigroup(const ExperimentConfig& c, const ProblemSpec& spec, Report& r) {
    DeviationStudyOptions o;
    o.epsilons = c.study.epsilons;
    o.T = c.study.T;
    o.stepper = parse_stepper(c.study.stepper);
    o.mu = c.study.yosida_mu;
    o.initial_steps = c.study.steps;
    o.max_steps = c.study.max_steps;
    o.samples = c.study.samples;
    o.min_slope = c.study.min_slope;
    const auto st = semigroup_deviation_study(spec, make_space(c), datum(c), o);
    Csv summary("epsilon,D_sup,slope");
    Csv trace("epsilon,t,deviation");
    const std::string slope = st.slope ? csv_number(*st.slope) : "nan";
    Json rows = Json::array();
    for (const auto& row : st.rows) {
        summary.row(row.epsilon, row.sup_deviation, slope);
        for (std::size_t k = 0; k < row.times.size(); ++k) trace.row(row.epsilon, row.times[k], row.deviation[k]);
        rows.push_back({{"epsilon", row.epsilon},
                        {"D_sup", row.sup_deviation},
                        {"D_sup_2T", row.sup_deviation_double_T},
                        {"stepper_error", row.stepper_error},
                        {"steps", row.steps}});
    }
    r.results = {{"stepper", to_string(o.stepper)}, {"T", o.T}, {"slope", json_slope(st.slope)}, {"rows", rows}};
    r.file("semigroup.csv", summary);
    r.file("semigroup_trace.csv", trace);
    r.line("slope " + slope_text(st.slope));
    r.verdict("slope", st.slope_pass);
    r.verdict("linear_in_T", st.linearity_pass);
    r.verdict("stepper_certified", st.certified);
}

void run_parabolic(const ExperimentConfig& c, const ProblemSpec& spec, Report& r) {
    if (c.study.u0.empty() || c.study.u0_limit.empty()) throw InvalidArgument("parabolic study needs u0 and u0_limit");
    ParabolicOptions o;
    o.epsilons = c.study.epsilons;
    o.evolution.T = c.study.T;
    o.evolution.stepper = parse_stepper(c.study.stepper);
    o.evolution.steps = c.study.steps;
    o.evolution.mu = c.study.yosida_mu;
    o.samples = c.study.samples;
    o.tol = c.study.tol;
    std::optional<Expression> source;
    if (!c.study.source.empty()) source = Expression::parse(c.study.source);
    const auto rep = parabolic_convergence(spec, make_space(c), Expression::parse(c.study.u0),
                                           Expression::parse(c.study.u0_limit), source, o);
    Csv csv("epsilon,initial_gap,sup_deviation");
    for (std::size_t k = 0; k < rep.epsilons.size(); ++k) csv.row(rep.epsilons[k], rep.initial_gap[k], rep.sup_deviation[k]);
    r.results = {{"epsilons", rep.epsilons}, {"initial_gap", rep.initial_gap}, {"sup_deviation", rep.sup_deviation}};
    r.file("parabolic.csv", csv);
    r.verdict("initial_data_converge", rep.initial_converges);
    r.verdict("deviation_monotone", rep.monotone);
    r.verdict("deviation_below_tol", rep.below_tol);
}

}  // namespace

std::string csv_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17e", v);
    return buf;
}

RunOutcome run_experiment(const ExperimentConfig& config, const std::optional<StudyKind>& kind) {
    using clock = std::chrono::steady_clock;
    const StudyKind k = kind ? *kind : parse_study_kind(config.study.kind);
    RunOutcome out;
    Report r;
    Json summary;
    summary["study"] = to_string(k);
    summary["config"] = emit_config(config);
    Json timings = Json::object();
    int code = kExitPass;
    try {
        const ProblemSpec spec = make_problem(config);
        spec.A.validate(spec.domain);
        spec.beta.validate();
        spec.f.validate(spec.domain);
        auto t0 = clock::now();
        const auto ledger = compute_constants(spec.A, spec.domain, spec.f, spec.beta, config.discretization.ledger_grid);
        timings["ledger_seconds"] = std::chrono::duration<double>(clock::now() - t0).count();
        summary["ledger"] = ledger_json(ledger);
        t0 = clock::now();
        switch (k) {
            case StudyKind::Solve: run_solve(config, spec, ledger, r); break;
            case StudyKind::Rate: run_rate(config, spec, r); break;
            case StudyKind::Cea: run_cea(config, spec, r); break;
            case StudyKind::AP: run_ap(config, spec, r); break;
            case StudyKind::DQ: run_dq(config, spec, r); break;
            case StudyKind::Resolvent: run_resolvent(config, spec, r); break;
            case StudyKind::Semigroup: run_semigroup(config, spec, r); break;
            case StudyKind::Parabolic: run_parabolic(config, spec, r); break;
            case StudyKind::Constants: {
                Csv csv("name,value,formula");
                for (const auto& e : ledger.entries()) csv.row(e.name, e.value, csv_quoted(e.formula));
                r.file("ledger.csv", csv);
                r.console += ledger_text(ledger);
                break;
            }
        }
        timings["study_seconds"] = std::chrono::duration<double>(clock::now() - t0).count();
        for (const auto& [name, ok] : r.verdicts.items())
            if (!ok.get<bool>()) code = kExitVerdictFailed;
    } catch (const HypothesisRefused& e) {
        code = kExitRefused;
        summary["refusal"] = {{"hypothesis", e.hypothesis()}, {"reason", e.reason()}};
        r.line(e.what());
    } catch (const ParseError& e) {
        code = kExitUsage;
        summary["error"] = e.what();
        r.line(std::string("error: ") + e.what());
    } catch (const InvalidArgument& e) {
        code = kExitUsage;
        summary["error"] = e.what();
        r.line(std::string("error: ") + e.what());
    } catch (const Error& e) {
        code = kExitNumerical;
        summary["error"] = e.what();
        r.line(std::string("numerical failure: ") + e.what());
    }
    summary["results"] = r.results;
    summary["verdicts"] = r.verdicts;
    summary["pass"] = code == kExitPass;
    summary["exit_code"] = code;

    out.exit_code = code;
    out.summary = summary.dump(2) + "\n";
    out.timings = timings.dump(2) + "\n";
    out.files.emplace_back("summary.json", out.summary);
    out.files.emplace_back("timings.json", out.timings);
    if (config.output.formats == "csv+json")
        for (auto& f : r.files) out.files.push_back(std::move(f));
    out.export_csv = std::move(r.export_csv);
    out.console = std::move(r.console);
    return out;
}

void write_outcome(const RunOutcome& outcome, const std::string& directory, const std::string& export_path) {
    namespace fs = std::filesystem;
    fs::create_directories(directory);
    for (const auto& [name, text] : outcome.files) {
        std::ofstream f(fs::path(directory) / name, std::ios::binary);
        if (!f) throw InvalidArgument("cannot write " + (fs::path(directory) / name).string());
        f << text;
    }
    if (!export_path.empty() && !outcome.export_csv.empty()) {
        const fs::path p(export_path);
        if (p.has_parent_path()) fs::create_directories(p.parent_path());
        std::ofstream f(p, std::ios::binary);
        if (!f) throw InvalidArgument("cannot write " + export_path);
        f << outcome.export_csv;
    }
}

}  // namespace aniso
