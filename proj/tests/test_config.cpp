#include "aniso/config.hpp"
#include "aniso/errors.hpp"
#include "aniso/runner.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <sstream>

using namespace aniso;

namespace {

const std::string kConfigDir = ANISO_SOURCE_DIR "/configs/";

std::string file_of(const RunOutcome& o, const std::string& name) {
    for (const auto& [n, text] : o.files)
        if (n == name) return text;
    ADD_FAILURE() << "no file " << name;
    return {};
}

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

int parse_error_column(const std::string& text, int* line) {
    try {
        (void)parse_config(text);
    } catch (const ParseError& e) {
        *line = e.line();
        return e.column();
    }
    ADD_FAILURE() << "no ParseError for:\n" << text;
    return -1;
}

ExperimentConfig identity_config(StudyKind kind) {
    ExperimentConfig c;
    c.problem.f = "2/pi*sin(x1)*sin(x2)";
    c.problem.df_dx1 = "2/pi*cos(x1)*sin(x2)";
    c.discretization.m1 = c.discretization.m2 = 4;
    c.study.kind = to_string(kind);
    c.study.epsilons = {0.5, 0.25};
    return c;
}

}  // namespace

TEST(Config, DefaultsRoundTrip) {
    const ExperimentConfig c;
    EXPECT_EQ(parse_config(emit_config(c)), c);
}

TEST(Config, NonTrivialRoundTrip) {
    ExperimentConfig c;
    c.problem.x2_max = "2*pi";
    c.problem.a12 = c.problem.a21 = "0.2*sin(x1)*sin(x2)";
    c.problem.da12_dx1 = "0.2*cos(x1)*sin(x2)";
    c.problem.lambda = 0.1 + 0.2;  // not exactly representable in short form
    c.problem.beta = "custom";
    c.problem.beta_function = "atan(s)";
    c.problem.beta_lipschitz = 1.0;
    c.problem.beta_growth = 2.0;
    c.problem.hyp_fad2 = false;
    c.discretization.basis1 = "q1";
    c.discretization.sizes = {2, 4, 8};
    c.discretization.reference = 32;
    c.study.kind = "semigroup";
    c.study.epsilons = {1.0, 1.0 / 3.0, 1e-7};
    c.study.mus = {1, 2.5};
    c.study.g1 = "sin(x1)";
    c.study.source = "exp(-t)*sin(x1)*sin(x2)";
    c.output.directory = "some dir/with spaces";
    c.output.export_file = "grid.csv";
    const auto back = parse_config(emit_config(c));
    EXPECT_EQ(back, c);
    EXPECT_EQ(emit_config(back), emit_config(c));
}

TEST(Config, ShippedConfigsRoundTrip) {
    for (const char* name : {"rate_identity", "rate_counterexample", "cea_arctan", "semigroup_smooth_offdiag",
                             "parabolic_source", "solve_identity"}) {
        const auto c = load_config(kConfigDir + name + ".cfg");
        EXPECT_EQ(parse_config(emit_config(c)), c) << name;
    }
}

TEST(Config, CommentsQuotesAndWhitespace) {
    const auto c = parse_config(
        "; leading comment\n"
        "[problem]\n"
        "  f   =   \"x1 * x2\"   # trailing\n"
        "lambda=0.5\n"
        "\n"
        "[study]\n"
        "epsilons = 1,0.5 , 0.25\n"
        "kind = rate\n");
    EXPECT_EQ(c.problem.f, "x1 * x2");
    EXPECT_DOUBLE_EQ(c.problem.lambda, 0.5);
    EXPECT_EQ(c.study.epsilons, (std::vector<double>{1.0, 0.5, 0.25}));
    EXPECT_EQ(c.study.kind, "rate");
}

TEST(Config, ErrorsCarryLineAndColumn) {
    int line = 0;
    EXPECT_EQ(parse_error_column("[problem]\nlambda = abc\n", &line), 10);
    EXPECT_EQ(line, 2);
    // points at the missing parenthesis inside the quoted expression
    EXPECT_EQ(parse_error_column("[problem]\nf = \"sin(x1\"\n", &line), 12);
    EXPECT_EQ(line, 2);
    (void)parse_error_column("[nope]\n", &line);
    EXPECT_EQ(line, 1);
    (void)parse_error_column("[study]\n\nbogus = 1\n", &line);
    EXPECT_EQ(line, 3);
    (void)parse_error_column("[study]\nT = 1\nT = 2\n", &line);
    EXPECT_EQ(line, 3);
    (void)parse_error_column("[output]\ndirectory = \"open\n", &line);
    EXPECT_EQ(line, 2);
    (void)parse_error_column("lambda = 1\n", &line);
    EXPECT_EQ(line, 1);
}

TEST(Config, EpsilonOutsideUnitIntervalRejected) {
    try {
        (void)parse_config("[study]\nepsilons = 0.5, 1.5\n");
        FAIL() << "accepted 1.5";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2);
        EXPECT_NE(std::string(e.what()).find("epsilon must lie in (0,1]"), std::string::npos) << e.what();
    }
    EXPECT_THROW((void)parse_epsilon_list("0"), Error);
    EXPECT_THROW((void)parse_epsilon_list("-0.5"), Error);
    EXPECT_NO_THROW((void)parse_epsilon_list("1"));
}

TEST(Config, EnumsAndStudyNames) {
    EXPECT_EQ(parse_study_kind("rate"), StudyKind::Rate);
    EXPECT_EQ(parse_study_kind("rate-study"), StudyKind::Rate);
    EXPECT_EQ(parse_study_kind("cea-check"), StudyKind::Cea);
    EXPECT_EQ(parse_study_kind("constants"), StudyKind::Constants);
    EXPECT_THROW((void)parse_study_kind("nope"), InvalidArgument);
    int line = 0;
    (void)parse_error_column("[discretization]\nbasis1 = legendre\n", &line);
    EXPECT_EQ(line, 2);
    (void)parse_error_column("[study]\nstepper = euler\n", &line);
    EXPECT_EQ(line, 2);
}

TEST(Config, DomainEndpointsMustBeConstant) {
    ExperimentConfig c;
    c.problem.x1_max = "2*pi";
    EXPECT_NEAR(make_domain(c).omega1.length(), 2 * M_PI, 1e-15);
    c.problem.x1_max = "x1";
    EXPECT_THROW((void)make_domain(c), Error);
}

TEST(Runner, ConstantsOnIdentity) {
    auto c = identity_config(StudyKind::Constants);
    const auto o = run_experiment(c);
    EXPECT_EQ(o.exit_code, kExitPass);
    const auto j = nlohmann::json::parse(o.summary);
    std::map<std::string, double> ledger;
    for (const auto& e : j.at("ledger")) ledger[e.at("name").get<std::string>()] = e.at("value").get<double>();
    EXPECT_NEAR(ledger.at("C_omega2"), 1.0, 1e-14);
    EXPECT_NEAR(ledger.at("C_Omega"), std::sqrt(0.5), 1e-14);
    EXPECT_NEAR(ledger.at("C1"), std::sqrt(2.0), 1e-12);
    EXPECT_EQ(ledger.at("C2"), 0.0);
    EXPECT_EQ(first_line(file_of(o, "ledger.csv")), "name,value,formula");
}

TEST(Runner, MissingHypothesisIsRefusedWithExitThree) {
    auto c = identity_config(StudyKind::Rate);
    c.problem.hyp_fad2 = false;
    const auto o = run_experiment(c);
    EXPECT_EQ(o.exit_code, kExitRefused);
    const auto j = nlohmann::json::parse(o.summary);
    EXPECT_EQ(j.at("refusal").at("hypothesis"), "hypFad2");
    EXPECT_FALSE(j.at("pass").get<bool>());
}

TEST(Runner, RateVerdictFailureGivesExitOne) {
    auto c = identity_config(StudyKind::Rate);
    c.study.min_slope = 3.0;  // unattainable for an O(eps^2) error
    const auto o = run_experiment(c);
    EXPECT_EQ(o.exit_code, kExitVerdictFailed);
}

TEST(Runner, InvalidCoefficientIsNumericalOrUsage) {
    auto c = identity_config(StudyKind::Solve);
    c.problem.lambda = 2.0;  // larger than the smallest eigenvalue of I
    const auto o = run_experiment(c);
    EXPECT_NE(o.exit_code, kExitPass);
    EXPECT_TRUE(nlohmann::json::parse(o.summary).contains("error"));
}

TEST(Runner, KindOverrideFromCommandLine) {
    auto c = identity_config(StudyKind::Rate);
    const auto o = run_experiment(c, StudyKind::DQ);
    EXPECT_EQ(nlohmann::json::parse(o.summary).at("study"), "dq");
}

TEST(Runner, CsvSchemas) {
    struct Case {
        StudyKind kind;
        std::string file, header;
    };
    const std::vector<Case> cases{
        {StudyKind::Solve, "solve.csv", "epsilon,picard_iterations,residual,norm_l2,norm_x1,norm_x2,apriori"},
        {StudyKind::Rate, "rate.csv", "epsilon,e_x1,e_x2,e_l2,bound,verdict"},
        {StudyKind::DQ, "dq.csv",
         "space,grad_x1_u,grad_x1_f,C3,C3_statement,bound,bound_statement,verdict,statement_verdict"},
        {StudyKind::Resolvent, "resolvent.csv", "epsilon,mu,deviation"},
    };
    for (const auto& k : cases) {
        const auto o = run_experiment(identity_config(k.kind));
        EXPECT_EQ(first_line(file_of(o, k.file)), k.header) << k.file;
        EXPECT_FALSE(file_of(o, "summary.json").empty());
        EXPECT_FALSE(file_of(o, "timings.json").empty());
    }
}

TEST(Runner, SolveExportLattice) {
    auto c = identity_config(StudyKind::Solve);
    c.output.export_file = "grid.csv";
    c.output.export_points = 5;
    const auto o = run_experiment(c);
    std::istringstream in(o.export_csv);
    std::string row;
    std::getline(in, row);
    EXPECT_EQ(row, "x1,x2,u");
    int rows = 0;
    while (std::getline(in, row)) ++rows;
    EXPECT_EQ(rows, 25);
}

TEST(Runner, RepeatedRunsAreByteIdenticalAcrossThreadCounts) {
    auto c = load_config(kConfigDir + "ap_identity.cfg");
    c.discretization.sizes = {2, 4};
    c.discretization.reference = 8;
    setenv("ANISO_THREADS", "1", 1);
    const auto serial = run_experiment(c);
    setenv("ANISO_THREADS", "3", 1);
    const auto threaded = run_experiment(c);
    unsetenv("ANISO_THREADS");
    ASSERT_EQ(serial.files.size(), threaded.files.size());
    for (std::size_t k = 0; k < serial.files.size(); ++k) {
        if (serial.files[k].first == "timings.json") continue;
        EXPECT_EQ(serial.files[k], threaded.files[k]);
    }
}
