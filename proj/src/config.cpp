#include "aniso/config.hpp"

#include "aniso/errors.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace aniso {

namespace {

/// Thrown by value converters; column is relative to the value start.
struct ValueError {
    std::string message;
    int offset = 0;
};

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double to_double(const std::string& s) {
    if (s.empty()) throw ValueError{"expected a number"};
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || !std::isfinite(v)) throw ValueError{"expected a number, got '" + s + "'"};
    return v;
}

int to_int(const std::string& s) {
    if (s.empty()) throw ValueError{"expected an integer"};
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size() || v < -1000000000L || v > 1000000000L)
        throw ValueError{"expected an integer, got '" + s + "'"};
    return static_cast<int>(v);
}

bool to_bool(const std::string& s) {
    if (s == "true" || s == "yes" || s == "1") return true;
    if (s == "false" || s == "no" || s == "0") return false;
    throw ValueError{"expected true or false, got '" + s + "'"};
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    if (s.find_first_not_of(" \t") == std::string::npos) return out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    for (auto& item : out) {
        const auto a = item.find_first_not_of(" \t");
        const auto b = item.find_last_not_of(" \t");
        item = a == std::string::npos ? "" : item.substr(a, b - a + 1);
    }
    return out;
}

void check_expression(const std::string& s, bool allow_empty) {
    if (s.empty()) {
        if (allow_empty) return;
        throw ValueError{"expected an expression"};
    }
    try {
        (void)Expression::parse(s);
    } catch (const ParseError& e) {
        throw ValueError{e.bare_message(), e.column() - 1};
    }
}

double checked_epsilon(double e) {
    if (!(e > 0.0 && e <= 1.0)) throw ValueError{"epsilon must lie in (0,1]"};
    return e;
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"' || ch == '\\') out.push_back('\\');
        out.push_back(ch);
    }
    out.push_back('"');
    return out;
}

template <typename T>
std::string join(const std::vector<T>& v, std::function<std::string(const T&)> f) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + f(v[i]);
    return out;
}

struct Field {
    std::string section;
    std::string key;
    std::function<void(ExperimentConfig&, const std::string&)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

using C = ExperimentConfig;

template <typename Sec>
Field text_field(std::string section, std::string key, Sec C::*sec, std::string Sec::*member,
                 std::function<void(const std::string&)> check = {}) {
    return {section, key,
            [=](C& c, const std::string& v) {
                if (check) check(v);
                (c.*sec).*member = v;
            },
            [=](const C& c) { return quote((c.*sec).*member); }};
}

template <typename Sec>
Field expr_field(std::string section, std::string key, Sec C::*sec, std::string Sec::*member, bool optional) {
    return text_field<Sec>(section, key, sec, member, [optional](const std::string& v) { check_expression(v, optional); });
}

template <typename Sec>
Field choice_field(std::string section, std::string key, Sec C::*sec, std::string Sec::*member,
                   std::set<std::string> allowed) {
    return text_field<Sec>(section, key, sec, member, [allowed](const std::string& v) {
        if (!allowed.count(v)) {
            std::string list;
            for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
            throw ValueError{"expected one of " + list + ", got '" + v + "'"};
        }
    });
}

template <typename Sec>
Field number_field(std::string section, std::string key, Sec C::*sec, double Sec::*member,
                   std::function<void(double)> check = {}) {
    return {section, key,
            [=](C& c, const std::string& v) {
                const double x = to_double(v);
                if (check) check(x);
                (c.*sec).*member = x;
            },
            [=](const C& c) { return format_double((c.*sec).*member); }};
}

template <typename Sec>
Field int_field(std::string section, std::string key, Sec C::*sec, int Sec::*member, int min_value) {
    return {section, key,
            [=](C& c, const std::string& v) {
                const int x = to_int(v);
                if (x < min_value) throw ValueError{key + " must be at least " + std::to_string(min_value)};
                (c.*sec).*member = x;
            },
            [=](const C& c) { return std::to_string((c.*sec).*member); }};
}

template <typename Sec>
Field bool_field(std::string section, std::string key, Sec C::*sec, bool Sec::*member) {
    return {section, key, [=](C& c, const std::string& v) { (c.*sec).*member = to_bool(v); },
            [=](const C& c) { return std::string((c.*sec).*member ? "true" : "false"); }};
}

void positive(double x) {
    if (!(x > 0.0)) throw ValueError{"value must be positive"};
}

void nonnegative(double x) {
    if (!(x >= 0.0)) throw ValueError{"value must be nonnegative"};
}

const std::vector<Field>& fields() {
    static const std::vector<Field> table = [] {
        using P = C::Problem;
        using D = C::Discretization;
        using S = C::Study;
        using O = C::Output;
        std::vector<Field> f;
        const std::string p = "problem", d = "discretization", s = "study", o = "output";
        f.push_back(expr_field<P>(p, "x1_min", &C::problem, &P::x1_min, false));
        f.push_back(expr_field<P>(p, "x1_max", &C::problem, &P::x1_max, false));
        f.push_back(expr_field<P>(p, "x2_min", &C::problem, &P::x2_min, false));
        f.push_back(expr_field<P>(p, "x2_max", &C::problem, &P::x2_max, false));
        f.push_back(expr_field<P>(p, "a11", &C::problem, &P::a11, false));
        f.push_back(expr_field<P>(p, "a12", &C::problem, &P::a12, false));
        f.push_back(expr_field<P>(p, "a21", &C::problem, &P::a21, false));
        f.push_back(expr_field<P>(p, "a22", &C::problem, &P::a22, false));
        f.push_back(expr_field<P>(p, "da12_dx1", &C::problem, &P::da12_dx1, true));
        f.push_back(expr_field<P>(p, "da12_dx2", &C::problem, &P::da12_dx2, true));
        f.push_back(number_field<P>(p, "lambda", &C::problem, &P::lambda, positive));
        f.push_back(choice_field<P>(p, "beta", &C::problem, &P::beta, {"zero", "linear", "custom"}));
        f.push_back(number_field<P>(p, "mu", &C::problem, &P::mu, positive));
        f.push_back(expr_field<P>(p, "beta_function", &C::problem, &P::beta_function, true));
        f.push_back(number_field<P>(p, "beta_lipschitz", &C::problem, &P::beta_lipschitz, nonnegative));
        f.push_back(number_field<P>(p, "beta_growth", &C::problem, &P::beta_growth, nonnegative));
        f.push_back(expr_field<P>(p, "f", &C::problem, &P::f, false));
        f.push_back(expr_field<P>(p, "df_dx1", &C::problem, &P::df_dx1, true));
        f.push_back(bool_field<P>(p, "hyp_fad1", &C::problem, &P::hyp_fad1));
        f.push_back(bool_field<P>(p, "hyp_fad2", &C::problem, &P::hyp_fad2));
        f.push_back(bool_field<P>(p, "hyp_ad1", &C::problem, &P::hyp_ad1));
        f.push_back(bool_field<P>(p, "a22_x2_only", &C::problem, &P::a22_x2_only));
        f.push_back(bool_field<P>(p, "hyp_a12_second", &C::problem, &P::hyp_a12_second));

        f.push_back(choice_field<D>(d, "basis1", &C::discretization, &D::basis1, {"sine", "q1"}));
        f.push_back(choice_field<D>(d, "basis2", &C::discretization, &D::basis2, {"sine", "q1"}));
        f.push_back(int_field<D>(d, "m1", &C::discretization, &D::m1, 1));
        f.push_back(int_field<D>(d, "m2", &C::discretization, &D::m2, 1));
        f.push_back(int_field<D>(d, "quad_order", &C::discretization, &D::quad_order, 0));
        f.push_back({d, "sizes",
                     [](C& c, const std::string& v) {
                         c.discretization.sizes.clear();
                         for (const auto& item : split_commas(v)) {
                             const int m = to_int(item);
                             if (m < 1) throw ValueError{"sizes must be positive"};
                             c.discretization.sizes.push_back(m);
                         }
                     },
                     [](const C& c) {
                         return quote(join<int>(c.discretization.sizes, [](const int& m) { return std::to_string(m); }));
                     }});
        f.push_back(int_field<D>(d, "reference", &C::discretization, &D::reference, 0));
        f.push_back(int_field<D>(d, "ledger_grid", &C::discretization, &D::ledger_grid, 2));

        f.push_back(choice_field<S>(s, "kind", &C::study, &S::kind,
                                    {"solve", "rate", "cea", "ap", "dq", "resolvent", "semigroup", "parabolic",
                                     "constants"}));
        f.push_back({s, "epsilons",
                     [](C& c, const std::string& v) {
                         c.study.epsilons.clear();
                         for (const auto& item : split_commas(v)) c.study.epsilons.push_back(checked_epsilon(to_double(item)));
                     },
                     [](const C& c) { return quote(join<double>(c.study.epsilons, format_double)); }});
        f.push_back(bool_field<S>(s, "include_limit", &C::study, &S::include_limit));
        f.push_back(bool_field<S>(s, "bound_verdict", &C::study, &S::bound_verdict));
        f.push_back(number_field<S>(s, "min_slope", &C::study, &S::min_slope));
        f.push_back(expr_field<S>(s, "exact_u", &C::study, &S::exact_u, true));
        f.push_back(expr_field<S>(s, "exact_du_dx1", &C::study, &S::exact_du_dx1, true));
        f.push_back(expr_field<S>(s, "exact_du_dx2", &C::study, &S::exact_du_dx2, true));
        f.push_back({s, "mus",
                     [](C& c, const std::string& v) {
                         c.study.mus.clear();
                         for (const auto& item : split_commas(v)) {
                             const double m = to_double(item);
                             positive(m);
                             c.study.mus.push_back(m);
                         }
                     },
                     [](const C& c) { return quote(join<double>(c.study.mus, format_double)); }});
        f.push_back(number_field<S>(s, "mu", &C::study, &S::mu, positive));
        f.push_back(number_field<S>(s, "T", &C::study, &S::T, nonnegative));
        f.push_back(text_field<S>(s, "stepper", &C::study, &S::stepper, [](const std::string& v) {
            try {
                (void)parse_stepper(v);
            } catch (const InvalidArgument& e) {
                throw ValueError{e.what()};
            }
        }));
        f.push_back(int_field<S>(s, "steps", &C::study, &S::steps, 1));
        f.push_back(int_field<S>(s, "max_steps", &C::study, &S::max_steps, 1));
        f.push_back(int_field<S>(s, "samples", &C::study, &S::samples, 1));
        f.push_back(number_field<S>(s, "yosida_mu", &C::study, &S::yosida_mu, positive));
        f.push_back(expr_field<S>(s, "g1", &C::study, &S::g1, true));
        f.push_back(expr_field<S>(s, "g2", &C::study, &S::g2, true));
        f.push_back(expr_field<S>(s, "u0", &C::study, &S::u0, true));
        f.push_back(expr_field<S>(s, "u0_limit", &C::study, &S::u0_limit, true));
        f.push_back(expr_field<S>(s, "source", &C::study, &S::source, true));
        f.push_back(number_field<S>(s, "tol", &C::study, &S::tol, positive));

        f.push_back(text_field<O>(o, "directory", &C::output, &O::directory));
        f.push_back(choice_field<O>(o, "formats", &C::output, &O::formats, {"csv+json", "json"}));
        f.push_back(text_field<O>(o, "export", &C::output, &O::export_file));
        f.push_back(int_field<O>(o, "export_points", &C::output, &O::export_points, 2));
        return f;
    }();
    return table;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

std::string to_string(StudyKind k) {
    switch (k) {
        case StudyKind::Solve: return "solve";
        case StudyKind::Rate: return "rate";
        case StudyKind::Cea: return "cea";
        case StudyKind::AP: return "ap";
        case StudyKind::DQ: return "dq";
        case StudyKind::Resolvent: return "resolvent";
        case StudyKind::Semigroup: return "semigroup";
        case StudyKind::Parabolic: return "parabolic";
        case StudyKind::Constants: return "constants";
    }
    return "?";
}

StudyKind parse_study_kind(std::string_view name) {
    static const std::map<std::string, StudyKind, std::less<>> names{
        {"solve", StudyKind::Solve},         {"rate", StudyKind::Rate},
        {"rate-study", StudyKind::Rate},     {"cea", StudyKind::Cea},
        {"cea-check", StudyKind::Cea},       {"ap", StudyKind::AP},
        {"ap-check", StudyKind::AP},         {"dq", StudyKind::DQ},
        {"dq-check", StudyKind::DQ},         {"resolvent", StudyKind::Resolvent},
        {"resolvent-study", StudyKind::Resolvent}, {"semigroup", StudyKind::Semigroup},
        {"semigroup-study", StudyKind::Semigroup}, {"parabolic", StudyKind::Parabolic},
        {"parabolic-study", StudyKind::Parabolic}, {"constants", StudyKind::Constants}};
    const auto it = names.find(name);
    if (it == names.end()) throw InvalidArgument("unknown study kind '" + std::string(name) + "'");
    return it->second;
}

ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig c;
    std::map<std::string, std::map<std::string, const Field*>> index;
    for (const auto& f : fields()) index[f.section][f.key] = &f;

    std::string section;
    std::set<std::string> seen;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        const auto first = raw.find_first_not_of(" \t");
        if (first == std::string::npos || raw[first] == '#' || raw[first] == ';') continue;
        const int col0 = static_cast<int>(first) + 1;
        if (raw[first] == '[') {
            const auto close = raw.find(']', first);
            if (close == std::string::npos) throw ParseError("missing ']' in section header", line_no, col0);
            const std::string rest = trim(raw.substr(close + 1));
            if (!rest.empty() && rest[0] != '#' && rest[0] != ';')
                throw ParseError("unexpected text after section header", line_no, static_cast<int>(close) + 2);
            section = trim(raw.substr(first + 1, close - first - 1));
            if (!index.count(section)) throw ParseError("unknown section '" + section + "'", line_no, col0 + 1);
            continue;
        }
        const auto eq = raw.find('=', first);
        if (eq == std::string::npos) throw ParseError("expected 'key = value'", line_no, col0);
        const std::string key = trim(raw.substr(first, eq - first));
        if (section.empty()) throw ParseError("key outside of any section", line_no, col0);
        const auto it = index[section].find(key);
        if (it == index[section].end())
            throw ParseError("unknown key '" + key + "' in section [" + section + "]", line_no, col0);
        if (!seen.insert(section + "." + key).second)
            throw ParseError("duplicate key '" + key + "'", line_no, col0);

        std::size_t pos = raw.find_first_not_of(" \t", eq + 1);
        std::string value;
        int value_col = static_cast<int>(pos == std::string::npos ? raw.size() : pos) + 1;
        if (pos != std::string::npos && raw[pos] == '"') {
            ++value_col;
            std::size_t k = pos + 1;
            bool closed = false;
            for (; k < raw.size(); ++k) {
                if (raw[k] == '\\' && k + 1 < raw.size()) {
                    value.push_back(raw[++k]);
                } else if (raw[k] == '"') {
                    closed = true;
                    break;
                } else {
                    value.push_back(raw[k]);
                }
            }
            if (!closed) throw ParseError("unterminated string", line_no, static_cast<int>(pos) + 1);
            const std::string rest = trim(raw.substr(k + 1));
            if (!rest.empty() && rest[0] != '#' && rest[0] != ';')
                throw ParseError("unexpected text after string", line_no, static_cast<int>(k) + 2);
        } else if (pos != std::string::npos) {
            std::string tail = raw.substr(pos);
            const auto comment = tail.find_first_of("#;");
            if (comment != std::string::npos) tail = tail.substr(0, comment);
            value = trim(tail);
        }
        try {
            it->second->set(c, value);
        } catch (const ValueError& e) {
            throw ParseError(e.message, line_no, value_col + e.offset);
        }
    }
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot read config '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string emit_config(const ExperimentConfig& c) {
    std::string out;
    std::string section;
    for (const auto& f : fields()) {
        if (f.section != section) {
            if (!section.empty()) out += "\n";
            section = f.section;
            out += "[" + section + "]\n";
        }
        out += f.key + " = " + f.get(c) + "\n";
    }
    return out;
}

std::vector<double> parse_epsilon_list(std::string_view text) {
    std::vector<double> out;
    for (const auto& item : split_commas(std::string(text))) {
        try {
            out.push_back(checked_epsilon(to_double(item)));
        } catch (const ValueError& e) {
            throw InvalidArgument(e.message);
        }
    }
    if (out.empty()) throw InvalidArgument("epsilon list is empty");
    return out;
}

BasisKind parse_basis(std::string_view name) {
    if (name == "sine") return BasisKind::Sine;
    if (name == "q1") return BasisKind::Q1;
    throw InvalidArgument("unknown basis '" + std::string(name) + "'");
}

namespace {

double constant_of(const std::string& text, const char* what) {
    const auto e = Expression::parse(text);
    if (!e.is_constant()) throw InvalidArgument(std::string(what) + " must be a constant");
    return e({});
}

std::optional<Expression> optional_expr(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return Expression::parse(s);
}

}  // namespace

TensorDomain make_domain(const ExperimentConfig& c) {
    const auto& p = c.problem;
    return TensorDomain({constant_of(p.x1_min, "x1_min"), constant_of(p.x1_max, "x1_max")},
                        {constant_of(p.x2_min, "x2_min"), constant_of(p.x2_max, "x2_max")});
}

ProblemSpec make_problem(const ExperimentConfig& c) {
    const auto& p = c.problem;
    ProblemSpec s;
    s.domain = make_domain(c);
    s.A.a11 = Expression::parse(p.a11);
    s.A.a12 = Expression::parse(p.a12);
    s.A.a21 = Expression::parse(p.a21);
    s.A.a22 = Expression::parse(p.a22);
    s.A.da12_dx1 = optional_expr(p.da12_dx1);
    s.A.da12_dx2 = optional_expr(p.da12_dx2);
    s.A.lambda = p.lambda;
    s.A.a22_depends_only_on_x2 = p.a22_x2_only;
    s.A.hyp_ad1 = p.hyp_ad1;
    s.A.hyp_a12_second = p.hyp_a12_second;
    if (p.beta == "linear") {
        s.beta = ReactionSpec::linear(p.mu);
    } else if (p.beta == "custom") {
        if (p.beta_function.empty()) throw InvalidArgument("custom beta needs beta_function");
        s.beta = ReactionSpec::custom(Expression::parse(p.beta_function), p.beta_lipschitz, p.beta_growth);
    }
    s.f.f = Expression::parse(p.f);
    s.f.df_dx1 = optional_expr(p.df_dx1);
    s.f.hyp_fad1 = p.hyp_fad1;
    s.f.hyp_fad2 = p.hyp_fad2;
    return s;
}

SpacePtr make_space(const ExperimentConfig& c) {
    const auto& d = c.discretization;
    return build_space(make_domain(c), parse_basis(d.basis1), d.m1, parse_basis(d.basis2), d.m2, d.quad_order);
}

SpacePtr make_space(const ExperimentConfig& c, int m) {
    const auto& d = c.discretization;
    return build_space(make_domain(c), parse_basis(d.basis1), m, parse_basis(d.basis2), m, d.quad_order);
}

}  // namespace aniso
