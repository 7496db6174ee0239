#pragma once

#include "aniso/coefficients.hpp"
#include "aniso/elliptic.hpp"
#include "aniso/tensor_spaces.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace aniso::testing {

inline constexpr double pi = std::numbers::pi;

inline TensorDomain unit_pi_square() { return TensorDomain({0.0, pi}, {0.0, pi}); }

/// (2/π) sin(k x₁) sin(l x₂): L²-normalized on (0,π)².
inline std::string sine_mode(int k, int l) {
    return "2/pi*sin(" + std::to_string(k) + "*x1)*sin(" + std::to_string(l) + "*x2)";
}

inline SourceField source(const std::string& expr, bool fad1 = true, bool fad2 = true) {
    SourceField f;
    f.f = Expression::parse(expr);
    f.hyp_fad1 = fad1;
    f.hyp_fad2 = fad2;
    return f;
}

inline ProblemSpec identity_problem(const std::string& f_expr) {
    ProblemSpec s;
    s.domain = unit_pi_square();
    s.A = CoefficientField::identity();
    s.f = source(f_expr);
    return s;
}

inline Vector random_vector(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> d;
    Vector v(n);
    for (double& x : v) x = d(rng);
    return v;
}

}  // namespace aniso::testing
