#pragma once

#include <functional>
#include <optional>
#include <string>

#include "akvf/fields.hpp"
#include "akvf/mesh.hpp"
#include "akvf/types.hpp"

namespace akvf {

// Benchmark problem descriptor: domain, normal-velocity data (closed form
// or derived from a level set), exact solution where one is known, and
// expected kernel metadata.
struct ProblemSpec {
    std::string name;
    DomainSpec domain;

    std::optional<LevelSetSpec> level_set;
    FieldSpec direct_field; // used when no level set is present

    std::function<Vec2(const Vec2&, double)> exact_u;
    std::function<Mat2(const Vec2&, double)> exact_grad_u;
    std::function<Vec2(const Vec2&, double)> exact_v; // correction u - zvec
    std::function<double(const Vec2&, double)> exact_lambda;
    std::function<Vec2(const Vec2&, double)> exact_grad_lambda;

    std::function<double(double)> gauge_profile; // F, when the data has one

    int expected_kernel_dim = 0;
    Vec2 kernel_direction{0, 0}; // unit direction when dim == 1
    double t0 = 0;
    double t_end = 0; // == t0 for stationary problems

    bool has_level_set() const { return level_set.has_value(); }
    bool has_exact() const { return static_cast<bool>(exact_u); }

    FieldSpec make_field(DegeneracyPolicy policy, DegeneracyStats* stats = nullptr) const;
};

// Gauge velocity profile z(x) = (zhat_perp . x) F'(zhat . x).
struct GaugeProfile {
    std::function<double(double)> F, dF, ddF;
};

// Constant direction zhat = (1,2)/sqrt(5), F = cos, domain (-4/3, 4/3)^2.
ProblemSpec synthetic_problem();
// Same construction with a custom direction and profile.
ProblemSpec synthetic_problem(const Vec2& zhat, const GaugeProfile& profile);

enum class EllipseDomain { regular, corner, critical };

// phi(x,y,t) = t ((d^2+x^2+y^2)^3 - 8 d^2 x^2 - c^4) + (1-t)(1.3 x^2 + y^2 - 1),
// c = 24/25, d = 19/20; ellipse deforming into a biconcave shape over [0,1].
ProblemSpec deforming_ellipse_problem(EllipseDomain domain);

// phi(x,t) = psi(M(t) x), psi = 1.3 p1^2 + p2^2 - 1, M(t) the rotation by
// angle 0.1 t; exact velocity 0.1 (y, -x) at every time.
ProblemSpec rotating_ellipse_problem();

// Names: synthetic, deforming-regular, deforming-corner, deforming-critical,
// rotating. Throws ConfigError for anything else.
ProblemSpec problem_by_name(const std::string& name);

// int_Omega F(zhat . x) dx over the meshed domain; NaN when the problem has
// no gauge profile. Zero means the correction field is H1-orthogonal to the
// kernel; the synthetic F = cos violates this, which is why errors are
// compared modulo the kernel.
double gauge_integral(const ProblemSpec& problem, const Mesh& mesh, const QuadratureRule& rule);

} // namespace akvf
