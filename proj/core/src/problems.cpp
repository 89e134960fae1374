#include "akvf/problems.hpp"

#include <cmath>
#include <limits>

#include "akvf/errors.hpp"

namespace akvf {

FieldSpec ProblemSpec::make_field(DegeneracyPolicy policy, DegeneracyStats* stats) const {
    if (level_set) return from_level_set(*level_set, policy, stats);
    return direct_field;
}

ProblemSpec synthetic_problem() {
    GaugeProfile cosF{[](double a) { return std::cos(a); }, [](double a) { return -std::sin(a); },
                      [](double a) { return -std::cos(a); }};
    ProblemSpec p = synthetic_problem(Vec2(1, 2).normalized(), cosF);
    p.name = "synthetic";
    return p;
}

ProblemSpec synthetic_problem(const Vec2& zhat, const GaugeProfile& profile) {
    ProblemSpec p;
    p.name = "synthetic-custom";
    p.domain = DomainSpec::square(4.0 / 3.0);
    const Vec2 zh = zhat.normalized();
    const Vec2 zp(-zh.y(), zh.x());
    const auto F = profile.F;
    const auto dF = profile.dF;
    const auto ddF = profile.ddF;

    p.direct_field.zhat = [zh](const Vec2&, double) { return zh; };
    p.direct_field.grad_zhat = [](const Vec2&, double) { return Mat2::Zero().eval(); };
    p.direct_field.z = [zh, zp, dF](const Vec2& x, double) { return zp.dot(x) * dF(zh.dot(x)); };
    p.direct_field.grad_z = [zh, zp, dF, ddF](const Vec2& x, double) {
        return Vec2(dF(zh.dot(x)) * zp + zp.dot(x) * ddF(zh.dot(x)) * zh);
    };

    p.exact_v = [zh, zp, F](const Vec2& x, double) { return Vec2(-F(zh.dot(x)) * zp); };
    const auto zfun = p.direct_field.z;
    const auto vfun = p.exact_v;
    p.exact_u = [zfun, vfun, zh](const Vec2& x, double t) {
        return Vec2(zfun(x, t) * zh + vfun(x, t));
    };
    p.exact_grad_u = [zh, zp, dF, ddF](const Vec2& x, double) {
        const Vec2 grad_z = dF(zh.dot(x)) * zp + zp.dot(x) * ddF(zh.dot(x)) * zh;
        Mat2 g = zh * grad_z.transpose();     // grad of z zhat
        g -= dF(zh.dot(x)) * zp * zh.transpose(); // grad of -F zperp
        return g;
    };

    p.gauge_profile = F;
    p.expected_kernel_dim = 1;
    p.kernel_direction = zp;
    return p;
}

namespace {

constexpr double kBiconcaveC = 24.0 / 25.0;
constexpr double kBiconcaveD = 19.0 / 20.0;

double g1(const Vec2& x) {
    const double d2 = kBiconcaveD * kBiconcaveD;
    const double s = d2 + x.squaredNorm();
    return s * s * s - 8 * d2 * x.x() * x.x() - std::pow(kBiconcaveC, 4);
}

Vec2 grad_g1(const Vec2& x) {
    const double d2 = kBiconcaveD * kBiconcaveD;
    const double s = d2 + x.squaredNorm();
    return {6 * x.x() * s * s - 16 * d2 * x.x(), 6 * x.y() * s * s};
}

Mat2 hess_g1(const Vec2& x) {
    const double d2 = kBiconcaveD * kBiconcaveD;
    const double s = d2 + x.squaredNorm();
    Mat2 h;
    h(0, 0) = 6 * s * s + 24 * x.x() * x.x() * s - 16 * d2;
    h(0, 1) = h(1, 0) = 24 * x.x() * x.y() * s;
    h(1, 1) = 6 * s * s + 24 * x.y() * x.y() * s;
    return h;
}

double g0(const Vec2& x) { return 1.3 * x.x() * x.x() + x.y() * x.y() - 1; }
Vec2 grad_g0(const Vec2& x) { return {2.6 * x.x(), 2 * x.y()}; }
Mat2 hess_g0() { return Eigen::DiagonalMatrix<double, 2>(2.6, 2).toDenseMatrix(); }

Mat2 rotation(double angle) {
    Mat2 m;
    m << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    return m;
}

Mat2 rotation_dt(double angle, double rate) {
    Mat2 m;
    m << -std::sin(angle), -std::cos(angle), std::cos(angle), -std::sin(angle);
    return rate * m;
}

} // namespace

ProblemSpec deforming_ellipse_problem(EllipseDomain domain) {
    ProblemSpec p;
    switch (domain) {
        case EllipseDomain::regular:
            p.name = "deforming-regular";
            p.domain = DomainSpec::square_minus_disc(4.0 / 3.0, 0.2);
            break;
        case EllipseDomain::corner:
            p.name = "deforming-corner";
            p.domain = DomainSpec::square_minus_square(4.0 / 3.0, 0.4);
            break;
        case EllipseDomain::critical:
            p.name = "deforming-critical";
            p.domain = DomainSpec::square(4.0 / 3.0);
            break;
    }
    LevelSetSpec ls;
    ls.phi = [](const Vec2& x, double t) { return t * g1(x) + (1 - t) * g0(x); };
    ls.phi_t = [](const Vec2& x, double) { return g1(x) - g0(x); };
    ls.grad_phi = [](const Vec2& x, double t) {
        return Vec2(t * grad_g1(x) + (1 - t) * grad_g0(x));
    };
    ls.grad_phi_t = [](const Vec2& x, double) { return Vec2(grad_g1(x) - grad_g0(x)); };
    ls.hessian_phi = [](const Vec2& x, double t) {
        return Mat2(t * hess_g1(x) + (1 - t) * hess_g0());
    };
    p.level_set = ls;
    p.expected_kernel_dim = 0;
    p.t0 = 0;
    p.t_end = 1;
    return p;
}

ProblemSpec rotating_ellipse_problem() {
    ProblemSpec p;
    p.name = "rotating";
    p.domain = DomainSpec::square_minus_disc(4.0 / 3.0, 0.2);
    const double rate = 0.1;
    const Mat2 hpsi = Eigen::DiagonalMatrix<double, 2>(2.6, 2).toDenseMatrix();

    LevelSetSpec ls;
    ls.phi = [rate](const Vec2& x, double t) {
        const Vec2 p = rotation(rate * t) * x;
        return 1.3 * p.x() * p.x() + p.y() * p.y() - 1;
    };
    ls.phi_t = [rate](const Vec2& x, double t) {
        const Vec2 p = rotation(rate * t) * x;
        const Vec2 gpsi(2.6 * p.x(), 2 * p.y());
        return gpsi.dot(rotation_dt(rate * t, rate) * x);
    };
    ls.grad_phi = [rate](const Vec2& x, double t) {
        const Mat2 m = rotation(rate * t);
        const Vec2 p = m * x;
        return Vec2(m.transpose() * Vec2(2.6 * p.x(), 2 * p.y()));
    };
    ls.grad_phi_t = [rate, hpsi](const Vec2& x, double t) {
        const Mat2 m = rotation(rate * t);
        const Mat2 mdot = rotation_dt(rate * t, rate);
        const Vec2 p = m * x;
        const Vec2 gpsi(2.6 * p.x(), 2 * p.y());
        return Vec2(mdot.transpose() * gpsi + m.transpose() * (hpsi * (mdot * x)));
    };
    ls.hessian_phi = [rate, hpsi](const Vec2& x, double t) {
        const Mat2 m = rotation(rate * t);
        return Mat2(m.transpose() * hpsi * m);
    };
    p.level_set = ls;

    p.exact_u = [rate](const Vec2& x, double) { return Vec2(rate * x.y(), -rate * x.x()); };
    p.exact_grad_u = [rate](const Vec2&, double) {
        Mat2 g;
        g << 0, rate, -rate, 0;
        return g;
    };
    p.exact_lambda = [](const Vec2&, double) { return 0.0; };
    p.exact_grad_lambda = [](const Vec2&, double) { return Vec2::Zero().eval(); };
    p.expected_kernel_dim = 0;
    p.t0 = 0;
    p.t_end = 1;
    return p;
}

ProblemSpec problem_by_name(const std::string& name) {
    if (name == "synthetic") return synthetic_problem();
    if (name == "deforming-regular") return deforming_ellipse_problem(EllipseDomain::regular);
    if (name == "deforming-corner") return deforming_ellipse_problem(EllipseDomain::corner);
    if (name == "deforming-critical") return deforming_ellipse_problem(EllipseDomain::critical);
    if (name == "rotating") return rotating_ellipse_problem();
    throw ConfigError("unknown problem '" + name +
                      "' (expected synthetic, deforming-regular, deforming-corner, "
                      "deforming-critical or rotating)");
}

double gauge_integral(const ProblemSpec& problem, const Mesh& mesh, const QuadratureRule& rule) {
    if (!problem.gauge_profile) return std::numeric_limits<double>::quiet_NaN();
    const Vec2 zh = problem.direct_field.zhat(Vec2::Zero(), problem.t0);
    double acc = 0;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const double detj = 2.0 * mesh.tri_area(t);
        for (int q = 0; q < rule.size(); ++q) {
            const Vec2 x = mesh.map_to_physical(t, rule.points[q].x(), rule.points[q].y());
            acc += rule.weights[q] * detj * problem.gauge_profile(zh.dot(x));
        }
    }
    return acc;
}

} // namespace akvf
