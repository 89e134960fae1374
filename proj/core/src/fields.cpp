#include "akvf/fields.hpp"

#include "akvf/errors.hpp"

namespace akvf {

namespace {

// Shared gate: returns |grad_phi| after applying the degeneracy policy.
double checked_norm(const LevelSetSpec& ls, DegeneracyPolicy policy, DegeneracyStats* stats,
                    const Vec2& x, double t) {
    const double norm = ls.grad_phi(x, t).norm();
    if (norm < ls.c_min) {
        if (policy == DegeneracyPolicy::fail) throw DegeneracyError(x, norm, ls.c_min);
        if (stats) stats->record(x, norm);
    }
    return norm;
}

} // namespace

FieldSpec from_level_set(const LevelSetSpec& ls, DegeneracyPolicy policy, DegeneracyStats* stats) {
    FieldSpec f;
    f.zhat = [ls, policy, stats](const Vec2& x, double t) -> Vec2 {
        const double n = checked_norm(ls, policy, stats, x, t);
        if (n == 0) return Vec2(0, 0);
        return ls.grad_phi(x, t) / n;
    };
    f.grad_zhat = [ls, policy, stats](const Vec2& x, double t) -> Mat2 {
        const double n = checked_norm(ls, policy, stats, x, t);
        if (n == 0) return Mat2::Zero();
        const Vec2 zh = ls.grad_phi(x, t) / n;
        const Mat2 H = ls.hessian_phi(x, t);
        return (Mat2::Identity() - zh * zh.transpose()) * H / n;
    };
    f.z = [ls, policy, stats](const Vec2& x, double t) -> double {
        const double n = checked_norm(ls, policy, stats, x, t);
        if (n == 0) return 0;
        return -ls.phi_t(x, t) / n;
    };
    f.grad_z = [ls, policy, stats](const Vec2& x, double t) -> Vec2 {
        const double n = checked_norm(ls, policy, stats, x, t);
        if (n == 0) return Vec2(0, 0);
        const Vec2 zh = ls.grad_phi(x, t) / n;
        const Mat2 H = ls.hessian_phi(x, t);
        return -(ls.grad_phi_t(x, t) * n - ls.phi_t(x, t) * (H * zh)) / (n * n);
    };
    return f;
}

DegeneracyStats check_nondegeneracy(const LevelSetSpec& ls, const Mesh& mesh,
                                    const QuadratureRule& rule, double t) {
    DegeneracyStats stats;
    stats.min_grad_norm = std::numeric_limits<double>::infinity();
    for (int tri = 0; tri < mesh.num_triangles(); ++tri) {
        for (int q = 0; q < rule.size(); ++q) {
            const Vec2 x = mesh.map_to_physical(tri, rule.points[q].x(), rule.points[q].y());
            const double n = ls.grad_phi(x, t).norm();
            if (n < stats.min_grad_norm) {
                stats.min_grad_norm = n;
                stats.worst_point = x;
            }
            if (n < ls.c_min) ++stats.violations;
        }
    }
    return stats;
}

} // namespace akvf
