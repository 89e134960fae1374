#pragma once

#include <functional>
#include <limits>

#include "akvf/mesh.hpp"
#include "akvf/quadrature.hpp"
#include "akvf/types.hpp"

namespace akvf {

enum class DegeneracyPolicy { fail, warn };

struct DegeneracyStats {
    long violations = 0;
    double min_grad_norm = std::numeric_limits<double>::infinity();
    Vec2 worst_point{0, 0};

    void record(const Vec2& p, double norm) {
        ++violations;
        if (norm < min_grad_norm) {
            min_grad_norm = norm;
            worst_point = p;
        }
    }
};

// Normal-direction data bundle evaluated pointwise in space-time.
// Conventions: (grad zhat)_{rs} = d zhat_r / d x_s, and the vector datum
// is zvec = z * zhat with Jacobian zhat * grad_z^T + z * grad_zhat.
struct FieldSpec {
    std::function<Vec2(const Vec2&, double)> zhat;
    std::function<Mat2(const Vec2&, double)> grad_zhat;
    std::function<double(const Vec2&, double)> z;
    std::function<Vec2(const Vec2&, double)> grad_z;

    Vec2 zvec(const Vec2& x, double t) const { return z(x, t) * zhat(x, t); }
    Mat2 grad_zvec(const Vec2& x, double t) const {
        return zhat(x, t) * grad_z(x, t).transpose() + z(x, t) * grad_zhat(x, t);
    }
};

// Time-dependent level set with analytic derivatives.
struct LevelSetSpec {
    std::function<double(const Vec2&, double)> phi;
    std::function<double(const Vec2&, double)> phi_t;
    std::function<Vec2(const Vec2&, double)> grad_phi;
    std::function<Vec2(const Vec2&, double)> grad_phi_t;
    std::function<Mat2(const Vec2&, double)> hessian_phi;
    double c_min = 0.1;
};

// Derived fields:
//   zhat = grad_phi / |grad_phi|
//   z    = -phi_t / |grad_phi|
//   grad_zhat = (I - zhat zhat^T) H / |grad_phi|
//   grad_z    = -(grad_phi_t |grad_phi| - phi_t H zhat) / |grad_phi|^2
// Points with |grad_phi| < c_min throw DegeneracyError (policy fail) or are
// recorded in `stats` and evaluated anyway (policy warn).
FieldSpec from_level_set(const LevelSetSpec& ls, DegeneracyPolicy policy,
                         DegeneracyStats* stats = nullptr);

// Scan all quadrature points of the mesh at time t.
DegeneracyStats check_nondegeneracy(const LevelSetSpec& ls, const Mesh& mesh,
                                    const QuadratureRule& rule, double t);

} // namespace akvf
