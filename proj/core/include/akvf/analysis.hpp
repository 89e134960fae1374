#pragma once

#include <memory>
#include <string>
#include <vector>

#include "akvf/driver.hpp"

namespace akvf {

// Reference fields evaluated at physical points.
struct VectorField {
    std::function<Vec2(const Vec2&)> value;
    std::function<Mat2(const Vec2&)> grad;
    explicit operator bool() const { return static_cast<bool>(value); }
};

struct ScalarField {
    std::function<double(const Vec2&)> value;
    std::function<Vec2(const Vec2&)> grad;
    explicit operator bool() const { return static_cast<bool>(value); }
};

// Discrete solution on a fine mesh wrapped as reference fields; queries
// from a coarser mesh that land marginally outside (curved boundary) are
// clamped to the nearest element within clamp_tol.
class FineReference {
public:
    FineReference(SolveResult&& fine, double clamp_tol = 1e-3);

    VectorField u() const;
    ScalarField lambda() const;
    int level() const;
    double h() const;

private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

struct ErrorNorms {
    double u_h1 = 0, u_l2 = 0;
    double lambda_h1 = 0;
    bool has_lambda = false;
};

// Quadrature of order quad_order (0 means 2k+2, capped at the table) on the
// solution's mesh. With modulo_kernel and a detected kernel of dimension
// >= 1, the H1-projection of the difference onto the kernel is removed
// before norming.
ErrorNorms error_norms(const SolveResult& res, const VectorField& ref_u,
                       const ScalarField& ref_lambda, bool modulo_kernel, int quad_order = 0);

double field_h1_norm(const Mesh& mesh, const VectorField& f, int quad_order);

struct ErrorRecord {
    int level = 0;
    double h = 0;
    int ndof_u = 0, ndof_lambda = 0;
    double err_u_h1 = 0, err_u_l2 = 0;
    double err_lambda_h1 = 0; // NaN when no lambda reference exists
    double eoc_u_h1 = 0;      // NaN on the first record / exact recovery
    double energy = 0, lambda_h1 = 0;
    double ratio = 0; // NaN when energy is at rounding level
};

// order_i = log2(e_i / e_{i+1}); NaN where a quotient is degenerate.
std::vector<double> eoc(const std::vector<double>& errors);

struct StudyOptions {
    int k = 1;
    int boost = 0;
    int levels = 5; // study levels 0 .. levels-1
    double h0 = 1.0;
    double tau = 1e-8;
    DegeneracyPolicy policy = DegeneracyPolicy::fail;
    double time = 0;
    int reference_extra = 2;  // reference level = levels-1 + reference_extra
    bool prefer_exact = true; // use the analytic solution when there is one
    double clamp_tol = 1e-3;
    int quad_order = 0; // error-norm order, 0 means 2k+2
};

struct StudyResult {
    std::vector<ErrorRecord> records;
    bool used_exact = false;
    int reference_level = -1; // -1 with an analytic reference
    double gauge = 0;         // NaN for problems without a gauge profile
};

StudyResult convergence_study(const ProblemSpec& problem, const StudyOptions& opts);

// CSV columns:
// level,h,ndof_u,ndof_lambda,err_u_h1,err_u_l2,err_lambda_h1,eoc_u_h1,energy,lambda_h1,ratio
// 17 significant digits, "na" for not-applicable entries.
void write_records_csv(const std::vector<ErrorRecord>& records, const std::string& path);
std::vector<ErrorRecord> read_records_csv(const std::string& path);

void write_study_json(const StudyResult& study, const ProblemSpec& problem,
                      const StudyOptions& opts, const std::string& path);

} // namespace akvf
