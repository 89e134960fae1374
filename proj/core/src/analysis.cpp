#include "akvf/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "akvf/errors.hpp"

namespace akvf {

namespace {

struct Tabulated {
    std::vector<BasisEval> at; // one per quadrature point
};

Tabulated tabulate(int k, const QuadratureRule& rule) {
    Tabulated t;
    t.at.resize(rule.size());
    for (int q = 0; q < rule.size(); ++q)
        eval_ref_basis(k, rule.points[q].x(), rule.points[q].y(), t.at[q]);
    return t;
}

int default_order(int k, int quad_order) {
    if (quad_order > 0) return std::min(quad_order, max_quadrature_order());
    return std::min(2 * k + 2, max_quadrature_order());
}

std::string fmt17(double v) {
    if (std::isnan(v)) return "na";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

struct FineReference::Impl {
    std::shared_ptr<Mesh> mesh;
    FESpace vspace, sspace;
    Vector u, lambda;
    std::unique_ptr<PointLocator> locator;
    double tol;
    int level;
    double h;
};

FineReference::FineReference(SolveResult&& fine, double clamp_tol) : impl_(new Impl) {
    impl_->mesh = std::move(fine.mesh);
    impl_->vspace = std::move(fine.vspace);
    impl_->sspace = std::move(fine.sspace);
    impl_->vspace.mesh = impl_->mesh.get();
    impl_->sspace.mesh = impl_->mesh.get();
    impl_->u = std::move(fine.sol.u);
    impl_->lambda = std::move(fine.sol.lambda);
    impl_->locator = std::make_unique<PointLocator>(*impl_->mesh);
    impl_->tol = clamp_tol;
    impl_->level = impl_->mesh->level;
    impl_->h = fine.h;
}

VectorField FineReference::u() const {
    auto impl = impl_;
    VectorField f;
    f.value = [impl](const Vec2& x) {
        const auto c = impl->locator->locate_clamped(x, impl->tol);
        return eval_vector(impl->vspace, impl->u, Location{c.tri, c.bary});
    };
    f.grad = [impl](const Vec2& x) {
        const auto c = impl->locator->locate_clamped(x, impl->tol);
        return eval_vector_grad(impl->vspace, impl->u, Location{c.tri, c.bary});
    };
    return f;
}

ScalarField FineReference::lambda() const {
    auto impl = impl_;
    ScalarField f;
    f.value = [impl](const Vec2& x) {
        const auto c = impl->locator->locate_clamped(x, impl->tol);
        return eval_scalar(impl->sspace, impl->lambda, Location{c.tri, c.bary});
    };
    f.grad = [impl](const Vec2& x) {
        const auto c = impl->locator->locate_clamped(x, impl->tol);
        return eval_scalar_grad(impl->sspace, impl->lambda, Location{c.tri, c.bary});
    };
    return f;
}

int FineReference::level() const { return impl_->level; }
double FineReference::h() const { return impl_->h; }

ErrorNorms error_norms(const SolveResult& res, const VectorField& ref_u,
                       const ScalarField& ref_lambda, bool modulo_kernel, int quad_order) {
    if (!ref_u) throw std::invalid_argument("error_norms: missing velocity reference");
    const Mesh& mesh = *res.mesh;
    // scalar and vector spaces share scalar dof ids, so V.dofs(t) indexes
    // lambda as well
    const FESpace& V = res.vspace;
    const QuadratureRule rule = triangle_rule(default_order(V.k, quad_order));
    const Tabulated tab = tabulate(V.k, rule);
    const int nq = rule.size();
    const int nloc = V.nloc;
    const int m = modulo_kernel ? res.kernel.dim : 0;
    const size_t npts = static_cast<size_t>(mesh.num_triangles()) * nq;

    std::vector<double> wq(npts);
    std::vector<Vec2> dval(npts);
    std::vector<Mat2> dgrad(npts);
    std::vector<Vec2> kval(m * npts);
    std::vector<Mat2> kgrad(m * npts);

    double lam_h1 = 0;
    Vec2 g[10];

    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const Mat2 J = mesh.jacobian(t);
        const double detj = J(0, 0) * J(1, 1) - J(0, 1) * J(1, 0);
        Mat2 jinv_t;
        jinv_t << J(1, 1), -J(1, 0), -J(0, 1), J(0, 0);
        jinv_t /= detj;
        const int* dofs = V.dofs(t);

        for (int q = 0; q < nq; ++q) {
            const size_t p = static_cast<size_t>(t) * nq + q;
            const double w = rule.weights[q] * detj;
            wq[p] = w;
            const BasisEval& be = tab.at[q];
            for (int i = 0; i < nloc; ++i) g[i] = jinv_t * be.grad[i];
            const Vec2 x = mesh.map_to_physical(t, rule.points[q].x(), rule.points[q].y());

            Vec2 uv = Vec2::Zero();
            Mat2 ug = Mat2::Zero();
            for (int i = 0; i < nloc; ++i) {
                const int d = dofs[i];
                const Vec2 ci(res.sol.u[2 * d], res.sol.u[2 * d + 1]);
                uv += be.val[i] * ci;
                ug += ci * g[i].transpose();
            }
            dval[p] = ref_u.value(x) - uv;
            dgrad[p] = ref_u.grad(x) - ug;

            for (int j = 0; j < m; ++j) {
                Vec2 kv = Vec2::Zero();
                Mat2 kg = Mat2::Zero();
                const Vector& wf = res.kernel.fields[j];
                for (int i = 0; i < nloc; ++i) {
                    const int d = dofs[i];
                    const Vec2 ci(wf[2 * d], wf[2 * d + 1]);
                    kv += be.val[i] * ci;
                    kg += ci * g[i].transpose();
                }
                kval[j * npts + p] = kv;
                kgrad[j * npts + p] = kg;
            }

            if (ref_lambda) {
                double lv = 0;
                Vec2 lg = Vec2::Zero();
                for (int i = 0; i < nloc; ++i) {
                    const double c = res.sol.lambda[dofs[i]];
                    lv += c * be.val[i];
                    lg += c * g[i];
                }
                const double ev = ref_lambda.value(x) - lv;
                const Vec2 eg = ref_lambda.grad(x) - lg;
                lam_h1 += w * (eg.squaredNorm() + ev * ev);
            }
        }
    }

    Vector coef = Vector::Zero(m);
    if (m > 0) {
        Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(m, m);
        Vector rhs = Vector::Zero(m);
        for (size_t p = 0; p < npts; ++p) {
            for (int j = 0; j < m; ++j) {
                const Vec2& kv = kval[j * npts + p];
                const Mat2& kg = kgrad[j * npts + p];
                rhs[j] += wq[p] * (dgrad[p].cwiseProduct(kg).sum() + dval[p].dot(kv));
                for (int l = j; l < m; ++l) {
                    const double s = wq[p] * (kg.cwiseProduct(kgrad[l * npts + p]).sum() +
                                              kv.dot(kval[l * npts + p]));
                    gram(j, l) += s;
                    if (l != j) gram(l, j) += s;
                }
            }
        }
        coef = gram.ldlt().solve(rhs);
    }

    double l2 = 0, h1 = 0;
    for (size_t p = 0; p < npts; ++p) {
        Vec2 ev = dval[p];
        Mat2 eg = dgrad[p];
        for (int j = 0; j < m; ++j) {
            ev -= coef[j] * kval[j * npts + p];
            eg -= coef[j] * kgrad[j * npts + p];
        }
        l2 += wq[p] * ev.squaredNorm();
        h1 += wq[p] * (eg.squaredNorm() + ev.squaredNorm());
    }

    ErrorNorms out;
    out.u_l2 = std::sqrt(std::max(0.0, l2));
    out.u_h1 = std::sqrt(std::max(0.0, h1));
    if (ref_lambda) {
        out.lambda_h1 = std::sqrt(std::max(0.0, lam_h1));
        out.has_lambda = true;
    }
    return out;
}

double field_h1_norm(const Mesh& mesh, const VectorField& f, int quad_order) {
    const QuadratureRule rule = triangle_rule(std::min(quad_order, max_quadrature_order()));
    double acc = 0;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const double detj = 2.0 * mesh.tri_area(t);
        for (int q = 0; q < rule.size(); ++q) {
            const Vec2 x = mesh.map_to_physical(t, rule.points[q].x(), rule.points[q].y());
            acc += rule.weights[q] * detj *
                   (f.grad(x).squaredNorm() + f.value(x).squaredNorm());
        }
    }
    return std::sqrt(std::max(0.0, acc));
}

std::vector<double> eoc(const std::vector<double>& errors) {
    std::vector<double> out;
    for (size_t i = 0; i + 1 < errors.size(); ++i) {
        const double e0 = errors[i], e1 = errors[i + 1];
        if (std::isfinite(e0) && std::isfinite(e1) && e0 > 0 && e1 > 0)
            out.push_back(std::log2(e0 / e1));
        else
            out.push_back(std::numeric_limits<double>::quiet_NaN());
    }
    return out;
}

StudyResult convergence_study(const ProblemSpec& problem, const StudyOptions& opts) {
    StudyResult study;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double t = opts.time;

    VectorField ref_u;
    ScalarField ref_lambda;
    std::optional<FineReference> fine;
    study.used_exact = opts.prefer_exact && problem.has_exact();
    if (study.used_exact) {
        ref_u.value = [&problem, t](const Vec2& x) { return problem.exact_u(x, t); };
        ref_u.grad = [&problem, t](const Vec2& x) { return problem.exact_grad_u(x, t); };
        if (problem.exact_lambda) {
            ref_lambda.value = [&problem, t](const Vec2& x) { return problem.exact_lambda(x, t); };
            ref_lambda.grad = [&problem, t](const Vec2& x) {
                return problem.exact_grad_lambda(x, t);
            };
        }
    } else {
        SolveOptions o;
        o.k = opts.k;
        o.boost = opts.boost;
        o.level = opts.levels - 1 + opts.reference_extra;
        o.h0 = opts.h0;
        o.tau = opts.tau;
        o.policy = opts.policy;
        o.time = t;
        fine.emplace(solve_problem(problem, o), opts.clamp_tol);
        ref_u = fine->u();
        ref_lambda = fine->lambda();
        study.reference_level = fine->level();
    }

    std::vector<double> errs;
    for (int lvl = 0; lvl < opts.levels; ++lvl) {
        SolveOptions o;
        o.k = opts.k;
        o.boost = opts.boost;
        o.level = lvl;
        o.h0 = opts.h0;
        o.tau = opts.tau;
        o.policy = opts.policy;
        o.time = t;
        const SolveResult res = solve_problem(problem, o);
        const ErrorNorms en =
            error_norms(res, ref_u, ref_lambda, res.kernel.dim >= 1, opts.quad_order);

        ErrorRecord rec;
        rec.level = lvl;
        rec.h = res.h;
        rec.ndof_u = res.vspace.ndof();
        rec.ndof_lambda = res.sspace.ndof();
        rec.err_u_h1 = en.u_h1;
        rec.err_u_l2 = en.u_l2;
        rec.err_lambda_h1 = en.has_lambda ? en.lambda_h1 : nan;
        rec.eoc_u_h1 = nan;
        rec.energy = res.diag.energy;
        rec.lambda_h1 = res.diag.lambda_h1;
        rec.ratio = res.diag.ratio_valid ? res.diag.ratio : nan;
        study.records.push_back(rec);
        errs.push_back(en.u_h1);
    }

    const std::vector<double> orders = eoc(errs);
    for (size_t i = 0; i < orders.size(); ++i) study.records[i + 1].eoc_u_h1 = orders[i];

    study.gauge = nan;
    if (problem.gauge_profile) {
        const Mesh gm = refine_uniform(generate_mesh(problem.domain, opts.h0), 2);
        study.gauge = gauge_integral(problem, gm, triangle_rule(max_quadrature_order()));
    }
    return study;
}

static const char* kCsvHeader =
    "level,h,ndof_u,ndof_lambda,err_u_h1,err_u_l2,err_lambda_h1,eoc_u_h1,energy,lambda_h1,ratio";

void write_records_csv(const std::vector<ErrorRecord>& records, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << kCsvHeader << "\n";
    for (const auto& r : records) {
        out << r.level << ',' << fmt17(r.h) << ',' << r.ndof_u << ',' << r.ndof_lambda << ','
            << fmt17(r.err_u_h1) << ',' << fmt17(r.err_u_l2) << ',' << fmt17(r.err_lambda_h1)
            << ',' << fmt17(r.eoc_u_h1) << ',' << fmt17(r.energy) << ',' << fmt17(r.lambda_h1)
            << ',' << fmt17(r.ratio) << "\n";
    }
}

namespace {

double parse_field(const std::string& s, int line) {
    if (s == "na") return std::numeric_limits<double>::quiet_NaN();
    try {
        size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("bad numeric field '" + s + "'", line);
    }
}

} // namespace

std::vector<ErrorRecord> read_records_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty CSV", 1);
    if (line != kCsvHeader) throw ParseError("unexpected CSV header", 1);

    std::vector<ErrorRecord> records;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) f.push_back(tok);
        if (f.size() != 11) throw ParseError("expected 11 fields", lineno);
        ErrorRecord r;
        r.level = static_cast<int>(parse_field(f[0], lineno));
        r.h = parse_field(f[1], lineno);
        r.ndof_u = static_cast<int>(parse_field(f[2], lineno));
        r.ndof_lambda = static_cast<int>(parse_field(f[3], lineno));
        r.err_u_h1 = parse_field(f[4], lineno);
        r.err_u_l2 = parse_field(f[5], lineno);
        r.err_lambda_h1 = parse_field(f[6], lineno);
        r.eoc_u_h1 = parse_field(f[7], lineno);
        r.energy = parse_field(f[8], lineno);
        r.lambda_h1 = parse_field(f[9], lineno);
        r.ratio = parse_field(f[10], lineno);
        records.push_back(r);
    }
    return records;
}

namespace {

std::string json_number(double v) { return std::isnan(v) ? "null" : fmt17(v); }

} // namespace

void write_study_json(const StudyResult& study, const ProblemSpec& problem,
                      const StudyOptions& opts, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << "{\n";
    out << "  \"problem\": \"" << problem.name << "\",\n";
    out << "  \"k\": " << opts.k << ",\n";
    out << "  \"boost\": " << opts.boost << ",\n";
    out << "  \"levels\": " << opts.levels << ",\n";
    out << "  \"h0\": " << fmt17(opts.h0) << ",\n";
    out << "  \"tau\": " << fmt17(opts.tau) << ",\n";
    out << "  \"time\": " << fmt17(opts.time) << ",\n";
    out << "  \"reference\": " << (study.used_exact ? std::string("\"exact\"")
                                                    : std::to_string(study.reference_level))
        << ",\n";
    out << "  \"gauge_integral\": " << json_number(study.gauge) << ",\n";
    out << "  \"records\": [\n";
    for (size_t i = 0; i < study.records.size(); ++i) {
        const auto& r = study.records[i];
        out << "    {\"level\": " << r.level << ", \"h\": " << json_number(r.h)
            << ", \"ndof_u\": " << r.ndof_u << ", \"ndof_lambda\": " << r.ndof_lambda
            << ", \"err_u_h1\": " << json_number(r.err_u_h1)
            << ", \"err_u_l2\": " << json_number(r.err_u_l2)
            << ", \"err_lambda_h1\": " << json_number(r.err_lambda_h1)
            << ", \"eoc_u_h1\": " << json_number(r.eoc_u_h1)
            << ", \"energy\": " << json_number(r.energy)
            << ", \"lambda_h1\": " << json_number(r.lambda_h1)
            << ", \"ratio\": " << json_number(r.ratio) << "}"
            << (i + 1 < study.records.size() ? "," : "") << "\n";
    }
    out << "  ]\n";
    out << "}\n";
}

} // namespace akvf
