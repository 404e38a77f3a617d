#include "fieldnet/lmm.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <limits>
#include <numbers>
#include <unordered_map>

namespace fieldnet {

namespace {

constexpr double kLogThetaMin = -18.0;  // variance ratio ~1.5e-8: boundary
constexpr double kLogThetaMax = 12.0;
constexpr double kZ95 = 1.959963984540054;

// ---------------------------------------------------------------------------
// Box-constrained quasi-Newton minimizer with finite-difference gradients.
// Dimension here is 1 or 2 (log variance ratios), so a dense inverse-Hessian
// BFGS update plus a parabolic polish per coordinate is plenty.

struct OptResult {
    Eigen::VectorXd x;
    double f = 0.0;
    int iterations = 0;
    double gradient_norm = 0.0;
    bool converged = false;
};

using Objective = std::function<double(const Eigen::VectorXd&)>;

Eigen::VectorXd clamp(Eigen::VectorXd x, double lo, double hi) {
    for (int i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lo, hi);
    return x;
}

Eigen::VectorXd fd_gradient(const Objective& f, const Eigen::VectorXd& x, double h) {
    Eigen::VectorXd g(x.size());
    for (int i = 0; i < x.size(); ++i) {
        Eigen::VectorXd lo = x, hi = x;
        lo[i] -= h;
        hi[i] += h;
        g[i] = (f(hi) - f(lo)) / (2.0 * h);
    }
    return g;
}

// One Newton step per coordinate from a three-point parabola; tightens the
// optimum beyond what the line search tolerance gives.
void polish(const Objective& f, Eigen::VectorXd& x, double& fx) {
    for (const double h : {1e-3, 1e-4}) {
        for (int i = 0; i < x.size(); ++i) {
            if (x[i] <= kLogThetaMin + 1e-6 || x[i] >= kLogThetaMax - 1e-6) continue;
            Eigen::VectorXd lo = x, hi = x;
            lo[i] -= h;
            hi[i] += h;
            const double flo = f(lo), fhi = f(hi);
            const double curve = fhi - 2.0 * fx + flo;
            if (curve <= 0.0) continue;
            const double step = std::clamp(-0.5 * h * (fhi - flo) / curve, -8.0 * h, 8.0 * h);
            Eigen::VectorXd trial = x;
            trial[i] = std::clamp(trial[i] + step, kLogThetaMin, kLogThetaMax);
            const double ft = f(trial);
            if (ft < fx) {
                x = trial;
                fx = ft;
            }
        }
    }
}

OptResult minimize_box(const Objective& f, const Eigen::VectorXd& x0, int max_iter,
                       double rel_f_tol, double x_tol) {
    OptResult res;
    res.x = clamp(x0, kLogThetaMin, kLogThetaMax);
    res.f = f(res.x);

    const int dim = static_cast<int>(x0.size());
    Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(dim, dim);
    Eigen::VectorXd g = fd_gradient(f, res.x, 1e-6);

    for (int iter = 0; iter < max_iter; ++iter) {
        res.iterations = iter + 1;

        // Project out gradient components pushing past an active bound.
        Eigen::VectorXd gp = g;
        for (int i = 0; i < dim; ++i) {
            if (res.x[i] <= kLogThetaMin + 1e-12 && gp[i] > 0.0) gp[i] = 0.0;
            if (res.x[i] >= kLogThetaMax - 1e-12 && gp[i] < 0.0) gp[i] = 0.0;
        }
        if (gp.norm() < 1e-12) {
            res.converged = true;
            break;
        }

        Eigen::VectorXd dir = -(hinv * gp);
        if (dir.dot(gp) > -1e-14) {  // not a descent direction: reset
            hinv.setIdentity();
            dir = -gp;
        }

        double alpha = 1.0;
        Eigen::VectorXd x_new;
        double f_new = res.f;
        bool improved = false;
        for (int bt = 0; bt < 40; ++bt) {
            x_new = clamp(res.x + alpha * dir, kLogThetaMin, kLogThetaMax);
            f_new = f(x_new);
            if (f_new < res.f - 1e-4 * alpha * std::abs(dir.dot(gp))) {
                improved = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!improved) {
            res.converged = true;  // no descent possible at line-search scale
            break;
        }

        const Eigen::VectorXd g_new = fd_gradient(f, x_new, 1e-6);
        const Eigen::VectorXd s = x_new - res.x;
        const Eigen::VectorXd y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-12) {
            const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(dim, dim);
            const Eigen::MatrixXd v = eye - s * y.transpose() / sy;
            hinv = v * hinv * v.transpose() + s * s.transpose() / sy;
        }

        const double f_drop = res.f - f_new;
        const double step = s.lpNorm<Eigen::Infinity>();
        res.x = x_new;
        res.f = f_new;
        g = g_new;
        if (f_drop <= rel_f_tol * (std::abs(res.f) + 1.0) && step <= x_tol) {
            res.converged = true;
            break;
        }
    }

    polish(f, res.x, res.f);
    res.gradient_norm = fd_gradient(f, res.x, 1e-5).norm();
    return res;
}

// ---------------------------------------------------------------------------
// Profiled REML criterion for crossed random intercepts.
//
// With V = sigma2_e * (I + theta_m Zm Zm' + theta_c Zc Zc'), beta and
// sigma2_e have closed GLS forms at fixed theta, leaving
//   -2 lR(theta) = log|S| + log|X' S^-1 X| + (n-p) (log(2 pi s2) + 1)
// where S = I + theta_m Zm Zm' + theta_c Zc Zc' and s2 is the profiled
// residual variance. S^-1 is applied through the Woodbury identity; the
// inner q x q system factors through a Schur complement on the (small)
// cohort block, so each evaluation is O(n p + n p^2 + qc^3).

struct GroupedDesign {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    std::vector<std::int32_t> musician;  // row -> level, -1 when unused
    std::vector<std::int32_t> cohort;
    int n_musicians = 0;
    int n_cohorts = 0;
    std::vector<double> rows_per_musician;
    std::vector<double> rows_per_cohort;
    // musician level -> (cohort level, shared row count); usually one entry.
    std::vector<std::vector<std::pair<std::int32_t, double>>> crossing;
};

struct RemlValue {
    double neg2_reml = 0.0;
    Eigen::VectorXd beta;
    double sigma2 = 0.0;           // residual
    Eigen::MatrixXd xtvx;          // X' S^-1 X
    double normal_eq_residual = 0.0;
};

class RemlProblem {
public:
    RemlProblem(GroupedDesign design, bool use_musician, bool use_cohort)
        : d_(std::move(design)), use_m_(use_musician), use_c_(use_cohort) {}

    const GroupedDesign& design() const { return d_; }
    int active_dims() const { return (use_m_ ? 1 : 0) + (use_c_ ? 1 : 0); }
    bool uses_musician() const { return use_m_; }
    bool uses_cohort() const { return use_c_; }

    // log_theta has one entry per active factor, musician first.
    RemlValue evaluate(const Eigen::VectorXd& log_theta) const;

    std::pair<double, double> thetas(const Eigen::VectorXd& log_theta) const {
        double tm = 0.0, tc = 0.0;
        int k = 0;
        if (use_m_) tm = std::exp(log_theta[k++]);
        if (use_c_) tc = std::exp(log_theta[k]);
        return {tm, tc};
    }

private:
    struct Factorization {
        Eigen::VectorXd a_diag;           // musician block of D^-1 + Z'Z
        Eigen::LLT<Eigen::MatrixXd> s_llt;  // Schur complement on cohorts
        double log_det = 0.0;             // log|S_full| contribution
        double theta_m = 0.0, theta_c = 0.0;
    };

    Factorization factorize(double theta_m, double theta_c) const;
    void apply_vinv(const Factorization& f, const Eigen::VectorXd& v,
                    Eigen::VectorXd& out) const;

    GroupedDesign d_;
    bool use_m_;
    bool use_c_;
};

RemlProblem::Factorization RemlProblem::factorize(double theta_m,
                                                  double theta_c) const {
    Factorization f;
    f.theta_m = theta_m;
    f.theta_c = theta_c;
    double log_det = 0.0;

    if (use_m_) {
        f.a_diag.resize(d_.n_musicians);
        for (int i = 0; i < d_.n_musicians; ++i)
            f.a_diag[i] = 1.0 / theta_m + d_.rows_per_musician[i];
        for (int i = 0; i < d_.n_musicians; ++i) log_det += std::log(f.a_diag[i]);
        log_det += d_.n_musicians * std::log(theta_m);
    }
    if (use_c_) {
        Eigen::MatrixXd schur =
            Eigen::MatrixXd::Zero(d_.n_cohorts, d_.n_cohorts);
        for (int j = 0; j < d_.n_cohorts; ++j)
            schur(j, j) = 1.0 / theta_c + d_.rows_per_cohort[j];
        if (use_m_) {
            for (int i = 0; i < d_.n_musicians; ++i)
                for (const auto& [j1, k1] : d_.crossing[i])
                    for (const auto& [j2, k2] : d_.crossing[i])
                        schur(j1, j2) -= k1 * k2 / f.a_diag[i];
        }
        f.s_llt.compute(schur);
        if (f.s_llt.info() != Eigen::Success)
            throw NumericalError("REML inner system not positive definite");
        for (int j = 0; j < d_.n_cohorts; ++j)
            log_det += 2.0 * std::log(f.s_llt.matrixL()(j, j));
        log_det += d_.n_cohorts * std::log(theta_c);
    }
    f.log_det = log_det;
    return f;
}

void RemlProblem::apply_vinv(const Factorization& f, const Eigen::VectorXd& v,
                             Eigen::VectorXd& out) const {
    const auto n = v.size();
    out = v;
    if (!use_m_ && !use_c_) return;

    Eigen::VectorXd rm, rc;
    if (use_m_) {
        rm = Eigen::VectorXd::Zero(d_.n_musicians);
        for (Eigen::Index r = 0; r < n; ++r) rm[d_.musician[r]] += v[r];
    }
    if (use_c_) {
        rc = Eigen::VectorXd::Zero(d_.n_cohorts);
        for (Eigen::Index r = 0; r < n; ++r) rc[d_.cohort[r]] += v[r];
    }

    Eigen::VectorXd zm, zc;
    if (use_c_) {
        Eigen::VectorXd t = rc;
        if (use_m_) {
            for (int i = 0; i < d_.n_musicians; ++i)
                for (const auto& [j, k] : d_.crossing[i]) t[j] -= k * rm[i] / f.a_diag[i];
        }
        zc = f.s_llt.solve(t);
    }
    if (use_m_) {
        zm = rm;
        if (use_c_) {
            for (int i = 0; i < d_.n_musicians; ++i)
                for (const auto& [j, k] : d_.crossing[i]) zm[i] -= k * zc[j];
        }
        zm.array() /= f.a_diag.array();
    }

    for (Eigen::Index r = 0; r < n; ++r) {
        double corr = 0.0;
        if (use_m_) corr += zm[d_.musician[r]];
        if (use_c_) corr += zc[d_.cohort[r]];
        out[r] -= corr;
    }
}

RemlValue RemlProblem::evaluate(const Eigen::VectorXd& log_theta) const {
    const auto [theta_m, theta_c] = thetas(log_theta);
    const Factorization f = factorize(theta_m, theta_c);

    const Eigen::Index n = d_.y.size();
    const Eigen::Index p = d_.x.cols();

    Eigen::MatrixXd w(n, p);
    Eigen::VectorXd column(n), tmp(n);
    for (Eigen::Index j = 0; j < p; ++j) {
        column = d_.x.col(j);
        apply_vinv(f, column, tmp);
        w.col(j) = tmp;
    }
    Eigen::VectorXd vy(n);
    apply_vinv(f, d_.y, vy);

    RemlValue val;
    val.xtvx = d_.x.transpose() * w;
    val.xtvx = 0.5 * (val.xtvx + val.xtvx.transpose()).eval();  // symmetry
    const Eigen::VectorXd xtvy = d_.x.transpose() * vy;

    Eigen::LLT<Eigen::MatrixXd> llt(val.xtvx);
    if (llt.info() != Eigen::Success)
        throw NumericalError("X' V^-1 X not positive definite (collinear design?)");
    val.beta = llt.solve(xtvy);

    const Eigen::VectorXd resid = d_.y - d_.x * val.beta;
    const Eigen::VectorXd vresid = vy - w * val.beta;
    const double quad = resid.dot(vresid);
    val.sigma2 = quad / static_cast<double>(n - p);

    double log_det_xtvx = 0.0;
    for (Eigen::Index j = 0; j < p; ++j)
        log_det_xtvx += 2.0 * std::log(llt.matrixL()(j, j));

    val.neg2_reml = f.log_det + log_det_xtvx +
                    static_cast<double>(n - p) *
                        (std::log(2.0 * std::numbers::pi * val.sigma2) + 1.0);

    const double scale =
        std::max(1.0, (d_.x.transpose() * vy).lpNorm<Eigen::Infinity>());
    val.normal_eq_residual =
        (d_.x.transpose() * vresid).lpNorm<Eigen::Infinity>() / scale;
    return val;
}

// ---------------------------------------------------------------------------

GroupedDesign build_design(const PanelTable& panel, const LmmSpec& spec) {
    const std::size_t n = panel.rows();
    if (n == 0) throw ValidationError("empty panel");

    GroupedDesign d;
    d.x.resize(n, 1 + spec.fixed_effects.size());
    d.x.col(0).setOnes();
    for (std::size_t j = 0; j < spec.fixed_effects.size(); ++j) {
        const auto& column = panel.col(spec.fixed_effects[j]);
        for (std::size_t r = 0; r < n; ++r) d.x(r, j + 1) = column[r];
    }
    const auto& outcome = panel.col(spec.outcome);
    d.y.resize(n);
    for (std::size_t r = 0; r < n; ++r) d.y[r] = outcome[r];

    d.musician.assign(n, -1);
    d.cohort.assign(n, -1);
    if (spec.musician_effect) {
        std::unordered_map<std::string, std::int32_t> levels;
        for (std::size_t r = 0; r < n; ++r) {
            auto [it, inserted] = levels.try_emplace(
                panel.musician_ids[r], static_cast<std::int32_t>(levels.size()));
            d.musician[r] = it->second;
        }
        d.n_musicians = static_cast<int>(levels.size());
        if (d.n_musicians < 2)
            throw ValidationError("musician random effect needs >= 2 levels");
    }
    if (spec.cohort_effect) {
        std::unordered_map<int, std::int32_t> levels;
        for (std::size_t r = 0; r < n; ++r) {
            auto [it, inserted] = levels.try_emplace(
                panel.cohorts[r], static_cast<std::int32_t>(levels.size()));
            d.cohort[r] = it->second;
        }
        d.n_cohorts = static_cast<int>(levels.size());
        if (d.n_cohorts < 2)
            throw ValidationError("cohort random effect needs >= 2 levels");
    }

    d.rows_per_musician.assign(std::max(d.n_musicians, 0), 0.0);
    d.rows_per_cohort.assign(std::max(d.n_cohorts, 0), 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        if (d.musician[r] >= 0) d.rows_per_musician[d.musician[r]] += 1.0;
        if (d.cohort[r] >= 0) d.rows_per_cohort[d.cohort[r]] += 1.0;
    }
    if (spec.musician_effect && spec.cohort_effect) {
        std::vector<std::map<std::int32_t, double>> cross(d.n_musicians);
        for (std::size_t r = 0; r < n; ++r) cross[d.musician[r]][d.cohort[r]] += 1.0;
        d.crossing.resize(d.n_musicians);
        for (int i = 0; i < d.n_musicians; ++i)
            d.crossing[i].assign(cross[i].begin(), cross[i].end());
    }
    return d;
}

void check_rank(const Eigen::MatrixXd& x, const std::vector<std::string>& names) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    const auto rank = qr.rank();
    if (rank == x.cols()) return;
    const auto& perm = qr.colsPermutation().indices();
    std::vector<std::string> dependent;
    for (Eigen::Index i = rank; i < x.cols(); ++i)
        dependent.push_back(names[perm[i]]);
    std::sort(dependent.begin(), dependent.end());
    std::string message = "design matrix rank deficient; collinear columns:";
    for (const auto& name : dependent) message += " " + name;
    throw ValidationError(message);
}

double sample_variance(const Eigen::VectorXd& v) {
    if (v.size() < 2) return 0.0;
    const double mean = v.mean();
    return (v.array() - mean).square().sum() / static_cast<double>(v.size() - 1);
}

}  // namespace

std::pair<double, double> LmmFit::wald_ci(std::size_t i) const {
    return {beta[i] - kZ95 * se[i], beta[i] + kZ95 * se[i]};
}

bool LmmFit::significant(std::size_t i) const {
    const auto [lo, hi] = wald_ci(i);
    return lo > 0.0 || hi < 0.0;
}

LmmFit fit_lmm(const PanelTable& panel, const LmmSpec& spec) {
    std::vector<std::string> names = {"(Intercept)"};
    names.insert(names.end(), spec.fixed_effects.begin(), spec.fixed_effects.end());

    GroupedDesign design = build_design(panel, spec);
    check_rank(design.x, names);

    const Eigen::Index n = design.y.size();
    const Eigen::Index p = design.x.cols();
    if (n <= p) throw ValidationError("panel has fewer rows than fixed effects");

    RemlProblem problem(std::move(design), spec.musician_effect, spec.cohort_effect);
    const int dims = problem.active_dims();

    Eigen::VectorXd best_x;
    double best_f = std::numeric_limits<double>::infinity();
    bool any_converged = false;
    int total_iterations = 0;
    double best_gradient = 0.0;

    if (dims == 0) {
        best_x.resize(0);
        best_f = problem.evaluate(best_x).neg2_reml;
        any_converged = true;
    } else {
        const Objective objective = [&](const Eigen::VectorXd& lt) {
            return problem.evaluate(lt).neg2_reml;
        };
        constexpr std::array<double, 3> start_points = {0.0, -2.3, 2.3};
        const int n_starts = std::clamp(spec.starts, 1, 3);
        for (int s = 0; s < n_starts; ++s) {
            const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(dims, start_points[s]);
            const OptResult run = minimize_box(objective, x0, spec.max_iterations,
                                               spec.rel_objective_tol, spec.param_tol);
            total_iterations += run.iterations;
            if (run.f < best_f) {
                best_f = run.f;
                best_x = run.x;
                best_gradient = run.gradient_norm;
            }
            any_converged = any_converged || run.converged;
        }
    }

    const RemlValue at_best = problem.evaluate(best_x);
    const auto [theta_m, theta_c] = problem.thetas(best_x);

    LmmFit fit;
    fit.coef_names = names;
    fit.beta = at_best.beta;
    fit.sigma2_resid = at_best.sigma2;

    Eigen::MatrixXd cov = at_best.xtvx.llt().solve(
        Eigen::MatrixXd::Identity(p, p)) * at_best.sigma2;
    fit.se.resize(p);
    for (Eigen::Index j = 0; j < p; ++j) fit.se[j] = std::sqrt(cov(j, j));

    int active_components = 0;
    if (problem.uses_musician()) {
        fit.musician_boundary = std::log(theta_m) <= kLogThetaMin + 1e-6;
        fit.sigma2_musician = fit.musician_boundary ? 0.0 : theta_m * at_best.sigma2;
        ++active_components;
    }
    if (problem.uses_cohort()) {
        fit.cohort_boundary = std::log(theta_c) <= kLogThetaMin + 1e-6;
        fit.sigma2_cohort = fit.cohort_boundary ? 0.0 : theta_c * at_best.sigma2;
        ++active_components;
    }

    fit.loglik_reml = -0.5 * at_best.neg2_reml;
    // p fixed effects + active variance components + the residual variance.
    fit.aic = at_best.neg2_reml + 2.0 * (static_cast<double>(p) +
                                         active_components + 1.0);

    const Eigen::VectorXd fitted = problem.design().x * fit.beta;
    const auto [r2m, r2c] = nakagawa_r2(sample_variance(fitted), fit.sigma2_musician,
                                        fit.sigma2_cohort, fit.sigma2_resid);
    fit.r2_marginal = r2m;
    fit.r2_conditional = r2c;

    fit.convergence.iterations = total_iterations;
    fit.convergence.final_gradient_norm = best_gradient;
    fit.convergence.normal_eq_residual = at_best.normal_eq_residual;
    fit.convergence.converged = any_converged;

    if (!any_converged)
        throw NonConvergenceError(
            "REML estimation did not converge in " +
                std::to_string(spec.max_iterations) + " iterations",
            fit);
    return fit;
}

std::pair<double, double> nakagawa_r2(double var_fixed, double sigma2_musician,
                                      double sigma2_cohort, double sigma2_resid) {
    const double total = var_fixed + sigma2_musician + sigma2_cohort + sigma2_resid;
    if (total <= 0.0) return {0.0, 0.0};
    return {var_fixed / total,
            (var_fixed + sigma2_musician + sigma2_cohort) / total};
}

double effect_percent(double beta) { return 100.0 * std::expm1(beta); }

double combined_effect(double beta_main, double beta_interaction) {
    return effect_percent(beta_main + beta_interaction);
}

}  // namespace fieldnet
