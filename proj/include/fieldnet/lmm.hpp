#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "fieldnet/errors.hpp"
#include "fieldnet/panel.hpp"

namespace fieldnet {

// y = X beta + u_musician + u_cohort + e, independent Gaussian intercepts
// per grouping factor, estimated by REML.
struct LmmSpec {
    std::vector<std::string> fixed_effects;  // panel columns; intercept implied
    std::string outcome = "log_travel_km";
    bool musician_effect = true;
    bool cohort_effect = true;
    int max_iterations = 200;
    double rel_objective_tol = 1e-10;
    double param_tol = 1e-8;
    int starts = 3;
};

struct ConvergenceReport {
    int iterations = 0;
    double final_gradient_norm = 0.0;
    // Relative sup-norm of X' V^-1 (y - X beta) at the optimum.
    double normal_eq_residual = 0.0;
    bool converged = false;
};

struct LmmFit {
    std::vector<std::string> coef_names;
    Eigen::VectorXd beta;
    Eigen::VectorXd se;
    double sigma2_musician = 0.0;
    double sigma2_cohort = 0.0;
    double sigma2_resid = 0.0;
    bool musician_boundary = false;  // variance pinned at 0
    bool cohort_boundary = false;
    double loglik_reml = 0.0;
    double aic = 0.0;
    double r2_marginal = 0.0;
    double r2_conditional = 0.0;
    ConvergenceReport convergence;

    std::pair<double, double> wald_ci(std::size_t i) const;  // 95%
    bool significant(std::size_t i) const;  // CI excludes 0
};

// Optimizer gave up; `best` holds the best state reached.
struct NonConvergenceError : NumericalError {
    LmmFit best;
    NonConvergenceError(const std::string& message, LmmFit state)
        : NumericalError(message), best(std::move(state)) {}
};

// Throws ValidationError on unknown columns, rank-deficient designs (the
// message names the collinear columns), or a grouping factor with < 2
// levels; NonConvergenceError when no start converges.
LmmFit fit_lmm(const PanelTable& panel, const LmmSpec& spec);

// Variance-decomposition R2: marginal uses fixed effects only, conditional
// adds the random intercepts.
std::pair<double, double> nakagawa_r2(double var_fixed, double sigma2_musician,
                                      double sigma2_cohort, double sigma2_resid);

// Percent change in the outcome odds for a one-unit predictor increase:
// 100 * (exp(beta) - 1).
double effect_percent(double beta);

// Stage-specific effect: main and interaction coefficients add on the log
// scale before conversion.
double combined_effect(double beta_main, double beta_interaction);

}  // namespace fieldnet
