#include "fieldnet/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include <nlohmann/json.hpp>

namespace fieldnet {

namespace {

std::string cell(const LmmFit& fit, const std::string& name) {
    for (std::size_t i = 0; i < fit.coef_names.size(); ++i) {
        if (fit.coef_names[i] != name) continue;
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%9.3f%s", fit.beta[i],
                      fit.significant(i) ? " *" : "  ");
        return buf;
    }
    return std::string(11, ' ');
}

void table_row(std::ostream& out, const std::string& label, const LmmFit& m1,
               const LmmFit& m2, const std::string& column) {
    out << "  " << label;
    for (std::size_t pad = label.size(); pad < 34; ++pad) out << ' ';
    out << cell(m1, column) << "  " << cell(m2, column) << '\n';
}

void stat_row(std::ostream& out, const std::string& label, double v1, double v2) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "  %-34s%11.3f  %11.3f\n", label.c_str(), v1, v2);
    out << buf;
}

}  // namespace

void write_fit_json(std::ostream& out, const LmmFit& fit,
                    const std::string& config_hash, std::uint64_t seed) {
    nlohmann::ordered_json j;
    j["config_hash"] = config_hash;
    j["seed"] = seed;
    nlohmann::ordered_json coefs = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < fit.coef_names.size(); ++i) {
        const auto [lo, hi] = fit.wald_ci(i);
        coefs.push_back({{"name", fit.coef_names[i]},
                         {"estimate", fit.beta[i]},
                         {"se", fit.se[i]},
                         {"ci_low", lo},
                         {"ci_high", hi},
                         {"significant", fit.significant(i)}});
    }
    j["coefficients"] = std::move(coefs);
    j["variance"] = {{"musician", fit.sigma2_musician},
                     {"musician_at_boundary", fit.musician_boundary},
                     {"cohort", fit.sigma2_cohort},
                     {"cohort_at_boundary", fit.cohort_boundary},
                     {"residual", fit.sigma2_resid}};
    j["loglik_reml"] = fit.loglik_reml;
    j["aic"] = fit.aic;
    j["r2_marginal"] = fit.r2_marginal;
    j["r2_conditional"] = fit.r2_conditional;
    j["convergence"] = {{"iterations", fit.convergence.iterations},
                        {"final_gradient_norm", fit.convergence.final_gradient_norm},
                        {"normal_eq_residual", fit.convergence.normal_eq_residual},
                        {"converged", fit.convergence.converged}};
    out << j.dump(2) << '\n';
}

void write_fit_table(std::ostream& out, const LmmFit& model1, const LmmFit& model2) {
    out << "  Mixed-effects regression of success (log travel km)\n";
    out << "  '*' = 95% interval excludes zero\n\n";
    char header[80];
    std::snprintf(header, sizeof(header), "  %-34s%11s  %11s\n", "", "Model 1",
                  "Model 2");
    out << header;

    table_row(out, "Intercept", model1, model2, "(Intercept)");
    table_row(out, "Number of gigs", model1, model2, "n_gigs");
    table_row(out, "Number of releases", model1, model2, "n_releases");
    table_row(out, "Mid career", model1, model2, "mid_career");
    table_row(out, "Late career", model1, model2, "late_career");
    table_row(out, "Number of gigs*mid career", model1, model2, "n_gigs_x_mid");
    table_row(out, "Number of gigs*late career", model1, model2, "n_gigs_x_late");
    table_row(out, "Number of releases*mid career", model1, model2,
              "n_releases_x_mid");
    table_row(out, "Number of releases*late career", model1, model2,
              "n_releases_x_late");

    const struct {
        const char* title;
        const char* prefix;
    } blocks[] = {{"Co-gig", "cogig"},
                  {"Co-venue", "covenue"},
                  {"Co-label", "colabel"},
                  {"Co-style", "costyle"}};
    const struct {
        const char* label;
        const char* column;
    } measures[] = {{"Community", "community"},
                    {"Mainstream", "mainstream"},
                    {"Bridging", "bridging"},
                    {"Constraint", "constraint"}};

    for (const auto& block : blocks) {
        out << "  " << block.title << '\n';
        for (const auto& m : measures) {
            const std::string base = std::string(block.prefix) + "_" + m.column;
            table_row(out, std::string("~") + m.label, model1, model2, base);
        }
        for (const auto& m : measures) {
            const std::string base = std::string(block.prefix) + "_" + m.column;
            table_row(out, std::string("~") + m.label + "*mid career", model1, model2,
                      base + "_x_mid");
            table_row(out, std::string("~") + m.label + "*late career", model1,
                      model2, base + "_x_late");
        }
    }

    out << '\n';
    stat_row(out, "Marginal R2", model1.r2_marginal, model2.r2_marginal);
    stat_row(out, "Conditional R2", model1.r2_conditional, model2.r2_conditional);
    stat_row(out, "AIC", model1.aic, model2.aic);
    stat_row(out, "Variance: Musicians (Intercept)", model1.sigma2_musician,
             model2.sigma2_musician);
    stat_row(out, "Variance: Start years (Intercept)", model1.sigma2_cohort,
             model2.sigma2_cohort);
    stat_row(out, "Variance: Residual", model1.sigma2_resid, model2.sigma2_resid);
}

}  // namespace fieldnet
