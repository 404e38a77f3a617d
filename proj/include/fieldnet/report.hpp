#pragma once

#include <iosfwd>
#include <string>

#include "fieldnet/lmm.hpp"

namespace fieldnet {

// Coefficients, Wald intervals, variance components, fit statistics.
void write_fit_json(std::ostream& out, const LmmFit& fit,
                    const std::string& config_hash, std::uint64_t seed);

// Two-column regression table: model 1 main effects only, model 2 with
// career-stage interactions. A trailing '*' marks coefficients whose 95%
// interval excludes zero. Footer rows give R2, AIC, and the variance
// components.
void write_fit_table(std::ostream& out, const LmmFit& model1, const LmmFit& model2);

}  // namespace fieldnet
