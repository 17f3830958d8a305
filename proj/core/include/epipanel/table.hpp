#pragma once

#include <string>
#include <vector>

#include "epipanel/pipeline.hpp"
#include "epipanel/regression.hpp"

namespace epipanel {

// "***" p<0.01, "**" p<0.05, "*" p<0.1, "" otherwise.
std::string significance_stars(double p_value);

// term,estimate,se,t,p,stars rows plus a trailing summary block.
void write_fit_csv(const FitResult& result, const std::string& path);

// Fixed-width text rendering of the same rows.
std::string format_fit_table(const FitResult& result);

// variant,term,estimator,estimate,se,ci_lo,ci_hi,status[,error]
void write_grid_csv(const std::vector<GridRow>& rows, const std::string& path);

// Fixed-width rendering with stars from the normal reference.
std::string format_grid_table(const std::vector<GridRow>& rows);

}  // namespace epipanel
