#include "epipanel/table.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "epipanel/csv.hpp"
#include "epipanel/errors.hpp"

namespace epipanel {

std::string significance_stars(double p_value) {
  if (p_value < 0.01) return "***";
  if (p_value < 0.05) return "**";
  if (p_value < 0.1) return "*";
  return "";
}

void write_fit_csv(const FitResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_error(ErrorCode::IoError, "cannot write " + path);
  out << "term,estimate,se,t,p,stars\n";
  for (std::size_t i = 0; i < result.term_names.size(); ++i) {
    out << csv::escape(result.term_names[i]) << ","
        << csv::format_number(result.coefficients[i]) << ","
        << csv::format_number(result.se[i]) << ","
        << csv::format_number(result.t_stat[i]) << ","
        << csv::format_number(result.p_value[i]) << ","
        << significance_stars(result.p_value[i]) << "\n";
  }
  out << "\n";
  out << "statistic,value\n";
  out << "estimator," << estimator_name(result.estimator) << "\n";
  out << "nobs," << result.nobs << "\n";
  out << "n_clusters," << result.n_clusters << "\n";
  out << "r_squared_within," << csv::format_number(result.r_squared_within) << "\n";
  out << "r_squared_full," << csv::format_number(result.r_squared_full) << "\n";
  out << "demean_iterations," << result.demean_iterations << "\n";
  if (result.estimator != Estimator::PlainFe) {
    out << "jackknife_reps," << result.jackknife_reps << "\n";
    out << "seed," << result.rng_seed << "\n";
  }
}

std::string format_fit_table(const FitResult& result) {
  std::size_t width = 12;
  for (const auto& name : result.term_names) width = std::max(width, name.size());

  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-*s %12s %12s %8s %10s\n",
                static_cast<int>(width), "term", "estimate", "se", "t", "p");
  out << line;
  out << std::string(width + 46, '-') << "\n";
  for (std::size_t i = 0; i < result.term_names.size(); ++i) {
    std::snprintf(line, sizeof(line), "%-*s %12.4f %12.4f %8.2f %10.4g %s\n",
                  static_cast<int>(width), result.term_names[i].c_str(),
                  result.coefficients[i], result.se[i], result.t_stat[i],
                  result.p_value[i], significance_stars(result.p_value[i]).c_str());
    out << line;
  }
  out << std::string(width + 46, '-') << "\n";
  std::snprintf(line, sizeof(line),
                "estimator %s | nobs %ld | clusters %d | within-R2 %.4f | "
                "full-R2 %.4f\n",
                estimator_name(result.estimator), result.nobs,
                result.n_clusters, result.r_squared_within,
                result.r_squared_full);
  out << line;
  out << "*** p<0.01, ** p<0.05, * p<0.1\n";
  return out.str();
}

std::string format_grid_table(const std::vector<GridRow>& rows) {
  std::size_t vw = 8, tw = 6;
  for (const auto& row : rows) {
    vw = std::max(vw, row.variant.size());
    tw = std::max(tw, row.term.size());
  }
  std::ostringstream out;
  char line[240];
  std::snprintf(line, sizeof(line), "%-*s %-*s %-4s %12s %12s %22s\n",
                static_cast<int>(vw), "variant", static_cast<int>(tw), "term",
                "est.", "estimate", "se", "ci");
  out << line;
  out << std::string(vw + tw + 56, '-') << "\n";
  for (const auto& row : rows) {
    if (row.failed) {
      std::snprintf(line, sizeof(line), "%-*s %-*s %-4s failed: %s\n",
                    static_cast<int>(vw), row.variant.c_str(),
                    static_cast<int>(tw), row.term.c_str(),
                    estimator_name(row.estimator), row.error.c_str());
    } else {
      const double z = row.se > 0 ? row.estimate / row.se : 0.0;
      const double p = std::erfc(std::fabs(z) / std::sqrt(2.0));
      std::snprintf(line, sizeof(line),
                    "%-*s %-*s %-4s %12.4f %12.4f [%9.4f,%9.4f] %s\n",
                    static_cast<int>(vw), row.variant.c_str(),
                    static_cast<int>(tw), row.term.c_str(),
                    estimator_name(row.estimator), row.estimate, row.se,
                    row.ci_lo, row.ci_hi, significance_stars(p).c_str());
    }
    out << line;
  }
  out << std::string(vw + tw + 56, '-') << "\n";
  out << "*** p<0.01, ** p<0.05, * p<0.1\n";
  return out.str();
}

void write_grid_csv(const std::vector<GridRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_error(ErrorCode::IoError, "cannot write " + path);
  out << "variant,term,estimator,estimate,se,ci_lo,ci_hi,status,error\n";
  for (const auto& row : rows) {
    out << csv::escape(row.variant) << "," << csv::escape(row.term) << ","
        << estimator_name(row.estimator) << ",";
    if (row.failed) {
      out << ",,,,failed," << csv::escape(row.error) << "\n";
    } else {
      out << csv::format_number(row.estimate) << ","
          << csv::format_number(row.se) << "," << csv::format_number(row.ci_lo)
          << "," << csv::format_number(row.ci_hi) << ",ok,\n";
    }
  }
}

}  // namespace epipanel
