#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "epipanel/panel.hpp"

namespace epipanel {

enum class Estimator { PlainFe, DebiasedBc, DebiasedCbc };

const char* estimator_name(Estimator est);

// One regression term: a series column with an optional transform chain.
// Transforms apply in the order moving-average, then lag; an interaction
// multiplies the transformed column by the raw partner column elementwise.
struct Term {
  std::string column;
  int lag_days = 0;
  int ma_window = 1;  // 1 = no smoothing
  std::string interact_with;
  std::string display_name;  // defaults to name()

  std::string name() const;
};

enum class TimeBucket { None, Day, Week };

// A categorical fixed-effect factor. The unit part is either the unit id
// ("unit"), a unit attribute name, or "none" for purely temporal factors.
// A composite such as state-by-week sets unit_attr="state", bucket=Week and
// is materialized as a single categorical, not an interaction expansion.
struct FactorSpec {
  std::string unit_attr = "unit";
  TimeBucket bucket = TimeBucket::None;

  std::string name() const;
  bool is_unit_factor() const {
    return unit_attr == "unit" && bucket == TimeBucket::None;
  }
};

struct RegressionSpec {
  Term outcome;
  std::vector<Term> regressors;
  std::vector<FactorSpec> fe_factors;
  std::string cluster_var = "unit";  // "unit" or a unit-attribute name
  Estimator estimator = Estimator::PlainFe;
  int jackknife_reps = 2;
  std::uint64_t rng_seed = 1;
  double demean_tol = 1e-8;
  int demean_max_iter = 10000;
  bool small_sample_correction = true;
  bool t_reference = false;  // p-values on t(G-1) instead of standard normal
};

// Realized estimation data after listwise deletion: no missing entries
// anywhere, factors and clusters recoded to dense integers.
struct DesignMatrix {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;
  std::vector<std::string> term_names;
  std::vector<std::vector<std::int32_t>> factor_codes;  // [factor][row]
  std::vector<int> factor_levels;
  std::vector<std::string> factor_names;
  int unit_factor = -1;  // index into factor_codes, -1 when absent
  std::vector<std::int32_t> cluster_codes;
  int n_clusters = 0;
  std::vector<std::int32_t> row_unit;  // dataset unit index per row
  std::vector<std::int32_t> row_day;   // dataset day index per row
  int n_units = 0;                     // units in the source dataset
  int n_days = 0;                      // days in the source calendar

  long n_rows() const { return static_cast<long>(y.size()); }
};

DesignMatrix build_design(const PanelDataset& dataset, const RegressionSpec& spec);

// Keeps the flagged rows and recodes factors/clusters densely (empty levels
// dropped). Used by the crossover-jackknife subpanel fits.
DesignMatrix subset_rows(const DesignMatrix& design, const std::vector<char>& keep);

struct DemeanResult {
  int iterations = 0;    // full sweeps executed
  double last_delta = 0; // max absolute change in the final sweep
};

// Residualizes y and every X column on the span of all fixed-effect factor
// dummies by cyclic subtraction of group means (alternating projections),
// sweeping factors in declaration order until the largest absolute change in
// a full sweep drops below tol.
DemeanResult demean(DesignMatrix& design, double tol, int max_iter);

struct OlsResult {
  Eigen::VectorXd coefficients;
  Eigen::VectorXd residuals;
};

// Least squares via column-pivoted QR; no normal-equation inversion. Raises
// RankDeficient naming the collinear column when a pivot falls below
// 1e-10 times the largest pivot.
OlsResult ols(const DesignMatrix& design);

struct FitResult {
  std::vector<std::string> term_names;
  Eigen::VectorXd coefficients;
  Eigen::MatrixXd vcov;  // cluster-robust
  Eigen::VectorXd se;
  Eigen::VectorXd t_stat;
  Eigen::VectorXd p_value;
  long nobs = 0;
  int n_clusters = 0;
  double r_squared_within = 0.0;
  double r_squared_full = 0.0;
  Estimator estimator = Estimator::PlainFe;
  int demean_iterations = 0;
  int jackknife_reps = 0;
  std::uint64_t rng_seed = 0;
};

struct FitOptions {
  double demean_tol = 1e-8;
  int demean_max_iter = 10000;
  bool small_sample_correction = true;
  bool t_reference = false;

  static FitOptions from_spec(const RegressionSpec& spec) {
    return {spec.demean_tol, spec.demean_max_iter, spec.small_sample_correction,
            spec.t_reference};
  }
};

// demean + ols + cluster sandwich on an already-built design.
FitResult fit_design(DesignMatrix design, const FitOptions& options,
                     Estimator tag = Estimator::PlainFe);

// Coefficient vector only (no covariance); the jackknife component fits use
// this to skip the sandwich work.
Eigen::VectorXd fit_design_coefficients(DesignMatrix design,
                                        const FitOptions& options);

// Plain within estimator: build_design -> demean -> ols -> cluster_vcov.
FitResult fit_fe(const PanelDataset& dataset, const RegressionSpec& spec);

}  // namespace epipanel
