#include "epipanel/regression.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "epipanel/errors.hpp"
#include "epipanel/inference.hpp"
#include "epipanel/transforms.hpp"

namespace epipanel {

const char* estimator_name(Estimator est) {
  switch (est) {
    case Estimator::PlainFe: return "fe";
    case Estimator::DebiasedBc: return "bc";
    case Estimator::DebiasedCbc: return "cbc";
  }
  return "fe";
}

std::string Term::name() const {
  if (!display_name.empty()) return display_name;
  std::string out = column;
  if (!interact_with.empty()) out += "*" + interact_with;
  if (ma_window > 1) out += "_ma" + std::to_string(ma_window);
  if (lag_days > 0) out += "_lag" + std::to_string(lag_days);
  return out;
}

std::string FactorSpec::name() const {
  std::string unit_part = unit_attr == "none" ? "" : unit_attr;
  std::string time_part;
  if (bucket == TimeBucket::Day) time_part = "day";
  if (bucket == TimeBucket::Week) time_part = "week";
  if (unit_part.empty()) return time_part.empty() ? "const" : time_part;
  if (time_part.empty()) return unit_part;
  return unit_part + "_x_" + time_part;
}

namespace {

Series resolve_term(const PanelDataset& dataset, const Term& term) {
  if (!dataset.has_series(term.column)) {
    throw_error(ErrorCode::UnknownColumn, term.column);
  }
  const PanelShape shape = dataset.shape();
  Series values = dataset.series(term.column);
  if (term.ma_window > 1) values = moving_average(values, shape, term.ma_window);
  if (term.lag_days > 0) values = lag(values, shape, term.lag_days);
  if (!term.interact_with.empty()) {
    if (!dataset.has_series(term.interact_with)) {
      throw_error(ErrorCode::UnknownColumn, term.interact_with);
    }
    values = multiply(values, dataset.series(term.interact_with));
  }
  return values;
}

std::vector<std::int32_t> dense_recode(const std::vector<std::int64_t>& raw,
                                       int* n_levels) {
  std::map<std::int64_t, std::int32_t> level_of;
  for (std::int64_t code : raw) level_of.emplace(code, 0);
  std::int32_t next = 0;
  for (auto& [code, dense] : level_of) dense = next++;
  std::vector<std::int32_t> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = level_of[raw[i]];
  *n_levels = next;
  return out;
}

}  // namespace

DesignMatrix build_design(const PanelDataset& dataset, const RegressionSpec& spec) {
  if (spec.regressors.empty()) {
    throw_error(ErrorCode::ConfigError, "spec needs at least one regressor");
  }
  const PanelShape shape = dataset.shape();
  const std::size_t n_rows = shape.n_rows();

  const Series outcome = resolve_term(dataset, spec.outcome);
  std::vector<Series> columns;
  columns.reserve(spec.regressors.size());
  for (const auto& term : spec.regressors) {
    columns.push_back(resolve_term(dataset, term));
  }

  // Per-unit ingredients of factor and cluster codes.
  struct FactorSource {
    std::vector<int> unit_code;  // -1 = missing attr, drop row
    bool per_unit = true;        // unit part varies by unit
    int unit_card = 1;
    TimeBucket bucket;
  };
  std::vector<FactorSource> factor_sources;
  for (const auto& factor : spec.fe_factors) {
    FactorSource src;
    src.bucket = factor.bucket;
    if (factor.unit_attr == "unit") {
      src.unit_code.resize(dataset.n_units());
      std::iota(src.unit_code.begin(), src.unit_code.end(), 0);
      src.unit_card = dataset.n_units();
    } else if (factor.unit_attr == "none") {
      src.unit_code.assign(dataset.n_units(), 0);
      src.unit_card = 1;
    } else {
      auto codes = dataset.attr_codes(factor.unit_attr);
      src.unit_code = std::move(codes.code_per_unit);
      src.unit_card = static_cast<int>(codes.levels.size());
    }
    factor_sources.push_back(std::move(src));
  }

  std::vector<int> cluster_unit_code;
  if (spec.cluster_var == "unit") {
    cluster_unit_code.resize(dataset.n_units());
    std::iota(cluster_unit_code.begin(), cluster_unit_code.end(), 0);
  } else {
    cluster_unit_code = dataset.attr_codes(spec.cluster_var).code_per_unit;
  }

  // Listwise deletion over outcome, regressors, factors, cluster.
  std::vector<char> keep(n_rows, 1);
  std::vector<std::int32_t> row_unit, row_day;
  row_unit.reserve(n_rows);
  row_day.reserve(n_rows);
  long kept = 0;
  for (int u = 0; u < shape.n_units; ++u) {
    const bool unit_ok =
        cluster_unit_code[u] >= 0 &&
        std::all_of(factor_sources.begin(), factor_sources.end(),
                    [&](const FactorSource& f) { return f.unit_code[u] >= 0; });
    for (int d = 0; d < shape.n_days; ++d) {
      const std::size_t idx = dataset.row_index(u, d);
      bool ok = unit_ok && !is_missing(outcome[idx]);
      if (ok) {
        for (const auto& col : columns) {
          if (is_missing(col[idx])) {
            ok = false;
            break;
          }
        }
      }
      keep[idx] = ok ? 1 : 0;
      if (ok) {
        row_unit.push_back(u);
        row_day.push_back(d);
        ++kept;
      }
    }
  }
  if (kept == 0) {
    throw_error(ErrorCode::EmptyAfterDeletion, "no rows left after listwise deletion");
  }

  DesignMatrix design;
  design.n_units = shape.n_units;
  design.n_days = shape.n_days;
  design.row_unit = std::move(row_unit);
  design.row_day = std::move(row_day);
  design.y.resize(kept);
  design.X.resize(kept, static_cast<long>(columns.size()));
  for (long r = 0; r < kept; ++r) {
    const std::size_t idx =
        dataset.row_index(design.row_unit[r], design.row_day[r]);
    design.y[r] = outcome[idx];
    for (std::size_t c = 0; c < columns.size(); ++c) {
      design.X(r, static_cast<long>(c)) = columns[c][idx];
    }
  }
  for (const auto& term : spec.regressors) design.term_names.push_back(term.name());

  const int n_weeks = (shape.n_days + 6) / 7;
  for (std::size_t f = 0; f < factor_sources.size(); ++f) {
    const auto& src = factor_sources[f];
    const int time_card = src.bucket == TimeBucket::None ? 1
                          : src.bucket == TimeBucket::Day ? shape.n_days
                                                          : n_weeks;
    std::vector<std::int64_t> raw(kept);
    for (long r = 0; r < kept; ++r) {
      const int time_code = src.bucket == TimeBucket::None ? 0
                            : src.bucket == TimeBucket::Day
                                ? design.row_day[r]
                                : design.row_day[r] / 7;
      raw[r] = static_cast<std::int64_t>(src.unit_code[design.row_unit[r]]) *
                   time_card +
               time_code;
    }
    int levels = 0;
    design.factor_codes.push_back(dense_recode(raw, &levels));
    design.factor_levels.push_back(levels);
    design.factor_names.push_back(spec.fe_factors[f].name());
    if (spec.fe_factors[f].is_unit_factor() && design.unit_factor < 0) {
      design.unit_factor = static_cast<int>(f);
    }
  }

  std::vector<std::int64_t> raw_cluster(kept);
  for (long r = 0; r < kept; ++r) {
    raw_cluster[r] = cluster_unit_code[design.row_unit[r]];
  }
  design.cluster_codes = dense_recode(raw_cluster, &design.n_clusters);
  return design;
}

DesignMatrix subset_rows(const DesignMatrix& design, const std::vector<char>& keep) {
  if (static_cast<long>(keep.size()) != design.n_rows()) {
    throw_error(ErrorCode::ConfigError, "keep mask not aligned to design");
  }
  const long kept = std::count(keep.begin(), keep.end(), char(1));
  if (kept == 0) throw_error(ErrorCode::EmptyAfterDeletion, "empty subpanel");

  DesignMatrix out;
  out.n_units = design.n_units;
  out.n_days = design.n_days;
  out.term_names = design.term_names;
  out.factor_names = design.factor_names;
  out.unit_factor = design.unit_factor;
  out.y.resize(kept);
  out.X.resize(kept, design.X.cols());
  out.row_unit.reserve(kept);
  out.row_day.reserve(kept);
  std::vector<long> rows;
  rows.reserve(kept);
  for (long r = 0; r < design.n_rows(); ++r) {
    if (!keep[r]) continue;
    const long i = static_cast<long>(rows.size());
    rows.push_back(r);
    out.y[i] = design.y[r];
    out.X.row(i) = design.X.row(r);
    out.row_unit.push_back(design.row_unit[r]);
    out.row_day.push_back(design.row_day[r]);
  }
  for (const auto& codes : design.factor_codes) {
    std::vector<std::int64_t> raw(kept);
    for (long i = 0; i < kept; ++i) raw[i] = codes[rows[i]];
    int levels = 0;
    out.factor_codes.push_back(dense_recode(raw, &levels));
    out.factor_levels.push_back(levels);
  }
  std::vector<std::int64_t> raw(kept);
  for (long i = 0; i < kept; ++i) raw[i] = design.cluster_codes[rows[i]];
  out.cluster_codes = dense_recode(raw, &out.n_clusters);
  return out;
}

DemeanResult demean(DesignMatrix& design, double tol, int max_iter) {
  if (tol <= 0) throw_error(ErrorCode::ConfigError, "demeaning tol must be > 0");
  const std::size_t n_factors = design.factor_codes.size();
  if (n_factors == 0) return {0, 0.0};
  const long n = design.n_rows();
  const long k = design.X.cols();

  std::vector<std::vector<double>> counts(n_factors);
  for (std::size_t f = 0; f < n_factors; ++f) {
    counts[f].assign(design.factor_levels[f], 0.0);
    for (long r = 0; r < n; ++r) counts[f][design.factor_codes[f][r]] += 1.0;
  }

  std::vector<double> sums;
  double delta = 0.0;
  for (int sweep = 1; sweep <= max_iter; ++sweep) {
    delta = 0.0;
    for (std::size_t f = 0; f < n_factors; ++f) {
      const auto& codes = design.factor_codes[f];
      const int levels = design.factor_levels[f];
      for (long c = -1; c < k; ++c) {
        double* col = c < 0 ? design.y.data() : design.X.col(c).data();
        sums.assign(levels, 0.0);
        for (long r = 0; r < n; ++r) sums[codes[r]] += col[r];
        for (int l = 0; l < levels; ++l) {
          sums[l] /= counts[f][l];
          delta = std::max(delta, std::fabs(sums[l]));
        }
        for (long r = 0; r < n; ++r) col[r] -= sums[codes[r]];
      }
    }
    if (delta < tol) return {sweep, delta};
  }
  throw_error(ErrorCode::NoConvergence,
              "demeaning delta " + std::to_string(delta) + " after " +
                  std::to_string(max_iter) + " sweeps");
}

OlsResult ols(const DesignMatrix& design) {
  const long n = design.n_rows();
  const long k = design.X.cols();
  if (n < k) {
    throw_error(ErrorCode::RankDeficient,
                "fewer rows (" + std::to_string(n) + ") than columns (" +
                    std::to_string(k) + ")");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design.X);
  const Eigen::VectorXd diag =
      qr.matrixR().diagonal().head(std::min(n, k)).cwiseAbs();
  const double max_pivot = diag.size() > 0 ? diag.maxCoeff() : 0.0;
  const double threshold = 1e-10 * max_pivot;
  long rank = 0;
  while (rank < diag.size() && diag[rank] > threshold) ++rank;
  if (rank < k) {
    const long dropped = qr.colsPermutation().indices()[rank];
    throw_error(ErrorCode::RankDeficient, design.term_names[dropped]);
  }
  OlsResult out;
  out.coefficients = qr.solve(design.y);
  out.residuals = design.y - design.X * out.coefficients;
  return out;
}

namespace {

FitResult finish_fit(DesignMatrix& design, const FitOptions& options,
                     Estimator tag) {
  const Eigen::VectorXd y_raw = design.y;
  DemeanResult dm = demean(design, options.demean_tol, options.demean_max_iter);
  OlsResult fitted = ols(design);

  ClusterAssignment clusters{design.cluster_codes, design.n_clusters};
  Eigen::MatrixXd vcov = cluster_vcov(design.X, fitted.residuals, clusters,
                                      options.small_sample_correction);

  FitResult result;
  result.term_names = design.term_names;
  result.coefficients = fitted.coefficients;
  result.vcov = std::move(vcov);
  const long k = design.X.cols();
  result.se.resize(k);
  result.t_stat.resize(k);
  result.p_value.resize(k);
  for (long j = 0; j < k; ++j) {
    result.se[j] = std::sqrt(std::max(0.0, result.vcov(j, j)));
    result.t_stat[j] =
        result.se[j] > 0 ? result.coefficients[j] / result.se[j] : 0.0;
    result.p_value[j] =
        options.t_reference
            ? student_t_two_sided_p(result.t_stat[j],
                                    static_cast<double>(design.n_clusters - 1))
            : normal_two_sided_p(result.t_stat[j]);
  }
  result.nobs = design.n_rows();
  result.n_clusters = design.n_clusters;
  result.demean_iterations = dm.iterations;
  result.estimator = tag;

  const double rss = fitted.residuals.squaredNorm();
  const Eigen::VectorXd y_within = design.y;
  const double tss_within =
      (y_within.array() - y_within.mean()).matrix().squaredNorm();
  const double tss_raw = (y_raw.array() - y_raw.mean()).matrix().squaredNorm();
  result.r_squared_within = tss_within > 0 ? 1.0 - rss / tss_within : 1.0;
  result.r_squared_full = tss_raw > 0 ? 1.0 - rss / tss_raw : 1.0;
  return result;
}

}  // namespace

FitResult fit_design(DesignMatrix design, const FitOptions& options, Estimator tag) {
  return finish_fit(design, options, tag);
}

Eigen::VectorXd fit_design_coefficients(DesignMatrix design,
                                        const FitOptions& options) {
  demean(design, options.demean_tol, options.demean_max_iter);
  return ols(design).coefficients;
}

FitResult fit_fe(const PanelDataset& dataset, const RegressionSpec& spec) {
  if (spec.estimator != Estimator::PlainFe) {
    throw_error(ErrorCode::ConfigError, "fit_fe requires the plain-FE estimator");
  }
  DesignMatrix design = build_design(dataset, spec);
  return fit_design(std::move(design), FitOptions::from_spec(spec),
                    Estimator::PlainFe);
}

}  // namespace epipanel
