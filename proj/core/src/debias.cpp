#include "epipanel/debias.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "epipanel/errors.hpp"
#include "epipanel/inference.hpp"
#include "epipanel/rng.hpp"

namespace epipanel {

std::vector<CrossoverPartition> partition_units(
    const std::vector<std::string>& unit_ids, int n_days, int reps,
    std::uint64_t seed) {
  const int n = static_cast<int>(unit_ids.size());
  if (n < 2) {
    throw_error(ErrorCode::TooFewUnits,
                "need >= 2 units, have " + std::to_string(n));
  }
  if (reps < 1) throw_error(ErrorCode::ConfigError, "jackknife reps must be >= 1");

  // Sorted ids give a canonical base order; the shuffle then decides the split.
  std::vector<std::int32_t> by_id(n);
  std::iota(by_id.begin(), by_id.end(), 0);
  std::sort(by_id.begin(), by_id.end(), [&](std::int32_t a, std::int32_t b) {
    return unit_ids[a] < unit_ids[b];
  });

  Rng rng(seed);
  const int first_size = (n + 1) / 2;
  const int split_day = (n_days + 1) / 2;

  std::vector<CrossoverPartition> partitions;
  partitions.reserve(reps);
  for (int j = 0; j < reps; ++j) {
    const auto perm = rng.shuffled_indices(static_cast<std::uint32_t>(n));
    CrossoverPartition part;
    part.replication = j;
    part.split_day = split_day;
    for (int i = 0; i < n; ++i) {
      const std::int32_t unit = by_id[perm[i]];
      if (i < first_size) part.first_units.push_back(unit);
      else part.second_units.push_back(unit);
    }
    partitions.push_back(std::move(part));
  }
  return partitions;
}

namespace {

std::vector<char> in_first_set(const CrossoverPartition& partition, int n_units) {
  std::vector<char> first(n_units, 0);
  for (std::int32_t u : partition.first_units) first[u] = 1;
  return first;
}

// 0-based: first half is day < ceil(T/2); second half is day >= floor(T/2).
// For odd T both contain the midpoint; first-set units resolve it to their
// first-half dummy, second-set units to their second-half dummy.
int half_of(bool first_set, int day, int split_day, int n_days) {
  if (first_set) return day < split_day ? 0 : 1;
  return day >= n_days / 2 ? 1 : 0;
}

}  // namespace

DesignMatrix build_crossover_subpanel(const CrossoverPartition& partition,
                                      const DesignMatrix& design) {
  if (design.unit_factor < 0) {
    throw_error(ErrorCode::ConfigError,
                "design carries no unit fixed-effect factor to split");
  }
  const auto first = in_first_set(partition, design.n_units);

  DesignMatrix out = design;
  const long n = design.n_rows();
  std::vector<std::int64_t> raw(n);
  for (long r = 0; r < n; ++r) {
    const std::int32_t unit = design.row_unit[r];
    const int half = half_of(first[unit] != 0, design.row_day[r],
                             partition.split_day, design.n_days);
    raw[r] = static_cast<std::int64_t>(unit) * 2 + half;
  }
  std::map<std::int64_t, std::int32_t> level_of;
  for (std::int64_t code : raw) level_of.emplace(code, 0);
  std::int32_t next = 0;
  for (auto& [code, dense] : level_of) dense = next++;
  auto& codes = out.factor_codes[design.unit_factor];
  for (long r = 0; r < n; ++r) codes[r] = level_of[raw[r]];
  out.factor_levels[design.unit_factor] = next;
  return out;
}

namespace {

RegressionSpec as_plain(const RegressionSpec& spec) {
  RegressionSpec plain = spec;
  plain.estimator = Estimator::PlainFe;
  return plain;
}

void check_dynamic_preconditions(const PanelDataset& dataset,
                                 const DesignMatrix& design) {
  if (dataset.n_days() < 2) {
    throw_error(ErrorCode::NoSecondHalf,
                "time dimension too short for a half-split");
  }
  if (design.unit_factor < 0) {
    throw_error(ErrorCode::ConfigError,
                "debiased estimators need a unit fixed-effect factor");
  }
}

FitResult combine(FitResult full, const Eigen::VectorXd& beta_tilde,
                  const RegressionSpec& spec, Estimator tag) {
  full.coefficients = (2.0 * full.coefficients - beta_tilde).eval();
  for (long j = 0; j < full.coefficients.size(); ++j) {
    full.t_stat[j] =
        full.se[j] > 0 ? full.coefficients[j] / full.se[j] : 0.0;
    full.p_value[j] =
        spec.t_reference
            ? student_t_two_sided_p(full.t_stat[j],
                                    static_cast<double>(full.n_clusters - 1))
            : normal_two_sided_p(full.t_stat[j]);
  }
  full.estimator = tag;
  full.jackknife_reps = spec.jackknife_reps;
  full.rng_seed = spec.rng_seed;
  return full;
}

}  // namespace

FitResult fit_debiased(const PanelDataset& dataset, const RegressionSpec& spec) {
  if (spec.estimator != Estimator::DebiasedBc) {
    throw_error(ErrorCode::ConfigError, "fit_debiased requires estimator=bc");
  }
  const FitOptions options = FitOptions::from_spec(spec);
  const DesignMatrix design = build_design(dataset, as_plain(spec));
  check_dynamic_preconditions(dataset, design);

  FitResult full = fit_design(design, options);
  const auto partitions = partition_units(dataset.unit_ids(), dataset.n_days(),
                                          spec.jackknife_reps, spec.rng_seed);

  Eigen::VectorXd beta_tilde = Eigen::VectorXd::Zero(full.coefficients.size());
  for (const auto& partition : partitions) {
    beta_tilde += fit_design_coefficients(
        build_crossover_subpanel(partition, design), options);
  }
  beta_tilde /= static_cast<double>(partitions.size());
  return combine(std::move(full), beta_tilde, spec, Estimator::DebiasedBc);
}

FitResult fit_debiased_cbc(const PanelDataset& dataset,
                           const RegressionSpec& spec) {
  if (spec.estimator != Estimator::DebiasedCbc) {
    throw_error(ErrorCode::ConfigError, "fit_debiased_cbc requires estimator=cbc");
  }
  const FitOptions options = FitOptions::from_spec(spec);
  const DesignMatrix design = build_design(dataset, as_plain(spec));
  check_dynamic_preconditions(dataset, design);

  FitResult full = fit_design(design, options);
  const auto partitions = partition_units(dataset.unit_ids(), dataset.n_days(),
                                          spec.jackknife_reps, spec.rng_seed);

  const long n = design.n_rows();
  Eigen::VectorXd beta_tilde = Eigen::VectorXd::Zero(full.coefficients.size());
  for (const auto& partition : partitions) {
    const auto first = in_first_set(partition, design.n_units);
    std::vector<char> keep_one(n), keep_two(n);
    for (long r = 0; r < n; ++r) {
      const bool in_first = first[design.row_unit[r]] != 0;
      const int day = design.row_day[r];
      const bool first_half = day < partition.split_day;
      const bool second_half = day >= design.n_days / 2;
      keep_one[r] = (in_first && first_half) || (!in_first && second_half);
      keep_two[r] = (!in_first && first_half) || (in_first && second_half);
    }
    const Eigen::VectorXd beta_one =
        fit_design_coefficients(subset_rows(design, keep_one), options);
    const Eigen::VectorXd beta_two =
        fit_design_coefficients(subset_rows(design, keep_two), options);
    beta_tilde += 0.5 * (beta_one + beta_two);
  }
  beta_tilde /= static_cast<double>(partitions.size());
  return combine(std::move(full), beta_tilde, spec, Estimator::DebiasedCbc);
}

FitResult fit(const PanelDataset& dataset, const RegressionSpec& spec) {
  switch (spec.estimator) {
    case Estimator::PlainFe: return fit_fe(dataset, spec);
    case Estimator::DebiasedBc: return fit_debiased(dataset, spec);
    case Estimator::DebiasedCbc: return fit_debiased_cbc(dataset, spec);
  }
  throw_error(ErrorCode::ConfigError, "unknown estimator");
}

}  // namespace epipanel
