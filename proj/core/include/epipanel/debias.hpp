#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "epipanel/regression.hpp"

namespace epipanel {

// One random half-split of the unit set for the crossover jackknife.
// Units carry dataset indices; the time split puts day < split_day (0-based)
// in the first half, i.e. split_day = ceil(T/2) days fall before the cut.
struct CrossoverPartition {
  int replication = 0;
  std::vector<std::int32_t> first_units;
  std::vector<std::int32_t> second_units;
  int split_day = 0;
};

// J independent half-splits. Shuffles the lexicographically sorted unit ids
// with Fisher-Yates driven by the project Rng, so a (units, n_days, J, seed)
// tuple pins the partitions on any platform.
std::vector<CrossoverPartition> partition_units(
    const std::vector<std::string>& unit_ids, int n_days, int reps,
    std::uint64_t seed);

// Replaces the unit fixed-effect factor with a unit-by-half factor: units in
// the first set split their dummies at day < split_day, units in the second
// at day >= floor(T/2) (the midpoint day of an odd-length panel joins the
// first half for first-set units and the second half for second-set units).
// All other factors, regressors, and rows are unchanged.
DesignMatrix build_crossover_subpanel(const CrossoverPartition& partition,
                                      const DesignMatrix& design);

// beta_bc = 2 * beta_hat - mean_j beta_tilde_j, where beta_tilde_j refits the
// full sample with the unit-by-half dummies of replication j. Standard errors
// are the full-sample cluster-robust ones, reused at the corrected point.
FitResult fit_debiased(const PanelDataset& dataset, const RegressionSpec& spec);

// beta_cbc = 2 * beta_hat - mean_j (beta_S1j + beta_S2j) / 2, with each
// beta_Skj a plain FE fit restricted to the crossover subpanel S_k^j.
FitResult fit_debiased_cbc(const PanelDataset& dataset, const RegressionSpec& spec);

// Dispatch on spec.estimator.
FitResult fit(const PanelDataset& dataset, const RegressionSpec& spec);

}  // namespace epipanel
