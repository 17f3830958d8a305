#pragma once

#include <Eigen/Dense>
#include <vector>

#include "epipanel/series.hpp"

namespace epipanel {

struct ClusterAssignment {
  std::vector<std::int32_t> codes;  // dense ids in [0, n_clusters)
  int n_clusters = 0;
};

// Cluster-robust sandwich V = A^-1 (sum_g s_g s_g') A^-1 with A = X'X and
// s_g the within-cluster score sum, on the demeaned design. The small-sample
// factor c = (G/(G-1)) * ((n-1)/(n-k)) is applied unless disabled.
// Accumulation runs in a canonical row order, so permuting rows leaves the
// result bit-identical.
Eigen::MatrixXd cluster_vcov(const Eigen::MatrixXd& X_demeaned,
                             const Eigen::VectorXd& residuals,
                             const ClusterAssignment& clusters,
                             bool small_sample_correction = true);

struct TwowayMeanResult {
  double mean = 0.0;
  double se = 0.0;
  long n = 0;
  bool floored = false;  // combined variance went negative; intersection used
};

// Mean of the nonmissing values with a two-way clustered standard error:
// Var = V_unit + V_time - V_intersection, each a one-way clustered variance
// of the mean with its G/(G-1) correction. A negative combination is floored
// at the intersection-only value.
TwowayMeanResult twoway_cluster_mean_se(const Series& values,
                                        const std::vector<std::int32_t>& unit_codes,
                                        const std::vector<std::int32_t>& time_codes);

// Two-sided tail probabilities for coefficient tests.
double normal_two_sided_p(double z);
double student_t_two_sided_p(double t, double df);

}  // namespace epipanel
