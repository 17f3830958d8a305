#include "epipanel/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "epipanel/errors.hpp"

namespace epipanel {

namespace {

// Regularized incomplete beta via Lentz's continued fraction.
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-15;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * betacf(a, b, x) / a;
  }
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

// One-way clustered variance of the sample mean, with G/(G-1) correction.
double oneway_mean_variance(const std::vector<double>& values,
                            const std::vector<std::int64_t>& groups) {
  const std::size_t n = values.size();
  const double mean =
      std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (groups[a] != groups[b]) return groups[a] < groups[b];
    return values[a] < values[b];
  });

  double meat = 0.0;
  double score = 0.0;
  std::int64_t current = groups[order[0]];
  long n_groups = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = order[k];
    if (groups[i] != current) {
      meat += score * score;
      ++n_groups;
      score = 0.0;
      current = groups[i];
    }
    score += values[i] - mean;
  }
  meat += score * score;
  ++n_groups;

  if (n_groups < 2) throw_error(ErrorCode::DegenerateClustering, "single cluster");
  const double g = static_cast<double>(n_groups);
  return (g / (g - 1.0)) * meat / (static_cast<double>(n) * static_cast<double>(n));
}

}  // namespace

Eigen::MatrixXd cluster_vcov(const Eigen::MatrixXd& X,
                             const Eigen::VectorXd& residuals,
                             const ClusterAssignment& clusters,
                             bool small_sample_correction) {
  const long n = X.rows();
  const long k = X.cols();
  if (residuals.size() != n || static_cast<long>(clusters.codes.size()) != n) {
    throw_error(ErrorCode::ConfigError, "residuals/clusters not aligned to design");
  }
  if (clusters.n_clusters < 2) {
    throw_error(ErrorCode::SingleCluster,
                "need >= 2 clusters, have " + std::to_string(clusters.n_clusters));
  }

  // Canonical row order: sort by (cluster, row content). Accumulating in this
  // order makes the result independent of the caller's row ordering.
  std::vector<std::int64_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::int64_t a, std::int64_t b) {
    if (clusters.codes[a] != clusters.codes[b])
      return clusters.codes[a] < clusters.codes[b];
    for (long j = 0; j < k; ++j) {
      if (X(a, j) != X(b, j)) return X(a, j) < X(b, j);
    }
    return residuals[a] < residuals[b];
  });

  Eigen::MatrixXd bread = Eigen::MatrixXd::Zero(k, k);
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(k, k);
  Eigen::VectorXd score = Eigen::VectorXd::Zero(k);
  std::int32_t current = clusters.codes[order[0]];
  for (long idx = 0; idx < n; ++idx) {
    const long r = order[idx];
    if (clusters.codes[r] != current) {
      meat.noalias() += score * score.transpose();
      score.setZero();
      current = clusters.codes[r];
    }
    const auto x_r = X.row(r).transpose();
    bread.noalias() += x_r * x_r.transpose();
    score.noalias() += x_r * residuals[r];
  }
  meat.noalias() += score * score.transpose();

  const Eigen::MatrixXd bread_inv =
      bread.ldlt().solve(Eigen::MatrixXd::Identity(k, k));
  Eigen::MatrixXd v = bread_inv * meat * bread_inv;

  if (small_sample_correction) {
    const double g = clusters.n_clusters;
    const double dn = static_cast<double>(n);
    const double dk = static_cast<double>(k);
    v *= (g / (g - 1.0)) * ((dn - 1.0) / (dn - dk));
  }
  v = ((v + v.transpose()) / 2.0).eval();
  return v;
}

TwowayMeanResult twoway_cluster_mean_se(const Series& values,
                                        const std::vector<std::int32_t>& unit_codes,
                                        const std::vector<std::int32_t>& time_codes) {
  if (values.size() != unit_codes.size() || values.size() != time_codes.size()) {
    throw_error(ErrorCode::ConfigError, "codes not aligned to values");
  }
  std::vector<double> kept;
  std::vector<std::int64_t> by_unit, by_time, by_cell;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (is_missing(values[i])) continue;
    kept.push_back(values[i]);
    by_unit.push_back(unit_codes[i]);
    by_time.push_back(time_codes[i]);
    by_cell.push_back(static_cast<std::int64_t>(unit_codes[i]) << 32 |
                      static_cast<std::uint32_t>(time_codes[i]));
  }
  if (kept.size() < 2) {
    throw_error(ErrorCode::DegenerateClustering, "fewer than 2 observations");
  }

  TwowayMeanResult out;
  out.n = static_cast<long>(kept.size());
  out.mean = std::accumulate(kept.begin(), kept.end(), 0.0) /
             static_cast<double>(kept.size());

  const double v_unit = oneway_mean_variance(kept, by_unit);
  const double v_time = oneway_mean_variance(kept, by_time);
  const double v_cell = oneway_mean_variance(kept, by_cell);

  double v = v_unit + v_time - v_cell;
  if (v < 0.0) {
    v = v_cell;
    out.floored = true;
  }
  out.se = std::sqrt(v);
  return out;
}

double normal_two_sided_p(double z) {
  return std::erfc(std::fabs(z) / std::sqrt(2.0));
}

double student_t_two_sided_p(double t, double df) {
  if (df <= 0) return std::numeric_limits<double>::quiet_NaN();
  const double x = df / (df + t * t);
  return incomplete_beta(df / 2.0, 0.5, x);
}

}  // namespace epipanel
