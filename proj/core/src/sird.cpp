#include "epipanel/sird.hpp"

#include <algorithm>
#include <cmath>

#include "epipanel/errors.hpp"

namespace epipanel {

RateFn constant_rate(double value) {
  return [value](double) { return value; };
}

RateFn step_rate(std::vector<double> knots, std::vector<double> values) {
  if (knots.size() != values.size() || knots.empty()) {
    throw_error(ErrorCode::ConfigError, "step_rate needs matching knots/values");
  }
  return [knots = std::move(knots), values = std::move(values)](double t) {
    auto it = std::upper_bound(knots.begin(), knots.end(), t);
    if (it == knots.begin()) return values.front();
    return values[static_cast<std::size_t>(it - knots.begin()) - 1];
  };
}

RateFn linear_rate(std::vector<double> knots, std::vector<double> values) {
  if (knots.size() != values.size() || knots.empty()) {
    throw_error(ErrorCode::ConfigError, "linear_rate needs matching knots/values");
  }
  return [knots = std::move(knots), values = std::move(values)](double t) {
    if (t <= knots.front()) return values.front();
    if (t >= knots.back()) return values.back();
    auto it = std::upper_bound(knots.begin(), knots.end(), t);
    const std::size_t hi = static_cast<std::size_t>(it - knots.begin());
    const std::size_t lo = hi - 1;
    const double w = (t - knots[lo]) / (knots[hi] - knots[lo]);
    return values[lo] + w * (values[hi] - values[lo]);
  };
}

void SirdParams::validate() const {
  if (population <= 0) throw_error(ErrorCode::ConfigError, "population must be > 0");
  if (gamma <= 0) throw_error(ErrorCode::ConfigError, "gamma must be > 0");
  if (kappa < 0 || kappa > 1) {
    throw_error(ErrorCode::ConfigError, "kappa must lie in [0, 1]");
  }
  if (!beta || !tau) throw_error(ErrorCode::ConfigError, "beta and tau required");
}

std::size_t SirdTrajectory::day_index(int day) const {
  const double steps_per_day = 1.0 / dt;
  const auto idx = static_cast<std::size_t>(std::llround(day * steps_per_day));
  if (idx >= path.size()) {
    throw_error(ErrorCode::ConfigError, "day outside trajectory");
  }
  return idx;
}

namespace {

struct Derivative {
  double ds, di, dr, dd, dc;
};

Derivative rhs(const SirdParams& p, double t, const SirdState& s) {
  const double force = s.susceptible / p.population * p.beta(t) * s.infected;
  const double outflow = p.gamma * s.infected;
  return {-force, force - outflow, (1.0 - p.kappa) * outflow,
          p.kappa * outflow, p.tau(t) * s.infected};
}

SirdState advance(const SirdState& s, const Derivative& d, double h) {
  return {s.susceptible + h * d.ds, s.infected + h * d.di,
          s.recovered + h * d.dr, s.deceased + h * d.dd,
          s.confirmed + h * d.dc};
}

}  // namespace

SirdTrajectory integrate(const SirdParams& params, const SirdState& init,
                         double t_end, double dt) {
  params.validate();
  if (dt <= 0) throw_error(ErrorCode::ConfigError, "dt must be > 0");
  constexpr double kConservationTol = 1e-9;
  const double total =
      init.susceptible + init.infected + init.recovered + init.deceased;
  if (std::fabs(total - params.population) / params.population > kConservationTol) {
    throw_error(ErrorCode::ConfigError, "initial state violates S+I+R+D = N");
  }

  const long n_steps = std::lround(t_end / dt);
  SirdTrajectory trajectory;
  trajectory.dt = dt;
  trajectory.time.reserve(n_steps + 1);
  trajectory.path.reserve(n_steps + 1);
  trajectory.time.push_back(0.0);
  trajectory.path.push_back(init);

  SirdState state = init;
  for (long step = 0; step < n_steps; ++step) {
    const double t = step * dt;
    const Derivative k1 = rhs(params, t, state);
    const Derivative k2 = rhs(params, t + dt / 2, advance(state, k1, dt / 2));
    const Derivative k3 = rhs(params, t + dt / 2, advance(state, k2, dt / 2));
    const Derivative k4 = rhs(params, t + dt, advance(state, k3, dt));
    state.susceptible +=
        dt / 6 * (k1.ds + 2 * k2.ds + 2 * k3.ds + k4.ds);
    state.infected += dt / 6 * (k1.di + 2 * k2.di + 2 * k3.di + k4.di);
    state.recovered += dt / 6 * (k1.dr + 2 * k2.dr + 2 * k3.dr + k4.dr);
    state.deceased += dt / 6 * (k1.dd + 2 * k2.dd + 2 * k3.dd + k4.dd);
    state.confirmed += dt / 6 * (k1.dc + 2 * k2.dc + 2 * k3.dc + k4.dc);

    const double mass =
        state.susceptible + state.infected + state.recovered + state.deceased;
    if (std::fabs(mass - params.population) / params.population >
        kConservationTol) {
      throw_error(ErrorCode::StepTooLarge,
                  "conservation breach at t = " + std::to_string(t + dt));
    }
    const double negative_tol = -1e-12 * params.population;
    if (state.susceptible < negative_tol || state.infected < negative_tol ||
        state.recovered < negative_tol || state.deceased < negative_tol) {
      throw_error(ErrorCode::NegativeState,
                  "negative compartment at t = " + std::to_string(t + dt));
    }
    trajectory.time.push_back((step + 1) * dt);
    trajectory.path.push_back(state);
  }
  return trajectory;
}

namespace {

IdentityCheck growth_identity(const SirdTrajectory& trajectory,
                              const SirdParams& params, bool deaths) {
  const auto& path = trajectory.path;
  const double dt = trajectory.dt;

  double peak_infected = 0.0;
  for (const auto& s : path) peak_infected = std::max(peak_infected, s.infected);
  if (peak_infected < 1e-9 * params.population) {
    return {IdentityCheck::Status::NoInfection, 0.0};
  }
  if (deaths && params.kappa == 0.0) {
    return {IdentityCheck::Status::NoDeaths, 0.0};
  }

  auto cumulative = [&](std::size_t k) {
    return deaths ? path[k].deceased : path[k].confirmed;
  };

  IdentityCheck check;
  for (std::size_t k = 1; k + 1 < path.size(); ++k) {
    const double first =
        (cumulative(k + 1) - cumulative(k - 1)) / (2.0 * dt);
    const double second =
        (cumulative(k + 1) - 2.0 * cumulative(k) + cumulative(k - 1)) /
        (dt * dt);
    if (std::fabs(first) < 1e-300) continue;
    const double lhs = second / first;

    const double t = trajectory.time[k];
    double rhs_value = path[k].susceptible / params.population * params.beta(t) -
                       params.gamma;
    if (!deaths) {
      const double tau = params.tau(t);
      const double tau_dot =
          (params.tau(t + dt) - params.tau(t - dt)) / (2.0 * dt);
      rhs_value += tau_dot / tau;
    }
    check.max_deviation =
        std::max(check.max_deviation, std::fabs(lhs - rhs_value));
  }
  return check;
}

}  // namespace

IdentityCheck case_growth_identity_check(const SirdTrajectory& trajectory,
                                         const SirdParams& params) {
  return growth_identity(trajectory, params, false);
}

IdentityCheck death_growth_identity_check(const SirdTrajectory& trajectory,
                                          const SirdParams& params) {
  return growth_identity(trajectory, params, true);
}

}  // namespace epipanel
