#pragma once

#include <functional>
#include <vector>

namespace epipanel {

// Time-varying rate, evaluated in days.
using RateFn = std::function<double(double)>;

RateFn constant_rate(double value);
// Right-continuous step function: value[i] applies on [knots[i], knots[i+1]).
RateFn step_rate(std::vector<double> knots, std::vector<double> values);
// Linear interpolation between (time, value) knots, clamped at the ends.
RateFn linear_rate(std::vector<double> knots, std::vector<double> values);

struct SirdParams {
  double population = 0.0;  // N
  RateFn beta;              // infection spread rate, 1/day
  double gamma = 0.0;       // recovery-or-death rate, 1/day
  double kappa = 0.0;       // P(death | infection)
  RateFn tau;               // detection rate

  void validate() const;
};

struct SirdState {
  double susceptible = 0.0;
  double infected = 0.0;
  double recovered = 0.0;
  double deceased = 0.0;
  double confirmed = 0.0;
};

struct SirdTrajectory {
  double dt = 0.0;
  std::vector<double> time;
  std::vector<SirdState> path;

  // Index of the grid point at integer day d (requires 1/dt integral).
  std::size_t day_index(int day) const;
  const SirdState& at_day(int day) const { return path[day_index(day)]; }
};

// Classical fourth-order Runge-Kutta on (S, I, R, D, C); beta and tau are
// evaluated at the substep times. Conservation S+I+R+D = N is enforced to
// 1e-9 relative at every step.
SirdTrajectory integrate(const SirdParams& params, const SirdState& init,
                         double t_end, double dt);

struct IdentityCheck {
  enum class Status { Ok, NoInfection, NoDeaths };
  Status status = Status::Ok;
  double max_deviation = 0.0;
};

// Central-difference check of d/dt log Cdot = (S/N) beta - gamma + taudot/tau
// over the interior of the grid.
IdentityCheck case_growth_identity_check(const SirdTrajectory& trajectory,
                                         const SirdParams& params);

// Same for d/dt log Ddot = (S/N) beta - gamma (the detection-rate term drops
// out of the death path).
IdentityCheck death_growth_identity_check(const SirdTrajectory& trajectory,
                                          const SirdParams& params);

}  // namespace epipanel
