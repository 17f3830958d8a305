#include "epipanel/transforms.hpp"

#include <cmath>

#include "epipanel/errors.hpp"

namespace epipanel {

namespace {

void check_shape(const Series& input, const PanelShape& shape) {
  if (input.size() != shape.n_rows()) {
    throw_error(ErrorCode::ConfigError, "column size does not match panel shape");
  }
}

template <typename Fn>
Series windowed(const Series& input, const PanelShape& shape, int window, Fn fn) {
  check_shape(input, shape);
  Series out(input.size(), kMissing);
  for (int u = 0; u < shape.n_units; ++u) {
    const std::size_t base = static_cast<std::size_t>(u) * shape.n_days;
    for (int t = window - 1; t < shape.n_days; ++t) {
      double acc = 0.0;
      bool ok = true;
      for (int k = t - window + 1; k <= t; ++k) {
        const double v = input[base + k];
        if (is_missing(v)) {
          ok = false;
          break;
        }
        acc += v;
      }
      if (ok) out[base + t] = fn(acc, window);
    }
  }
  return out;
}

}  // namespace

Series moving_average(const Series& input, const PanelShape& shape, int window) {
  if (window < 1) throw_error(ErrorCode::ConfigError, "window must be >= 1");
  return windowed(input, shape, window,
                  [](double acc, int w) { return acc / w; });
}

Series rolling_sum(const Series& input, const PanelShape& shape, int window) {
  if (window < 1) throw_error(ErrorCode::ConfigError, "window must be >= 1");
  return windowed(input, shape, window, [](double acc, int) { return acc; });
}

Series log_weekly(const Series& counts, double zero_value) {
  Series out(counts.size(), kMissing);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double v = counts[i];
    if (is_missing(v)) continue;
    if (v < 0.0) {
      throw_error(ErrorCode::NegativeCount,
                  "count " + std::to_string(v) + " at row " + std::to_string(i));
    }
    out[i] = (v == 0.0) ? zero_value : std::log(v);
  }
  return out;
}

Series log_diff(const Series& input, const PanelShape& shape, int span) {
  check_shape(input, shape);
  Series out(input.size(), kMissing);
  for (int u = 0; u < shape.n_units; ++u) {
    const std::size_t base = static_cast<std::size_t>(u) * shape.n_days;
    for (int t = span; t < shape.n_days; ++t) {
      const double cur = input[base + t];
      const double prev = input[base + t - span];
      if (!is_missing(cur) && !is_missing(prev)) out[base + t] = cur - prev;
    }
  }
  return out;
}

Series lag(const Series& input, const PanelShape& shape, int days) {
  if (days < 0) throw_error(ErrorCode::ConfigError, "lag must be >= 0");
  check_shape(input, shape);
  if (days == 0) return input;
  Series out(input.size(), kMissing);
  for (int u = 0; u < shape.n_units; ++u) {
    const std::size_t base = static_cast<std::size_t>(u) * shape.n_days;
    for (int t = days; t < shape.n_days; ++t) {
      out[base + t] = input[base + t - days];
    }
  }
  return out;
}

Series cumulative_sum(const Series& input, const PanelShape& shape) {
  check_shape(input, shape);
  Series out(input.size(), kMissing);
  for (int u = 0; u < shape.n_units; ++u) {
    const std::size_t base = static_cast<std::size_t>(u) * shape.n_days;
    double acc = 0.0;
    for (int t = 0; t < shape.n_days; ++t) {
      const double v = input[base + t];
      if (is_missing(v)) continue;
      acc += v;
      out[base + t] = acc;
    }
  }
  return out;
}

Series carry_forward_after(const Series& input, const PanelShape& shape,
                           int day_index) {
  check_shape(input, shape);
  Series out = input;
  if (day_index < 0 || day_index >= shape.n_days) return out;
  for (int u = 0; u < shape.n_units; ++u) {
    const std::size_t base = static_cast<std::size_t>(u) * shape.n_days;
    const double pinned = input[base + day_index];
    for (int t = day_index + 1; t < shape.n_days; ++t) out[base + t] = pinned;
  }
  return out;
}

Series multiply(const Series& a, const Series& b) {
  if (a.size() != b.size()) {
    throw_error(ErrorCode::ConfigError, "columns differ in length");
  }
  Series out(a.size(), kMissing);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!is_missing(a[i]) && !is_missing(b[i])) out[i] = a[i] * b[i];
  }
  return out;
}

}  // namespace epipanel
