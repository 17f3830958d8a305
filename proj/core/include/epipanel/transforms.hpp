#pragma once

#include "epipanel/series.hpp"

namespace epipanel {

// All transforms operate within unit boundaries of a dense unit-major column
// and propagate missing values. They are pure; inputs are never modified.

// out[t] = mean(in[t-window+1..t]); missing if any input in the window is
// missing. The first window-1 entries of each unit are missing.
Series moving_average(const Series& input, const PanelShape& shape, int window);

// out[t] = sum(in[t-window+1..t]); same missing rules as moving_average.
Series rolling_sum(const Series& input, const PanelShape& shape, int window);

// ln(x) for x > 0, -1 for x == 0 (the zero-week convention), missing
// propagates. zero_value overrides the value assigned at x == 0.
Series log_weekly(const Series& counts, double zero_value = -1.0);

// out[t] = in[t] - in[t-span] within unit.
Series log_diff(const Series& input, const PanelShape& shape, int span);

// out[t] = in[t-days] within unit; the first `days` entries per unit missing.
Series lag(const Series& input, const PanelShape& shape, int days);

// Running total per unit; missing inputs are treated as gaps (total carries
// through, the output at the gap is missing).
Series cumulative_sum(const Series& input, const PanelShape& shape);

// Replaces every value strictly after `day_index` with the unit's value at
// `day_index`. Used for policy series whose source stops updating.
Series carry_forward_after(const Series& input, const PanelShape& shape,
                           int day_index);

// Elementwise product; missing if either factor missing.
Series multiply(const Series& a, const Series& b);

}  // namespace epipanel
