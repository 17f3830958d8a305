#include "epipanel/date.hpp"

#include <chrono>
#include <cstdio>

namespace epipanel {

namespace {

using days = std::chrono::days;
using sys_days = std::chrono::sys_days;

}  // namespace

std::optional<Date> Date::parse_iso(std::string_view text) {
  int y = 0;
  unsigned m = 0, d = 0;
  char tail = '\0';
  // Strict YYYY-MM-DD, no trailing characters.
  std::string buf(text);
  if (std::sscanf(buf.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &tail) != 3) {
    return std::nullopt;
  }
  if (buf.size() != 10 || buf[4] != '-' || buf[7] != '-') return std::nullopt;
  std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                  std::chrono::day{d}};
  if (!ymd.ok()) return std::nullopt;
  return Date(sys_days(ymd).time_since_epoch().count());
}

Date Date::from_ymd(int year, unsigned month, unsigned day) {
  std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                  std::chrono::day{day}};
  return Date(sys_days(ymd).time_since_epoch().count());
}

std::string Date::iso() const {
  std::chrono::year_month_day ymd{sys_days(days(serial_))};
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", int(ymd.year()),
                unsigned(ymd.month()), unsigned(ymd.day()));
  return buf;
}

}  // namespace epipanel
