#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace epipanel {

// Calendar day stored as a serial count of days since 1970-01-01.
class Date {
 public:
  Date() : serial_(0) {}
  explicit Date(std::int64_t serial) : serial_(serial) {}

  static std::optional<Date> parse_iso(std::string_view text);
  static Date from_ymd(int year, unsigned month, unsigned day);

  std::int64_t serial() const { return serial_; }
  Date plus_days(std::int64_t n) const { return Date(serial_ + n); }
  std::int64_t days_until(Date other) const { return other.serial_ - serial_; }

  std::string iso() const;

  auto operator<=>(const Date&) const = default;

 private:
  std::int64_t serial_;
};

}  // namespace epipanel
