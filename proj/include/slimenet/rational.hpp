#pragma once

#include <charconv>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "slimenet/error.hpp"

namespace slimenet {

/// Unreduced fraction count/k. Edge weights and thresholds keep their run
/// count as denominator so 12/28 prints as 12/28. Comparison is exact.
struct Ratio {
  std::int64_t num = 0;
  std::int64_t den = 1;

  constexpr Ratio() = default;
  constexpr Ratio(std::int64_t n, std::int64_t d) : num(n), den(d) {
    if (d <= 0) throw ValidationError("denominator must be positive");
  }

  constexpr double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  friend constexpr std::strong_ordering operator<=>(const Ratio& a, const Ratio& b) {
    // Denominators are positive, so cross-multiplication preserves order.
    return a.num * b.den <=> b.num * a.den;
  }
  friend constexpr bool operator==(const Ratio& a, const Ratio& b) { return a.num * b.den == b.num * a.den; }

  /// Same fraction with identical numerator and denominator.
  constexpr bool identical(const Ratio& o) const { return num == o.num && den == o.den; }

  std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
};

/// Parses "n/d" or a plain integer "n" (meaning n/1).
inline Ratio parse_ratio(std::string_view text) {
  auto parse_int = [&](std::string_view s) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty())
      throw ValidationError("not a rational: '" + std::string(text) + "'", "theta");
    return v;
  };
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Ratio(parse_int(text), 1);
  const auto d = parse_int(text.substr(slash + 1));
  if (d <= 0) throw ValidationError("denominator must be positive in '" + std::string(text) + "'", "theta");
  return Ratio(parse_int(text.substr(0, slash)), d);
}

}  // namespace slimenet
