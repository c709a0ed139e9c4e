#pragma once

#include <algorithm>
#include <string>

namespace livsic {

/// Subinterval of the real line with independently open or closed ends.
/// An interval with lo > hi, or lo == hi with an open end, is empty.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_open = false;
  bool hi_open = false;

  static Interval closed(double a, double b) { return {a, b, false, false}; }
  static Interval left_open(double a, double b) { return {a, b, true, false}; }
  static Interval open(double a, double b) { return {a, b, true, true}; }
  static Interval empty() { return {1.0, 0.0, true, true}; }

  bool is_empty() const noexcept {
    return lo > hi || (lo == hi && (lo_open || hi_open));
  }
  double length() const noexcept { return is_empty() ? 0.0 : hi - lo; }

  bool contains(double x) const noexcept {
    if (is_empty()) return false;
    const bool above = lo_open ? x > lo : x >= lo;
    const bool below = hi_open ? x < hi : x <= hi;
    return above && below;
  }

  /// Membership in the closure, widened by `tol` on both sides.
  bool contains_closure(double x, double tol = 0.0) const noexcept {
    return !is_empty() && x >= lo - tol && x <= hi + tol;
  }

  Interval closure() const noexcept { return {lo, hi, false, false}; }

  std::string to_string() const;
};

/// Set intersection, respecting open/closed ends.
Interval intersect(const Interval& a, const Interval& b) noexcept;

/// Length of the overlap of the closures.
inline double overlap_length(const Interval& a, const Interval& b) noexcept {
  if (a.is_empty() || b.is_empty()) return 0.0;
  return std::max(0.0, std::min(a.hi, b.hi) - std::max(a.lo, b.lo));
}

/// Parses interval notation such as "(0.5,1]" or "[0,0.25)".
Interval parse_interval(const std::string& text);

}  // namespace livsic
