#include "livsic/interval.hpp"

#include <cctype>
#include <charconv>
#include <sstream>

#include "livsic/errors.hpp"

namespace livsic {

std::string Interval::to_string() const {
  if (is_empty()) return "{}";
  std::ostringstream os;
  os.precision(17);
  os << (lo_open ? '(' : '[') << lo << ',' << hi << (hi_open ? ')' : ']');
  return os.str();
}

Interval intersect(const Interval& a, const Interval& b) noexcept {
  if (a.is_empty() || b.is_empty()) return Interval::empty();
  Interval r;
  if (a.lo > b.lo) {
    r.lo = a.lo;
    r.lo_open = a.lo_open;
  } else if (b.lo > a.lo) {
    r.lo = b.lo;
    r.lo_open = b.lo_open;
  } else {
    r.lo = a.lo;
    r.lo_open = a.lo_open || b.lo_open;
  }
  if (a.hi < b.hi) {
    r.hi = a.hi;
    r.hi_open = a.hi_open;
  } else if (b.hi < a.hi) {
    r.hi = b.hi;
    r.hi_open = b.hi_open;
  } else {
    r.hi = a.hi;
    r.hi_open = a.hi_open || b.hi_open;
  }
  return r.is_empty() ? Interval::empty() : r;
}

namespace {

double parse_number(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DomainError("malformed number in interval: '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

Interval parse_interval(const std::string& text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.size() < 5) throw DomainError("malformed interval: '" + text + "'");
  const char open = s.front();
  const char close = s.back();
  if ((open != '[' && open != '(') || (close != ']' && close != ')')) {
    throw DomainError("interval must use [ ( and ] ) brackets: '" + text + "'");
  }
  const auto comma = s.find(',');
  if (comma == std::string_view::npos) throw DomainError("interval needs a comma: '" + text + "'");
  Interval r;
  r.lo = parse_number(s.substr(1, comma - 1));
  r.hi = parse_number(s.substr(comma + 1, s.size() - comma - 2));
  r.lo_open = open == '(';
  r.hi_open = close == ')';
  if (r.lo > r.hi) throw DomainError("interval with lo > hi: '" + text + "'");
  return r;
}

}  // namespace livsic
