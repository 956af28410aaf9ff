#include "fundlim/norm_order.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "fundlim/format.hpp"

namespace fundlim {

NormOrder NormOrder::parse(const std::string& text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "inf" || lower == "infinity") return infinity();
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw InvalidOrder("cannot parse norm order '" + text + "'");
  }
  return NormOrder(v);
}

std::string NormOrder::to_string() const { return is_infinite() ? "inf" : format_double(p_); }

}  // namespace fundlim
