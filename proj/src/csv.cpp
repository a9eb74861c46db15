#include "normscape/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace normscape {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (x == 0.0) return "0";  // folds -0
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), ptr);
}

std::string format_number(const std::optional<double>& x) {
  return x ? format_number(*x) : std::string{};
}

}  // namespace normscape
