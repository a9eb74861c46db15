#pragma once

#include <optional>
#include <string>

namespace normscape {

// Shortest round-trip representation; identical bytes for identical doubles.
std::string format_number(double x);

// Missing values are written as an empty field.
std::string format_number(const std::optional<double>& x);

}  // namespace normscape
