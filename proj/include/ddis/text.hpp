#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace ddis {

/// Shortest decimal that round-trips a double exactly (%.17g trimmed by the
/// printf shortest-form rules is not available pre-C++17 to_chars on all
/// libstdc++ versions, so we emit fixed 17 significant digits).
inline std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Parses "start:stop:step" into the inclusive value list
/// {start, start+step, ...} up to stop within 1e-9 tolerance.
/// A bare "x" is the singleton {x}.
inline std::vector<double> parse_range(const std::string& text) {
  const auto c1 = text.find(':');
  if (c1 == std::string::npos) {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("bad range value: " + text);
    return {v};
  }
  const auto c2 = text.find(':', c1 + 1);
  if (c2 == std::string::npos)
    throw std::invalid_argument("range must be start:stop:step, got: " + text);
  const double start = std::stod(text.substr(0, c1));
  const double stop = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
  const double step = std::stod(text.substr(c2 + 1));
  if (step <= 0) throw std::invalid_argument("range step must be positive: " + text);
  if (stop < start) throw std::invalid_argument("range stop before start: " + text);
  std::vector<double> values;
  for (int i = 0;; ++i) {
    const double v = start + step * i;
    if (v > stop + 1e-9) break;
    values.push_back(v);
  }
  return values;
}

}  // namespace ddis
