#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace wsro {

// Floating values in CSV output: 12 significant digits, "nan" for NaN.
inline std::string fmt_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace wsro
