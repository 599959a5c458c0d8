#pragma once

#include <string>

#include <boost/multiprecision/mpfr.hpp>

namespace sdpgame {

using Real = boost::multiprecision::mpfr_float;

constexpr unsigned kDefaultPrecisionBits = 256;

// Working precision applies to every Real created afterwards. The library is
// single-writer with respect to this setting: set it once per process (or per
// scope with PrecisionScope) before building polynomials or instances.
void set_precision_bits(unsigned bits);
unsigned precision_bits();

class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned bits);
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned saved_;
};

Real real_pi();

// Scientific notation with `digits` significant digits, e.g. 1.50e+00.
std::string format_real(const Real& x, int digits);

inline double to_double(const Real& x) { return x.convert_to<double>(); }
inline long double to_long_double(const Real& x) {
  return x.convert_to<long double>();
}

}  // namespace sdpgame
