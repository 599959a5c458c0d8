#include "sdpgame/real.h"

#include <cmath>
#include <iomanip>
#include <sstream>

#include <boost/math/constants/constants.hpp>

namespace sdpgame {

namespace {
unsigned bits_to_digits10(unsigned bits) {
  return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
}

unsigned g_bits = kDefaultPrecisionBits;

struct Init {
  Init() { Real::default_precision(bits_to_digits10(g_bits)); }
} g_init;
}  // namespace

void set_precision_bits(unsigned bits) {
  if (bits < 53) bits = 53;
  g_bits = bits;
  Real::default_precision(bits_to_digits10(bits));
}

unsigned precision_bits() { return g_bits; }

PrecisionScope::PrecisionScope(unsigned bits) : saved_(g_bits) {
  set_precision_bits(bits);
}

PrecisionScope::~PrecisionScope() { set_precision_bits(saved_); }

Real real_pi() { return boost::math::constants::pi<Real>(); }

std::string format_real(const Real& x, int digits) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(digits - 1) << x;
  return os.str();
}

}  // namespace sdpgame
