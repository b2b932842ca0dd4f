#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace leray {

using cplx = std::complex<double>;
using Point = std::vector<cplx>;
using Vector = std::vector<cplx>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

// Error taxonomy. Everything derives from std::runtime_error so callers that
// only care about "something went wrong" can catch one type.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ChartDomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PoleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnsupportedKindError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConvergenceError : std::runtime_error {
  ConvergenceError(const std::string& what, cplx last, cplx previous)
      : std::runtime_error(what), last_value(last), previous_value(previous) {}
  cplx last_value;
  cplx previous_value;
};

inline std::string to_string(cplx c) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "(%.17g,%.17g)", c.real(), c.imag());
  return buf;
}

inline std::string to_string(std::span<const cplx> p) {
  std::string s = "[";
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (k) s += ", ";
    s += to_string(p[k]);
  }
  return s + "]";
}

/// Seeded generator with a platform-independent uniform mapping.
/// std::mt19937_64 has a fully specified output sequence; the standard
/// distributions do not, so they are avoided.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  cplx in_box(double half_width) {
    return {uniform(-half_width, half_width), uniform(-half_width, half_width)};
  }

  // Modulus uniform in [r_min, r_max], argument uniform in [0, 2pi).
  cplx in_annulus(double r_min, double r_max) {
    double r = uniform(r_min, r_max);
    return std::polar(r, 2.0 * pi * uniform());
  }

  Vector vector_in_box(std::size_t dim, double half_width) {
    Vector v(dim);
    for (auto& c : v) c = in_box(half_width);
    return v;
  }

 private:
  std::mt19937_64 engine_;
};

inline double relative_difference(cplx a, cplx b) {
  double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

}  // namespace leray
