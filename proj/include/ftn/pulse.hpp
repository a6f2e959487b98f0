#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "ftn/errors.hpp"
#include "ftn/linalg.hpp"

namespace ftn {

// Raised-cosine pulse family parameters. T is the symbol period of the
// underlying Nyquist design; symbols are actually sent every delta*T seconds
// (delta = 1 is orthogonal signaling, delta < 1 packs them tighter).
struct PulseConfig {
  double t_symbol = 0.01;
  double beta = 0.0;
  double delta = 1.0;

  void validate() const {
    if (!(t_symbol > 0)) throw Error("pulse: T must be positive");
    if (!(beta >= 0.0 && beta <= 1.0)) throw Error("pulse: beta outside [0,1]");
    if (!(delta > 0.0 && delta <= 1.0)) throw Error("pulse: delta outside (0,1]");
  }

  // Bandwidth-vs-rate product delta*(1+beta); below 1 the folded spectrum
  // vanishes on an interval and the capacity machinery here does not apply.
  double compression() const { return delta * (1.0 + beta); }
  bool well_conditioned() const { return compression() >= 1.0; }
};

struct FoldedSpectrum {
  VectorXd grid;    // normalized frequencies in [-1/2, 1/2]
  VectorXd values;  // G_d at each grid point
  PulseConfig config;
};

// G(f): T on the flat region, raised-cosine rolloff on the transition band,
// zero beyond (1+beta)/2T. Units of seconds.
inline double rc_frequency_response(double f, const PulseConfig& cfg) {
  cfg.validate();
  const double t = cfg.t_symbol;
  const double af = std::abs(f);
  const double lo = (1.0 - cfg.beta) / (2.0 * t);
  const double hi = (1.0 + cfg.beta) / (2.0 * t);
  if (af <= lo) return t;
  if (af > hi) return 0.0;
  return 0.5 * t * (1.0 + std::cos(std::numbers::pi * t / cfg.beta * (af - lo)));
}

namespace detail {

inline double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

// cos(pi*u/2) / (1 - u^2), even in u, rewritten near |u| = 1 where the
// direct quotient is 0/0: with e = 1 - |u|,
//   cos(pi*u/2)/(1-u^2) = sin(pi*e/2) / (e*(2-e)),
// which this evaluates stably (limit pi/4 at e = 0).
inline double cos_over_one_minus_u2(double u) {
  const double au = std::abs(u);
  const double e = 1.0 - au;
  if (std::abs(e) < 1e-4) {
    if (e == 0.0) return std::numbers::pi / 4.0;
    return std::sin(0.5 * std::numbers::pi * e) / (e * (2.0 - e));
  }
  return std::cos(0.5 * std::numbers::pi * u) / (1.0 - u * u);
}

}  // namespace detail

// g(t): inverse Fourier transform of G(f), normalized so g(0) = 1. The
// removable singularities at t = +-T/(2 beta) take their analytic limit.
inline double rc_time_sample(double t, const PulseConfig& cfg) {
  cfg.validate();
  const double x = t / cfg.t_symbol;
  const double u = 2.0 * cfg.beta * x;
  return detail::sinc(x) * detail::cos_over_one_minus_u2(u);
}

// Symbol-spaced autocorrelation samples g[n] = g(n*delta*T) for
// n = -(N-1) .. (N-1); entry i holds n = i - (N-1). Even sequence, g[0] = 1.
inline VectorXd g_samples(const PulseConfig& cfg, int n) {
  cfg.validate();
  if (n < 1) throw Error("g_samples: N must be >= 1");
  VectorXd out(2 * n - 1);
  for (int i = 0; i < n; ++i) {
    const double v = rc_time_sample(i * cfg.delta * cfg.t_symbol, cfg);
    out(n - 1 + i) = v;
    out(n - 1 - i) = v;
  }
  return out;
}

// Folded (aliased) spectrum G_d(f_n) = (1/dT) * sum_m G((f_n - m)/dT). G has
// compact support, so the sum over m in [-ceil((1+b)d)-1, ceil((1+b)d)+1] is
// exact. Canonicalizing f to |f - round(f)| makes the evenness and
// period-1 periodicity bitwise exact.
inline double folded_spectrum(const PulseConfig& cfg, double f_n) {
  cfg.validate();
  const double f = std::abs(f_n - std::round(f_n));
  const double dt = cfg.delta * cfg.t_symbol;
  const int m_max = static_cast<int>(std::ceil(cfg.compression())) + 1;
  double acc = 0.0;
  for (int m = -m_max; m <= m_max; ++m)
    acc += rc_frequency_response((f - m) / dt, cfg);
  return acc / dt;
}

inline FoldedSpectrum folded_spectrum_grid(const PulseConfig& cfg, int m) {
  FoldedSpectrum out;
  out.grid = midpoint_grid(m);
  out.values.resize(m);
  for (int i = 0; i < m; ++i) out.values(i) = folded_spectrum(cfg, out.grid(i));
  out.config = cfg;
  return out;
}

}  // namespace ftn
