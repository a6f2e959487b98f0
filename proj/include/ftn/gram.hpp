#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "ftn/errors.hpp"
#include "ftn/linalg.hpp"
#include "ftn/pulse.hpp"

namespace ftn {

// Toeplitz matrix of pulse autocorrelations (G)_{n,m} = g[n-m]. Carries the
// ISI structure induced by sending every delta*T seconds; also the colored
// noise covariance after matched filtering (up to sigma0^2).
struct GramMatrix {
  MatrixXd m;
  PulseConfig config;

  int n() const { return static_cast<int>(m.rows()); }
};

// j-shifted variant (G^j)_{n,m} = g[n-m-j]; G^0 equals GramMatrix.
struct ShiftedGram {
  MatrixXd m;
  int shift = 0;
  PulseConfig config;
};

// Spectral decomposition G = V diag(w) V^T, eigenvalues descending.
struct GramSpectral {
  MatrixXd vectors;
  VectorXd values;
};

inline GramMatrix build_gram(const PulseConfig& cfg, int n) {
  if (n < 1) throw Error("gram: N must be >= 1");
  const VectorXd g = g_samples(cfg, n);  // index n-1+k holds g[k]
  GramMatrix out;
  out.m.resize(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) out.m(r, c) = g(n - 1 + r - c);
  out.config = cfg;
  return out;
}

inline ShiftedGram build_shifted_gram(const PulseConfig& cfg, int n, int j) {
  if (n < 1) throw Error("gram: N must be >= 1");
  if (j < 0) throw Error("gram: shift must be >= 0");
  // entries need g[k] for k = -(n-1)-j .. (n-1), covered by n+j samples
  const VectorXd g = g_samples(cfg, n + j);
  ShiftedGram out;
  out.m.resize(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) out.m(r, c) = g(n + j - 1 + r - c - j);
  out.shift = j;
  out.config = cfg;
  return out;
}

inline GramSpectral spectral_decompose(const GramMatrix& g) {
  auto eig = hermitian_eig(g.m);
  return {std::move(eig.vectors), std::move(eig.values)};
}

namespace detail {

// Shared guard: eigenvalues below cond_tol * max are rejected, never clamped
// (clamping would silently change the capacity).
inline void check_conditioning(const GramSpectral& s, double cond_tol,
                               const PulseConfig& cfg) {
  const double wmax = s.values(0);
  const double wmin = s.values(s.values.size() - 1);
  if (!(wmax > 0) || wmin < cond_tol * wmax) {
    throw IllConditioned(
        "gram: condition number exceeds cap (min eig " + std::to_string(wmin) +
        ", max eig " + std::to_string(wmax) + "); delta*(1+beta) = " +
        std::to_string(cfg.compression()) +
        " is too close to or below 1 for this N");
  }
}

inline MatrixXd apply_power(const GramSpectral& s, double p) {
  return s.vectors * s.values.array().pow(p).matrix().asDiagonal() *
         s.vectors.transpose();
}

}  // namespace detail

constexpr double kGramCondTol = 1e-12;  // cap: condition number 1e12

inline MatrixXd inverse(const GramMatrix& g, double cond_tol = kGramCondTol) {
  GramSpectral s = spectral_decompose(g);
  detail::check_conditioning(s, cond_tol, g.config);
  return detail::apply_power(s, -1.0);
}

inline MatrixXd inv_sqrt(const GramMatrix& g, double cond_tol = kGramCondTol) {
  GramSpectral s = spectral_decompose(g);
  detail::check_conditioning(s, cond_tol, g.config);
  return detail::apply_power(s, -0.5);
}

// Decomposition-reusing variants for callers that already paid for it.
inline MatrixXd inverse(const GramSpectral& s, const PulseConfig& cfg,
                        double cond_tol = kGramCondTol) {
  detail::check_conditioning(s, cond_tol, cfg);
  return detail::apply_power(s, -1.0);
}

inline MatrixXd inv_sqrt(const GramSpectral& s, const PulseConfig& cfg,
                         double cond_tol = kGramCondTol) {
  detail::check_conditioning(s, cond_tol, cfg);
  return detail::apply_power(s, -0.5);
}

}  // namespace ftn
