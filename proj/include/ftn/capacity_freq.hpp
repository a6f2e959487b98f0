#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "ftn/channel.hpp"
#include "ftn/errors.hpp"
#include "ftn/linalg.hpp"
#include "ftn/pulse.hpp"
#include "ftn/waterfill.hpp"

namespace ftn {

// Joint space-frequency waterfilling solution on a midpoint grid.
struct SpectralSolution {
  VectorXd grid;             // M normalized frequencies (endpoints excluded)
  VectorXd g_d;              // folded spectrum at each point
  MatrixXd tau;              // M x L eigenmodes, descending within a row
  MatrixXd phi;              // M x L eigenspectrum (power per mode)
  std::vector<MatrixXcd> v;  // per-frequency eigenbasis of Z(f_n)
  double mu = 0.0;
  double bits_per_channel_use = 0.0;
  double bits_per_s_per_hz = 0.0;
  PulseConfig config;
  double power = 0.0;
  double noise = 1.0;
  int k_rx = 0, l_tx = 0, j_taps = 0;
};

namespace detail {

inline double spectral_objective_bits(const MatrixXd& tau, const MatrixXd& phi,
                                      double noise) {
  double nats = 0.0;
  for (Eigen::Index r = 0; r < tau.rows(); ++r)
    for (Eigen::Index c = 0; c < tau.cols(); ++c)
      nats += std::log1p(phi(r, c) * tau(r, c) / noise);
  return nats / (tau.rows() * std::numbers::ln2);
}

inline SpectralSolution spectral_solve(const FsChannel& ch, double p,
                                       double noise, const PulseConfig& cfg,
                                       int m) {
  SpectralSolution sol;
  sol.grid = midpoint_grid(m);
  ChannelSpectrum sp = spectrum_matrix(ch, sol.grid);
  sol.tau = std::move(sp.tau);
  sol.v = std::move(sp.v);
  sol.g_d.resize(m);
  for (int i = 0; i < m; ++i) sol.g_d(i) = folded_spectrum(cfg, sol.grid(i));

  if ((sol.tau.array() > 0.0).any()) {
    SpectralAllocation alloc =
        spectral_waterfill(sol.tau, noise, p * cfg.delta * cfg.t_symbol);
    sol.mu = alloc.mu;
    sol.phi = std::move(alloc.phi);
  } else {
    // Zero channel: nothing to allocate, capacity 0.
    sol.mu = std::numeric_limits<double>::infinity();
    sol.phi = MatrixXd::Zero(m, ch.l_tx);
  }
  sol.bits_per_channel_use = spectral_objective_bits(sol.tau, sol.phi, noise);
  sol.bits_per_s_per_hz = sol.bits_per_channel_use / cfg.compression();
  sol.config = cfg;
  sol.power = p;
  sol.noise = noise;
  sol.k_rx = ch.k_rx;
  sol.l_tx = ch.l_tx;
  sol.j_taps = ch.j_taps;
  return sol;
}

}  // namespace detail

// Asymptotic (N -> infinity) FS capacity via the Szego limit: waterfill the
// per-frequency eigenmodes tau_i(f_n) with budget P*delta*T, then integrate
// by the midpoint rule. `grid_check_tol` > 0 re-solves at 2M and raises
// GridTooCoarse if the capacity moves by more than that relative amount.
inline SpectralSolution fs_capacity_spectral(const FsChannel& ch, double p,
                                             double noise,
                                             const PulseConfig& cfg,
                                             int m = 1024,
                                             double grid_check_tol = 1e-3) {
  cfg.validate();
  if (!cfg.well_conditioned())
    throw MazoRegion("spectral capacity: delta*(1+beta) = " +
                     std::to_string(cfg.compression()) + " < 1 is unsupported");
  if (m < 64) throw GridTooCoarse("spectral capacity: grid must have M >= 64");
  if (!(p > 0) || !(noise > 0))
    throw Error("spectral capacity: P and sigma0^2 must be positive");

  SpectralSolution sol = detail::spectral_solve(ch, p, noise, cfg, m);
  if (grid_check_tol > 0) {
    SpectralSolution fine = detail::spectral_solve(ch, p, noise, cfg, 2 * m);
    const double scale =
        std::max(std::abs(sol.bits_per_channel_use), 1e-12);
    if (std::abs(fine.bits_per_channel_use - sol.bits_per_channel_use) >
        grid_check_tol * scale)
      throw GridTooCoarse(
          "spectral capacity: doubling the grid moved the result by more "
          "than the configured tolerance; increase M");
  }
  return sol;
}

struct InputEigenspectrum {
  MatrixXd values;                 // M x L: phi_i(f_n) / G_d(f_n)
  std::vector<bool> flagged;       // grid points with G_d < 1e-6 * max(G_d)
};

// The per-eigenchannel input spectra phi_i(f)/G_d(f): what the transmitter
// actually shapes, amplified wherever the folded spectrum has a dent.
inline InputEigenspectrum input_eigenspectrum(const SpectralSolution& sol) {
  InputEigenspectrum out;
  const double gmax = sol.g_d.maxCoeff();
  out.values.resize(sol.phi.rows(), sol.phi.cols());
  out.flagged.assign(sol.g_d.size(), false);
  for (Eigen::Index i = 0; i < sol.g_d.size(); ++i) {
    if (!(sol.g_d(i) > 0.0))
      throw SpectrumZero(
          "input spectrum: folded spectrum vanishes at interior grid point f=" +
          std::to_string(sol.grid(i)));
    out.flagged[i] = sol.g_d(i) < 1e-6 * gmax;
    out.values.row(i) = sol.phi.row(i) / sol.g_d(i);
  }
  return out;
}

// Power generating matrix S(f_n) = V(f_n) diag(phi(f_n)) V(f_n)^dag.
inline MatrixXcd power_generating_matrix(const SpectralSolution& sol,
                                         Eigen::Index point) {
  if (point < 0 || point >= sol.grid.size())
    throw DimensionMismatch("generating matrix: grid index out of range");
  return sol.v[point] *
         sol.phi.row(point).transpose().asDiagonal().toDenseMatrix().cast<cplx>() *
         sol.v[point].adjoint();
}

// Input generating matrix S_a(f_n) = S(f_n) / G_d(f_n).
inline MatrixXcd input_generating_matrix(const SpectralSolution& sol,
                                         Eigen::Index point) {
  if (point < 0 || point >= sol.grid.size())
    throw DimensionMismatch("generating matrix: grid index out of range");
  if (!(sol.g_d(point) > 0.0))
    throw SpectrumZero("input generating matrix: folded spectrum vanishes at f=" +
                       std::to_string(sol.grid(point)));
  return power_generating_matrix(sol, point) / sol.g_d(point);
}

// Szego limit of the equal-power baseline Sigma_A = cI (c = P deltaT / L):
// integral of sum_j log2(1 + c G_d(f) tau_j(f) / sigma0^2).
inline double equal_power_capacity_spectral(const FsChannel& ch, double p,
                                            double noise,
                                            const PulseConfig& cfg,
                                            int m = 1024) {
  cfg.validate();
  if (!cfg.well_conditioned())
    throw MazoRegion("spectral capacity: delta*(1+beta) = " +
                     std::to_string(cfg.compression()) + " < 1 is unsupported");
  const VectorXd grid = midpoint_grid(m);
  ChannelSpectrum sp = spectrum_matrix(ch, grid);
  const double c = p * cfg.delta * cfg.t_symbol / ch.l_tx;
  double nats = 0.0;
  for (int i = 0; i < m; ++i) {
    const double gd = folded_spectrum(cfg, grid(i));
    for (int s = 0; s < ch.l_tx; ++s)
      nats += std::log1p(c * gd * sp.tau(i, s) / noise);
  }
  return nats / (m * std::numbers::ln2);
}

}  // namespace ftn
