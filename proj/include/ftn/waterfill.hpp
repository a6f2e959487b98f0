#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

#include "ftn/errors.hpp"
#include "ftn/linalg.hpp"

namespace ftn {

struct WaterfillSolution {
  double mu = 0.0;             // Lagrange multiplier, in the paper form of each solver
  VectorXd allocations;        // per-component powers, >= 0
  double budget_used = 0.0;    // total allocated, in the caller's budget units
  std::vector<int> active_set; // indices with strictly positive allocation
};

namespace detail {

// All three solvers reduce to: find level l with sum_i w_i * (l - theta_i)+
// equal to the budget. theta are the activation thresholds, w the quadrature
// weights (1 for the vector solvers, 1/M for the spectral grid).

// Exact active-set solve: sort thresholds, grow the active prefix until the
// implied level sits between consecutive thresholds.
inline double level_exact(std::vector<double> theta, std::vector<double> w,
                          double budget) {
  std::vector<std::size_t> order(theta.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return theta[a] < theta[b]; });
  double wsum = 0.0, wtsum = 0.0, level = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    wsum += w[order[k]];
    wtsum += w[order[k]] * theta[order[k]];
    const double cand = (budget + wtsum) / wsum;
    if (cand > theta[order[k]]) level = cand;  // keep the largest feasible prefix
  }
  return level;
}

// Bisection on the monotone budget-vs-level map, then one exact re-solve of
// the level on the settled active set so the budget lands at roundoff.
inline double level_bisect(const std::vector<double>& theta,
                           const std::vector<double>& w, double budget) {
  auto spent = [&](double level) {
    double acc = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i)
      if (level > theta[i]) acc += w[i] * (level - theta[i]);
    return acc;
  };
  double lo = 0.0;
  double hi = *std::max_element(theta.begin(), theta.end()) +
              budget / std::accumulate(w.begin(), w.end(), 0.0);
  while (spent(hi) < budget) hi *= 2.0;  // bracket expansion (roundoff guard)
  double mid = hi;
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double s = spent(mid);
    if (std::abs(s - budget) <= 1e-12 * budget) break;
    (s < budget ? lo : hi) = mid;
  }
  // Exact level on the active set the bisection settled on.
  double wsum = 0.0, wtsum = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i)
    if (mid > theta[i]) {
      wsum += w[i];
      wtsum += w[i] * theta[i];
    }
  if (wsum > 0.0) {
    const double exact = (budget + wtsum) / wsum;
    if (std::abs(spent(exact) - budget) <= std::abs(spent(mid) - budget))
      return exact;
  }
  return mid;
}

}  // namespace detail

// Spatial waterfilling, alpha_i = sigma0^2 (1/mu - 1/tau_i)+ with
// sum alpha_i = budget. Exact sort-and-solve; tau_i <= 0 entries are legal
// and always receive zero power.
inline WaterfillSolution classic_waterfill(const VectorXd& gains, double noise,
                                           double budget) {
  if (!(noise > 0)) throw Error("waterfill: noise power must be positive");
  if (!(budget > 0)) throw Error("waterfill: budget must be positive");
  std::vector<double> theta, w;
  std::vector<int> idx;
  for (int i = 0; i < gains.size(); ++i)
    if (gains(i) > 0) {
      theta.push_back(noise / gains(i));
      w.push_back(1.0);
      idx.push_back(i);
    }
  if (theta.empty()) throw NoPositiveGain("waterfill: no positive gain");

  const double level = detail::level_exact(theta, w, budget);  // sigma0^2/mu
  WaterfillSolution sol;
  sol.mu = noise / level;
  sol.allocations = VectorXd::Zero(gains.size());
  for (std::size_t t = 0; t < theta.size(); ++t)
    if (level > theta[t]) {
      sol.allocations(idx[t]) = level - theta[t];
      sol.active_set.push_back(idx[t]);
    }
  std::sort(sol.active_set.begin(), sol.active_set.end());
  sol.budget_used = sol.allocations.sum();
  return sol;
}

// Weighted waterfilling for the finite-N frequency-selective problem:
//   lambda_i = max(deltaT ln2 / (mu psi_i) - sigma0^2/phi_i, 0)
// under (1/(N deltaT)) sum_i psi_i lambda_i = P. n_symbols supplies the N in
// that scale (the vector length alone is L*N with L unknown here).
inline WaterfillSolution weighted_waterfill(const VectorXd& psi,
                                            const VectorXd& phi, double noise,
                                            double delta_t, double power,
                                            int n_symbols) {
  if (psi.size() != phi.size())
    throw DimensionMismatch("waterfill: psi/phi size mismatch");
  if (!(noise > 0)) throw Error("waterfill: noise power must be positive");
  if (!(delta_t > 0)) throw Error("waterfill: deltaT must be positive");
  if (!(power > 0)) throw Error("waterfill: power must be positive");
  if (n_symbols < 1) throw Error("waterfill: n_symbols must be >= 1");
  for (int i = 0; i < psi.size(); ++i)
    if (!(psi(i) > 0)) throw NonPositiveWeight("waterfill: psi <= 0");

  // In level form: psi_i lambda_i = (s - theta_i)+ with theta_i =
  // psi_i sigma0^2 / phi_i and s = deltaT ln2 / mu.
  const double budget = n_symbols * delta_t * power;
  std::vector<double> theta, w;
  std::vector<int> idx;
  for (int i = 0; i < phi.size(); ++i)
    if (phi(i) > 0) {
      theta.push_back(psi(i) * noise / phi(i));
      w.push_back(1.0);
      idx.push_back(i);
    }
  if (theta.empty()) throw NoPositiveGain("waterfill: no positive gain");

  const double s = detail::level_bisect(theta, w, budget);
  WaterfillSolution sol;
  sol.mu = delta_t * std::numbers::ln2 / s;
  sol.allocations = VectorXd::Zero(phi.size());
  double weighted_total = 0.0;
  for (std::size_t t = 0; t < theta.size(); ++t)
    if (s > theta[t]) {
      const int i = idx[t];
      sol.allocations(i) = (s - theta[t]) / psi(i);
      weighted_total += s - theta[t];
      sol.active_set.push_back(i);
    }
  std::sort(sol.active_set.begin(), sol.active_set.end());
  sol.budget_used = weighted_total / (n_symbols * delta_t);  // equals P
  return sol;
}

// Joint space-frequency waterfilling on a uniform midpoint grid:
//   phi_i(f_n) = (1/mu - sigma0^2/tau_i(f_n))+,
// one global level, midpoint-quadrature budget (1/M) sum phi = budget
// (the caller passes P*deltaT).
struct SpectralAllocation {
  double mu = 0.0;
  MatrixXd phi;  // M x L, same layout as the modes argument
  double budget_used = 0.0;
};

inline SpectralAllocation spectral_waterfill(const MatrixXd& modes, double noise,
                                             double budget) {
  if (!(noise > 0)) throw Error("waterfill: noise power must be positive");
  if (!(budget > 0)) throw Error("waterfill: budget must be positive");
  const auto m = modes.rows();
  const auto l = modes.cols();
  if (m < 1 || l < 1) throw DimensionMismatch("waterfill: empty mode grid");

  std::vector<double> theta, w;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> idx;
  const double wq = 1.0 / static_cast<double>(m);
  for (Eigen::Index r = 0; r < m; ++r)
    for (Eigen::Index c = 0; c < l; ++c)
      if (modes(r, c) > 0) {
        theta.push_back(noise / modes(r, c));
        w.push_back(wq);
        idx.emplace_back(r, c);
      }
  if (theta.empty())
    throw NoPositiveGain("waterfill: all modes vanish on the grid");

  const double level = detail::level_bisect(theta, w, budget);  // 1/mu
  SpectralAllocation sol;
  sol.mu = 1.0 / level;
  sol.phi = MatrixXd::Zero(m, l);
  for (std::size_t t = 0; t < theta.size(); ++t)
    if (level > theta[t]) sol.phi(idx[t].first, idx[t].second) = level - theta[t];
  sol.budget_used = sol.phi.sum() * wq;
  return sol;
}

}  // namespace ftn
