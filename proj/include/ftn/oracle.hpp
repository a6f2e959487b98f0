#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

#include "ftn/capacity_freq.hpp"
#include "ftn/capacity_time.hpp"
#include "ftn/channel.hpp"
#include "ftn/errors.hpp"
#include "ftn/gram.hpp"
#include "ftn/linalg.hpp"
#include "ftn/pulse.hpp"

namespace ftn {

inline constexpr int kOracleSizeCap = 32;  // max L*N for the brute-force search

struct OracleOptions {
  int max_iters = 5000;
  double rel_tol = 1e-10;  // relative objective improvement threshold
  double armijo_c1 = 1e-4;
  double shrink = 0.5;      // ladder ratio between trial steps
  int grow_octaves = 4;     // largest trial step = 2^grow_octaves * base
  int max_backtracks = 50;  // trial steps per iteration
  int strikes = 3;          // consecutive sub-tol improvements before polishing
  // Linearization-gap thresholds, relative to max(1, |f|): converged outright
  // below gap_tol; a search that exhausts float granularity still counts as
  // converged below exhaust_gap.
  double gap_tol = 1e-8;
  double exhaust_gap = 1e-6;
  int face_iters = 400;      // inner iterations for the face polish
  int polish_cooldown = 25;  // outer iterations between polish attempts
};

struct OracleResult {
  double bits_per_channel_use = 0.0;
  double bits_per_s_per_hz = 0.0;
  MatrixXcd sigma;           // optimizing covariance (LN x LN)
  int iterations = 0;
  bool converged = false;
  double trace_residual = 0.0;  // |tr(M Sigma) - budget| / budget
  double last_step_norm = 0.0;  // ||Sigma_{t+1} - Sigma_t||_F at exit
  // ||project(Sigma + t grad) - Sigma||_F / (t ||grad||) at a small probe
  // step t; near zero at a KKT point.
  double projection_residual = 0.0;
  // Final linearization gap max_X <grad, X - Sigma> over the feasible set:
  // by concavity an upper bound (in bits) on the remaining suboptimality.
  double duality_gap = 0.0;
};

namespace detail {

// Project onto {Sigma PSD, tr(W Sigma) = budget} approximately: hermitize,
// clip negative eigenvalues, rescale the weighted trace.
inline MatrixXcd oracle_project(const MatrixXcd& sigma, const MatrixXcd& w,
                                double budget) {
  MatrixXcd sym = 0.5 * (sigma + sigma.adjoint());
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(sym);
  VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  MatrixXcd psd =
      es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
  const double tr = (w.cwiseProduct(psd.conjugate())).sum().real();
  if (!(tr > 0)) {
    // Degenerate projection: restart from the feasible center.
    MatrixXcd center = MatrixXcd::Identity(psd.rows(), psd.cols());
    return center * (budget / w.real().trace());
  }
  return psd * (budget / tr);
}

// Exact Euclidean projection onto the same set: S = (X - theta W)^+ with
// theta chosen so the weighted trace meets the budget (the KKT form of the
// projection). Unlike the rescale above, the shift drives modes exactly to
// zero, so ascent through it can leave the PSD boundary cleanly. Used by the
// polish phase.
inline MatrixXcd oracle_exact_project(const MatrixXcd& sigma,
                                      const MatrixXcd& w, double budget) {
  const MatrixXcd sym = 0.5 * (sigma + sigma.adjoint());
  const auto shifted = [&](double theta) -> MatrixXcd {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(sym - theta * w);
    VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
  };
  const auto w_trace = [&](const MatrixXcd& s) {
    return (w.cwiseProduct(s.conjugate())).sum().real();
  };

  double lo = 0.0;
  double h_lo = w_trace(shifted(lo));
  if (std::abs(h_lo - budget) <= 1e-14 * budget) return shifted(lo);
  // Bracket the root; h is decreasing in theta (W is positive definite).
  const double unit = budget / std::max(w.real().trace(), 1e-300);
  double hi;
  if (h_lo > budget) {
    hi = unit;
    while (w_trace(shifted(hi)) > budget && hi < 1e18 * unit) hi *= 2.0;
  } else {
    hi = -unit;
    while (w_trace(shifted(hi)) < budget && hi > -1e18 * unit) hi *= 2.0;
    std::swap(lo, hi);
  }
  for (int i = 0; i < 90; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (w_trace(shifted(mid)) > budget)
      lo = mid;
    else
      hi = mid;
  }
  MatrixXcd s = shifted(0.5 * (lo + hi));
  const double tr = w_trace(s);
  if (tr > 0) s *= budget / tr;  // wash the residual bisection error
  return s;
}

inline double oracle_objective_bits(const MatrixXcd& phi,
                                    const MatrixXcd& sigma, double noise,
                                    int n) {
  MatrixXcd arg = phi * sigma * phi.adjoint() / noise;
  return log2det_identity_plus(0.5 * (arg + arg.adjoint())) / n;
}

// Gradient (in bits per channel use per unit Sigma) of the oracle objective.
inline MatrixXcd oracle_gradient(const MatrixXcd& phi, const MatrixXcd& sigma,
                                 double noise, int n) {
  MatrixXcd a = phi * sigma * phi.adjoint() / noise;
  a = 0.5 * (a + a.adjoint());
  MatrixXcd inner =
      (MatrixXcd::Identity(a.rows(), a.cols()) + a).llt().solve(MatrixXcd(phi));
  MatrixXcd grad = phi.adjoint() * inner / (noise * n * std::numbers::ln2);
  return 0.5 * (grad + grad.adjoint());
}

struct LadderOutcome {
  bool accepted = false;  // some candidate improved the objective
  bool armijo = false;    // the accepted candidate passed the Armijo test
  double f = 0.0;
  MatrixXcd cand;
};

// Backtracking line search along dir over a geometric step ladder anchored
// at budget/||dir||, each candidate pushed through the projection. First
// step passing Armijo wins; otherwise the best plain improvement.
template <class Proj>
inline LadderOutcome ladder_search(const MatrixXcd& phi, const Proj& project,
                                   double budget, double noise, int n,
                                   const MatrixXcd& sigma, double f0,
                                   const MatrixXcd& grad, const MatrixXcd& dir,
                                   double dir_norm,
                                   const OracleOptions& opts) {
  LadderOutcome out;
  out.f = f0;
  if (!(dir_norm > 0)) return out;
  double step = std::ldexp(budget / dir_norm, opts.grow_octaves);
  for (int bt = 0; bt < opts.max_backtracks; ++bt, step *= opts.shrink) {
    MatrixXcd cand = project(sigma + step * dir);
    const double f_new = oracle_objective_bits(phi, cand, noise, n);
    const double gain =
        (grad.cwiseProduct((cand - sigma).conjugate())).sum().real();
    if (f_new >= f0 + opts.armijo_c1 * gain && f_new > f0) {
      out.accepted = true;
      out.armijo = true;
      out.f = f_new;
      out.cand = std::move(cand);
      return out;
    }
    if (f_new > out.f) {
      out.accepted = true;
      out.f = f_new;
      out.cand = std::move(cand);
    }
  }
  return out;
}

// One projected-ascent pass: reduced gradient (the component tangent to the
// trace plane, whose vanishing is the interior KKT condition) first, the raw
// gradient as a fallback for iterates pinned against the PSD boundary.
template <class Proj>
inline LadderOutcome pga_pass(const MatrixXcd& phi, const MatrixXcd& w,
                              double w_sq, const Proj& project, double budget,
                              double noise, int n, const MatrixXcd& sigma,
                              double f0, const MatrixXcd& grad,
                              const OracleOptions& opts) {
  const double grad_norm = grad.norm();
  const double w_coef =
      (grad.cwiseProduct(w.conjugate())).sum().real() / w_sq;
  MatrixXcd tangent = grad - w_coef * w;
  const double tangent_norm = tangent.norm();

  if (tangent_norm > 1e-14 * grad_norm) {
    LadderOutcome t = ladder_search(phi, project, budget, noise, n, sigma, f0,
                                    grad, tangent, tangent_norm, opts);
    if (t.armijo) return t;
    LadderOutcome g = ladder_search(phi, project, budget, noise, n, sigma, f0,
                                    grad, grad, grad_norm, opts);
    return (g.f > t.f) ? g : t;
  }
  return ladder_search(phi, project, budget, noise, n, sigma, f0, grad, grad,
                       grad_norm, opts);
}

// Re-solve restricted to the current positive eigenspace of Sigma, augmented
// by the direction the linearized objective wants mass in (an active-set
// pivot). Inside the face the exact shifted projection lets modes leave the
// PSD boundary cleanly, so the restricted ascent runs to float-level
// stationarity. Lifts the face solution back and accepts it only if it
// improves; the outer linearization gap still certifies the result.
inline bool face_polish(const MatrixXcd& phi, const MatrixXcd& w, double budget,
                        double noise, int n, MatrixXcd& sigma, double& f,
                        const OracleOptions& opts,
                        const VectorXcd* extra_dir = nullptr) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(
      MatrixXcd(0.5 * (sigma + sigma.adjoint())));
  const VectorXd ev = es.eigenvalues();
  const double top = ev.maxCoeff();
  if (!(top > 0)) return false;
  std::vector<int> keep;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) > 1e-12 * top) keep.push_back(static_cast<int>(i));
  if (keep.empty()) return false;
  int r = static_cast<int>(keep.size());

  MatrixXcd v(sigma.rows(), r + (extra_dir ? 1 : 0));
  VectorXd d = VectorXd::Zero(v.cols());
  for (int i = 0; i < r; ++i) {
    v.col(i) = es.eigenvectors().col(keep[i]);
    d(i) = ev(keep[i]);
  }
  if (extra_dir) {
    VectorXcd perp =
        *extra_dir - v.leftCols(r) * (v.leftCols(r).adjoint() * *extra_dir);
    const double norm = perp.norm();
    if (norm > 1e-8 * extra_dir->norm()) {
      v.col(r) = perp / norm;
      ++r;
    } else {
      v.conservativeResize(Eigen::NoChange, r);
      d.conservativeResize(r);
    }
  }
  MatrixXcd phi_face = phi * v;
  MatrixXcd w_face = v.adjoint() * w * v;
  w_face = 0.5 * (w_face + w_face.adjoint());
  const double w_face_sq = w_face.squaredNorm();
  const auto project = [&](const MatrixXcd& x) {
    return oracle_exact_project(x, w_face, budget);
  };

  MatrixXcd m = project(d.asDiagonal());
  double f_face = oracle_objective_bits(phi_face, m, noise, n);
  for (int it = 0; it < opts.face_iters; ++it) {
    MatrixXcd grad = oracle_gradient(phi_face, m, noise, n);
    if (!(grad.norm() > 0)) break;
    LadderOutcome step = pga_pass(phi_face, w_face, w_face_sq, project, budget,
                                  noise, n, m, f_face, grad, opts);
    if (!step.accepted) break;
    m = std::move(step.cand);
    f_face = step.f;
  }
  if (!(f_face > f)) return false;

  MatrixXcd lifted = oracle_project(v * m * v.adjoint(), w, budget);
  const double f_lifted = oracle_objective_bits(phi, lifted, noise, n);
  if (!(f_lifted > f)) return false;
  sigma = std::move(lifted);
  f = f_lifted;
  return true;
}

}  // namespace detail

// Direct numerical maximization of (1/N) log2 det(I + Phi Sigma Phi^dag /
// sigma0^2) over PSD Sigma with tr((I_L (x) G) Sigma) = N P deltaT, by
// projected gradient ascent with Armijo backtracking; stalls against the PSD
// boundary fall back to feasible segments toward the best rank-one point of
// the linearized objective and to an exact-projection polish on the active
// face. The linearization gap certifies (by concavity) how far the value can
// sit below the optimum. Independent of the waterfilling solutions; used to
// certify them.
inline OracleResult brute_force_capacity(const FsChannel& ch, double p,
                                         double noise, const PulseConfig& cfg,
                                         int n,
                                         const OracleOptions& opts = {}) {
  FsOperators ops = build_fs_operators(ch, cfg, n);
  const Eigen::Index dim = ops.phi.cols();
  if (dim > kOracleSizeCap)
    throw DimensionCap("oracle: L*N = " + std::to_string(dim) + " exceeds " +
                       std::to_string(kOracleSizeCap));
  if (!(p > 0) || !(noise > 0))
    throw Error("oracle: P and sigma0^2 must be positive");

  const MatrixXd m_w = kron(MatrixXd::Identity(ch.l_tx, ch.l_tx), ops.gram.m);
  const MatrixXcd w_c = m_w.cast<cplx>();
  const double w_sq = m_w.squaredNorm();
  const double budget = n * p * cfg.delta * cfg.t_symbol;
  const auto project = [&](const MatrixXcd& x) {
    return detail::oracle_project(x, w_c, budget);
  };

  OracleResult res;
  res.sigma = MatrixXcd::Identity(dim, dim) * (budget / m_w.trace());
  double f = detail::oracle_objective_bits(ops.phi, res.sigma, noise, n);
  MatrixXcd tangent;
  double tangent_norm = 0.0;
  int strikes = 0;
  int cooldown = 0;
  int sub_tol_run = 0;  // consecutive iterations with sub-tol improvement

  for (int it = 0; it < opts.max_iters; ++it) {
    res.iterations = it + 1;
    MatrixXcd grad = detail::oracle_gradient(ops.phi, res.sigma, noise, n);
    const double grad_norm = grad.norm();
    if (!(grad_norm > 0)) {
      res.converged = true;
      break;
    }
    const double w_coef = (grad.cwiseProduct(m_w)).sum().real() / w_sq;
    tangent = grad - w_coef * w_c;
    tangent_norm = tangent.norm();

    // Best rank-one feasible point for the linearized objective: the top
    // generalized eigenvector of (grad, W) carrying the whole budget.
    Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXcd> ges(grad, w_c);
    const VectorXcd v = ges.eigenvectors().col(dim - 1);
    const double v_w = (v.adjoint() * w_c * v).real()(0, 0);
    MatrixXcd vertex = (budget / v_w) * (v * v.adjoint());
    vertex = 0.5 * (vertex + vertex.adjoint());
    const double gap =
        (grad.cwiseProduct((vertex - res.sigma).conjugate())).sum().real();
    res.duality_gap = gap;
    const double f_scale = std::max(1.0, std::abs(f));
    if (gap <= opts.gap_tol * f_scale) {
      res.converged = true;
      break;
    }

    detail::LadderOutcome step = detail::pga_pass(
        ops.phi, w_c, w_sq, project, budget, noise, n, res.sigma, f, grad,
        opts);
    if (!step.armijo) {
      // The segment toward the vertex stays feasible by convexity, so search
      // along it without any projection; its directional derivative is the
      // gap itself.
      double eta = 1.0;
      for (int bt = 0; bt < opts.max_backtracks; ++bt, eta *= opts.shrink) {
        MatrixXcd cand = res.sigma + eta * (vertex - res.sigma);
        const double f_new =
            detail::oracle_objective_bits(ops.phi, cand, noise, n);
        if (f_new >= f + opts.armijo_c1 * eta * gap && f_new > f) {
          step.accepted = true;
          step.armijo = true;
          step.f = f_new;
          step.cand = std::move(cand);
          break;
        }
        if (f_new > step.f) {
          step.accepted = true;
          step.f = f_new;
          step.cand = std::move(cand);
        }
      }
    }
    if (!step.accepted) {
      bool polished = false;
      while (detail::face_polish(ops.phi, w_c, budget, noise, n, res.sigma, f,
                                 opts, &v))
        polished = true;
      if (polished) {
        strikes = 0;
        sub_tol_run = 0;
        continue;
      }
      // Nothing improves at any scale along any direction: float-level
      // stationarity. Converged if the certificate is tight enough.
      res.converged = gap <= opts.exhaust_gap * f_scale;
      break;
    }

    res.last_step_norm = (step.cand - res.sigma).norm();
    const double improvement = step.f - f;
    res.sigma = std::move(step.cand);
    f = step.f;
    if (cooldown > 0) --cooldown;
    if (improvement < opts.rel_tol * std::max(1.0, std::abs(f))) {
      ++sub_tol_run;
      if (++strikes >= opts.strikes && cooldown == 0) {
        bool polished = false;
        while (detail::face_polish(ops.phi, w_c, budget, noise, n, res.sigma,
                                   f, opts, &v))
          polished = true;
        strikes = 0;
        cooldown = opts.polish_cooldown;
        if (polished) sub_tol_run = 0;
      }
      if (sub_tol_run >= 2 * opts.polish_cooldown) {
        // Sustained float-level dribble across polish attempts; stop on the
        // certificate.
        res.converged = res.duality_gap <= opts.exhaust_gap * f_scale;
        break;
      }
    } else {
      strikes = 0;
      sub_tol_run = 0;
    }
  }

  res.bits_per_channel_use = f;
  res.bits_per_s_per_hz = f / cfg.compression();
  res.trace_residual =
      std::abs((w_c * res.sigma).trace().real() - budget) / budget;
  if (!res.converged && res.iterations >= opts.max_iters &&
      res.duality_gap <= opts.exhaust_gap * std::max(1.0, std::abs(f)))
    res.converged = true;
  if (tangent_norm > 0) {
    const double t = 1e-6 * budget / tangent_norm;
    MatrixXcd probe =
        detail::oracle_project(res.sigma + t * tangent, w_c, budget);
    res.projection_residual = (probe - res.sigma).norm() / (t * tangent_norm);
  }
  return res;
}

inline OracleResult brute_force_capacity(const FlatChannel& ch, double p,
                                         double noise, const PulseConfig& cfg,
                                         int n,
                                         const OracleOptions& opts = {}) {
  return brute_force_capacity(as_fs(ch), p, noise, cfg, n, opts);
}

struct SzegoPoint {
  int n = 0;
  double finite_bits = 0.0;  // (1/N) sum log2(1 + c w_l / sigma0^2)
  double error = 0.0;        // |finite - limit|
};

struct SzegoTable {
  double limit_bits = 0.0;
  std::vector<SzegoPoint> points;
  bool decreasing = false;  // strictly decreasing error along the N list
};

// Equal-power Szego diagnostic: compares the finite-N eigenvalue average of
// log2(1 + c phi_l / sigma0^2) over eig(Phi^dag Phi) against its spectral
// limit, for an increasing list of block lengths.
inline SzegoTable szego_convergence(const FsChannel& ch, double p, double noise,
                                    const PulseConfig& cfg,
                                    const std::vector<int>& n_list,
                                    int m = 2048) {
  if (n_list.empty()) throw Error("szego: need at least one block length");
  for (std::size_t i = 1; i < n_list.size(); ++i)
    if (n_list[i] <= n_list[i - 1])
      throw Error("szego: block lengths must be strictly increasing");
  if (m < 512) throw Error("szego: limit grid must have M >= 512");

  const double c = p * cfg.delta * cfg.t_symbol / ch.l_tx;

  SzegoTable table;
  {
    const VectorXd grid = midpoint_grid(m);
    ChannelSpectrum sp = spectrum_matrix(ch, grid);
    double nats = 0.0;
    for (int i = 0; i < m; ++i) {
      const double gd = folded_spectrum(cfg, grid(i));
      for (int s = 0; s < ch.l_tx; ++s)
        nats += std::log1p(c * gd * sp.tau(i, s) / noise);
    }
    table.limit_bits = nats / (m * std::numbers::ln2);
  }

  for (int n : n_list) {
    VectorXd w = phi_gram_eigenvalues(ch, cfg, n);
    double nats = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i)
      nats += std::log1p(c * std::max(w(i), 0.0) / noise);
    SzegoPoint pt;
    pt.n = n;
    pt.finite_bits = nats / (n * std::numbers::ln2);
    pt.error = std::abs(pt.finite_bits - table.limit_bits);
    table.points.push_back(pt);
  }

  table.decreasing = true;
  for (std::size_t i = 1; i < table.points.size(); ++i)
    if (!(table.points[i].error < table.points[i - 1].error))
      table.decreasing = false;
  return table;
}

}  // namespace ftn
