#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "ftn/channel.hpp"
#include "ftn/errors.hpp"
#include "ftn/gram.hpp"
#include "ftn/linalg.hpp"
#include "ftn/pulse.hpp"
#include "ftn/waterfill.hpp"

namespace ftn {

struct CapacityReport {
  double bits_per_channel_use = 0.0;
  double bits_per_s_per_hz = 0.0;  // bits_per_channel_use / (delta*(1+beta))
  VectorXd allocations;            // stream powers (alpha_i or lambda*_i)
  double water_level = 0.0;        // mu
  // provenance metadata
  double power = 0.0;   // P
  double noise = 1.0;   // sigma0^2
  double snr_db = 0.0;  // 10 log10(P/sigma0^2)
  PulseConfig config;
  int n_symbols = 0;
  int k_rx = 0, l_tx = 0, j_taps = 0;
  std::uint64_t seed = 0;
};

namespace detail {

inline void require_out_of_mazo(const PulseConfig& cfg) {
  cfg.validate();
  if (!cfg.well_conditioned())
    throw MazoRegion("capacity: delta*(1+beta) = " +
                     std::to_string(cfg.compression()) +
                     " < 1 is outside the supported region");
}

inline CapacityReport make_report(double bits, const VectorXd& alloc, double mu,
                                  double p, double noise, const PulseConfig& cfg,
                                  int n, int k, int l, int j) {
  CapacityReport r;
  r.bits_per_channel_use = bits;
  r.bits_per_s_per_hz = bits / cfg.compression();
  r.allocations = alloc;
  r.water_level = mu;
  r.power = p;
  r.noise = noise;
  r.snr_db = 10.0 * std::log10(p / noise);
  r.config = cfg;
  r.n_symbols = n;
  r.k_rx = k;
  r.l_tx = l;
  r.j_taps = j;
  return r;
}

}  // namespace detail

// ---------------------------------------------------------------- flat ----

struct FlatCapacityResult {
  CapacityReport report;
  WaterfillSolution waterfill;    // classic, gains tau, budget P*delta*T
  VectorXd tau;                   // eigenvalues of Z = H^dag H, descending
  MatrixXcd v_z;                  // eigenbasis of Z
  MatrixXcd spatial_covariance;   // V_Z diag(alpha) V_Z^dag
};

// Flat MIMO-FTN capacity: waterfill over the spatial eigenmodes with
// per-stream budget P*delta*T, then C = sum log2(1 + alpha_i tau_i/sigma0^2).
inline FlatCapacityResult flat_capacity(const FlatChannel& ch, double p,
                                        double noise, const PulseConfig& cfg) {
  detail::require_out_of_mazo(cfg);
  FlatCapacityResult out;
  ChannelGramian zg = channel_gramian(ch);
  const double budget = p * cfg.delta * cfg.t_symbol;
  out.waterfill = classic_waterfill(zg.tau, noise, budget);
  double nats = 0.0;
  for (int i = 0; i < zg.tau.size(); ++i)
    nats += std::log1p(out.waterfill.allocations(i) * zg.tau(i) / noise);
  const double bits = nats / std::numbers::ln2;
  out.report = detail::make_report(bits, out.waterfill.allocations,
                                   out.waterfill.mu, p, noise, cfg,
                                   /*n=*/0, ch.k_rx, ch.l_tx, /*j=*/1);
  out.spatial_covariance =
      zg.v * out.waterfill.allocations.asDiagonal() * zg.v.adjoint();
  out.tau = std::move(zg.tau);
  out.v_z = std::move(zg.v);
  return out;
}

// The capacity-achieving block covariance (V_Z diag(alpha) V_Z^dag) (x) G^-1.
struct OptimalCovariance {
  MatrixXcd kron_left;  // L x L Hermitian PSD spatial factor
  GramMatrix gram;      // right factor is inverse(gram)

  MatrixXcd assemble(double cond_tol = kGramCondTol) const {
    MatrixXcd ginv = inverse(gram, cond_tol).cast<cplx>();
    return kron(kron_left, ginv);
  }
};

inline OptimalCovariance optimal_covariance(const FlatCapacityResult& r,
                                            const PulseConfig& cfg, int n) {
  return {r.spatial_covariance, build_gram(cfg, n)};
}

constexpr int kBlockFormCap = 64;

// Explicit block-matrix evaluation (1/N) log2 det(I + sigma0^-2 K W) with
// W = Z (x) I_N and K = (V_Z diag(alpha) V_Z^dag) (x) I_N. Exists to verify
// N-independence of the closed form, hence the modest dimension cap.
inline double flat_capacity_blockform(const FlatChannel& ch, double p,
                                      double noise, const PulseConfig& cfg,
                                      int n, int cap = kBlockFormCap) {
  detail::require_out_of_mazo(cfg);
  if (n < 1) throw Error("blockform: N must be >= 1");
  if (n > cap)
    throw DimensionCap("blockform: N = " + std::to_string(n) +
                       " exceeds cap " + std::to_string(cap));
  ChannelGramian zg = channel_gramian(ch);
  WaterfillSolution ws =
      classic_waterfill(zg.tau, noise, p * cfg.delta * cfg.t_symbol);
  const MatrixXcd id_n = MatrixXcd::Identity(n, n);
  MatrixXcd w = kron(zg.z, id_n);
  // det(I + K W) = det(I + K^{1/2} W K^{1/2}); the square root keeps the
  // Cholesky argument Hermitian.
  MatrixXcd k_sqrt =
      kron(MatrixXcd(zg.v * ws.allocations.array().sqrt().matrix().asDiagonal() *
                     zg.v.adjoint()),
           id_n);
  MatrixXcd arg = (k_sqrt * w * k_sqrt) / noise;
  arg = (arg + arg.adjoint()) / 2.0;
  return log2det_identity_plus(arg) / n;
}

// ------------------------------------------------- frequency-selective ----

constexpr int kFsSizeCap = 4096;  // cap on N * max(K, L)

// The dense operators of the finite-N FS problem.
struct FsOperators {
  int n = 0, k = 0, l = 0, j = 0;
  GramMatrix gram;
  GramSpectral gram_eig;
  MatrixXd g_half_inv;  // G^{-1/2}
  MatrixXcd phi;        // (I_K (x) G^{-1/2}) G_H, size KN x LN
};

namespace detail {

inline MatrixXcd assemble_g_h(const FsChannel& ch, const PulseConfig& cfg,
                              int n) {
  const int k = ch.k_rx, l = ch.l_tx;
  MatrixXcd g_h = MatrixXcd::Zero(static_cast<Eigen::Index>(k) * n,
                                  static_cast<Eigen::Index>(l) * n);
  for (int j = 0; j < ch.j_taps; ++j) {
    const ShiftedGram gj = build_shifted_gram(cfg, n, j);
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < l; ++c)
        g_h.block(static_cast<Eigen::Index>(r) * n,
                  static_cast<Eigen::Index>(c) * n, n, n) +=
            ch.taps[j](r, c) * gj.m;
  }
  return g_h;
}

}  // namespace detail

inline FsOperators build_fs_operators(const FsChannel& ch, const PulseConfig& cfg,
                                      int n, int size_cap = kFsSizeCap,
                                      double cond_tol = kGramCondTol) {
  detail::require_out_of_mazo(cfg);
  if (ch.k_rx < 1 || ch.l_tx < 1 || ch.j_taps < 1)
    throw DimensionMismatch("fs: channel dimensions must be positive");
  if (n < ch.j_taps)
    throw Error("fs: N must be >= J (block length shorter than the tap span)");
  if (static_cast<long>(n) * std::max(ch.k_rx, ch.l_tx) > size_cap)
    throw DimensionCap("fs: N*max(K,L) exceeds cap " + std::to_string(size_cap));

  FsOperators ops;
  ops.n = n;
  ops.k = ch.k_rx;
  ops.l = ch.l_tx;
  ops.j = ch.j_taps;
  ops.gram = build_gram(cfg, n);
  ops.gram_eig = spectral_decompose(ops.gram);
  ops.g_half_inv = inv_sqrt(ops.gram_eig, cfg, cond_tol);
  MatrixXcd g_h = detail::assemble_g_h(ch, cfg, n);
  ops.phi.resize(g_h.rows(), g_h.cols());
  for (int r = 0; r < ops.k; ++r)
    ops.phi.middleRows(static_cast<Eigen::Index>(r) * n, n) =
        real_times_complex(ops.g_half_inv,
                           g_h.middleRows(static_cast<Eigen::Index>(r) * n, n));
  return ops;
}

namespace detail {

inline MatrixXcd adjoint_gram(const MatrixXcd& m) {
  MatrixXcd out = MatrixXcd::Zero(m.cols(), m.cols());
  MatrixXcd m_adj = m.adjoint();
  out.selfadjointView<Eigen::Lower>().rankUpdate(m_adj);
  return out.selfadjointView<Eigen::Lower>();
}

inline MatrixXcd phi_gram(const FsOperators& ops) {
  return adjoint_gram(ops.phi);
}

// Phi (I_L (x) G^{-1/2}): the channel operator seen by the whitened input
// A' = (I_L (x) G^{1/2}) A, whose power constraint is a plain trace.
inline MatrixXcd whitened_phi(const FsOperators& ops) {
  const int n = ops.n;
  MatrixXcd w(ops.phi.rows(), ops.phi.cols());
  for (int c = 0; c < ops.l; ++c)
    w.middleCols(static_cast<Eigen::Index>(c) * n, n) = complex_times_real(
        ops.phi.middleCols(static_cast<Eigen::Index>(c) * n, n),
        ops.g_half_inv);
  return w;
}

// Columns of (I_L (x) G^{-1/2}) U: maps whitened eigenvectors back to input
// coordinates.
inline MatrixXcd unwhiten_columns(const FsOperators& ops, const MatrixXcd& u) {
  const int n = ops.n;
  MatrixXcd out(u.rows(), u.cols());
  for (int b = 0; b < ops.l; ++b)
    out.middleRows(static_cast<Eigen::Index>(b) * n, n) = real_times_complex(
        ops.g_half_inv, u.middleRows(static_cast<Eigen::Index>(b) * n, n));
  return out;
}

// Diagonal of U^dag (I_L (x) G) U, one entry per column of u.
inline VectorXd block_gram_quadratic_diag(const MatrixXd& g, const MatrixXcd& u,
                                          int l) {
  const int n = static_cast<int>(g.rows());
  VectorXd psi = VectorXd::Zero(u.cols());
  for (int b = 0; b < l; ++b) {
    const auto rows = u.middleRows(static_cast<Eigen::Index>(b) * n, n);
    MatrixXcd gu = real_times_complex(g, rows);
    psi += (rows.conjugate().cwiseProduct(gu)).colwise().sum().real().transpose();
  }
  return psi;
}

}  // namespace detail

// Eigenvalues of Phi^dag Phi (descending, no eigenvectors) — the finite-N
// spectrum that the Szego limit compresses to G_d(f) Z(f).
inline VectorXd phi_gram_eigenvalues(const FsChannel& ch, const PulseConfig& cfg,
                                     int n, int size_cap = kFsSizeCap) {
  FsOperators ops = build_fs_operators(ch, cfg, n, size_cap);
  return hermitian_eigenvalues_desc(detail::phi_gram(ops));
}

struct FsTimeResult {
  CapacityReport report;
  VectorXd phi;     // modal gains: eigenvalues of G^{-1/2}_blk Phi^dag Phi G^{-1/2}_blk
  VectorXd psi;     // power weight per mode (identically 1 in the whitened frame)
  VectorXd lambda;  // optimal per-mode powers lambda*_i
  // Frame diagonalizing the optimal covariance, Sigma_A = basis diag(lambda)
  // basis^dag. Non-orthonormal (columns are (I_L (x) G^{-1/2}) times an
  // orthonormal set); empty unless requested.
  MatrixXcd basis;
  bool degenerate_modes = false;  // near-equal phi_i present

  MatrixXcd assemble_covariance() const {
    if (basis.size() == 0)
      throw Error("fs time: basis not computed (call with want_basis=true)");
    MatrixXcd s = basis * lambda.asDiagonal() * basis.adjoint();
    return (s + s.adjoint()) / 2.0;
  }
};

// Finite-N FS capacity (time domain). Whitening the input by G^{1/2} per
// antenna turns the weighted power constraint tr((I_L (x) G) Sigma_A) into a
// plain trace, so the optimal covariance diagonalizes the whitened operator
// B = (I (x) G^{-1/2}) Phi^dag Phi (I (x) G^{-1/2}) and the KKT waterfill
// runs over its eigenvalues with unit weights:
//   lambda*_i = (deltaT ln2 / mu - sigma0^2/phi_i)^+,
//   C = (1/N) sum log2(1 + lambda*_i phi_i / sigma0^2).
// For J=1, B = Z (x) I_N and this reduces exactly to the flat closed form;
// as N grows it converges to the spectral-domain limit.
inline FsTimeResult fs_capacity_time(const FsChannel& ch, double p, double noise,
                                     const PulseConfig& cfg, int n,
                                     int size_cap = kFsSizeCap,
                                     bool want_basis = false) {
  FsOperators ops = build_fs_operators(ch, cfg, n, size_cap);
  MatrixXcd b = detail::adjoint_gram(detail::whitened_phi(ops));

  FsTimeResult out;
  if (want_basis) {
    auto eig = hermitian_eig(b);
    out.phi = std::move(eig.values);
    out.basis = detail::unwhiten_columns(ops, eig.vectors);
  } else {
    out.phi = hermitian_eigenvalues_desc(b);
  }
  out.phi = out.phi.cwiseMax(0.0);  // clip eigensolver noise on a PSD operator
  out.psi = VectorXd::Ones(out.phi.size());
  for (int i = 0; i + 1 < out.phi.size(); ++i)
    if (out.phi(i) - out.phi(i + 1) <= 1e-10 * std::max(out.phi(0), 1e-300)) {
      out.degenerate_modes = true;
      break;
    }

  const double delta_t = cfg.delta * cfg.t_symbol;
  WaterfillSolution ws =
      weighted_waterfill(out.psi, out.phi, noise, delta_t, p, n);
  out.lambda = ws.allocations;
  double nats = 0.0;
  for (int i = 0; i < out.phi.size(); ++i)
    nats += std::log1p(out.lambda(i) * out.phi(i) / noise);
  const double bits = nats / (n * std::numbers::ln2);
  out.report = detail::make_report(bits, out.lambda, ws.mu, p, noise, cfg, n,
                                   ch.k_rx, ch.l_tx, ch.j_taps);
  return out;
}

struct MutualInfo {
  double bits_per_channel_use = 0.0;
  double power = 0.0;  // (1/(N deltaT)) tr((I_L (x) G) Sigma_A)
};

// Objective value (1/N) log2 det(I + sigma0^-2 Phi Sigma_A Phi^dag) for a
// caller-supplied covariance, plus its realized power.
inline MutualInfo mutual_info_given_cov(const MatrixXcd& sigma_a,
                                        const FsChannel& ch,
                                        const PulseConfig& cfg, int n,
                                        double noise,
                                        int size_cap = kFsSizeCap) {
  FsOperators ops = build_fs_operators(ch, cfg, n, size_cap);
  const Eigen::Index ln = ops.phi.cols();
  if (sigma_a.rows() != ln || sigma_a.cols() != ln)
    throw DimensionMismatch("mutual_info: Sigma_A must be LN x LN");
  const double scale = sigma_a.norm();
  if ((sigma_a - sigma_a.adjoint()).norm() > 1e-8 * std::max(scale, 1e-300))
    throw NotPSD("mutual_info: Sigma_A is not Hermitian");
  if (scale > 0) {
    VectorXd w = hermitian_eigenvalues_desc((sigma_a + sigma_a.adjoint()) / 2.0);
    if (w(w.size() - 1) < -1e-8 * std::max(w(0), 1e-300))
      throw NotPSD("mutual_info: Sigma_A has a negative eigenvalue");
  }

  MutualInfo out;
  MatrixXcd arg = (ops.phi * sigma_a * ops.phi.adjoint()) / noise;
  arg = (arg + arg.adjoint()) / 2.0;
  out.bits_per_channel_use = log2det_identity_plus(arg) / n;

  double tr = 0.0;
  for (int b = 0; b < ops.l; ++b)
    tr += (ops.gram.m.cast<cplx>() *
           sigma_a.block(static_cast<Eigen::Index>(b) * n,
                         static_cast<Eigen::Index>(b) * n, n, n))
              .trace()
              .real();
  out.power = tr / (n * cfg.delta * cfg.t_symbol);
  return out;
}

// Equal-power baseline Sigma_A = c I with c = N P deltaT / tr(I_L (x) G)
// (= P deltaT / L since g[0] = 1). Evaluated through the eigenvalues of
// Phi^dag Phi.
inline double equal_power_capacity(const FsChannel& ch, double p, double noise,
                                   const PulseConfig& cfg, int n,
                                   int size_cap = kFsSizeCap) {
  FsOperators ops = build_fs_operators(ch, cfg, n, size_cap);
  const double c =
      n * p * cfg.delta * cfg.t_symbol / (ops.l * ops.gram.m.trace());
  VectorXd w = hermitian_eigenvalues_desc(detail::phi_gram(ops));
  double nats = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i)
    nats += std::log1p(c * std::max(w(i), 0.0) / noise);
  return nats / (n * std::numbers::ln2);
}

}  // namespace ftn
