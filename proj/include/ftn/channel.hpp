#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "ftn/errors.hpp"
#include "ftn/linalg.hpp"
#include "ftn/rng.hpp"

namespace ftn {

struct FlatChannel {
  int k_rx = 0;
  int l_tx = 0;
  MatrixXcd h;  // K x L gains
};

// Frequency-selective channel: J taps per antenna link, spaced delta*T.
struct FsChannel {
  int k_rx = 0;
  int l_tx = 0;
  int j_taps = 0;
  std::vector<MatrixXcd> taps;  // taps[j] is the K x L matrix of h^j_{kl}
};

struct ChannelGramian {
  MatrixXcd z;   // H^dagger H, L x L Hermitian PSD
  VectorXd tau;  // eigenvalues, descending
  MatrixXcd v;   // unitary eigenbasis (columns)
};

// Per-frequency channel description on a grid: H(-f_n), Z(f_n) = H^dag H,
// its eigenmodes tau_i(f_n) sorted descending, and the eigenbases.
struct ChannelSpectrum {
  VectorXd grid;
  std::vector<MatrixXcd> h;  // K x L per point
  std::vector<MatrixXcd> z;  // L x L Hermitian PSD per point
  MatrixXd tau;              // M x L, row = grid point, descending across columns
  std::vector<MatrixXcd> v;  // eigenbasis per point
};

inline FlatChannel gen_flat(int k, int l, std::uint64_t seed,
                            std::uint64_t stream = 0) {
  if (k < 1 || l < 1) throw Error("channel: dimensions must be positive");
  Substream rng(seed, stream);
  FlatChannel ch{k, l, MatrixXcd(k, l)};
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < l; ++c) ch.h(r, c) = rng.cgauss(1.0);
  return ch;
}

// Taps are CN(0, 1/(LJ)) by default so each link carries unit total energy
// across taps times 1/L; pass `variance` to override.
inline FsChannel gen_fs(int k, int l, int j, std::uint64_t seed,
                        std::uint64_t stream = 0, double variance = -1.0) {
  if (k < 1 || l < 1 || j < 1) throw Error("channel: dimensions must be positive");
  if (variance < 0.0) variance = 1.0 / (static_cast<double>(l) * j);
  Substream rng(seed, stream);
  FsChannel ch{k, l, j, {}};
  ch.taps.reserve(j);
  for (int t = 0; t < j; ++t) {
    MatrixXcd m(k, l);
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < l; ++c) m(r, c) = rng.cgauss(variance);
    ch.taps.push_back(std::move(m));
  }
  return ch;
}

inline FsChannel as_fs(const FlatChannel& ch) {
  return FsChannel{ch.k_rx, ch.l_tx, 1, {ch.h}};
}

inline ChannelGramian channel_gramian(const FlatChannel& ch) {
  MatrixXcd z = ch.h.adjoint() * ch.h;
  auto eig = hermitian_eig(z);
  return {std::move(z), std::move(eig.values), std::move(eig.vectors)};
}

// H(-f_n): DTFT of the tap sequence of each link, entry (k,m) equal to
// sum_i h^i_{km} e^{+j 2 pi f_n i}. Finite exact sum over the J taps.
inline MatrixXcd link_spectrum(const FsChannel& ch, double f_n) {
  MatrixXcd out = MatrixXcd::Zero(ch.k_rx, ch.l_tx);
  for (int i = 0; i < ch.j_taps; ++i) {
    const double ang = 2.0 * std::numbers::pi * f_n * i;
    out += ch.taps[i] * cplx(std::cos(ang), std::sin(ang));
  }
  return out;
}

inline ChannelSpectrum spectrum_matrix(const FsChannel& ch, const VectorXd& grid) {
  ChannelSpectrum out;
  const auto m = grid.size();
  out.grid = grid;
  out.h.reserve(m);
  out.z.reserve(m);
  out.v.reserve(m);
  out.tau.resize(m, ch.l_tx);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (grid(i) < -0.5 || grid(i) > 0.5)
      throw Error("channel: spectrum grid point outside [-1/2, 1/2]");
    MatrixXcd h = link_spectrum(ch, grid(i));
    MatrixXcd z = h.adjoint() * h;
    auto eig = hermitian_eig(z);
    out.tau.row(i) = eig.values.transpose();
    out.h.push_back(std::move(h));
    out.z.push_back(std::move(z));
    out.v.push_back(std::move(eig.vectors));
  }
  return out;
}

// --- structured-text serialization (bit-exact round trip) ---
//
//   ftn-channel v1; K=2; L=2; J=3
//   <re>,<im>          one line per entry, row-major within each tap block,
//   ...                J blocks of K*L lines
namespace detail {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline void save_channel(const std::string& path, const FsChannel& ch) {
  std::ofstream f(path);
  if (!f) throw Error("channel: cannot open " + path + " for writing");
  f << "ftn-channel v1; K=" << ch.k_rx << "; L=" << ch.l_tx
    << "; J=" << ch.j_taps << "\n";
  for (const auto& tap : ch.taps)
    for (int r = 0; r < ch.k_rx; ++r)
      for (int c = 0; c < ch.l_tx; ++c)
        f << detail::fmt_double(tap(r, c).real()) << ","
          << detail::fmt_double(tap(r, c).imag()) << "\n";
  if (!f) throw Error("channel: write to " + path + " failed");
}

inline void save_channel(const std::string& path, const FlatChannel& ch) {
  save_channel(path, as_fs(ch));
}

inline FsChannel load_channel(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("channel: cannot open " + path);
  std::string header;
  if (!std::getline(f, header)) throw ParseError("channel file: empty file");
  int k = 0, l = 0, j = 0;
  if (std::sscanf(header.c_str(), "ftn-channel v1; K=%d; L=%d; J=%d", &k, &l,
                  &j) != 3)
    throw ParseError("channel file: bad header '" + header + "'");
  if (k < 1 || l < 1 || j < 1)
    throw DimensionMismatch("channel file: non-positive dimensions in header");

  std::vector<cplx> entries;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    double re = 0, im = 0;
    char trail = 0;
    const int got = std::sscanf(line.c_str(), "%lf,%lf %c", &re, &im, &trail);
    if (got != 2) throw ParseError("channel file: bad entry '" + line + "'");
    entries.emplace_back(re, im);
  }
  const std::size_t per_block = static_cast<std::size_t>(k) * l;
  const std::size_t want = per_block * j;
  if (entries.size() != want) {
    if (entries.size() % per_block == 0 && entries.size() < want)
      throw DimensionMismatch("channel file: header says J=" + std::to_string(j) +
                              " but only " +
                              std::to_string(entries.size() / per_block) +
                              " tap blocks present");
    throw ParseError("channel file: expected " + std::to_string(want) +
                     " entries, found " + std::to_string(entries.size()));
  }

  FsChannel ch{k, l, j, {}};
  ch.taps.reserve(j);
  std::size_t idx = 0;
  for (int t = 0; t < j; ++t) {
    MatrixXcd m(k, l);
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < l; ++c) m(r, c) = entries[idx++];
    ch.taps.push_back(std::move(m));
  }
  return ch;
}

}  // namespace ftn
