#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "ftn/gram.hpp"

using namespace ftn;
using Catch::Approx;

TEST_CASE("gram matrix construction", "[gram]") {
  SECTION("orthogonal signaling gives the identity") {
    PulseConfig cfg{0.01, 0.25, 1.0};
    GramMatrix g = build_gram(cfg, 16);
    CHECK((g.m - MatrixXd::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-12);
  }

  SECTION("2x2 entries are pulse correlations") {
    PulseConfig cfg{0.01, 0.5, 0.8};
    GramMatrix g = build_gram(cfg, 2);
    const double g1 = rc_time_sample(0.8 * cfg.t_symbol, cfg);
    CHECK(g.m(0, 0) == 1.0);
    CHECK(g.m(1, 1) == 1.0);
    CHECK(g.m(0, 1) == g1);
    CHECK(g.m(1, 0) == g1);
  }

  SECTION("Toeplitz and symmetric") {
    PulseConfig cfg{0.01, 0.25, 0.9};
    const int n = 24;
    GramMatrix g = build_gram(cfg, n);
    VectorXd samp = g_samples(cfg, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        CHECK(g.m(r, c) == samp(n - 1 + r - c));
        CHECK(g.m(r, c) == g.m(c, r));
      }
  }

  PulseConfig cfg{0.01, 0.25, 0.9};
  CHECK_THROWS_AS(build_gram(cfg, 0), Error);
}

TEST_CASE("gram positive definiteness", "[gram]") {
  SECTION("compression above one keeps the spectrum away from zero") {
    PulseConfig cfg{0.01, 0.5, 0.75};  // compression 1.125
    GramSpectral s = spectral_decompose(build_gram(cfg, 64));
    CHECK(s.values(63) > 0.0);
    CHECK(s.values(63) > 0.05);  // bounded below by min G_d up to O(1/N)
  }

  SECTION("positive semidefinite with positive minimum up to N = 1024") {
    struct Case { double beta, delta; int n; };
    for (auto [beta, delta, n] : std::vector<Case>{{0.25, 0.9, 256},
                                                   {0.5, 0.8, 256},
                                                   {0.25, 0.9, 1024},
                                                   {0.25, 0.8, 1024}}) {
      PulseConfig cfg{0.01, beta, delta};
      GramSpectral s = spectral_decompose(build_gram(cfg, n));
      CHECK(s.values(n - 1) > 0.0);
      CHECK(s.values(0) <= 1.0 / cfg.delta + 1e-9);
    }
  }
}

TEST_CASE("shifted gram", "[gram]") {
  PulseConfig cfg{0.01, 0.5, 0.8};

  SECTION("zero shift reproduces the gram matrix") {
    ShiftedGram s = build_shifted_gram(cfg, 12, 0);
    GramMatrix g = build_gram(cfg, 12);
    CHECK(s.m == g.m);
    CHECK(s.shift == 0);
  }

  SECTION("orthogonal pulse shifts to a subdiagonal") {
    PulseConfig nyq{0.01, 0.25, 1.0};
    ShiftedGram s = build_shifted_gram(nyq, 6, 1);
    for (int r = 0; r < 6; ++r)
      for (int c = 0; c < 6; ++c)
        CHECK(s.m(r, c) == Approx(r - c == 1 ? 1.0 : 0.0).margin(1e-12));
  }

  SECTION("entries follow g[n - m - j]") {
    const int n = 10, j = 3;
    ShiftedGram s = build_shifted_gram(cfg, n, j);
    VectorXd samp = g_samples(cfg, n + j);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        CHECK(s.m(r, c) == samp(n + j - 1 + r - c - j));
  }

  SECTION("column DTFT matches the modulated fold") {
    // For a large matrix, the DTFT of a centered column of G^j approaches
    // G_d(f) e^{-i 2 pi f j}.
    const int n = 2048, j = 3, c = n / 2;
    ShiftedGram s = build_shifted_gram(cfg, n, j);
    const std::complex<double> mi(0.0, -1.0);
    double worst = 0.0;
    for (int i = 0; i <= 30; ++i) {
      const double f = -0.5 + i / 30.0;
      std::complex<double> acc = 0.0;
      for (int r = 0; r < n; ++r)
        acc += s.m(r, c) *
               std::exp(mi * (2.0 * std::numbers::pi * f * double(r - c)));
      const std::complex<double> want =
          folded_spectrum(cfg, f) *
          std::exp(mi * (2.0 * std::numbers::pi * f * double(j)));
      worst = std::max(worst, std::abs(acc - want));
    }
    CHECK(worst < 1e-7);
  }

  CHECK_THROWS_AS(build_shifted_gram(cfg, 4, -1), Error);
  CHECK_THROWS_AS(build_shifted_gram(cfg, 0, 1), Error);
}

TEST_CASE("gram spectral decomposition", "[gram]") {
  SECTION("identity gram decomposes to unit spectrum") {
    PulseConfig cfg{0.01, 0.25, 1.0};
    GramSpectral s = spectral_decompose(build_gram(cfg, 32));
    for (int i = 0; i < 32; ++i) CHECK(s.values(i) == Approx(1.0));
    CHECK((s.vectors * s.vectors.transpose() - MatrixXd::Identity(32, 32))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
  }

  SECTION("2x2 eigenvalues are 1 +- g[1]") {
    PulseConfig cfg{0.01, 0.5, 0.8};
    const double g1 = rc_time_sample(0.8 * cfg.t_symbol, cfg);
    GramSpectral s = spectral_decompose(build_gram(cfg, 2));
    CHECK(s.values(0) == Approx(1.0 + g1));
    CHECK(s.values(1) == Approx(1.0 - g1));
  }

  SECTION("descending order and reconstruction") {
    PulseConfig cfg{0.01, 0.25, 0.9};
    GramMatrix g = build_gram(cfg, 48);
    GramSpectral s = spectral_decompose(g);
    for (int i = 1; i < 48; ++i) CHECK(s.values(i - 1) >= s.values(i));
    MatrixXd rebuilt =
        s.vectors * s.values.asDiagonal() * s.vectors.transpose();
    CHECK((rebuilt - g.m).cwiseAbs().maxCoeff() < 1e-10);
  }

  SECTION("deterministic under degeneracy") {
    PulseConfig cfg{0.01, 0.25, 1.0};  // fully degenerate spectrum
    GramSpectral a = spectral_decompose(build_gram(cfg, 64));
    GramSpectral b = spectral_decompose(build_gram(cfg, 64));
    CHECK(a.vectors == b.vectors);
    CHECK(a.values == b.values);
  }

  SECTION("eigenvalues distribute like the folded spectrum") {
    PulseConfig cfg{0.01, 0.25, 0.9};
    const int n = 256;
    GramSpectral s = spectral_decompose(build_gram(cfg, n));
    FoldedSpectrum fold = folded_spectrum_grid(cfg, n);
    VectorXd eig = s.values;
    VectorXd sym = fold.values;
    std::sort(eig.data(), eig.data() + n);
    std::sort(sym.data(), sym.data() + n);
    double worst = 0.0, mean = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = std::abs(eig(i) - sym(i));
      worst = std::max(worst, d);
      mean += d / n;
    }
    CHECK(worst < 2e-2);
    CHECK(mean < 5e-3);
    // Toeplitz eigenvalues live inside the range of the symbol.
    CHECK(s.values(n - 1) >= folded_spectrum(cfg, 0.5) - 1e-9);
    CHECK(s.values(0) <= folded_spectrum(cfg, 0.0) + 1e-9);
  }

  SECTION("block-diagonal repetition preserves the spectrum") {
    PulseConfig cfg{0.01, 0.5, 0.8};
    const int n = 32, k = 3;
    GramMatrix g = build_gram(cfg, n);
    MatrixXd big = MatrixXd::Zero(k * n, k * n);
    for (int b = 0; b < k; ++b) big.block(b * n, b * n, n, n) = g.m;
    auto eig_big = hermitian_eig(big);
    GramSpectral s = spectral_decompose(g);
    for (int i = 0; i < n; ++i)
      for (int b = 0; b < k; ++b)
        CHECK(eig_big.values(k * i + b) == Approx(s.values(i)).margin(1e-10));
  }
}

TEST_CASE("gram inverse and inverse square root", "[gram]") {
  PulseConfig cfg{0.01, 0.5, 0.8};
  GramMatrix g = build_gram(cfg, 64);

  SECTION("inverse identity") {
    MatrixXd gi = inverse(g);
    CHECK((g.m * gi - MatrixXd::Identity(64, 64)).cwiseAbs().maxCoeff() <
          1e-8);
    CHECK((gi - gi.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  }

  SECTION("inverse square root squares to the inverse") {
    MatrixXd s = inv_sqrt(g);
    MatrixXd gi = inverse(g);
    CHECK((s * s - gi).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((s * g.m * s - MatrixXd::Identity(64, 64)).cwiseAbs().maxCoeff() <
          1e-8);
  }

  SECTION("decomposition-reusing overloads agree") {
    GramSpectral s = spectral_decompose(g);
    CHECK((inverse(s, cfg) - inverse(g)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((inv_sqrt(s, cfg) - inv_sqrt(g)).cwiseAbs().maxCoeff() < 1e-14);
  }

  SECTION("ill-conditioned compressions are rejected, not clamped") {
    PulseConfig tight{0.01, 0.3, 0.7};  // compression 0.91
    GramMatrix bad = build_gram(tight, 256);
    CHECK_THROWS_AS(inverse(bad), IllConditioned);
    CHECK_THROWS_AS(inv_sqrt(bad), IllConditioned);
    // Small N stays above the conditioning floor even below compression 1.
    GramMatrix small = build_gram(tight, 32);
    CHECK_NOTHROW(inverse(small));
  }
}
