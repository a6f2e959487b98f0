#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "ftn/pulse.hpp"

using namespace ftn;
using Catch::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

// Numerical inverse Fourier transform of the raised-cosine frequency response:
// g(t) = 2 * integral_0^{(1+beta)/2T} G(f) cos(2 pi f t) df, composite Simpson
// on the two smooth pieces split at the passband edge.
double rc_time_quadrature(const PulseConfig& cfg, double t) {
  const double lo = (1.0 - cfg.beta) / (2.0 * cfg.t_symbol);
  const double hi = (1.0 + cfg.beta) / (2.0 * cfg.t_symbol);
  auto simpson = [&](double a, double b) {
    const int n = 20000;
    const double h = (b - a) / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double f = a + i * h;
      const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      acc += w * rc_frequency_response(f, cfg) * std::cos(2.0 * kPi * f * t);
    }
    return acc * h / 3.0;
  };
  return 2.0 * (simpson(0.0, lo) + simpson(lo, hi));
}

}  // namespace

TEST_CASE("raised-cosine frequency response", "[pulse]") {
  PulseConfig cfg{0.01, 0.25, 0.9};

  SECTION("flat passband equals T") {
    CHECK(rc_frequency_response(0.0, cfg) == cfg.t_symbol);
    const double inside = 0.9 * (1.0 - cfg.beta) / (2.0 * cfg.t_symbol);
    CHECK(rc_frequency_response(inside, cfg) == cfg.t_symbol);
    CHECK(rc_frequency_response(-inside, cfg) == cfg.t_symbol);
  }

  SECTION("vanishes at and beyond the band edge") {
    const double edge = (1.0 + cfg.beta) / (2.0 * cfg.t_symbol);
    CHECK(rc_frequency_response(edge, cfg) == Approx(0.0).margin(1e-18));
    CHECK(rc_frequency_response(edge * 1.0001, cfg) == 0.0);
    CHECK(rc_frequency_response(-2.0 * edge, cfg) == 0.0);
  }

  SECTION("rolloff midpoint is half height") {
    const double mid = 1.0 / (2.0 * cfg.t_symbol);
    CHECK(rc_frequency_response(mid, cfg) == Approx(0.5 * cfg.t_symbol));
  }

  SECTION("beta = 0 is a brick wall") {
    PulseConfig brick{0.01, 0.0, 1.0};
    CHECK(rc_frequency_response(0.0, brick) == brick.t_symbol);
    CHECK(rc_frequency_response(0.49 / brick.t_symbol, brick) == brick.t_symbol);
    CHECK(rc_frequency_response(0.51 / brick.t_symbol, brick) == 0.0);
  }
}

TEST_CASE("raised-cosine time samples", "[pulse]") {
  PulseConfig cfg{0.01, 0.25, 0.9};

  SECTION("unit peak at the origin") {
    CHECK(rc_time_sample(0.0, cfg) == Approx(1.0));
  }

  SECTION("Nyquist zero crossings") {
    for (int k = 1; k <= 5; ++k) {
      CHECK(rc_time_sample(k * cfg.t_symbol, cfg) == Approx(0.0).margin(1e-12));
      CHECK(rc_time_sample(-k * cfg.t_symbol, cfg) == Approx(0.0).margin(1e-12));
    }
  }

  SECTION("matches the numerical inverse transform") {
    for (double beta : {0.25, 0.5}) {
      PulseConfig c{0.01, beta, 0.8};
      for (double x : {0.15, 0.8, 1.6, 2.3, 3.7}) {
        const double t = x * c.t_symbol;
        CHECK(rc_time_sample(t, c) ==
              Approx(rc_time_quadrature(c, t)).margin(1e-9));
      }
      // Removable singularity at t = T/(2 beta): the closed form and its
      // immediate neighborhood must agree with the quadrature limit.
      const double ts = c.t_symbol / (2.0 * beta);
      for (double t : {ts, ts * (1.0 + 1e-9), ts * (1.0 - 1e-9)}) {
        CHECK(rc_time_sample(t, c) ==
              Approx(rc_time_quadrature(c, ts)).margin(1e-8));
      }
    }
  }

  SECTION("even in t") {
    CHECK(rc_time_sample(0.37 * cfg.t_symbol, cfg) ==
          rc_time_sample(-0.37 * cfg.t_symbol, cfg));
  }
}

TEST_CASE("correlation sequence g[n]", "[pulse]") {
  SECTION("Nyquist-rate sampling gives a unit impulse") {
    PulseConfig cfg{0.01, 0.25, 1.0};
    VectorXd g = g_samples(cfg, 8);
    REQUIRE(g.size() == 15);
    CHECK(g(7) == Approx(1.0));
    for (int i = 0; i < g.size(); ++i)
      if (i != 7) CHECK(g(i) == Approx(0.0).margin(1e-12));
  }

  SECTION("samples the pulse at multiples of delta T") {
    PulseConfig cfg{0.01, 0.5, 0.8};
    VectorXd g = g_samples(cfg, 6);
    // Not bitwise: FMA contraction may differ between the two call sites.
    for (int i = 0; i < 6; ++i)
      CHECK(g(5 + i) ==
            Approx(rc_time_sample(i * cfg.delta * cfg.t_symbol, cfg))
                .margin(1e-15));
  }

  SECTION("even, normalized, bounded") {
    for (auto [d, b] : std::vector<std::pair<double, double>>{
             {0.9, 0.25}, {0.8, 0.5}, {0.67, 0.5}, {1.0, 0.0}}) {
      PulseConfig cfg{0.01, b, d};
      VectorXd g = g_samples(cfg, 64);
      CHECK(g(63) == Approx(1.0));
      for (int i = 0; i < g.size(); ++i) {
        CHECK(std::abs(g(i)) <= 1.0 + 1e-12);
        CHECK(g(i) == g(g.size() - 1 - i));
      }
    }
  }

  PulseConfig cfg{0.01, 0.25, 0.9};
  CHECK_THROWS_AS(g_samples(cfg, 0), Error);
}

TEST_CASE("folded spectrum", "[pulse]") {
  SECTION("Nyquist rate folds flat to one") {
    PulseConfig cfg{0.01, 0.25, 1.0};
    for (double f : {-0.5, -0.21, 0.0, 0.13, 0.5})
      CHECK(folded_spectrum(cfg, f) == Approx(1.0).margin(1e-12));
  }

  SECTION("critical compression pinches to zero at half rate") {
    PulseConfig cfg{0.01, 0.25, 0.8};  // delta (1 + beta) = 1 exactly
    CHECK(folded_spectrum(cfg, 0.5) == Approx(0.0).margin(1e-16));
    CHECK(folded_spectrum(cfg, -0.5) == Approx(0.0).margin(1e-16));
    CHECK(folded_spectrum(cfg, 0.0) == Approx(1.25));
  }

  SECTION("compression concentrates energy at dc") {
    PulseConfig cfg{0.01, 0.25, 0.9};
    // Only the m = 0 alias survives at f = 0, so G_d(0) = 1/delta > 1.
    CHECK(folded_spectrum(cfg, 0.0) == Approx(1.0 / 0.9));
    CHECK(folded_spectrum(cfg, 0.0) > 1.0);
    CHECK(folded_spectrum(cfg, 0.5) < 1.0);
  }

  SECTION("even and 1-periodic, bitwise") {
    PulseConfig cfg{0.01, 0.5, 0.8};
    // Dyadic frequencies so f + 1 and f - 3 round to nothing at the call site.
    for (double f : {0.03125, 0.171875, 0.359375, 0.4990234375}) {
      CHECK(folded_spectrum(cfg, f) == folded_spectrum(cfg, -f));
      CHECK(folded_spectrum(cfg, f) == folded_spectrum(cfg, f + 1.0));
      CHECK(folded_spectrum(cfg, f) == folded_spectrum(cfg, f - 3.0));
    }
  }

  SECTION("strictly positive for compression above one") {
    for (auto [d, b] : std::vector<std::pair<double, double>>{
             {0.9, 0.25}, {0.8, 0.5}}) {
      PulseConfig cfg{0.01, b, d};
      double lo = 1e300;
      for (int i = 0; i < 4096; ++i)
        lo = std::min(lo, folded_spectrum(cfg, -0.5 + (i + 0.5) / 4096.0));
      CHECK(lo > 0.0);
    }
  }

  SECTION("grid helper evaluates on the midpoint grid") {
    PulseConfig cfg{0.01, 0.25, 0.9};
    FoldedSpectrum fs = folded_spectrum_grid(cfg, 64);
    REQUIRE(fs.grid.size() == 64);
    REQUIRE(fs.values.size() == 64);
    CHECK(fs.grid(0) == Approx(-0.5 + 0.5 / 64.0));
    CHECK(fs.grid(63) == Approx(0.5 - 0.5 / 64.0));
    for (int i = 0; i < 64; ++i)
      CHECK(fs.values(i) == folded_spectrum(cfg, fs.grid(i)));
  }

  SECTION("truncated DTFT of g[n] converges to the fold") {
    PulseConfig cfg{0.01, 0.25, 0.9};
    auto dtft_err = [&](int n) {
      VectorXd g = g_samples(cfg, n);
      double worst = 0.0;
      for (int i = 0; i <= 400; ++i) {
        const double f = -0.5 + i / 400.0;
        double s = g(n - 1);
        for (int k = 1; k < n; ++k)
          s += 2.0 * g(n - 1 + k) * std::cos(2.0 * kPi * f * k);
        worst = std::max(worst, std::abs(s - folded_spectrum(cfg, f)));
      }
      return worst;
    };
    const double e512 = dtft_err(512);
    const double e2048 = dtft_err(2048);
    const double e4096 = dtft_err(4096);
    CHECK(e512 < 1e-6);
    CHECK(e2048 < e512);
    CHECK(e4096 < e2048);
    CHECK(e4096 < 1e-6);
  }
}

TEST_CASE("pulse configuration validation", "[pulse]") {
  auto check = [](double t, double b, double d) {
    PulseConfig{t, b, d}.validate();
  };
  CHECK_NOTHROW(check(0.01, 0.25, 0.9));
  CHECK_THROWS_AS(check(0.0, 0.25, 0.9), Error);
  CHECK_THROWS_AS(check(-1.0, 0.25, 0.9), Error);
  CHECK_THROWS_AS(check(0.01, -0.1, 0.9), Error);
  CHECK_THROWS_AS(check(0.01, 1.1, 0.9), Error);
  CHECK_THROWS_AS(check(0.01, 0.25, 0.0), Error);
  CHECK_THROWS_AS(check(0.01, 0.25, 1.2), Error);

  PulseConfig critical{0.01, 0.25, 0.8};
  PulseConfig tight{0.01, 0.3, 0.7};
  CHECK(critical.compression() == Approx(1.0));
  CHECK(critical.well_conditioned());
  CHECK_FALSE(tight.well_conditioned());
}
