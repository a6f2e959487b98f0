#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ftn/capacity_freq.hpp"
#include "ftn/capacity_time.hpp"
#include "ftn/channel.hpp"
#include "ftn/errors.hpp"
#include "ftn/oracle.hpp"
#include "ftn/pulse.hpp"
#include "ftn/waterfill.hpp"

namespace ftn {

// One bag of knobs for every subcommand; a flat key=value file can preload
// any field and CLI flags override. Everything is echoed into output
// metadata so a result file identifies its own provenance.
struct ExperimentConfig {
  std::string mode = "flat";  // flat | fs
  int k = 2;
  int l = 2;
  int j = 1;
  std::vector<double> snr_db = {0, 5, 10, 15, 20, 25, 30};
  std::vector<double> deltas = {1.0};
  double beta = 0.0;
  double t_symbol = 0.01;
  int n = 1000;       // FS time-domain block length
  int grid = 1024;    // spectral quadrature points
  int realizations = 1;
  std::uint64_t seed = 1;
  std::string out;           // output path; empty = stdout
  std::string channel_file;  // fixed channel instead of seeded draws
  std::string engine = "spectral";  // fs capacity engine: spectral | time
  std::string input = "waterfill";  // input covariance: waterfill | equal
  double tol_scale = 1.0;  // validate: scales every pass threshold
  bool quick = false;      // validate: reduced problem sizes

  PulseConfig pulse(double delta) const {
    return PulseConfig{t_symbol, beta, delta};
  }
};

// ------------------------------------------------------------- parsing ----

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& s, const std::string& what) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ParseError("config: bad " + what + " value '" + s + "'");
  }
  if (pos != s.size())
    throw ParseError("config: trailing junk in " + what + " value '" + s + "'");
  return v;
}

inline long long parse_int(const std::string& s, const std::string& what) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    throw ParseError("config: bad " + what + " value '" + s + "'");
  }
  if (pos != s.size())
    throw ParseError("config: trailing junk in " + what + " value '" + s + "'");
  return v;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

}  // namespace detail

// Comma-separated doubles: "0.67,0.8,1".
inline std::vector<double> parse_double_list(const std::string& s,
                                             const std::string& what) {
  std::vector<double> out;
  for (const auto& tok : detail::split(s, ','))
    out.push_back(detail::parse_double(tok, what));
  if (out.empty()) throw ParseError("config: empty " + what + " list");
  return out;
}

// SNR grid: "a:b:step" (inclusive), a comma list, or a single value.
inline std::vector<double> parse_snr_spec(const std::string& s) {
  if (s.find(':') == std::string::npos) return parse_double_list(s, "snr_db");
  const auto parts = detail::split(s, ':');
  if (parts.size() != 3)
    throw ParseError("config: snr_db range must be a:b:step, got '" + s + "'");
  const double a = detail::parse_double(parts[0], "snr_db");
  const double b = detail::parse_double(parts[1], "snr_db");
  const double step = detail::parse_double(parts[2], "snr_db");
  if (!(step > 0)) throw ParseError("config: snr_db step must be positive");
  if (b < a) throw ParseError("config: snr_db range end below start");
  std::vector<double> out;
  for (double v = a; v <= b + 1e-9; v += step) out.push_back(v);
  return out;
}

// Apply one key=value setting (file line or canonical echo).
inline void apply_config_entry(ExperimentConfig& cfg, const std::string& key,
                               const std::string& value) {
  if (key == "mode") cfg.mode = value;
  else if (key == "k") cfg.k = static_cast<int>(detail::parse_int(value, key));
  else if (key == "l") cfg.l = static_cast<int>(detail::parse_int(value, key));
  else if (key == "j") cfg.j = static_cast<int>(detail::parse_int(value, key));
  else if (key == "snr_db") cfg.snr_db = parse_snr_spec(value);
  else if (key == "delta") cfg.deltas = parse_double_list(value, key);
  else if (key == "beta") cfg.beta = detail::parse_double(value, key);
  else if (key == "t_symbol") cfg.t_symbol = detail::parse_double(value, key);
  else if (key == "n") cfg.n = static_cast<int>(detail::parse_int(value, key));
  else if (key == "grid") cfg.grid = static_cast<int>(detail::parse_int(value, key));
  else if (key == "realizations")
    cfg.realizations = static_cast<int>(detail::parse_int(value, key));
  else if (key == "seed")
    cfg.seed = static_cast<std::uint64_t>(detail::parse_int(value, key));
  else if (key == "out") cfg.out = value;
  else if (key == "channel_file") cfg.channel_file = value;
  else if (key == "engine") cfg.engine = value;
  else if (key == "input") cfg.input = value;
  else if (key == "tol_scale") cfg.tol_scale = detail::parse_double(value, key);
  else if (key == "quick") cfg.quick = (value == "1" || value == "true");
  else throw ParseError("config: unknown key '" + key + "'");
}

// Flat key=value file; '#' comments and blank lines ignored.
inline void load_config_file(ExperimentConfig& cfg, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("config: cannot open " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ParseError("config: " + path + ":" + std::to_string(lineno) +
                       ": expected key=value");
    apply_config_entry(cfg, detail::trim(t.substr(0, eq)),
                       detail::trim(t.substr(eq + 1)));
  }
}

namespace detail {

inline std::string join_doubles(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += fmt_double(v[i]);
  }
  return s;
}

// Canonical metadata echo, one "key=value" token per entry.
inline std::vector<std::string> config_echo(const ExperimentConfig& cfg) {
  std::vector<std::string> out;
  out.push_back("mode=" + cfg.mode);
  out.push_back("k=" + std::to_string(cfg.k));
  out.push_back("l=" + std::to_string(cfg.l));
  out.push_back("j=" + std::to_string(cfg.j));
  out.push_back("snr_db=" + join_doubles(cfg.snr_db));
  out.push_back("delta=" + join_doubles(cfg.deltas));
  out.push_back("beta=" + fmt_double(cfg.beta));
  out.push_back("t_symbol=" + fmt_double(cfg.t_symbol));
  out.push_back("n=" + std::to_string(cfg.n));
  out.push_back("grid=" + std::to_string(cfg.grid));
  out.push_back("realizations=" + std::to_string(cfg.realizations));
  out.push_back("seed=" + std::to_string(cfg.seed));
  out.push_back("engine=" + cfg.engine);
  out.push_back("input=" + cfg.input);
  out.push_back("channel_file=" + cfg.channel_file);
  return out;
}

inline FlatChannel as_flat(const FsChannel& ch) {
  if (ch.j_taps != 1)
    throw DimensionMismatch("channel: flat mode needs a single-tap file, got J=" +
                            std::to_string(ch.j_taps));
  return FlatChannel{ch.k_rx, ch.l_tx, ch.taps[0]};
}

// Channel for realization r: the fixed file channel, or a seeded draw on
// substream r.
inline FsChannel sweep_channel(const ExperimentConfig& cfg, int r) {
  if (!cfg.channel_file.empty()) return load_channel(cfg.channel_file);
  if (cfg.mode == "flat") return as_fs(gen_flat(cfg.k, cfg.l, cfg.seed, r));
  return gen_fs(cfg.k, cfg.l, cfg.j, cfg.seed, r);
}

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
};

// Unbiased sample variance; stderr = sqrt(var / R).
inline MeanStderr mean_stderr(const std::vector<double>& x) {
  MeanStderr out;
  const std::size_t r = x.size();
  for (double v : x) out.mean += v;
  out.mean /= r;
  if (r > 1) {
    double ss = 0.0;
    for (double v : x) ss += (v - out.mean) * (v - out.mean);
    out.stderr_ = std::sqrt(ss / (r - 1) / r);
  }
  return out;
}

inline double snr_to_power(double snr_db, double noise) {
  return noise * std::pow(10.0, snr_db / 10.0);
}

// C for one realization at one (delta, snr): closed flat form, spectral
// integral, or finite-N time-domain modes (phi, psi) already diagonalized.
inline double capacity_bits_from_time_modes(const VectorXd& psi,
                                            const VectorXd& phi, double p,
                                            double noise,
                                            const PulseConfig& pulse, int n) {
  WaterfillSolution ws = weighted_waterfill(psi, phi, noise,
                                            pulse.delta * pulse.t_symbol, p, n);
  double nats = 0.0;
  for (Eigen::Index i = 0; i < phi.size(); ++i)
    nats += std::log1p(ws.allocations(i) * phi(i) / noise);
  return nats / (n * std::numbers::ln2);
}

}  // namespace detail

// --------------------------------------------------------------- sweep ----

struct SweepPoint {
  double snr_db = 0.0;
  double delta = 0.0;
  double beta = 0.0;
  double mean_bits_s_hz = 0.0;
  double stderr_ = 0.0;
};

struct SweepResult {
  std::vector<SweepPoint> points;  // delta-major, SNR within
  std::string csv;                 // the full dataset, metadata included
};

// Monte Carlo capacity sweep over (delta, SNR). One channel set per seed is
// shared by every curve (common random numbers); rows are emitted in
// delta-major order. Flat mode uses the closed form; fs mode uses the
// spectral (Szego) engine by default or the finite-N time engine.
inline SweepResult run_sweep(const ExperimentConfig& cfg) {
  if (cfg.realizations < 1) throw Error("sweep: realizations must be >= 1");
  if (cfg.snr_db.empty() || cfg.deltas.empty())
    throw Error("sweep: empty SNR or delta grid");
  if (!cfg.channel_file.empty() && cfg.realizations != 1)
    throw Error("sweep: a fixed channel file requires realizations=1");
  if (cfg.mode != "flat" && cfg.mode != "fs")
    throw Error("sweep: mode must be flat or fs");
  if (cfg.engine != "spectral" && cfg.engine != "time")
    throw Error("sweep: engine must be spectral or time");
  if (cfg.input != "waterfill" && cfg.input != "equal")
    throw Error("sweep: input must be waterfill or equal");
  for (double d : cfg.deltas) cfg.pulse(d).validate();

  const double noise = 1.0;
  const std::size_t nd = cfg.deltas.size(), ns = cfg.snr_db.size();
  std::vector<std::vector<double>> samples(nd * ns);

  for (int r = 0; r < cfg.realizations; ++r) {
    try {
      const FsChannel ch = detail::sweep_channel(cfg, r);
      const int l_tx = ch.l_tx;
      // Per-realization reusable decompositions.
      ChannelGramian flat_g;
      ChannelSpectrum sp;
      if (cfg.mode == "flat") flat_g = channel_gramian(detail::as_flat(ch));
      else if (cfg.engine == "spectral")
        sp = spectrum_matrix(ch, midpoint_grid(cfg.grid));

      for (std::size_t di = 0; di < nd; ++di) {
        const PulseConfig pulse = cfg.pulse(cfg.deltas[di]);
        detail::require_out_of_mazo(pulse);
        const double dt = pulse.delta * pulse.t_symbol;

        VectorXd time_phi, time_psi;  // fs time engine, reused across SNR
        VectorXd g_d;                 // fs spectral equal-power baseline
        if (cfg.mode == "fs" && cfg.engine == "time") {
          FsTimeResult base =
              fs_capacity_time(ch, 1.0, noise, pulse, cfg.n);
          time_phi = std::move(base.phi);
          time_psi = std::move(base.psi);
        }
        if (cfg.mode == "fs" && cfg.engine == "spectral" &&
            cfg.input == "equal") {
          g_d.resize(cfg.grid);
          for (int i = 0; i < cfg.grid; ++i)
            g_d(i) = folded_spectrum(pulse, sp.grid(i));
        }

        for (std::size_t si = 0; si < ns; ++si) {
          const double p = detail::snr_to_power(cfg.snr_db[si], noise);
          double bits = 0.0;
          if (cfg.mode == "flat") {
            if (cfg.input == "waterfill") {
              WaterfillSolution ws =
                  classic_waterfill(flat_g.tau, noise, p * dt);
              for (Eigen::Index i = 0; i < flat_g.tau.size(); ++i)
                bits += std::log1p(ws.allocations(i) * flat_g.tau(i) / noise);
            } else {
              const double c = p * dt / l_tx;
              for (Eigen::Index i = 0; i < flat_g.tau.size(); ++i)
                bits += std::log1p(c * flat_g.tau(i) / noise);
            }
            bits /= std::numbers::ln2;
          } else if (cfg.engine == "spectral") {
            if (cfg.input == "waterfill") {
              SpectralAllocation alloc =
                  spectral_waterfill(sp.tau, noise, p * dt);
              bits = detail::spectral_objective_bits(sp.tau, alloc.phi, noise);
            } else {
              const double c = p * dt / l_tx;
              double nats = 0.0;
              for (int i = 0; i < cfg.grid; ++i)
                for (int s = 0; s < l_tx; ++s)
                  nats += std::log1p(c * g_d(i) * sp.tau(i, s) / noise);
              bits = nats / (cfg.grid * std::numbers::ln2);
            }
          } else {  // fs time engine
            if (cfg.input == "waterfill") {
              bits = detail::capacity_bits_from_time_modes(
                  time_psi, time_phi, p, noise, pulse, cfg.n);
            } else {
              const double c = p * dt / l_tx;
              double nats = 0.0;
              for (Eigen::Index i = 0; i < time_phi.size(); ++i)
                nats += std::log1p(c * std::max(time_phi(i), 0.0) / noise);
              bits = nats / (cfg.n * std::numbers::ln2);
            }
          }
          samples[di * ns + si].push_back(bits / pulse.compression());
        }
      }
    } catch (const Error& e) {
      throw Error("sweep: realization " + std::to_string(r) + " (seed " +
                  std::to_string(cfg.seed) + ", stream " + std::to_string(r) +
                  ") failed: " + e.what());
    }
  }

  SweepResult res;
  std::ostringstream os;
  os << "# ftn-sweep v1\n";
  for (const auto& kv : detail::config_echo(cfg)) os << "# " << kv << "\n";
  os << "snr_db,delta,beta,mean_capacity_bits_s_hz,stderr,realizations,seed\n";
  for (std::size_t di = 0; di < nd; ++di)
    for (std::size_t si = 0; si < ns; ++si) {
      const auto ms = detail::mean_stderr(samples[di * ns + si]);
      SweepPoint pt{cfg.snr_db[si], cfg.deltas[di], cfg.beta, ms.mean,
                    ms.stderr_};
      res.points.push_back(pt);
      os << detail::fmt_double(pt.snr_db) << ',' << detail::fmt_double(pt.delta)
         << ',' << detail::fmt_double(pt.beta) << ','
         << detail::fmt_double(pt.mean_bits_s_hz) << ','
         << detail::fmt_double(pt.stderr_) << ',' << cfg.realizations << ','
         << cfg.seed << "\n";
    }
  res.csv = os.str();
  return res;
}

// ------------------------------------------------------------ spectrum ----

struct SpectrumResult {
  SpectralSolution solution;
  InputEigenspectrum input;
  std::string csv;
};

// Spectrum dump for a single realization at one (delta, SNR) point.
inline SpectrumResult run_spectrum(const ExperimentConfig& cfg) {
  if (cfg.snr_db.empty() || cfg.deltas.empty())
    throw Error("spectrum: need one SNR and one delta");
  const PulseConfig pulse = cfg.pulse(cfg.deltas.front());
  const double noise = 1.0;
  const double p = detail::snr_to_power(cfg.snr_db.front(), noise);
  const FsChannel ch = detail::sweep_channel(cfg, 0);

  SpectrumResult res;
  res.solution = fs_capacity_spectral(ch, p, noise, pulse, cfg.grid);
  res.input = input_eigenspectrum(res.solution);

  const int l = res.solution.l_tx;
  std::ostringstream os;
  os << "# ftn-spectrum v1\n";
  for (const auto& kv : detail::config_echo(cfg)) os << "# " << kv << "\n";
  os << "f_n";
  for (int s = 1; s <= l; ++s) os << ",tau_" << s;
  for (int s = 1; s <= l; ++s) os << ",phi_" << s;
  for (int s = 1; s <= l; ++s) os << ",input_phi_" << s;
  os << ",G_d\n";
  for (Eigen::Index i = 0; i < res.solution.grid.size(); ++i) {
    os << detail::fmt_double(res.solution.grid(i));
    for (int s = 0; s < l; ++s)
      os << ',' << detail::fmt_double(res.solution.tau(i, s));
    for (int s = 0; s < l; ++s)
      os << ',' << detail::fmt_double(res.solution.phi(i, s));
    for (int s = 0; s < l; ++s)
      os << ',' << detail::fmt_double(res.input.values(i, s));
    os << ',' << detail::fmt_double(res.solution.g_d(i)) << "\n";
  }
  res.csv = os.str();
  return res;
}

// ------------------------------------------------------------ capacity ----

struct CapacityPoint {
  CapacityReport report;
  std::string engine_used;
};

// Single capacity evaluation at (deltas[0], snr_db[0]).
inline CapacityPoint run_capacity(const ExperimentConfig& cfg) {
  if (cfg.snr_db.empty() || cfg.deltas.empty())
    throw Error("capacity: need one SNR and one delta");
  const PulseConfig pulse = cfg.pulse(cfg.deltas.front());
  const double noise = 1.0;
  const double p = detail::snr_to_power(cfg.snr_db.front(), noise);
  const FsChannel ch = detail::sweep_channel(cfg, 0);

  CapacityPoint out;
  if (cfg.mode == "flat") {
    FlatCapacityResult r = flat_capacity(detail::as_flat(ch), p, noise, pulse);
    out.report = r.report;
    out.engine_used = "flat-closed-form";
  } else if (cfg.engine == "time") {
    FsTimeResult r = fs_capacity_time(ch, p, noise, pulse, cfg.n);
    out.report = r.report;
    out.engine_used = "fs-time";
  } else {
    SpectralSolution sol = fs_capacity_spectral(ch, p, noise, pulse, cfg.grid);
    out.report = detail::make_report(sol.bits_per_channel_use, VectorXd(),
                                     sol.mu, p, noise, pulse, 0, ch.k_rx,
                                     ch.l_tx, ch.j_taps);
    out.engine_used = "fs-spectral";
  }
  out.report.seed = cfg.seed;
  return out;
}

inline std::string render_capacity_text(const CapacityPoint& pt) {
  std::ostringstream os;
  os << "engine=" << pt.engine_used << "\n"
     << "snr_db=" << detail::fmt_double(pt.report.snr_db) << "\n"
     << "delta=" << detail::fmt_double(pt.report.config.delta) << "\n"
     << "beta=" << detail::fmt_double(pt.report.config.beta) << "\n"
     << "capacity_bits_per_channel_use="
     << detail::fmt_double(pt.report.bits_per_channel_use) << "\n"
     << "capacity_bits_s_hz=" << detail::fmt_double(pt.report.bits_per_s_per_hz)
     << "\n"
     << "water_level=" << detail::fmt_double(pt.report.water_level) << "\n";
  return os.str();
}

inline nlohmann::json capacity_json(const CapacityPoint& pt) {
  nlohmann::json j;
  j["format"] = "ftn-capacity v1";
  j["engine"] = pt.engine_used;
  j["snr_db"] = pt.report.snr_db;
  j["delta"] = pt.report.config.delta;
  j["beta"] = pt.report.config.beta;
  j["t_symbol"] = pt.report.config.t_symbol;
  j["k"] = pt.report.k_rx;
  j["l"] = pt.report.l_tx;
  j["j"] = pt.report.j_taps;
  j["n"] = pt.report.n_symbols;
  j["capacity_bits_per_channel_use"] = pt.report.bits_per_channel_use;
  j["capacity_bits_s_hz"] = pt.report.bits_per_s_per_hz;
  j["water_level"] = pt.report.water_level;
  j["seed"] = pt.report.seed;
  return j;
}

// ------------------------------------------------------------ validate ----

struct ValidateReport {
  nlohmann::json report;
  bool all_pass = false;
};

namespace detail {

inline void add_check(nlohmann::json& checks, bool& all_pass,
                      const std::string& name, bool pass, double measured,
                      double threshold, const std::string& details) {
  nlohmann::json c;
  c["name"] = name;
  c["pass"] = pass;
  c["measured"] = measured;
  c["threshold"] = threshold;
  c["details"] = details;
  checks.push_back(c);
  all_pass = all_pass && pass;
}

}  // namespace detail

// Bundled cross-checks with machine-readable verdicts. tol_scale scales the
// pass thresholds (a deliberately impossible scale demonstrates the failure
// report); quick shrinks problem sizes for use inside test suites.
inline ValidateReport run_validate(const ExperimentConfig& cfg) {
  const double ts = cfg.tol_scale;
  const bool quick = cfg.quick;
  const double noise = 1.0;
  nlohmann::json checks = nlohmann::json::array();
  bool all_pass = true;

  // 1. Mazo-region rejection is an expected failure.
  {
    bool rejected = false;
    std::string msg = "flat_capacity(delta=0.6, beta=0.5) returned";
    try {
      flat_capacity(gen_flat(2, 2, cfg.seed, 0), 10.0, noise,
                    PulseConfig{cfg.t_symbol, 0.5, 0.6});
    } catch (const MazoRegion& e) {
      rejected = true;
      msg = e.what();
    }
    detail::add_check(checks, all_pass, "mazo_rejection", rejected,
                      rejected ? 1.0 : 0.0, 1.0, msg);
  }

  // 2. Flat block-form capacity is N-independent.
  {
    const PulseConfig pulse{cfg.t_symbol, 0.25, 0.9};
    const double p = detail::snr_to_power(10.0, noise);
    double worst = 0.0;
    const int seeds = quick ? 3 : 5;
    for (int r = 0; r < seeds; ++r) {
      FlatChannel ch = gen_flat(2, 2, cfg.seed, 100 + r);
      const double closed =
          flat_capacity(ch, p, noise, pulse).report.bits_per_channel_use;
      for (int n : {1, 2, 4, 8})
        worst = std::max(worst,
                         std::abs(flat_capacity_blockform(ch, p, noise, pulse, n) -
                                  closed));
    }
    detail::add_check(checks, all_pass, "n_independence", worst <= 1e-9 * ts,
                      worst, 1e-9 * ts,
                      "max |C_N - C| over N in {1,2,4,8}, " +
                          std::to_string(seeds) + " channels");
  }

  // 3. Single-tap FS capacity reduces to the flat closed form.
  {
    const PulseConfig pulse{cfg.t_symbol, 0.5, 0.8};
    const double p = detail::snr_to_power(10.0, noise);
    double worst = 0.0;
    const int seeds = quick ? 3 : 5;
    const int n = quick ? 8 : 16;
    for (int r = 0; r < seeds; ++r) {
      FlatChannel ch = gen_flat(2, 2, cfg.seed, 200 + r);
      const double flat =
          flat_capacity(ch, p, noise, pulse).report.bits_per_channel_use;
      const double fs =
          fs_capacity_time(as_fs(ch), p, noise, pulse, n).report
              .bits_per_channel_use;
      worst = std::max(worst, std::abs(fs - flat));
    }
    detail::add_check(checks, all_pass, "j1_reduction", worst <= 1e-8 * ts,
                      worst, 1e-8 * ts,
                      "max |fs_time(N=" + std::to_string(n) + ") - flat|, " +
                          std::to_string(seeds) + " channels");
  }

  // 4. Brute-force search matches the flat waterfilling solution.
  {
    const PulseConfig pulse{cfg.t_symbol, 0.25, 0.9};
    const double p = detail::snr_to_power(10.0, noise);
    double worst = 0.0;
    const int seeds = quick ? 2 : 3;
    for (int r = 0; r < seeds; ++r) {
      FlatChannel ch = gen_flat(2, 2, cfg.seed, 300 + r);
      const double closed =
          flat_capacity(ch, p, noise, pulse).report.bits_per_channel_use;
      OracleResult oracle = brute_force_capacity(ch, p, noise, pulse, 4);
      worst = std::max(worst, std::abs(oracle.bits_per_channel_use - closed));
    }
    detail::add_check(checks, all_pass, "oracle_match", worst <= 1e-4 * ts,
                      worst, 1e-4 * ts,
                      "max |oracle - closed form| at N=4, " +
                          std::to_string(seeds) + " channels");
  }

  // 5. Finite-N time domain agrees with the Szego-limit integral.
  {
    const PulseConfig pulse{cfg.t_symbol, 0.5, 0.8};
    const double p = detail::snr_to_power(10.0, noise);
    const int n = quick ? 256 : 512;
    const double tol = (quick ? 0.03 : 0.02) * ts;
    double worst = 0.0;
    const int seeds = quick ? 1 : 2;
    for (int r = 0; r < seeds; ++r) {
      FsChannel ch = gen_fs(2, 2, 20, cfg.seed, 400 + r);
      const double t =
          fs_capacity_time(ch, p, noise, pulse, n).report.bits_per_channel_use;
      const double f =
          fs_capacity_spectral(ch, p, noise, pulse, 1024).bits_per_channel_use;
      worst = std::max(worst, std::abs(t - f) / std::abs(f));
    }
    detail::add_check(checks, all_pass, "time_freq_agreement", worst <= tol,
                      worst, tol,
                      "max rel |time(N=" + std::to_string(n) +
                          ") - spectral(M=1024)|, J=20");
  }

  // 6. Szego eigenvalue-average error shrinks with N.
  {
    FsChannel ch = gen_fs(2, 2, 5, cfg.seed, 500);
    const PulseConfig pulse{cfg.t_symbol, 0.5, 0.8};
    const double p = detail::snr_to_power(5.0, noise);
    const std::vector<int> ns =
        quick ? std::vector<int>{64, 128, 256} : std::vector<int>{64, 128, 256, 512};
    SzegoTable table = szego_convergence(ch, p, noise, pulse, ns);
    detail::add_check(checks, all_pass, "szego_convergence", table.decreasing,
                      table.points.back().error, table.points.front().error,
                      "e(N) strictly decreasing over N in {" +
                          std::to_string(ns.front()) + ".." +
                          std::to_string(ns.back()) + "}");
  }

  ValidateReport out;
  out.report["format"] = "ftn-validate v1";
  nlohmann::json echo;
  for (const auto& kv : detail::config_echo(cfg)) {
    const auto eq = kv.find('=');
    echo[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  echo["tol_scale"] = cfg.tol_scale;
  echo["quick"] = cfg.quick;
  out.report["config"] = echo;
  out.report["checks"] = checks;
  out.report["all_pass"] = all_pass;
  out.all_pass = all_pass;
  return out;
}

// ----------------------------------------------------------------- io -----

inline void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream f(path);
  if (!f) throw Error("output: cannot open " + path + " for writing");
  f << body;
  if (!f) throw Error("output: write to " + path + " failed");
}

}  // namespace ftn
