// ftn: capacity and spectra of faster-than-Nyquist MIMO signaling.
//
//   ftn capacity --mode fs --k 2 --l 2 --j 20 --delta 0.8 --beta 0.5 --snr-db 10
//   ftn sweep    --mode flat --k 2 --l 2 --beta 0.5 --delta 0.67,0.8,1 \
//                --snr-db 0:30:5 --realizations 200 --seed 7 --out fig8.csv
//   ftn spectrum --mode fs --j 5 --delta 0.8 --beta 0.5 --snr-db 5 --out fig7.csv
//   ftn validate --out report.json
//   ftn channel gen --k 2 --l 2 --j 20 --seed 3 --out ch.txt
//   ftn channel show --channel-file ch.txt
//
// Exit codes: 0 success, 2 validation failure, 1 error.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ftn/ftn.hpp"

namespace {

struct CliState {
  ftn::ExperimentConfig cfg;
  std::string snr_spec;
  std::string delta_spec;
  std::string config_path;
};

void add_common_flags(CLI::App* cmd, CliState& st) {
  cmd->add_option("--config", st.config_path,
                  "key=value config file (flags override)");
  cmd->add_option("--mode", st.cfg.mode, "Channel model: flat | fs");
  cmd->add_option("--k", st.cfg.k, "Receive antennas");
  cmd->add_option("--l", st.cfg.l, "Transmit antennas");
  cmd->add_option("--j", st.cfg.j, "Channel taps (fs mode)");
  cmd->add_option("--snr-db", st.snr_spec, "SNR grid: a:b:step or v1,v2,...");
  cmd->add_option("--delta", st.delta_spec, "Acceleration factors: d1,d2,...");
  cmd->add_option("--beta", st.cfg.beta, "Raised-cosine roll-off in [0,1]");
  cmd->add_option("--t-symbol", st.cfg.t_symbol, "Nyquist symbol interval T");
  cmd->add_option("--n", st.cfg.n, "Block length for the time-domain engine");
  cmd->add_option("--grid", st.cfg.grid, "Frequency quadrature points");
  cmd->add_option("--realizations", st.cfg.realizations,
                  "Monte Carlo channel draws");
  cmd->add_option("--seed", st.cfg.seed, "Master seed");
  cmd->add_option("--out", st.cfg.out, "Output file (default: stdout)");
  cmd->add_option("--channel-file", st.cfg.channel_file,
                  "Fixed channel file instead of seeded draws");
  cmd->add_option("--engine", st.cfg.engine,
                  "fs capacity engine: spectral | time");
  cmd->add_option("--input", st.cfg.input,
                  "Input covariance: waterfill | equal");
}

void emit(const std::string& body, const std::string& out_path) {
  if (out_path.empty())
    std::cout << body;
  else
    ftn::write_text_file(out_path, body);
}

}  // namespace

int main(int argc, char** argv) {
  CliState st;

  // A config file provides defaults; explicit flags override them.
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    try {
      if (arg == "--config" && i + 1 < argc)
        ftn::load_config_file(st.cfg, argv[i + 1]);
      else if (arg.rfind("--config=", 0) == 0)
        ftn::load_config_file(st.cfg, arg.substr(9));
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }

  CLI::App app{"Capacity of faster-than-Nyquist MIMO signaling"};
  app.require_subcommand(1);
  app.add_option("--config", st.config_path,
                 "key=value config file (flags override)")
      ->expected(1);

  CLI::App* capacity = app.add_subcommand(
      "capacity", "Single capacity evaluation at one (delta, SNR) point");
  add_common_flags(capacity, st);

  CLI::App* sweep = app.add_subcommand(
      "sweep", "Monte Carlo capacity sweep over (delta, SNR); CSV output");
  add_common_flags(sweep, st);

  CLI::App* spectrum = app.add_subcommand(
      "spectrum", "Eigenmode/eigenspectrum dump on the frequency grid; CSV");
  add_common_flags(spectrum, st);

  CLI::App* validate = app.add_subcommand(
      "validate", "Run the bundled cross-checks; JSON verdicts");
  add_common_flags(validate, st);
  validate->add_option("--tol-scale", st.cfg.tol_scale,
                       "Scale factor on every pass threshold");
  validate->add_flag("--quick", st.cfg.quick, "Reduced problem sizes");

  CLI::App* channel = app.add_subcommand("channel", "Channel file utilities");
  channel->require_subcommand(1);
  CLI::App* channel_gen =
      channel->add_subcommand("gen", "Draw a seeded channel and save it");
  add_common_flags(channel_gen, st);
  CLI::App* channel_show =
      channel->add_subcommand("show", "Print a channel file");
  add_common_flags(channel_show, st);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (!st.snr_spec.empty()) st.cfg.snr_db = ftn::parse_snr_spec(st.snr_spec);
    if (!st.delta_spec.empty())
      st.cfg.deltas = ftn::parse_double_list(st.delta_spec, "delta");

    if (capacity->parsed()) {
      ftn::CapacityPoint pt = ftn::run_capacity(st.cfg);
      if (st.cfg.out.empty())
        std::cout << ftn::render_capacity_text(pt);
      else
        ftn::write_text_file(st.cfg.out, ftn::capacity_json(pt).dump(2) + "\n");
      return 0;
    }
    if (sweep->parsed()) {
      emit(ftn::run_sweep(st.cfg).csv, st.cfg.out);
      return 0;
    }
    if (spectrum->parsed()) {
      emit(ftn::run_spectrum(st.cfg).csv, st.cfg.out);
      return 0;
    }
    if (validate->parsed()) {
      ftn::ValidateReport rep = ftn::run_validate(st.cfg);
      emit(rep.report.dump(2) + "\n", st.cfg.out);
      return rep.all_pass ? 0 : 2;
    }
    if (channel_gen->parsed()) {
      if (st.cfg.out.empty())
        throw ftn::Error("channel gen: --out is required");
      ftn::FsChannel ch =
          ftn::gen_fs(st.cfg.k, st.cfg.l, st.cfg.j, st.cfg.seed, 0);
      ftn::save_channel(st.cfg.out, ch);
      return 0;
    }
    if (channel_show->parsed()) {
      if (st.cfg.channel_file.empty())
        throw ftn::Error("channel show: --channel-file is required");
      ftn::FsChannel ch = ftn::load_channel(st.cfg.channel_file);
      std::printf("K=%d L=%d J=%d\n", ch.k_rx, ch.l_tx, ch.j_taps);
      for (int j = 0; j < ch.j_taps; ++j) {
        std::printf("tap %d:\n", j);
        for (int r = 0; r < ch.k_rx; ++r) {
          for (int c = 0; c < ch.l_tx; ++c)
            std::printf("  (%.6g,%.6g)", ch.taps[j](r, c).real(),
                        ch.taps[j](r, c).imag());
          std::printf("\n");
        }
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
