// ofdmradar: design OFDM radar pulses, simulate range lines and evaluate
// SINR, writing CSV/JSON files for external plotting.

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ofdm_radar/ofdm_radar.hpp"

namespace fs = std::filesystem;
using namespace ofdm_radar;
using io::json;

namespace {

struct DesignFlags {
  DesignConfig cfg;
  std::size_t best_of = 0;
  double min_xi_db = -0.4;
  double min_s_min_norm = 0.0;
  unsigned threads = 0;
};

void add_design_flags(CLI::App* cmd, DesignConfig& cfg, bool require_dims) {
  auto* n = cmd->add_option("--n", cfg.n, "subcarriers N (pulse length)");
  auto* m = cmd->add_option("--m", cfg.m, "range cells M");
  if (require_dims) {
    n->required();
    m->required();
  } else {
    n->capture_default_str();
    m->capture_default_str();
  }
  cmd->add_option("--l", cfg.l, "oversampling factor")->capture_default_str();
  cmd->add_option("--q", cfg.q, "design iterations")->capture_default_str();
  cmd->add_option("--papr-d", cfg.papr_d_db, "clipping PAPR target (dB)")->capture_default_str();
  cmd->add_option("--gf", cfg.g_f, "frequency clipping factor")->capture_default_str();
  cmd->add_option("--seed", cfg.seed, "design seed")->capture_default_str();
}

json design_params(const DesignConfig& cfg) { return io::config_to_json(cfg); }

std::optional<OfdmPulse> make_pulse(const DesignFlags& f) {
  f.cfg.validate();
  if (f.best_of == 0) return design_pulse(f.cfg);
  PulseSearch search;
  search.trials = f.best_of;
  search.min_xi_db = f.min_xi_db;
  search.min_s_min_norm = f.min_s_min_norm;
  search.threads = f.threads;
  return search_best_pulse(f.cfg, search);
}

void print_metrics(const OfdmPulse& p) {
  const auto& m = p.metrics;
  std::printf("seed        %llu\n", static_cast<unsigned long long>(p.config.seed));
  std::printf("papr_db     %.4f\n", m.papr_db);
  std::printf("xi_db       %.4f\n", m.xi_db);
  std::printf("s_min_norm  %.4f\n", m.s_min_norm);
  std::printf("oob_energy  %.6e\n", m.oob_energy);
  std::printf("usable      %s\n", m.usable ? "yes" : "no");
}

void ensure_dir(const std::string& dir) {
  if (!dir.empty()) fs::create_directories(dir);
}

// Shortest round-trip form, for file names.
std::string short_real(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

// --- design --------------------------------------------------------------------

struct DesignCmd {
  DesignFlags flags;
  std::string out = "pulse.json";

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("design", "design one pulse, or the best of a seed range");
    add_design_flags(cmd, flags.cfg, true);
    cmd->add_option("--out", out, "pulse file to write")->capture_default_str();
    cmd->add_option("--best-of", flags.best_of, "search seeds seed..seed+K-1 for the lowest PAPR (0 = off)");
    cmd->add_option("--min-xi-db", flags.min_xi_db, "search constraint on xi (dB)")->capture_default_str();
    cmd->add_option("--min-smin-norm", flags.min_s_min_norm, "search constraint on S_min*sqrt(N)")
        ->capture_default_str();
    cmd->add_option("--threads", flags.threads, "worker threads for --best-of (0 = all cores)");
    cmd->callback([this] { run(); });
  }

  void run() {
    const auto pulse = make_pulse(flags);
    if (!pulse) throw std::runtime_error("no seed in the search range meets the constraints");
    io::write_pulse_file(out, *pulse);
    const auto reloaded = io::read_pulse_file(out);  // re-checks the zero head
    if (reloaded.s != pulse->s) throw std::runtime_error("pulse file did not round-trip: " + out);
    std::printf("wrote %s\n", out.c_str());
    print_metrics(*pulse);
  }
};

// --- montecarlo ----------------------------------------------------------------

struct MonteCarloCmd {
  DesignConfig cfg;
  std::size_t trials = 0;
  std::uint64_t base_seed = 0;
  std::string out_dir;
  unsigned threads = 0;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("montecarlo", "PAPR/xi/S_min statistics over many designs");
    add_design_flags(cmd, cfg, false);
    cmd->add_option("--trials", trials, "number of designs")->required()->check(CLI::PositiveNumber);
    cmd->add_option("--base-seed", base_seed, "trial t uses seed base+t")->capture_default_str();
    cmd->add_option("--out-dir", out_dir, "directory for the CSV files")->required();
    cmd->add_option("--threads", threads, "worker threads (0 = all cores)");
    cmd->callback([this] { run(); });
  }

  void run() {
    cfg.validate();
    const auto result = monte_carlo_designs(cfg, trials, base_seed, threads);
    auto params = design_params(cfg);
    params.erase("seed");
    params["trials"] = trials;
    params["base_seed"] = base_seed;
    const auto header = io::header_object("montecarlo", params);
    ensure_dir(out_dir);
    io::write_text(join(out_dir, "papr_cdf.csv"), io::cdf_to_csv(result.summary.papr_cdf, header));
    io::write_text(join(out_dir, "xi_cdf.csv"), io::cdf_to_csv(result.summary.xi_cdf, header));
    io::write_text(join(out_dir, "thresholds.csv"), io::thresholds_to_csv(result.summary, header));
    io::write_text(join(out_dir, "trials.csv"), io::trials_to_csv(result.records, header));

    const auto& s = result.summary;
    std::printf("trials %zu, degenerate %zu\n", s.trials, s.degenerate);
    std::printf("P(PAPR < 3.5 dB)        %.4f\n", fraction_below(s.papr_cdf, 3.5));
    std::printf("P(xi > -0.4 dB)         %.4f\n", 1.0 - fraction_below(s.xi_cdf, std::nextafter(-0.4, INFINITY)));
    for (std::size_t k = 0; k < kSminGridNorm.size(); ++k) {
      std::printf("P(S_min >= %.2f/sqrtN)  %.4f\n", kSminGridNorm[k],
                  static_cast<double>(s.s_min_counts[k]) / static_cast<double>(s.trials));
    }
  }
};

// --- rangeline -----------------------------------------------------------------

struct RangeLineCmd {
  std::string pulse_path;
  std::string scene_path;
  double density = 1.0;
  double sigma_d_sq = 1.0;
  std::uint64_t scene_seed = 0;
  std::vector<double> sigma_sq{0.0};
  std::uint64_t noise_seed = 0;
  std::size_t lfm_length = 0;
  double bandwidth = 150e6;
  std::string out_dir;
  bool dump_received = false;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("rangeline", "simulate and compress one range line with OFDM and LFM");
    cmd->add_option("--pulse", pulse_path, "pulse file from `design`")->required();
    cmd->add_option("--scene", scene_path, "scene file; omit for a random scene");
    cmd->add_option("--density", density, "random scene: occupied fraction of cells")->capture_default_str();
    cmd->add_option("--sigma-d-sq", sigma_d_sq, "random scene: coefficient variance")->capture_default_str();
    cmd->add_option("--scene-seed", scene_seed, "random scene seed")->capture_default_str();
    cmd->add_option("--sigma-sq", sigma_sq, "noise variances, one run each")->capture_default_str()->delimiter(',');
    cmd->add_option("--noise-seed", noise_seed, "run i uses seeds base+2i (OFDM) and base+2i+1 (LFM)")
        ->capture_default_str();
    cmd->add_option("--lfm-length", lfm_length, "LFM samples (default N-M+1, the OFDM on-air length)");
    cmd->add_option("--bandwidth", bandwidth, "sampled bandwidth in Hz, labels range_m")->capture_default_str();
    cmd->add_option("--out-dir", out_dir, "directory for the estimate files")->required();
    cmd->add_flag("--dump-received", dump_received, "also write the OFDM received samples");
    cmd->callback([this] { run(); });
  }

  void run() {
    const auto pulse = io::read_pulse_file(pulse_path);
    const auto scene = scene_path.empty() ? random_scene(pulse.m(), sigma_d_sq, density, scene_seed)
                                          : io::read_scene_file(scene_path);
    if (scene.cells() != pulse.m()) {
      throw std::invalid_argument("scene has " + std::to_string(scene.cells()) + " cells but the pulse has M = " +
                                  std::to_string(pulse.m()));
    }
    const std::size_t nt = lfm_length ? lfm_length : pulse.transmitted_length();
    const auto chirp = lfm_sequence(nt);
    const double cell_m = range_resolution(bandwidth);
    ensure_dir(out_dir);

    json base{{"pulse", pulse_path},
              {"pulse_config", design_params(pulse.config)},
              {"lfm_length", nt},
              {"bandwidth_hz", bandwidth},
              {"noise_seed", noise_seed}};
    if (scene_path.empty()) {
      base["scene"] = json{{"random", true}, {"density", density}, {"sigma_d_sq", sigma_d_sq}, {"seed", scene_seed}};
    } else {
      base["scene"] = scene_path;
    }

    std::printf("%-10s %-14s %-14s %-14s\n", "sigma_sq", "ofdm_rms", "predicted_rms", "lfm_rms");
    const double inv = inverse_power_sum(pulse.weights);
    const double n = static_cast<double>(pulse.n());
    for (std::size_t i = 0; i < sigma_sq.size(); ++i) {
      const double s2 = sigma_sq[i];
      const std::uint64_t ofdm_seed = noise_seed + 2 * i;
      const std::uint64_t lfm_seed = ofdm_seed + 1;
      const auto rx = synthesize_received(pulse, scene, s2, ofdm_seed);
      const auto ofdm = ofdm_range_compress(rx, pulse);
      const auto lfm = lfm_range_compress(synthesize_lfm_echo(scene, chirp, s2, lfm_seed), chirp, pulse.m());

      json params = base;
      params["sigma_sq"] = s2;
      const std::string tag = "sigma2_" + short_real(s2);
      params["path"] = "ofdm";
      params["seed"] = ofdm_seed;
      io::write_text(join(out_dir, "ofdm_" + tag + ".csv"),
                     io::estimates_to_csv(ofdm, cell_m, io::header_object("rangeline", params)));
      if (dump_received) {
        io::write_text(join(out_dir, "received_" + tag + ".csv"),
                       io::received_to_csv(rx.u, io::header_object("rangeline", params)));
      }
      params["path"] = "lfm";
      params["seed"] = lfm_seed;
      io::write_text(join(out_dir, "lfm_" + tag + ".csv"),
                     io::estimates_to_csv(lfm, cell_m, io::header_object("rangeline", params)));

      auto rms = [&](const RangeEstimate& e) {
        double acc = 0.0;
        for (std::size_t c = 0; c < scene.cells(); ++c) acc += std::norm(e.d_hat[c] - scene[c]);
        return std::sqrt(acc / static_cast<double>(scene.cells()));
      };
      std::printf("%-10g %-14.6e %-14.6e %-14.6e\n", s2, rms(ofdm), std::sqrt(s2 * inv) / n, rms(lfm));
    }
  }
};

// --- sinr-sweep ----------------------------------------------------------------

struct SinrSweepCmd {
  std::string pulse_path;
  DesignFlags flags;
  std::size_t search_trials = 1000;
  double s_min_norm = 0.8;
  std::size_t lfm_length = 0;
  std::size_t cells = 0;
  double grid_start = -10.0;
  double grid_stop = 20.0;
  double grid_step = 1.0;
  std::vector<double> grid;
  std::string aggregation = "center";
  std::string out;
  std::string pulse_out;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("sinr-sweep", "LFM mean SINR vs OFDM bound and true SINR over input SNR");
    cmd->add_option("--pulse", pulse_path, "pulse file; omit to search for one");
    add_design_flags(cmd, flags.cfg, false);
    cmd->add_option("--search-trials", search_trials, "seeds searched when no --pulse is given")
        ->capture_default_str();
    cmd->add_option("--min-xi-db", flags.min_xi_db, "search constraint on xi (dB)")->capture_default_str();
    cmd->add_option("--smin-norm", s_min_norm, "S_min*sqrt(N) for the bound (and the search constraint)")
        ->capture_default_str();
    cmd->add_option("--lfm-length", lfm_length, "LFM samples (default N-M+1)");
    cmd->add_option("--cells", cells, "swath cells for the LFM interference (default M)");
    cmd->add_option("--grid-start", grid_start, "first input SNR (dB)")->capture_default_str();
    cmd->add_option("--grid-stop", grid_stop, "last input SNR (dB), inclusive")->capture_default_str();
    cmd->add_option("--grid-step", grid_step, "grid step (dB)")->capture_default_str();
    cmd->add_option("--grid", grid, "explicit input SNR list (dB); overrides start/stop/step")->delimiter(',');
    cmd->add_option("--aggregation", aggregation, "LFM interference: center cell or swath average")
        ->check(CLI::IsMember({"center", "swath"}))
        ->capture_default_str();
    cmd->add_option("--threads", flags.threads, "worker threads for the search (0 = all cores)");
    cmd->add_option("--out", out, "CSV file to write")->required();
    cmd->add_option("--pulse-out", pulse_out, "also save the pulse used");
    cmd->callback([this] { run(); });
  }

  std::vector<double> points() const {
    if (!grid.empty()) return grid;
    if (!(grid_step > 0.0)) throw std::invalid_argument("--grid-step must be > 0");
    std::vector<double> g;
    for (std::size_t i = 0;; ++i) {
      const double v = grid_start + static_cast<double>(i) * grid_step;
      if (v > grid_stop + 1e-9 * grid_step) break;
      g.push_back(v);
    }
    if (g.empty()) throw std::invalid_argument("input SNR grid is empty");
    return g;
  }

  void run() {
    const auto g = points();
    OfdmPulse pulse = [&] {
      if (!pulse_path.empty()) return io::read_pulse_file(pulse_path);
      DesignFlags f = flags;
      f.best_of = search_trials;
      f.min_s_min_norm = s_min_norm;
      auto p = make_pulse(f);
      if (!p) throw std::runtime_error("no searched pulse reaches S_min*sqrt(N) >= " + io::format_real(s_min_norm));
      return *p;
    }();
    if (!pulse_out.empty()) io::write_pulse_file(pulse_out, pulse);

    const std::size_t nt = lfm_length ? lfm_length : pulse.transmitted_length();
    const std::size_t swath = cells ? cells : pulse.m();
    const auto agg =
        aggregation == "swath" ? InterferenceAggregation::SwathAverage : InterferenceAggregation::CenterCell;
    const double s_min = s_min_norm / std::sqrt(static_cast<double>(pulse.n()));
    const auto curve = sinr_sweep(pulse.weights, s_min, lfm_sequence(nt), swath, g, agg);
    const double crossing = bound_crossing_db(curve);

    json params{{"pulse", pulse_path.empty() ? json("searched") : json(pulse_path)},
                {"pulse_config", design_params(pulse.config)},
                {"search_trials", pulse_path.empty() ? json(search_trials) : json(nullptr)},
                {"smin_norm", s_min_norm},
                {"lfm_length", nt},
                {"cells", swath},
                {"aggregation", aggregation},
                {"grid_db", g},
                {"pulse_xi_db", pulse.metrics.xi_db},
                {"pulse_s_min_norm", pulse.metrics.s_min_norm},
                {"crossing_db", std::isnan(crossing) ? json(nullptr) : json(crossing)}};
    io::write_text(out, io::sinr_curve_to_csv(curve, io::header_object("sinr-sweep", params)));

    std::printf("pulse seed %llu: xi %.4f dB, S_min %.4f/sqrtN\n",
                static_cast<unsigned long long>(pulse.config.seed), pulse.metrics.xi_db, pulse.metrics.s_min_norm);
    if (std::isnan(crossing)) {
      std::printf("OFDM bound stays below LFM on this grid\n");
    } else {
      std::printf("OFDM bound crosses LFM at %.3f dB input SNR\n", crossing);
    }
    std::printf("true minus bound: %.4f dB\n", curve.ofdm_true_db.front() - curve.ofdm_bound_db.front());
  }
};

// --- timing --------------------------------------------------------------------

struct TimingCmd {
  std::size_t n = 0;
  std::size_t m = 0;
  double sample_rate = 0.0;
  double swath = 0.0;
  std::string out;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("timing", "pulse duration, blind range and PRF limit");
    cmd->add_option("--n", n, "subcarriers N")->required();
    cmd->add_option("--m", m, "range cells M")->required();
    cmd->add_option("--sample-rate", sample_rate, "sample rate (Hz)")->required();
    cmd->add_option("--swath", swath, "swath width (m)")->required();
    cmd->add_option("--out", out, "also write the report to this file");
    cmd->callback([this] { run(); });
  }

  void run() {
    const auto r = timing_constraints(n, m, sample_rate, swath);
    const json params{{"n", n}, {"m", m}, {"sample_rate_hz", sample_rate}, {"swath_m", swath}};
    io::CsvTable t{io::header_object("timing", params), {"quantity", "value"}, {}};
    t.rows.push_back({"pulse_duration_s", io::format_real(r.pulse_duration_s)});
    t.rows.push_back({"min_range_m", io::format_real(r.min_range_m)});
    t.rows.push_back({"max_prf_hz", io::format_real(r.max_prf_hz)});
    const auto text = io::to_csv(t);
    if (!out.empty()) io::write_text(out, text);
    std::cout << text;
  }
};

// --- reconstruct ---------------------------------------------------------------

struct ReconstructCmd {
  std::string pulse_path;
  std::string received_path;
  std::string out;
  double bandwidth = 150e6;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("reconstruct", "OFDM range compression of a received-signal file");
    cmd->add_option("--pulse", pulse_path, "pulse file")->required();
    cmd->add_option("--received", received_path, "CSV with columns n,re,im")->required();
    cmd->add_option("--out", out, "estimate CSV to write")->required();
    cmd->add_option("--bandwidth", bandwidth, "sampled bandwidth in Hz, labels range_m")->capture_default_str();
    cmd->callback([this] { run(); });
  }

  void run() {
    const auto pulse = io::read_pulse_file(pulse_path);
    const ReceivedSignal rx{io::received_from_csv(io::read_text(received_path)), 0.0, 0};
    const auto est = ofdm_range_compress(rx, pulse);
    const json params{{"pulse", pulse_path}, {"received", received_path}, {"bandwidth_hz", bandwidth}};
    io::write_text(out, io::estimates_to_csv(est, range_resolution(bandwidth), io::header_object("reconstruct", params)));
    std::printf("wrote %s (%zu cells)\n", out.c_str(), est.d_hat.size());
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"OFDM radar pulse design and range reconstruction"};
  app.set_version_flag("--version", std::string(kToolName) + " " + std::string(kVersion));
  app.set_config("--config", "", "TOML/INI file with flag values (a [subcommand] section per command)");
  app.require_subcommand(1);

  DesignCmd design;
  MonteCarloCmd montecarlo;
  RangeLineCmd rangeline;
  SinrSweepCmd sweep;
  TimingCmd timing;
  ReconstructCmd reconstruct;
  design.attach(app);
  montecarlo.attach(app);
  rangeline.attach(app);
  sweep.attach(app);
  timing.attach(app);
  reconstruct.attach(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
