// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "ofdm_radar/ofdm_radar.hpp"
#include "oracles.hpp"

using namespace ofdm_radar;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

std::vector<cplx> coeffs(const SwathScene& s) { return {s.coefficients().begin(), s.coefficients().end()}; }

// 1. Noiseless OFDM reconstruction is exact.
Outcome irci_free() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::size_t pairs = 0;
  for (std::size_t n : {32u, 128u, 1024u}) {
    const std::size_t m = 3 * n / 4;
    for (std::uint64_t k = 0; k < 100; ++k) {
      const auto pulse = design_pulse(DesignConfig{n, m, 4, 40, 1.0, 0.05, 1000 * n + k});
      const auto scene = random_scene(m, 1.0, 1.0, 5000 * n + k);
      const auto est = ofdm_range_compress(synthesize_received(pulse, scene, 0.0, 0), pulse);
      const auto d = coeffs(scene);
      worst = std::max(worst, oracle::max_abs_diff(est.d_hat, d) / oracle::max_abs(d));
      ++pairs;
    }
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-9 && secs < 10.0,
          fmt("%zu pairs, max relative error %.3e (< 1e-9), %.2f s (< 10 s)", pairs, worst, secs)};
}

// 2. Matrix synthesis vs direct convolution, fast transforms vs direct sums.
Outcome oracle_equivalence() {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> pick_n(8, 64);
  double synth = 0.0;
  double transform = 0.0;
  for (std::uint64_t k = 0; k < 50; ++k) {
    const std::size_t n = pick_n(rng);
    const std::size_t m = std::uniform_int_distribution<std::size_t>(2, n)(rng);
    const auto pulse = design_pulse(DesignConfig{n, m, 4, 10, 1.0, 0.05, k});
    const auto scene = random_scene(m, 1.0, 1.0, 100 + k);
    const auto u = synthesize_received(pulse, scene, 0.0, 0).u.samples();
    const auto via_h = channel_matrix(scene, n).apply(transmitted_segment(pulse).span());
    const auto direct = oracle::received(pulse.s.samples(), coeffs(scene));
    synth = std::max({synth, oracle::max_abs_diff(via_h, direct), oracle::max_abs_diff(u, direct)});

    const std::size_t len = std::uniform_int_distribution<std::size_t>(1, 64)(rng);
    const auto x = oracle::random_complex(len, 300 + k);
    transform = std::max(transform, oracle::max_abs_diff(dft(TimeSequence(x)).samples(), oracle::dft(x, -1)));
    transform = std::max(transform, oracle::max_abs_diff(idft(FrequencySequence(x)).samples(), oracle::dft(x, +1)));
    const auto w = oracle::random_complex(len, 600 + k);
    transform = std::max(transform,
                         oracle::max_abs_diff(oversampled_time(FrequencySequence(w), 4).samples(), oracle::oversampled(w, 4)));
  }
  return {synth < 1e-12 && transform < 1e-12,
          fmt("50 instances: synthesis max diff %.3e, transforms max diff %.3e (both < 1e-12)", synth, transform)};
}

struct Fractions {
  double papr_below_35 = 0.0;
  double xi_above_04 = 0.0;
  double joint = 0.0;
  double s_min_08 = 0.0;
};

Fractions design_fractions(std::size_t q, std::size_t trials, std::uint64_t base_seed) {
  const auto r = monte_carlo_designs(DesignConfig{128, 96, 4, q, 1.0, 0.05, 0}, trials, base_seed);
  Fractions f;
  for (const auto& rec : r.records) {
    if (rec.degenerate) continue;
    f.papr_below_35 += rec.papr_db < 3.5;
    f.xi_above_04 += rec.xi_db > -0.4;
    f.joint += rec.papr_db <= 3.0 && rec.xi_db >= -0.4;
    f.s_min_08 += rec.s_min_norm >= 0.8;
  }
  const double t = static_cast<double>(trials);
  f.papr_below_35 /= t;
  f.xi_above_04 /= t;
  f.joint /= t;
  f.s_min_08 /= t;
  return f;
}

// 3. Design-quality fractions at Q = 40.
Outcome design_quality() {
  const auto t0 = Clock::now();
  const auto f = design_fractions(40, 10'000, 0);
  const double secs = seconds_since(t0);
  auto in = [](double v, double lo, double hi) { return v >= lo && v <= hi; };
  const bool ok = in(f.papr_below_35, 0.40, 0.90) && in(f.xi_above_04, 0.60, 0.95) && in(f.joint, 0.07, 0.25) &&
                  in(f.s_min_08, 0.01, 0.08) && secs < 600.0;
  return {ok, fmt("10^4 trials: PAPR<3.5dB %.4f [0.40,0.90], xi>-0.4dB %.4f [0.60,0.95], "
                  "PAPR<=3dB&xi>=-0.4dB %.4f [0.07,0.25], S_min>=0.8/sqrtN %.4f [0.01,0.08], %.1f s (< 600 s)",
                  f.papr_below_35, f.xi_above_04, f.joint, f.s_min_08, secs)};
}

// 4. More iterations, lower PAPR.
Outcome q_monotonicity() {
  const double f10 = design_fractions(10, 2000, 20'000).papr_below_35;
  const double f20 = design_fractions(20, 2000, 20'000).papr_below_35;
  const double f40 = design_fractions(40, 2000, 20'000).papr_below_35;
  const bool ok = f20 - f10 > 0.05 && f40 - f20 > 0.05;
  return {ok, fmt("P(PAPR<3.5dB) at Q=10/20/40: %.4f / %.4f / %.4f, gaps %.4f, %.4f (> 0.05)", f10, f20, f40,
                  f20 - f10, f40 - f20)};
}

// 5. SINR sweep crossing and true-vs-bound offset.
Outcome sinr_curves() {
  const auto t0 = Clock::now();
  const std::size_t n = 128, m = 96;
  const double s_min = 0.8 / std::sqrt(static_cast<double>(n));
  PulseSearch search;
  search.trials = 1000;
  search.min_s_min_norm = 0.8;
  const auto pulse = search_best_pulse(DesignConfig{n, m, 4, 40, 1.0, 0.05, 0}, search);
  if (!pulse) return {false, "no pulse with S_min >= 0.8/sqrtN among 1000 seeds"};

  std::vector<double> grid;
  for (int i = 0; i <= 300; ++i) grid.push_back(-10.0 + 0.1 * i);
  const auto curve = sinr_sweep(pulse->weights, s_min, lfm_sequence(33), m, grid);
  const double crossing = bound_crossing_db(curve);
  const double offset = curve.ofdm_true_db.front() - curve.ofdm_bound_db.front();
  const double secs = seconds_since(t0);
  const bool ok = crossing >= 4.0 && crossing <= 8.0 && std::abs(offset - 1.4) <= 1.0 && secs < 60.0;
  return {ok, fmt("crossing %.3f dB [4,8]; pulse seed %llu S_min %.4f/sqrtN, true-bound %.3f dB [0.4,2.4]; %.2f s",
                  crossing, static_cast<unsigned long long>(pulse->config.seed), pulse->metrics.s_min_norm, offset,
                  secs)};
}

// 6. Reduced-scale range line with seven targets, two of them weak.
Outcome range_line() {
  const std::size_t m = 1000, nt = 75, n = m + nt - 1;
  PulseSearch search;
  search.trials = 20;
  const auto pulse = search_best_pulse(DesignConfig{n, m, 4, 40, 1.0, 0.05, 0}, search);
  if (!pulse) return {false, "no pulse found"};

  // 1 m cells; offsets 7050..7100 m mapped to cells 700..750.
  const std::vector<Target> targets{{700, 1.0}, {707, 0.8}, {713, 0.03}, {718, 0.9},
                                    {723, 0.05}, {735, 0.7}, {750, 0.6}};
  const auto scene = sparse_scene(m, targets);
  const auto d = coeffs(scene);

  const auto ofdm = ofdm_range_compress(synthesize_received(*pulse, scene, 0.0, 0), *pulse);
  const double ofdm_err = oracle::max_abs_diff(ofdm.d_hat, d);

  const auto chirp = lfm_sequence(nt);
  const auto lfm = lfm_range_compress(synthesize_lfm_echo(scene, chirp, 0.0, 0), chirp, m);
  const double weak1 = std::abs(lfm.d_hat[713] - d[713]) / std::abs(d[713]);
  const double weak2 = std::abs(lfm.d_hat[723] - d[723]) / std::abs(d[723]);

  const double inv = inverse_power_sum(pulse->weights);
  std::vector<double> ratio;
  for (double sigma_sq : {0.05, 0.1}) {
    double acc = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto est = ofdm_range_compress(synthesize_received(*pulse, scene, sigma_sq, 7000 + seed), *pulse);
      for (std::size_t c = 0; c < m; ++c) acc += std::norm(est.d_hat[c] - d[c]);
    }
    const double rms = std::sqrt(acc / (100.0 * static_cast<double>(m)));
    ratio.push_back(rms / (std::sqrt(sigma_sq * inv) / static_cast<double>(n)));
  }
  const bool ok = ofdm_err < 1e-9 && weak1 > 0.5 && weak2 > 0.5 && std::abs(ratio[0] - 1.0) <= 0.2 &&
                  std::abs(ratio[1] - 1.0) <= 0.2;
  return {ok, fmt("N=%zu M=%zu: OFDM noiseless max error %.3e (< 1e-9); LFM weak-cell errors %.1f%%, %.1f%% (> 50%%); "
                  "OFDM RMS / predicted at sigma^2=0.05: %.4f, 0.1: %.4f (within 0.2)",
                  n, m, ofdm_err, 100.0 * weak1, 100.0 * weak2, ratio[0], ratio[1])};
}

// 7. Pure noise through the OFDM compressor.
Outcome noise_propagation() {
  const auto pulse = design_pulse(DesignConfig{128, 96, 4, 40, 1.0, 0.05, 5});
  const auto empty = sparse_scene(96, {});
  const double sigma_sq = 0.1;
  double acc = 0.0;
  std::size_t count = 0;
  for (std::uint64_t seed = 0; count < 100'000; ++seed) {
    const auto est = ofdm_range_compress(synthesize_received(pulse, empty, sigma_sq, 90'000 + seed), pulse);
    for (const auto& v : est.d_hat) acc += std::norm(v);
    count += est.d_hat.size();
  }
  // d_hat carries d_m on its own scale; the unscaled estimate is sqrt(N) d_hat.
  const double n = 128.0;
  const double empirical = n * acc / static_cast<double>(count);
  const double predicted = sigma_sq / n * inverse_power_sum(pulse.weights);
  const double rel = std::abs(empirical / predicted - 1.0);
  return {rel <= 0.05, fmt("%zu samples: variance %.5e vs (sigma^2/N) sum|S|^-2 = %.5e, off by %.2f%% (<= 5%%)", count,
                           empirical, predicted, 100.0 * rel)};
}

// 8. Every CLI command, run twice, writes identical bytes.
int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(OFDMRADAR_EXE) + " " + args + " >>" + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = io::read_text(e.path().string());
  }
  return files;
}

Outcome cli_determinism() {
  const auto dir = fs::temp_directory_path() / "ofdmradar_acceptance";
  const auto out = dir / "out";
  auto p = [&](const char* name) { return (out / name).string(); };

  std::vector<std::map<std::string, std::string>> runs;
  for (int pass = 0; pass < 2; ++pass) {
    fs::remove_all(dir);
    fs::create_directories(out);
    const auto log = dir / "log.txt";
    io::write_scene_file(p("scene.json"), sparse_scene(96, {{10, {1.0, 0.5}}, {40, 0.2}, {41, {0.0, -0.7}}}));
    const std::vector<std::string> commands{
        "design --n 128 --m 96 --seed 7 --out " + p("pulse.json"),
        "design --n 64 --m 48 --q 20 --seed 50 --best-of 40 --threads 2 --out " + p("best.json"),
        "montecarlo --n 128 --m 96 --trials 200 --base-seed 9 --threads 2 --out-dir " + p("mc"),
        "rangeline --pulse " + p("pulse.json") + " --scene " + p("scene.json") +
            " --sigma-sq 0,0.05,0.1 --noise-seed 3 --dump-received --out-dir " + p("rl"),
        "rangeline --pulse " + p("pulse.json") + " --density 0.3 --scene-seed 4 --sigma-sq 0.05 --out-dir " +
            p("rl_random"),
        "sinr-sweep --search-trials 300 --threads 2 --out " + p("sweep.csv") + " --pulse-out " + p("sweep_pulse.json"),
        "timing --n 10749 --m 10000 --sample-rate 150e6 --swath 10000 --out " + p("timing.csv"),
        "reconstruct --pulse " + p("pulse.json") + " --received " + p("rl/received_sigma2_0.05.csv") + " --out " +
            p("reconstructed.csv"),
    };
    for (const auto& c : commands) {
      if (run_cli(c, log) != 0) return {false, "command failed: " + c};
    }
    runs.push_back(snapshot(out));
  }
  std::size_t differing = 0;
  for (const auto& [name, text] : runs[0]) {
    const auto it = runs[1].find(name);
    differing += it == runs[1].end() || it->second != text;
  }
  differing += runs[0].size() != runs[1].size();
  return {differing == 0 && runs[0].size() >= 20,
          fmt("6 commands (8 invocations), %zu output files, %zu differing", runs[0].size(), differing)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 IRCI-free exactness", irci_free},
      {"2 oracle equivalence", oracle_equivalence},
      {"3 design-quality Monte Carlo", design_quality},
      {"4 Q-monotonicity", q_monotonicity},
      {"5 SINR sweep", sinr_curves},
      {"6 range line", range_line},
      {"7 noise propagation", noise_propagation},
      {"8 CLI determinism", cli_determinism},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
