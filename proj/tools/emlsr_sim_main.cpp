#include "emlsr/config.hpp"
#include "emlsr/sim.hpp"
#include "emlsr/sweep.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

int run_single(const std::string& config_path, const std::string& out_path, bool trace) {
  emlsr::SimConfig cfg;
  try {
    cfg = emlsr::load_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
  const auto violations = emlsr::validate_config(cfg.network, cfg.timing);
  if (!violations.empty()) {
    for (const auto& v : violations) std::cerr << "config error: " << v << "\n";
    return 1;
  }

  const emlsr::RunMetrics metrics = emlsr::run(cfg, trace);
  std::cout << "mse_mean_m2 " << metrics.mse_mean << "\n"
            << "throughput_bps " << metrics.throughput_bps << "\n"
            << "jain " << metrics.jain << "\n"
            << "sensing_count " << metrics.sensing_count << "\n"
            << "comm_count " << metrics.comm_count << "\n"
            << "skip_count " << metrics.skip_count << "\n"
            << "decisions " << metrics.mse_samples.size() << "\n";
  if (trace) {
    if (out_path.empty()) {
      std::cout << metrics.trace;
    } else {
      std::ofstream out(out_path);
      if (!out) {
        std::cerr << "cannot write trace to " << out_path << "\n";
        return 1;
      }
      out << metrics.trace;
      std::cout << "trace written to " << out_path << "\n";
    }
  }
  return 0;
}

int run_sweep_cmd(const std::string& sweep_path, std::string out_path, int seeds_override,
                  bool serial, bool check_trends) {
  emlsr::SweepSpec spec;
  try {
    spec = emlsr::load_sweep(sweep_path);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
  if (seeds_override > 0) spec.n_seeds = seeds_override;
  const auto violations = emlsr::validate_config(spec.base.network, spec.base.timing);
  if (!violations.empty()) {
    for (const auto& v : violations) std::cerr << "config error: " << v << "\n";
    return 1;
  }
  if (out_path.empty()) out_path = spec.output;

  const std::vector<emlsr::ResultRow> rows = emlsr::run_sweep(spec, !serial);
  {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "cannot write results to " << out_path << "\n";
      return 1;
    }
    out << emlsr::to_csv(rows);
  }
  std::cout << rows.size() << " runs written to " << out_path << "\n";

  if (check_trends) {
    bool all_pass = true;
    for (const emlsr::TrendCheck& c : emlsr::compare_schemes(rows)) {
      std::cout << to_string(c.status) << " " << c.name << ": " << c.detail << "\n";
      if (c.status != emlsr::TrendStatus::Pass) all_pass = false;
    }
    if (!all_pass) return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-link WLAN sensing/communications tradeoff simulator"};

  std::string config_path, sweep_path, out_path;
  int seeds = 0;
  bool trace = false, check_trends = false, serial = false;

  app.add_option("--config", config_path, "single-run config file (JSON)");
  app.add_option("--sweep", sweep_path, "sweep spec file (JSON)");
  app.add_option("--out", out_path, "output path (trace or CSV)");
  app.add_option("--seeds", seeds, "override the sweep's seed count");
  app.add_flag("--trace", trace, "emit the event trace (single run)");
  app.add_flag("--check-trends", check_trends, "evaluate trend checks after the sweep");
  app.add_flag("--serial", serial, "run sweep jobs on one thread");

  CLI11_PARSE(app, argc, argv);

  if (!sweep_path.empty()) return run_sweep_cmd(sweep_path, out_path, seeds, serial, check_trends);
  if (!config_path.empty()) return run_single(config_path, out_path, trace);
  std::cerr << "nothing to do: pass --config or --sweep (see --help)\n";
  return 1;
}
