#pragma once

#include "emlsr/config.hpp"
#include "emlsr/sim.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace emlsr {

/// Axes swept over the base config. Runs are the Cartesian product of the
/// axes times the seed count; run seeds are base_seed + index, shared across
/// points so that scheme/mode comparisons see common random topologies.
struct SweepSpec {
  SimConfig base;
  std::vector<double> alphas = {0.5};
  std::vector<int> ks = {4};
  std::vector<int> ms = {12};
  std::vector<Scheme> schemes = {Scheme::Original};
  std::vector<Mode> modes = {Mode::NonCooperative};
  int n_seeds = 20;
  std::uint64_t base_seed = 1;
  std::string output = "results.csv";
};

struct ResultRow {
  double alpha = 0.5;
  int k = 4;
  int m = 12;
  Scheme scheme = Scheme::Original;
  Mode mode = Mode::NonCooperative;
  std::uint64_t seed = 1;
  double mse_mean = 0.0;
  double throughput_bps = 0.0;
  double jain = 0.0;
  std::int64_t sensing_count = 0;
  std::int64_t comm_count = 0;
};

SweepSpec load_sweep(const std::string& path);
SweepSpec parse_sweep(const std::string& json_text, const std::string& base_dir);

/// Executes every (point, seed) job. The parallel path fans the independent
/// runs out over OpenMP threads; rows land in a preallocated slot per job,
/// so the output is byte-identical to the serial reference path regardless
/// of thread count.
std::vector<ResultRow> run_sweep(const SweepSpec& spec, bool parallel = true);

/// Serial reference executor; kept separate so tests and the benchmark can
/// compare it against the parallel path.
std::vector<ResultRow> run_sweep_serial(const SweepSpec& spec);

/// Fixed-schema CSV: header, one data row per (point, seed) in axis order,
/// then per-point mean and population-std summary rows (seed column "mean" /
/// "std"). All numbers are shortest-round-trip formatted, locale-free.
std::string to_csv(const std::vector<ResultRow>& rows);

enum class TrendStatus { Pass, Fail, Missing };

struct TrendCheck {
  std::string name;
  TrendStatus status = TrendStatus::Missing;
  std::string detail;
};

/// Evaluates the qualitative orderings the experiment matrix is expected to
/// reproduce (alpha tradeoff, k-insensitivity, mode ordering, station-count
/// trend, scheme comparison) against per-point seed means. Points not
/// covered by the rows are reported as Missing, never guessed.
std::vector<TrendCheck> compare_schemes(const std::vector<ResultRow>& rows);

const char* to_string(TrendStatus s);

}  // namespace emlsr
