#pragma once

#include <cstdint>
#include <vector>

namespace emlsr {

/// Population z-scores (mean 0, std 1); all zeros when the input has no
/// spread. Input must be non-empty.
std::vector<double> zscore(const std::vector<double>& values);

/// Scheduling weight from a z-score of bytes already received: exp(-z), so
/// stations that have received less sort earlier.
double pf_weight(double z);

/// Average weighted utility per byte: w * ln(backlog) / backlog. Requires
/// backlog >= 1 (stations with an empty backlog are ineligible and filtered
/// out before this is called).
double utility_per_byte(double weight, std::int64_t backlog);

/// Byte capacity of a channel over a time budget at the Shannon rate:
/// floor(omega * log2(1 + snr) * t / 8).
std::int64_t byte_budget(double bandwidth_hz, double ref_snr, double time_budget_s);

struct CommCandidate {
  int id = 0;
  std::int64_t bytes_received = 0;
  std::int64_t backlog = 0;  // >= 1 for eligibility
  double weight = 1.0;
  double utility_per_byte = 0.0;
};

struct CommSelection {
  std::vector<int> ids;                  // in grant order
  std::vector<std::int64_t> granted;     // parallel to ids
};

/// Greedy selection: sort by utility-per-byte descending (ties toward the
/// smaller id), then add stations while subtracting their full backlog from
/// the remaining budget. The first station that drives the remainder
/// negative is still included, with its grant truncated to what was left
/// before the subtraction.
CommSelection select_comm_stas(std::vector<CommCandidate> candidates, std::int64_t budget_limit);

/// Sum of w * ln(backlog) over the selected ids.
double weighted_pf_objective(const std::vector<CommCandidate>& candidates,
                             const std::vector<int>& selected_ids);

struct KnapsackResult {
  std::vector<int> ids;  // ascending
  double objective = 0.0;
};

/// Exhaustive optimum of the weighted-log-utility knapsack under the strict
/// budget (no overflow item). Test oracle only; capped at 20 candidates.
KnapsackResult exact_knapsack(const std::vector<CommCandidate>& candidates,
                              std::int64_t budget_limit);

/// (sum x)^2 / (n sum x^2); 1 for equal allocations, 1/n for maximally
/// unequal ones. An all-zero allocation is defined as perfectly fair (1).
double jain_index(const std::vector<double>& per_sta_bytes);

}  // namespace emlsr
