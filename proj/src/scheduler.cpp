#include "emlsr/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace emlsr {

std::vector<double> zscore(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("zscore of empty list");
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= n;
  const double std_dev = std::sqrt(var);
  std::vector<double> z(values.size(), 0.0);
  if (std_dev == 0.0) return z;
  for (std::size_t i = 0; i < values.size(); ++i) z[i] = (values[i] - mean) / std_dev;
  return z;
}

double pf_weight(double z) { return std::exp(-z); }

double utility_per_byte(double weight, std::int64_t backlog) {
  if (backlog < 1) throw std::invalid_argument("backlog below eligibility floor");
  const double b = static_cast<double>(backlog);
  return weight * std::log(b) / b;
}

std::int64_t byte_budget(double bandwidth_hz, double ref_snr, double time_budget_s) {
  if (time_budget_s < 0.0) throw std::invalid_argument("time budget must be nonnegative");
  if (ref_snr <= 0.0) return 0;
  const double bits = bandwidth_hz * std::log2(1.0 + ref_snr) * time_budget_s;
  return static_cast<std::int64_t>(std::floor(bits / 8.0));
}

CommSelection select_comm_stas(std::vector<CommCandidate> candidates, std::int64_t budget_limit) {
  if (candidates.empty()) throw std::invalid_argument("no communication candidates");
  if (budget_limit < 0) throw std::invalid_argument("negative byte budget");
  std::sort(candidates.begin(), candidates.end(), [](const CommCandidate& a, const CommCandidate& b) {
    if (a.utility_per_byte != b.utility_per_byte) return a.utility_per_byte > b.utility_per_byte;
    return a.id < b.id;
  });

  CommSelection sel;
  std::int64_t remaining = budget_limit;
  for (const CommCandidate& c : candidates) {
    sel.ids.push_back(c.id);
    sel.granted.push_back(std::min(c.backlog, std::max<std::int64_t>(remaining, 0)));
    remaining -= c.backlog;
    if (remaining < 0) break;
  }
  return sel;
}

double weighted_pf_objective(const std::vector<CommCandidate>& candidates,
                             const std::vector<int>& selected_ids) {
  double sum = 0.0;
  for (int id : selected_ids) {
    for (const CommCandidate& c : candidates) {
      if (c.id == id) {
        sum += c.weight * std::log(static_cast<double>(c.backlog));
        break;
      }
    }
  }
  return sum;
}

KnapsackResult exact_knapsack(const std::vector<CommCandidate>& candidates,
                              std::int64_t budget_limit) {
  const int n = static_cast<int>(candidates.size());
  if (n > 20) throw std::invalid_argument("exhaustive knapsack capped at 20 candidates");

  KnapsackResult best;  // the empty selection, objective 0
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::int64_t load = 0;
    double obj = 0.0;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        load += candidates[i].backlog;
        obj += candidates[i].weight * std::log(static_cast<double>(candidates[i].backlog));
      }
    }
    if (load > budget_limit) continue;
    if (obj > best.objective) {
      best.objective = obj;
      best.ids.clear();
      for (int i = 0; i < n; ++i)
        if (mask & (1u << i)) best.ids.push_back(candidates[i].id);
      std::sort(best.ids.begin(), best.ids.end());
    }
  }
  return best;
}

double jain_index(const std::vector<double>& per_sta_bytes) {
  if (per_sta_bytes.empty()) throw std::invalid_argument("jain index of empty list");
  double sum = 0.0, sum_sq = 0.0;
  for (double x : per_sta_bytes) {
    sum += x;
    sum_sq += x * x;
  }
  if (sum_sq == 0.0) return 1.0;  // no inequity among zero allocations
  return sum * sum / (static_cast<double>(per_sta_bytes.size()) * sum_sq);
}

}  // namespace emlsr
