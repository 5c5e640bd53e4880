#pragma once

#include "emlsr/config.hpp"
#include "emlsr/kalman.hpp"
#include "emlsr/rng.hpp"
#include "emlsr/types.hpp"

#include <limits>
#include <vector>

namespace emlsr {

/// Sentinel for "no TXOP scheduled anywhere".
inline constexpr TimeNs kNoTxop = std::numeric_limits<TimeNs>::max();

struct MinDurations {
  TimeNs sensing = 0;  // 3 SIFS + 2 TF + CTS + NDP
  TimeNs comm = 0;     // 3 SIFS + TF + CTS + NDP + ACK
  TimeNs overall = 0;  // max of the two
};

MinDurations min_durations(const TimingConfig& timing);

/// The sensing/communications switchover time
///   t* = alpha^(N+1) t' + (1 - alpha^(N+1)) t_E,
/// returned in (fractional) nanoseconds. Sensing is preferred strictly
/// after t*; each committed sensing TXOP pushes t* toward the window end.
double threshold_time_ns(TimeNs last_sensing, TimeNs window_end, int n_sensing, double alpha);

/// Per-interface (non-cooperative) or shared (cooperative) decision state.
struct PolicyMemory {
  TimeNs last_sensing_time = 0;
  TrackBelief belief;  // kind Updated
  int sensing_count_in_window = 0;
  TimeNs window_end = 0;
};

/// Everything an interface knows when it gains a TXOP.
struct TxopContext {
  TimeNs t = 0;
  int link = 0;
  std::vector<int> available;        // ascending station ids
  TimeNs next_txop_time = kNoTxop;   // earliest TXOP pending on another interface
  TimeNs window_end = 0;
  const std::vector<StaRecord>* stas = nullptr;
};

enum class Action { Sense, Communicate, Skip };

enum class SkipReason {
  None,
  NoAvailableSta,
  WindowTooShort,
  CoopCriteriaGap,          // no cooperative criterion fires at this instant
  CoopAwaitFullAvailability,  // sensing deferred until every station is idle
  DegenerateTriple,
  TooFewCandidates,
  EmptyCommSelection,
};

struct Decision {
  Action action = Action::Skip;
  SkipReason skip_reason = SkipReason::None;
  TrackBelief predicted;              // kind Predicted, always present
  TimeNs budget_horizon = 0;          // Communicate: horizon the byte budget runs to
  std::vector<int> selection;         // Sense: triple; Communicate: grant order
  std::vector<std::int64_t> granted;  // Communicate only, parallel to selection
};

/// Decision for an interface acting on its own memory: predict, gate on a
/// non-empty available set and enough remaining window time, then sense
/// iff at least three stations are available and t is past the threshold.
Decision decide_noncoop(const PolicyMemory& mem, const TxopContext& ctx, const NetworkConfig& net,
                        const TimingConfig& timing);

/// Decision against the shared memory. Three criteria, in order:
///  1. a communications TXOP can finish by t*          -> communicate;
///  2. the last sensing exchange is still in the air and a communications
///     TXOP can finish by the next scheduled TXOP t_n  -> communicate,
///     with the byte budget run to t_n for this decision only;
///  3. t is past both t* and the end of the last sensing exchange
///                                                     -> sense.
/// Sensing additionally waits until every station is idle; time points
/// covered by no criterion are skipped.
Decision decide_coop(const PolicyMemory& mem, const TxopContext& ctx, const NetworkConfig& net,
                     const TimingConfig& timing);

/// Fills in the station selection for a Sense/Communicate decision.
/// Original scheme: CRLB-optimal triple over the nominated candidates, or
/// the greedy weighted-PF grant list. The random baselines draw the triple
/// uniformly from all 3-subsets (RSMS-S), the communications set uniformly
/// from all subsets of the available set (RSMS-C), or both (RSMS-SC).
/// Cooperative sensing draws candidates from all stations. May downgrade
/// the action to Skip (degenerate geometry, no eligible traffic).
void select_for_decision(Decision& dec, const TxopContext& ctx, const NetworkConfig& net,
                         const TimingConfig& timing, RngStream& selection);

/// Uniformly random subset of the given ids (each of the 2^n subsets equally
/// likely). Exposed for the random-baseline uniformity test.
std::vector<int> rsms_subset(const std::vector<int>& ids, RngStream& selection);

/// Uniformly random 3-subset of the given ids. Requires at least 3.
std::array<int, 3> rsms_triple(const std::vector<int>& ids, RngStream& selection);

/// Applies a completed sensing exchange: belief <- update(predicted, z),
/// last sensing time <- the TXOP's decision time, count incremented.
void commit_sensing(PolicyMemory& mem, const TrackBelief& predicted, const Measurement& meas,
                    TimeNs t);

const char* to_string(Action a);

}  // namespace emlsr
