#pragma once

#include "emlsr/config.hpp"
#include "emlsr/rng.hpp"
#include "emlsr/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace emlsr {

/// Accumulated per-run results. The event trace is only populated when
/// tracing is requested; its line format is
///   time_ns,kind,interface,beta,selection,metric
/// with kind one of txop | exchange_end | window_end, beta 1/0/skip on txop
/// lines, selection ids joined by '|', and metric the squared position
/// error sampled at the decision instant.
struct RunMetrics {
  std::vector<double> mse_samples;
  std::vector<std::int64_t> delivered_bytes;  // per station
  double sim_time_s = 0.0;
  double throughput_bps = 0.0;
  double jain = 0.0;
  double mse_mean = 0.0;
  std::int64_t sensing_count = 0;
  std::int64_t comm_count = 0;
  std::int64_t skip_count = 0;
  std::string trace;
};

/// Free-space path loss in dB, distance clamped to 0.1 m.
double free_space_path_loss_db(double distance_m, double freq_hz);

/// Thermal noise floor in dBm over the given bandwidth plus noise figure.
double noise_floor_dbm(double bandwidth_hz, double noise_figure_db);

struct LinkBudget {
  double ul_snr_db = 0.0;
  double dl_snr_db = 0.0;
};

/// Static link budget between the AP and a station on one link: Tx power
/// plus a fixed MIMO array gain, minus path loss and the noise floor.
LinkBudget snr_model(double ap_x, double ap_y, double sta_x, double sta_y, int link,
                     const NetworkConfig& net);

inline constexpr TimeNs kDifs = 34'000;     // ns
inline constexpr TimeNs kSlot = 9'000;      // ns
inline constexpr int kBackoffWindow = 16;   // uniform slots 0..15

/// Next TXOP time for an idle interface: now + DIFS + uniform backoff.
TimeNs contention_next_txop(TimeNs now, RngStream& contention);

/// Single-radio availability: a station engaged in any exchange listens
/// nowhere else, and one ending exactly now frees up only for later events.
inline bool sta_available(TimeNs busy_until, TimeNs now) { return busy_until < now; }

/// Whole bytes arriving at rate_bps over elapsed_ns; the sub-byte remainder
/// is carried (in bit-nanosecond units) so split accruals sum exactly.
std::int64_t accrue_bytes(std::int64_t rate_bps, TimeNs elapsed_ns, std::int64_t& carry);

/// Duration of a communications exchange: the fixed minimum plus each
/// station's grant serialized at its own Shannon rate (ns, rounded up).
TimeNs comm_exchange_duration(const std::vector<std::int64_t>& granted,
                              const std::vector<double>& rates_bps, const TimingConfig& timing);

/// Runs the full simulation: n_windows windows of contention, ISAC
/// decisions, frame exchanges, traffic and tracking, all driven by the
/// config seed. The result is a pure function of the config.
RunMetrics run(const SimConfig& cfg, bool enable_trace = false);

}  // namespace emlsr
