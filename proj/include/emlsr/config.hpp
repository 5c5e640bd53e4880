#pragma once

#include "emlsr/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace emlsr {

/// MAC timing elements. The config file carries microseconds; internally
/// everything is integer nanoseconds so event ordering is exact.
struct TimingConfig {
  double sifs_us = 16.0;
  double tf_us = 10.8;
  double cts_us = 4.6;
  double ack_us = 4.6;
  double ndp_base_us = 44.0;
  int ltf_symbols = 4;      // rho
  int ltf_repetitions = 4;  // eta
  double window_us = 10240.0;
  int n_windows = 200;

  TimeNs sifs() const;
  TimeNs tf() const;
  TimeNs cts() const;
  TimeNs ack() const;
  /// NDP duration: ndp_base + 8 * rho * eta microseconds.
  TimeNs ndp() const;
  TimeNs window() const;

  bool operator==(const TimingConfig&) const = default;
};

enum class Scheme { Original, RsmsS, RsmsC, RsmsSC };
enum class Mode { NonCooperative, Cooperative };

/// Off-diagonal convention for the constant-velocity process-noise blocks:
/// Printed uses T'^2 (indefinite for T' > 0), Standard uses T'^2 / 2 (the
/// white-noise-acceleration form, always PSD).
enum class CvOffdiag { Printed, Standard };

struct NetworkConfig {
  int n_links = 3;
  int n_stas = 12;
  std::vector<double> carrier_freq_hz = {2.437e9, 5.25e9, 6.295e9};
  std::vector<double> bandwidth_hz = {40e6, 80e6, 160e6};
  double ap_tx_power_dbm = 43.0;
  double sta_tx_power_dbm = 23.0;
  int mimo_tx = 4;
  int mimo_rx = 2;
  double noise_figure_db = 7.0;
  double arena_half_width_m = 10.0;
  double dl_arrival_rate_bps = 20e6;
  double alpha = 0.5;  // sensing/communications control variable, in (0,1)
  int k = 4;           // candidate cap for sensing selection
  double process_noise_intensity = 0.1;  // g_s
  CvOffdiag cv_offdiag = CvOffdiag::Printed;
  Scheme scheme = Scheme::Original;
  Mode mode = Mode::NonCooperative;
  std::uint64_t seed = 1;

  bool operator==(const NetworkConfig&) const = default;
};

struct SimConfig {
  NetworkConfig network;
  TimingConfig timing;

  bool operator==(const SimConfig&) const = default;
};

/// Returns every invariant violation with a human-readable reason; empty
/// means both configs are valid. Pure: same inputs, same list.
std::vector<std::string> validate_config(const NetworkConfig& net, const TimingConfig& timing);

/// JSON file I/O. Unknown keys are validation errors, surfaced as thrown
/// std::runtime_error (load) so a typo cannot silently fall back to a
/// default value.
SimConfig load_config(const std::string& path);
SimConfig parse_config(const std::string& json_text);
std::string serialize_config(const SimConfig& cfg);
void save_config(const SimConfig& cfg, const std::string& path);

const char* to_string(Scheme s);
const char* to_string(Mode m);
const char* to_string(CvOffdiag c);
bool scheme_from_string(const std::string& s, Scheme& out);
bool mode_from_string(const std::string& s, Mode& out);
bool cv_offdiag_from_string(const std::string& s, CvOffdiag& out);

}  // namespace emlsr
