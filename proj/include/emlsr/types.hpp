#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace emlsr {

/// All event ordering runs on integer nanoseconds; floating-point time
/// appears only where physics formulas need seconds.
using TimeNs = std::int64_t;

constexpr double kSpeedOfLight = 299792458.0;  // m/s

inline double ns_to_s(TimeNs t) { return static_cast<double>(t) * 1e-9; }

/// Kinematic target state [x, vx, y, vy] (m, m/s).
struct TargetState {
  double x = 0.0;
  double vx = 0.0;
  double y = 0.0;
  double vy = 0.0;

  Eigen::Vector4d vec() const { return {x, vx, y, vy}; }
  Eigen::Vector2d position() const { return {x, y}; }
  static TargetState from_vec(const Eigen::Vector4d& v) { return {v[0], v[1], v[2], v[3]}; }
};

enum class BeliefKind { Predicted, Updated };

/// State estimate plus its 4x4 MSE matrix. The matrix is symmetric and,
/// under the standard process-noise convention, positive semidefinite.
struct TrackBelief {
  TargetState state;
  Eigen::Matrix4d mse = Eigen::Matrix4d::Identity();
  BeliefKind kind = BeliefKind::Updated;
};

/// Per-station view: position, per-link SNRs (linear ratios) and DL traffic
/// counters. Station ids are 0-based everywhere.
struct StaRecord {
  int id = 0;
  double pos_x = 0.0;
  double pos_y = 0.0;
  std::vector<double> ul_snr;  // linear, one entry per link
  std::vector<double> dl_snr;  // linear, one entry per link
  std::int64_t bytes_received = 0;
  std::int64_t backlog = 0;
};

}  // namespace emlsr
