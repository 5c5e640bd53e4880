#pragma once

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <utility>
#include <vector>

namespace emlsr {

/// One ranging anchor: station id, its position and the UL SNR (linear)
/// it would sound with on the link in question.
struct AnchorSta {
  int id = 0;
  Eigen::Vector2d pos = Eigen::Vector2d::Zero();
  double ul_snr = 1.0;
};

/// The geometry a trilateration quality estimate is evaluated at: a
/// reference position (predicted or true target position) and three anchors.
struct SensingGeometry {
  Eigen::Vector2d ref_pos = Eigen::Vector2d::Zero();
  std::array<AnchorSta, 3> stas;
  double bandwidth_hz = 40e6;
  int ltf_repetitions = 4;
};

using FisherInfo2x2 = Eigen::Matrix2d;

/// Distance clamp between the reference position and an anchor. Applied to
/// the denominator only, so direction is preserved while the bearing-vector
/// magnitude shrinks instead of blowing up when the target crosses an STA.
inline constexpr double kMinAnchorDistance = 0.1;  // m

/// A triple is degenerate when det(Psi) <= tol * (tr(Psi)/2)^2, a
/// scale-invariant rank test (exact collinearity gives det 0).
inline constexpr double kDegenerateDetTol = 1e-12;

/// mu = 3 c^2 / (8 pi^2 eta), the range-CRLB numerator (m^2 Hz^2).
double mu_constant(int eta);

/// Range estimate variance floor: mu / (omega^2 * snr).
double range_crlb(double ul_snr, double bandwidth_hz, int eta);

/// Fisher information Gamma D Gamma^T, with Gamma columns the bearing unit
/// vectors from anchors toward ref_pos and D = diag(omega^2 snr_j / mu).
/// nullopt when the geometry cannot trilaterate (rank < 2).
std::optional<FisherInfo2x2> fisher_info(const SensingGeometry& geom);

/// Trilateration estimate variance floor tr(Psi^-1), closed-form 2x2
/// inverse. nullopt on degenerate geometry.
std::optional<double> predicted_trilat_crlb(const SensingGeometry& geom);

/// Geometry-free lower bound over all triples: 4 mu / (omega^2 xi*) with
/// xi* the sum of the three largest SNRs. Requires >= 3 candidates.
double trilat_crlb_lower_bound(const std::vector<double>& ul_snrs, double bandwidth_hz, int eta);

/// Up to k candidate ids with the highest UL SNR (ties broken toward the
/// lowest id); everything if the pool is no larger than k. Returned sorted
/// ascending.
std::vector<int> nominate_candidates(const std::vector<std::pair<int, double>>& avail_snr, int k);

struct TripleChoice {
  std::array<int, 3> ids;  // ascending
  double crlb = 0.0;
};

/// Exhaustive argmin of predicted_trilat_crlb over all 3-subsets of the
/// candidates, skipping degenerate triples; ties broken toward the
/// lexicographically smallest id triple. nullopt when every triple is
/// degenerate (or fewer than 3 candidates).
std::optional<TripleChoice> select_sensing_triple(const std::vector<AnchorSta>& candidates,
                                                  const Eigen::Vector2d& ref_pos,
                                                  double bandwidth_hz, int eta);

/// Isotropic per-coordinate measurement variance for a selected triple
/// evaluated at the given reference position: tr(Psi^-1) / 2, i.e. the
/// trilateration estimator is modeled as efficient. nullopt on degeneracy;
/// callers fall back from the true to the predicted position.
std::optional<double> measurement_variance(const SensingGeometry& geom);

}  // namespace emlsr
