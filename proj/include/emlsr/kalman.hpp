#pragma once

#include "emlsr/config.hpp"
#include "emlsr/rng.hpp"
#include "emlsr/types.hpp"

namespace emlsr {

/// Nearly-constant-velocity motion model with white process noise of
/// intensity g_s.
struct MotionModel {
  double g_s = 0.1;
  CvOffdiag convention = CvOffdiag::Printed;
};

/// 2D position measurement with isotropic noise (variance per coordinate).
struct Measurement {
  Eigen::Vector2d z = Eigen::Vector2d::Zero();
  double noise_var = 1.0;
};

/// Observation matrix picking (x, y) out of [x, vx, y, vy].
Eigen::Matrix<double, 2, 4> observation_matrix();

/// State transition over elapsed seconds: per-axis [[1, T'], [0, 1]].
/// Rejects negative elapsed time.
Eigen::Matrix4d transition_matrix(double elapsed_s);

/// Process-noise covariance over elapsed seconds. Per-axis block
/// g_s * [[T'^3/3, b], [b, T']] with b = T'^2 (printed convention) or
/// T'^2 / 2 (standard). The printed form is indefinite for T' > 0.
Eigen::Matrix4d process_noise_cov(double elapsed_s, const MotionModel& model);

/// Prediction step: state F x, mse F P F^T + Q. Requires an Updated prior.
TrackBelief predict(const TrackBelief& prior, double elapsed_s, const MotionModel& model);

/// Update step with gain K = P H^T (Qv + H P H^T)^-1; the 2x2 innovation
/// inverse is closed-form. Requires a Predicted input and positive noise.
TrackBelief update(const TrackBelief& pred, const Measurement& meas);

/// Advances the true target state, drawing process noise from the motion
/// stream. Under the printed convention the per-axis covariance is projected
/// to its nearest PSD matrix before sampling (an indefinite matrix admits no
/// distribution). elapsed_s == 0 returns the input without consuming draws.
TargetState propagate_truth(const TargetState& truth, double elapsed_s, const MotionModel& model,
                            RngStream& motion);

/// z = H x + v with v ~ N(0, noise_var I2) from the measurement stream.
Measurement synthesize_measurement(const TargetState& truth, double noise_var,
                                   RngStream& measurement);

/// Filter start: the updated state equals the true initial state, with unit
/// MSE on all four components.
TrackBelief initial_belief(const TargetState& truth);

/// Factor A of the symmetric 2x2 [[a,b],[b,c]] with negative eigenvalues
/// clamped to zero, so A A^T is the nearest PSD matrix. Exposed for tests.
Eigen::Matrix2d psd_factor_2x2(double a, double b, double c);

}  // namespace emlsr
