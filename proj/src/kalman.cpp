#include "emlsr/kalman.hpp"

#include <cmath>
#include <stdexcept>

namespace emlsr {

Eigen::Matrix<double, 2, 4> observation_matrix() {
  Eigen::Matrix<double, 2, 4> h = Eigen::Matrix<double, 2, 4>::Zero();
  h(0, 0) = 1.0;
  h(1, 2) = 1.0;
  return h;
}

Eigen::Matrix4d transition_matrix(double elapsed_s) {
  if (elapsed_s < 0.0) throw std::invalid_argument("elapsed time must be nonnegative");
  Eigen::Matrix4d f = Eigen::Matrix4d::Identity();
  f(0, 1) = elapsed_s;
  f(2, 3) = elapsed_s;
  return f;
}

Eigen::Matrix4d process_noise_cov(double elapsed_s, const MotionModel& model) {
  if (elapsed_s < 0.0) throw std::invalid_argument("elapsed time must be nonnegative");
  if (model.g_s <= 0.0) throw std::invalid_argument("process noise intensity must be positive");
  const double t = elapsed_s;
  const double a = model.g_s * t * t * t / 3.0;
  const double b = model.convention == CvOffdiag::Printed ? model.g_s * t * t
                                                          : model.g_s * t * t / 2.0;
  const double c = model.g_s * t;
  Eigen::Matrix4d q = Eigen::Matrix4d::Zero();
  q(0, 0) = a;
  q(0, 1) = b;
  q(1, 0) = b;
  q(1, 1) = c;
  q(2, 2) = a;
  q(2, 3) = b;
  q(3, 2) = b;
  q(3, 3) = c;
  return q;
}

TrackBelief predict(const TrackBelief& prior, double elapsed_s, const MotionModel& model) {
  if (prior.kind != BeliefKind::Updated)
    throw std::logic_error("prediction requires an updated prior");
  const Eigen::Matrix4d f = transition_matrix(elapsed_s);
  const Eigen::Matrix4d q = process_noise_cov(elapsed_s, model);
  TrackBelief out;
  out.state = TargetState::from_vec(f * prior.state.vec());
  out.mse = f * prior.mse * f.transpose() + q;
  out.kind = BeliefKind::Predicted;
  return out;
}

TrackBelief update(const TrackBelief& pred, const Measurement& meas) {
  if (pred.kind != BeliefKind::Predicted) throw std::logic_error("update requires a prediction");
  if (meas.noise_var <= 0.0) throw std::invalid_argument("measurement noise must be positive");

  const Eigen::Matrix<double, 2, 4> h = observation_matrix();
  const Eigen::Matrix2d s =
      meas.noise_var * Eigen::Matrix2d::Identity() + h * pred.mse * h.transpose();
  const double det = s(0, 0) * s(1, 1) - s(0, 1) * s(1, 0);
  if (!(det > 0.0)) throw std::logic_error("singular innovation covariance");
  Eigen::Matrix2d s_inv;
  s_inv << s(1, 1), -s(0, 1), -s(1, 0), s(0, 0);
  s_inv /= det;

  const Eigen::Matrix<double, 4, 2> gain = pred.mse * h.transpose() * s_inv;
  const Eigen::Vector2d innovation = meas.z - h * pred.state.vec();

  TrackBelief out;
  out.state = TargetState::from_vec(pred.state.vec() + gain * innovation);
  out.mse = (Eigen::Matrix4d::Identity() - gain * h) * pred.mse;
  out.kind = BeliefKind::Updated;
  return out;
}

Eigen::Matrix2d psd_factor_2x2(double a, double b, double c) {
  Eigen::Matrix2d factor = Eigen::Matrix2d::Zero();
  if (b == 0.0) {
    factor(0, 0) = std::sqrt(std::max(a, 0.0));
    factor(1, 1) = std::sqrt(std::max(c, 0.0));
    return factor;
  }
  const double tr = a + c;
  const double disc = std::sqrt((a - c) * (a - c) + 4.0 * b * b);
  const double l1 = 0.5 * (tr + disc);
  const double l2 = 0.5 * (tr - disc);
  Eigen::Vector2d v1(b, l1 - a);
  v1.normalize();
  const Eigen::Vector2d v2(-v1(1), v1(0));
  const double s1 = std::sqrt(std::max(l1, 0.0));
  const double s2 = std::sqrt(std::max(l2, 0.0));
  factor.col(0) = v1 * s1;
  factor.col(1) = v2 * s2;
  return factor;
}

TargetState propagate_truth(const TargetState& truth, double elapsed_s, const MotionModel& model,
                            RngStream& motion) {
  if (elapsed_s < 0.0) throw std::invalid_argument("elapsed time must be nonnegative");
  if (elapsed_s == 0.0) return truth;

  const double t = elapsed_s;
  const double a = model.g_s * t * t * t / 3.0;
  const double b = model.convention == CvOffdiag::Printed ? model.g_s * t * t
                                                          : model.g_s * t * t / 2.0;
  const double c = model.g_s * t;
  const Eigen::Matrix2d factor = psd_factor_2x2(a, b, c);

  const Eigen::Vector4d mean = transition_matrix(elapsed_s) * truth.vec();
  const Eigen::Vector2d nx(motion.normal(), motion.normal());
  const Eigen::Vector2d ny(motion.normal(), motion.normal());
  const Eigen::Vector2d gx = factor * nx;
  const Eigen::Vector2d gy = factor * ny;

  Eigen::Vector4d out = mean;
  out(0) += gx(0);
  out(1) += gx(1);
  out(2) += gy(0);
  out(3) += gy(1);
  return TargetState::from_vec(out);
}

Measurement synthesize_measurement(const TargetState& truth, double noise_var,
                                   RngStream& measurement) {
  if (noise_var <= 0.0) throw std::invalid_argument("measurement noise must be positive");
  const double sigma = std::sqrt(noise_var);
  Measurement m;
  m.noise_var = noise_var;
  m.z = truth.position() + sigma * Eigen::Vector2d(measurement.normal(), measurement.normal());
  return m;
}

TrackBelief initial_belief(const TargetState& truth) {
  TrackBelief b;
  b.state = truth;
  b.mse = Eigen::Matrix4d::Identity();
  b.kind = BeliefKind::Updated;
  return b;
}

}  // namespace emlsr
