#include "emlsr/crlb.hpp"

#include "emlsr/types.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace emlsr {

double mu_constant(int eta) {
  if (eta < 1) throw std::invalid_argument("eta must be at least 1");
  return 3.0 * kSpeedOfLight * kSpeedOfLight / (8.0 * M_PI * M_PI * eta);
}

double range_crlb(double ul_snr, double bandwidth_hz, int eta) {
  if (ul_snr <= 0.0) throw std::invalid_argument("SNR must be positive");
  if (bandwidth_hz <= 0.0) throw std::invalid_argument("bandwidth must be positive");
  return mu_constant(eta) / (bandwidth_hz * bandwidth_hz * ul_snr);
}

std::optional<FisherInfo2x2> fisher_info(const SensingGeometry& geom) {
  const double mu = mu_constant(geom.ltf_repetitions);
  const double w2 = geom.bandwidth_hz * geom.bandwidth_hz;

  FisherInfo2x2 psi = FisherInfo2x2::Zero();
  for (const AnchorSta& sta : geom.stas) {
    const Eigen::Vector2d delta = geom.ref_pos - sta.pos;
    const double d = std::max(delta.norm(), kMinAnchorDistance);
    const Eigen::Vector2d bearing = delta / d;
    const double rho = w2 * sta.ul_snr / mu;
    psi += rho * bearing * bearing.transpose();
  }

  const double tr = psi(0, 0) + psi(1, 1);
  const double det = psi(0, 0) * psi(1, 1) - psi(0, 1) * psi(1, 0);
  if (!(det > kDegenerateDetTol * (tr / 2.0) * (tr / 2.0))) return std::nullopt;
  return psi;
}

std::optional<double> predicted_trilat_crlb(const SensingGeometry& geom) {
  const auto psi = fisher_info(geom);
  if (!psi) return std::nullopt;
  const double tr = (*psi)(0, 0) + (*psi)(1, 1);
  const double det = (*psi)(0, 0) * (*psi)(1, 1) - (*psi)(0, 1) * (*psi)(1, 0);
  return tr / det;
}

double trilat_crlb_lower_bound(const std::vector<double>& ul_snrs, double bandwidth_hz, int eta) {
  if (ul_snrs.size() < 3) throw std::invalid_argument("need at least 3 candidates");
  std::vector<double> sorted = ul_snrs;
  std::partial_sort(sorted.begin(), sorted.begin() + 3, sorted.end(), std::greater<>());
  const double xi_star = sorted[0] + sorted[1] + sorted[2];
  return 4.0 * mu_constant(eta) / (bandwidth_hz * bandwidth_hz * xi_star);
}

std::vector<int> nominate_candidates(const std::vector<std::pair<int, double>>& avail_snr, int k) {
  std::vector<std::pair<int, double>> pool = avail_snr;
  if (static_cast<int>(pool.size()) > k) {
    std::sort(pool.begin(), pool.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    pool.resize(k);
  }
  std::vector<int> ids;
  ids.reserve(pool.size());
  for (const auto& [id, snr] : pool) ids.push_back(id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::optional<TripleChoice> select_sensing_triple(const std::vector<AnchorSta>& candidates,
                                                  const Eigen::Vector2d& ref_pos,
                                                  double bandwidth_hz, int eta) {
  if (candidates.size() < 3) return std::nullopt;
  std::vector<AnchorSta> pool = candidates;
  std::sort(pool.begin(), pool.end(),
            [](const AnchorSta& a, const AnchorSta& b) { return a.id < b.id; });

  std::optional<TripleChoice> best;
  const int n = static_cast<int>(pool.size());
  SensingGeometry geom;
  geom.ref_pos = ref_pos;
  geom.bandwidth_hz = bandwidth_hz;
  geom.ltf_repetitions = eta;
  // Id-ascending enumeration: a strict improvement test keeps the
  // lexicographically smallest triple on exact ties.
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (int k = j + 1; k < n; ++k) {
        geom.stas = {pool[i], pool[j], pool[k]};
        const auto crlb = predicted_trilat_crlb(geom);
        if (!crlb) continue;
        if (!best || *crlb < best->crlb) {
          best = TripleChoice{{pool[i].id, pool[j].id, pool[k].id}, *crlb};
        }
      }
    }
  }
  return best;
}

std::optional<double> measurement_variance(const SensingGeometry& geom) {
  const auto crlb = predicted_trilat_crlb(geom);
  if (!crlb) return std::nullopt;
  return *crlb / 2.0;
}

}  // namespace emlsr
