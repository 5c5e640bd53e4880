#include "emlsr/policy.hpp"

#include "emlsr/crlb.hpp"
#include "emlsr/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace emlsr {

namespace {

MotionModel motion_model(const NetworkConfig& net) {
  return {net.process_noise_intensity, net.cv_offdiag};
}

TrackBelief predict_at(const PolicyMemory& mem, TimeNs t, const NetworkConfig& net) {
  const double elapsed_s = ns_to_s(t - mem.last_sensing_time);
  return predict(mem.belief, elapsed_s, motion_model(net));
}

bool gate(const TxopContext& ctx, const MinDurations& tau, Decision& dec) {
  if (ctx.available.empty()) {
    dec.action = Action::Skip;
    dec.skip_reason = SkipReason::NoAvailableSta;
    return false;
  }
  if (ctx.window_end - ctx.t < tau.overall) {
    dec.action = Action::Skip;
    dec.skip_reason = SkipReason::WindowTooShort;
    return false;
  }
  return true;
}

/// Grant bytes along a fixed order with the add-then-check discipline: each
/// station's full backlog is subtracted from the remainder, the station that
/// overdraws it is still included with a truncated grant, then the loop
/// stops.
void grant_in_order(const std::vector<int>& order, const std::vector<StaRecord>& stas,
                    std::int64_t budget, Decision& dec) {
  std::int64_t remaining = budget;
  for (int id : order) {
    const std::int64_t backlog = stas[id].backlog;
    dec.selection.push_back(id);
    dec.granted.push_back(std::min(backlog, std::max<std::int64_t>(remaining, 0)));
    remaining -= backlog;
    if (remaining < 0) break;
  }
}

void select_sensing(Decision& dec, const TxopContext& ctx, const NetworkConfig& net,
                    const TimingConfig& timing, RngStream& selection) {
  const std::vector<StaRecord>& stas = *ctx.stas;
  const bool coop = net.mode == Mode::Cooperative;
  const bool random_triple = net.scheme == Scheme::RsmsS || net.scheme == Scheme::RsmsSC;

  // Cooperative sensing draws from every station; non-cooperative sensing
  // only from the stations listening right now.
  std::vector<int> pool;
  if (coop) {
    pool.resize(stas.size());
    for (std::size_t i = 0; i < stas.size(); ++i) pool[i] = static_cast<int>(i);
  } else {
    pool = ctx.available;
  }

  if (pool.size() < 3) {
    dec.action = Action::Skip;
    dec.skip_reason = SkipReason::TooFewCandidates;
    return;
  }

  if (random_triple) {
    const auto triple = rsms_triple(pool, selection);
    dec.selection.assign(triple.begin(), triple.end());
    return;
  }

  std::vector<std::pair<int, double>> avail_snr;
  avail_snr.reserve(pool.size());
  for (int id : pool) avail_snr.emplace_back(id, stas[id].ul_snr[ctx.link]);
  const std::vector<int> candidate_ids = nominate_candidates(avail_snr, net.k);

  std::vector<AnchorSta> candidates;
  candidates.reserve(candidate_ids.size());
  for (int id : candidate_ids) {
    candidates.push_back({id, {stas[id].pos_x, stas[id].pos_y}, stas[id].ul_snr[ctx.link]});
  }
  const auto choice =
      select_sensing_triple(candidates, dec.predicted.state.position(),
                            net.bandwidth_hz[ctx.link], timing.ltf_repetitions);
  if (!choice) {
    dec.action = Action::Skip;
    dec.skip_reason = SkipReason::DegenerateTriple;
    return;
  }
  dec.selection.assign(choice->ids.begin(), choice->ids.end());
}

void select_comm(Decision& dec, const TxopContext& ctx, const NetworkConfig& net,
                 const TimingConfig& timing, RngStream& selection) {
  const std::vector<StaRecord>& stas = *ctx.stas;
  const bool random_subset = net.scheme == Scheme::RsmsC || net.scheme == Scheme::RsmsSC;
  const MinDurations tau = min_durations(timing);

  const TimeNs horizon = std::min(dec.budget_horizon, ctx.window_end);
  const TimeNs budget_ns = std::max<TimeNs>(horizon - ctx.t - tau.comm, 0);
  double snr_sum = 0.0;
  for (int id : ctx.available) snr_sum += stas[id].dl_snr[ctx.link];
  const double mean_snr = snr_sum / static_cast<double>(ctx.available.size());
  const std::int64_t budget =
      byte_budget(net.bandwidth_hz[ctx.link], mean_snr, ns_to_s(budget_ns));

  if (random_subset) {
    const std::vector<int> chosen = rsms_subset(ctx.available, selection);
    if (chosen.empty()) {
      dec.action = Action::Skip;
      dec.skip_reason = SkipReason::EmptyCommSelection;
      return;
    }
    grant_in_order(chosen, stas, budget, dec);
    return;
  }

  // Weights derive from z-scores over the whole available set; stations with
  // an empty backlog drop out before sorting (log utility needs >= 1 byte).
  std::vector<double> received;
  received.reserve(ctx.available.size());
  for (int id : ctx.available) received.push_back(static_cast<double>(stas[id].bytes_received));
  const std::vector<double> z = zscore(received);

  std::vector<CommCandidate> eligible;
  for (std::size_t i = 0; i < ctx.available.size(); ++i) {
    const int id = ctx.available[i];
    if (stas[id].backlog < 1) continue;
    CommCandidate c;
    c.id = id;
    c.bytes_received = stas[id].bytes_received;
    c.backlog = stas[id].backlog;
    c.weight = pf_weight(z[i]);
    c.utility_per_byte = utility_per_byte(c.weight, c.backlog);
    eligible.push_back(c);
  }
  if (eligible.empty()) {
    dec.action = Action::Skip;
    dec.skip_reason = SkipReason::EmptyCommSelection;
    return;
  }

  const CommSelection sel = select_comm_stas(std::move(eligible), budget);
  dec.selection = sel.ids;
  dec.granted = sel.granted;
}

}  // namespace

MinDurations min_durations(const TimingConfig& timing) {
  MinDurations d;
  d.sensing = 3 * timing.sifs() + 2 * timing.tf() + timing.cts() + timing.ndp();
  d.comm = 3 * timing.sifs() + timing.tf() + timing.cts() + timing.ndp() + timing.ack();
  d.overall = std::max(d.sensing, d.comm);
  return d;
}

double threshold_time_ns(TimeNs last_sensing, TimeNs window_end, int n_sensing, double alpha) {
  if (last_sensing > window_end) throw std::invalid_argument("last sensing beyond window end");
  if (n_sensing < 0) throw std::invalid_argument("negative sensing count");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha outside (0,1)");
  const double a = std::pow(alpha, n_sensing + 1);
  return a * static_cast<double>(last_sensing) + (1.0 - a) * static_cast<double>(window_end);
}

Decision decide_noncoop(const PolicyMemory& mem, const TxopContext& ctx, const NetworkConfig& net,
                        const TimingConfig& timing) {
  Decision dec;
  dec.predicted = predict_at(mem, ctx.t, net);
  if (!gate(ctx, min_durations(timing), dec)) return dec;

  const double t_star =
      threshold_time_ns(mem.last_sensing_time, ctx.window_end, mem.sensing_count_in_window,
                        net.alpha);
  if (ctx.available.size() >= 3 && static_cast<double>(ctx.t) > t_star) {
    dec.action = Action::Sense;
  } else {
    dec.action = Action::Communicate;
    dec.budget_horizon = ctx.window_end;
  }
  return dec;
}

Decision decide_coop(const PolicyMemory& mem, const TxopContext& ctx, const NetworkConfig& net,
                     const TimingConfig& timing) {
  Decision dec;
  dec.predicted = predict_at(mem, ctx.t, net);
  const MinDurations tau = min_durations(timing);
  if (!gate(ctx, tau, dec)) return dec;

  const double t = static_cast<double>(ctx.t);
  const double t_star =
      threshold_time_ns(mem.last_sensing_time, ctx.window_end, mem.sensing_count_in_window,
                        net.alpha);
  const double sensing_end = static_cast<double>(mem.last_sensing_time + tau.sensing);

  if (t <= t_star - static_cast<double>(tau.comm)) {
    dec.action = Action::Communicate;
    dec.budget_horizon = static_cast<TimeNs>(t_star);
    return dec;
  }
  const double next_fits = ctx.next_txop_time == kNoTxop
                               ? std::numeric_limits<double>::infinity()
                               : static_cast<double>(ctx.next_txop_time - tau.comm);
  if (t < std::min(sensing_end, next_fits)) {
    // The budget horizon moves to the next scheduled TXOP for this decision
    // only; the threshold itself is recomputed fresh each time.
    dec.action = Action::Communicate;
    dec.budget_horizon = ctx.next_txop_time == kNoTxop ? ctx.window_end : ctx.next_txop_time;
    return dec;
  }
  if (t > std::max(t_star, sensing_end)) {
    if (static_cast<int>(ctx.available.size()) == static_cast<int>(ctx.stas->size())) {
      dec.action = Action::Sense;
    } else {
      dec.action = Action::Skip;
      dec.skip_reason = SkipReason::CoopAwaitFullAvailability;
    }
    return dec;
  }
  dec.action = Action::Skip;
  dec.skip_reason = SkipReason::CoopCriteriaGap;
  return dec;
}

std::vector<int> rsms_subset(const std::vector<int>& ids, RngStream& selection) {
  std::vector<int> chosen;
  for (int id : ids) {
    if (selection.coin()) chosen.push_back(id);
  }
  return chosen;
}

std::array<int, 3> rsms_triple(const std::vector<int>& ids, RngStream& selection) {
  if (ids.size() < 3) throw std::invalid_argument("triple needs at least 3 ids");
  std::vector<int> pool = ids;
  std::array<int, 3> out{};
  for (int j = 0; j < 3; ++j) {
    const std::size_t pick = selection.uniform_below(pool.size());
    out[j] = pool[pick];
    pool[pick] = pool.back();
    pool.pop_back();
  }
  std::sort(out.begin(), out.end());
  return out;
}

void select_for_decision(Decision& dec, const TxopContext& ctx, const NetworkConfig& net,
                         const TimingConfig& timing, RngStream& selection) {
  if (dec.action == Action::Sense) {
    select_sensing(dec, ctx, net, timing, selection);
  } else if (dec.action == Action::Communicate) {
    select_comm(dec, ctx, net, timing, selection);
  } else {
    throw std::logic_error("selection requires a sense or communicate decision");
  }
}

void commit_sensing(PolicyMemory& mem, const TrackBelief& predicted, const Measurement& meas,
                    TimeNs t) {
  mem.belief = update(predicted, meas);
  mem.last_sensing_time = t;
  mem.sensing_count_in_window += 1;
}

const char* to_string(Action a) {
  switch (a) {
    case Action::Sense: return "1";
    case Action::Communicate: return "0";
    case Action::Skip: return "skip";
  }
  return "?";
}

}  // namespace emlsr
