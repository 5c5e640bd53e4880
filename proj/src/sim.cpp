#include "emlsr/sim.hpp"

#include "emlsr/crlb.hpp"
#include "emlsr/kalman.hpp"
#include "emlsr/policy.hpp"
#include "emlsr/scheduler.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <string>

namespace emlsr {

double free_space_path_loss_db(double distance_m, double freq_hz) {
  const double d = std::max(distance_m, 0.1);
  return 20.0 * std::log10(d) + 20.0 * std::log10(freq_hz) - 147.55;
}

double noise_floor_dbm(double bandwidth_hz, double noise_figure_db) {
  return -174.0 + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
}

LinkBudget snr_model(double ap_x, double ap_y, double sta_x, double sta_y, int link,
                     const NetworkConfig& net) {
  const double dx = ap_x - sta_x;
  const double dy = ap_y - sta_y;
  const double d = std::sqrt(dx * dx + dy * dy);
  const double fspl = free_space_path_loss_db(d, net.carrier_freq_hz[link]);
  const double noise = noise_floor_dbm(net.bandwidth_hz[link], net.noise_figure_db);
  const double mimo = 10.0 * std::log10(static_cast<double>(net.mimo_tx * net.mimo_rx));
  LinkBudget b;
  b.ul_snr_db = net.sta_tx_power_dbm + mimo - fspl - noise;
  b.dl_snr_db = net.ap_tx_power_dbm + mimo - fspl - noise;
  return b;
}

TimeNs contention_next_txop(TimeNs now, RngStream& contention) {
  return now + kDifs + static_cast<TimeNs>(contention.uniform_below(kBackoffWindow)) * kSlot;
}

std::int64_t accrue_bytes(std::int64_t rate_bps, TimeNs elapsed_ns, std::int64_t& carry) {
  const std::int64_t num = rate_bps * elapsed_ns + carry;
  carry = num % 8'000'000'000LL;
  return num / 8'000'000'000LL;
}

TimeNs comm_exchange_duration(const std::vector<std::int64_t>& granted,
                              const std::vector<double>& rates_bps, const TimingConfig& timing) {
  TimeNs dur = min_durations(timing).comm;
  for (std::size_t i = 0; i < granted.size(); ++i) {
    if (granted[i] <= 0) continue;
    dur += static_cast<TimeNs>(
        std::ceil(static_cast<double>(granted[i]) * 8e9 / rates_bps[i]));
  }
  return dur;
}

namespace {

std::string fmt_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

enum class EventKind { TxopGained, ExchangeEnd, WindowEnd };

struct Event {
  TimeNs t = 0;
  EventKind kind = EventKind::TxopGained;
  int link = 0;
  std::uint64_t seq = 0;
};

struct EventLater {
  bool operator()(const Event& a, const Event& b) const {
    if (a.t != b.t) return a.t > b.t;
    return a.seq > b.seq;
  }
};

class Engine {
 public:
  Engine(const SimConfig& cfg, bool enable_trace)
      : cfg_(cfg),
        net_(cfg_.network),
        timing_(cfg_.timing),
        tau_(min_durations(cfg_.timing)),
        trace_enabled_(enable_trace),
        motion_(net_.seed, StreamId::Motion),
        measurement_(net_.seed, StreamId::Measurement),
        contention_(net_.seed, StreamId::Contention),
        placement_(net_.seed, StreamId::Placement),
        selection_(net_.seed, StreamId::Selection) {}

  RunMetrics run() {
    init_scenario();

    window_end_ = timing_.window();
    windows_done_ = 0;
    push(window_end_, EventKind::WindowEnd, -1);
    for (int l = 0; l < net_.n_links; ++l) schedule_txop(l, 0);

    while (!queue_.empty()) {
      const Event ev = queue_.top();
      queue_.pop();
      check(ev.t >= last_event_time_, "event time went backwards");
      last_event_time_ = ev.t;
      switch (ev.kind) {
        case EventKind::TxopGained:
          on_txop(ev);
          break;
        case EventKind::ExchangeEnd:
          on_exchange_end(ev);
          break;
        case EventKind::WindowEnd:
          on_window_end(ev);
          if (windows_done_ == timing_.n_windows) return finish();
          break;
      }
    }
    throw std::logic_error("event queue drained before the last window ended");
  }

 private:
  // --- setup -------------------------------------------------------------

  void init_scenario() {
    auto draw_coord = [this] {
      return (placement_.uniform01() * 2.0 - 1.0) * net_.arena_half_width_m;
    };
    ap_x_ = draw_coord();
    ap_y_ = draw_coord();

    stas_.resize(net_.n_stas);
    for (int m = 0; m < net_.n_stas; ++m) {
      StaRecord& sta = stas_[m];
      sta.id = m;
      sta.pos_x = draw_coord();
      sta.pos_y = draw_coord();
      sta.ul_snr.resize(net_.n_links);
      sta.dl_snr.resize(net_.n_links);
      for (int l = 0; l < net_.n_links; ++l) {
        const LinkBudget lb = snr_model(ap_x_, ap_y_, sta.pos_x, sta.pos_y, l, net_);
        sta.ul_snr[l] = std::pow(10.0, lb.ul_snr_db / 10.0);
        sta.dl_snr[l] = std::pow(10.0, lb.dl_snr_db / 10.0);
      }
    }

    const double heading = placement_.uniform01() * 2.0 * M_PI;
    truth_ = {0.0, std::cos(heading), 0.0, std::sin(heading)};
    truth_time_ = 0;

    const TrackBelief init = initial_belief(truth_);
    if (net_.mode == Mode::Cooperative) {
      memories_.assign(1, PolicyMemory{0, init, 0, timing_.window()});
    } else {
      memories_.assign(net_.n_links, PolicyMemory{0, init, 0, timing_.window()});
    }

    sta_busy_until_.assign(net_.n_stas, -1);
    last_accrual_.assign(net_.n_stas, 0);
    carry_bits_ns_.assign(net_.n_stas, 0);
    arrived_.assign(net_.n_stas, 0);
    delivered_.assign(net_.n_stas, 0);
    next_txop_.assign(net_.n_links, kNoTxop);
    parked_.assign(net_.n_links, false);
    arrival_rate_bps_ = static_cast<std::int64_t>(std::llround(net_.dl_arrival_rate_bps));
  }

  // --- event handlers ----------------------------------------------------

  void on_txop(const Event& ev) {
    const int l = ev.link;
    next_txop_[l] = kNoTxop;
    accrue_traffic(ev.t);
    advance_truth(ev.t);

    TxopContext ctx;
    ctx.t = ev.t;
    ctx.link = l;
    ctx.window_end = window_end_;
    ctx.stas = &stas_;
    for (int m = 0; m < net_.n_stas; ++m) {
      if (sta_available(sta_busy_until_[m], ev.t)) ctx.available.push_back(m);
    }
    ctx.next_txop_time = kNoTxop;
    for (int j = 0; j < net_.n_links; ++j) {
      if (j != l) ctx.next_txop_time = std::min(ctx.next_txop_time, next_txop_[j]);
    }

    PolicyMemory& mem = memory_for(l);
    Decision dec = net_.mode == Mode::Cooperative ? decide_coop(mem, ctx, net_, timing_)
                                                  : decide_noncoop(mem, ctx, net_, timing_);
    if (dec.action != Action::Skip) select_for_decision(dec, ctx, net_, timing_, selection_);

    const double err = (truth_.position() - dec.predicted.state.position()).squaredNorm();
    check(std::isfinite(err), "non-finite squared position error");
    metrics_.mse_samples.push_back(err);

    if (dec.action == Action::Sense) execute_sensing(dec, ctx, mem);
    if (dec.action == Action::Communicate) execute_comm(dec, ctx);
    if (dec.action == Action::Skip) {
      ++metrics_.skip_count;
      schedule_txop(l, ev.t);
    }

    if (trace_enabled_) {
      trace_ += std::to_string(ev.t);
      trace_ += ",txop,";
      trace_ += std::to_string(l);
      trace_ += ',';
      trace_ += to_string(dec.action);
      trace_ += ',';
      for (std::size_t i = 0; i < dec.selection.size(); ++i) {
        if (i) trace_ += '|';
        trace_ += std::to_string(dec.selection[i]);
      }
      trace_ += ',';
      trace_ += fmt_double(err);
      trace_ += '\n';
    }
  }

  void execute_sensing(Decision& dec, const TxopContext& ctx, PolicyMemory& mem) {
    SensingGeometry geom;
    geom.bandwidth_hz = net_.bandwidth_hz[ctx.link];
    geom.ltf_repetitions = timing_.ltf_repetitions;
    for (int j = 0; j < 3; ++j) {
      const StaRecord& sta = stas_[dec.selection[j]];
      geom.stas[j] = {sta.id, {sta.pos_x, sta.pos_y}, sta.ul_snr[ctx.link]};
    }

    // The measurement models an efficient trilateration estimator, so its
    // variance comes from the geometry at the true position; the predicted
    // position is the fallback when the target sits on the triple's line.
    geom.ref_pos = truth_.position();
    std::optional<double> var = measurement_variance(geom);
    if (!var) {
      geom.ref_pos = dec.predicted.state.position();
      var = measurement_variance(geom);
    }
    if (!var) {
      // Downgrade; the caller's skip path does the bookkeeping.
      dec.action = Action::Skip;
      dec.skip_reason = SkipReason::DegenerateTriple;
      dec.selection.clear();
      return;
    }

    const Measurement z = synthesize_measurement(truth_, *var, measurement_);
    commit_sensing(mem, dec.predicted, z, ctx.t);

    const TimeNs end = ctx.t + tau_.sensing;
    check(end <= window_end_, "sensing exchange crosses the window boundary");
    occupy(dec.selection, ctx.t, end);
    push(end, EventKind::ExchangeEnd, ctx.link);
    ++metrics_.sensing_count;
  }

  void execute_comm(Decision& dec, const TxopContext& ctx) {
    // Grants were budgeted against the mean-SNR capacity; re-truncate
    // against the wall clock so the exchange provably ends by the window.
    std::vector<double> rates(dec.selection.size());
    TimeNs data_budget_ns = window_end_ - ctx.t - tau_.comm;
    for (std::size_t i = 0; i < dec.selection.size(); ++i) {
      const StaRecord& sta = stas_[dec.selection[i]];
      rates[i] = net_.bandwidth_hz[ctx.link] * std::log2(1.0 + sta.dl_snr[ctx.link]);
      const auto cap = static_cast<std::int64_t>(
          std::floor(static_cast<double>(data_budget_ns) * rates[i] / 8e9));
      dec.granted[i] = std::min(dec.granted[i], std::max<std::int64_t>(cap, 0));
      if (dec.granted[i] > 0) {
        data_budget_ns -= static_cast<TimeNs>(
            std::ceil(static_cast<double>(dec.granted[i]) * 8e9 / rates[i]));
      }
    }

    for (std::size_t i = 0; i < dec.selection.size(); ++i) {
      StaRecord& sta = stas_[dec.selection[i]];
      check(dec.granted[i] <= sta.backlog, "grant exceeds backlog");
      sta.backlog -= dec.granted[i];
      sta.bytes_received += dec.granted[i];
      delivered_[dec.selection[i]] += dec.granted[i];
      check(delivered_[dec.selection[i]] <= arrived_[dec.selection[i]],
            "delivered more than arrived");
    }

    const TimeNs end = ctx.t + comm_exchange_duration(dec.granted, rates, timing_);
    check(end <= window_end_, "communications exchange crosses the window boundary");
    occupy(dec.selection, ctx.t, end);
    push(end, EventKind::ExchangeEnd, ctx.link);
    ++metrics_.comm_count;
  }

  void on_exchange_end(const Event& ev) {
    schedule_txop(ev.link, ev.t);
    if (trace_enabled_) {
      trace_ += std::to_string(ev.t);
      trace_ += ",exchange_end,";
      trace_ += std::to_string(ev.link);
      trace_ += ",,,\n";
    }
  }

  void on_window_end(const Event& ev) {
    ++windows_done_;
    if (trace_enabled_) {
      trace_ += std::to_string(ev.t);
      trace_ += ",window_end,,,,\n";
    }
    if (windows_done_ == timing_.n_windows) return;

    window_end_ += timing_.window();
    push(window_end_, EventKind::WindowEnd, -1);
    for (PolicyMemory& mem : memories_) {
      mem.sensing_count_in_window = 0;
      mem.window_end = window_end_;
    }
    for (int l = 0; l < net_.n_links; ++l) {
      if (parked_[l]) {
        parked_[l] = false;
        schedule_txop(l, ev.t);
      }
    }
  }

  RunMetrics finish() {
    metrics_.delivered_bytes = delivered_;
    metrics_.sim_time_s = ns_to_s(static_cast<TimeNs>(timing_.n_windows) * timing_.window());
    std::int64_t total = 0;
    for (std::int64_t b : delivered_) total += b;
    metrics_.throughput_bps = 8.0 * static_cast<double>(total) / metrics_.sim_time_s;
    std::vector<double> per_sta(delivered_.begin(), delivered_.end());
    metrics_.jain = jain_index(per_sta);
    double sum = 0.0;
    for (double e : metrics_.mse_samples) sum += e;
    metrics_.mse_mean =
        metrics_.mse_samples.empty() ? 0.0 : sum / static_cast<double>(metrics_.mse_samples.size());
    metrics_.trace = std::move(trace_);
    return std::move(metrics_);
  }

  // --- mechanics ----------------------------------------------------------

  PolicyMemory& memory_for(int link) {
    return net_.mode == Mode::Cooperative ? memories_[0] : memories_[link];
  }

  void push(TimeNs t, EventKind kind, int link) { queue_.push({t, kind, link, seq_++}); }

  /// Draws the next contention time for an idle interface. A draw landing in
  /// the window's tail (no room left for any exchange) parks the interface
  /// until the next window starts.
  void schedule_txop(int link, TimeNs from) {
    const TimeNs tc = contention_next_txop(from, contention_);
    if (tc > window_end_ - tau_.overall) {
      parked_[link] = true;
      next_txop_[link] = kNoTxop;
      return;
    }
    next_txop_[link] = tc;
    push(tc, EventKind::TxopGained, link);
  }

  void occupy(const std::vector<int>& sta_ids, TimeNs now, TimeNs until) {
    for (int id : sta_ids) {
      check(sta_busy_until_[id] < now, "station already engaged in an exchange");
      sta_busy_until_[id] = until;
    }
  }

  void accrue_traffic(TimeNs t) {
    for (int m = 0; m < net_.n_stas; ++m) {
      const TimeNs elapsed = t - last_accrual_[m];
      if (elapsed == 0) continue;
      const std::int64_t bytes = accrue_bytes(arrival_rate_bps_, elapsed, carry_bits_ns_[m]);
      stas_[m].backlog += bytes;
      arrived_[m] += bytes;
      last_accrual_[m] = t;
    }
  }

  void advance_truth(TimeNs t) {
    const MotionModel model{net_.process_noise_intensity, net_.cv_offdiag};
    truth_ = propagate_truth(truth_, ns_to_s(t - truth_time_), model, motion_);
    truth_time_ = t;
  }

  void check(bool cond, const char* what) const {
    if (!cond) {
      throw std::logic_error(std::string("engine invariant violated at t=") +
                             std::to_string(last_event_time_) + "ns, event #" +
                             std::to_string(seq_) + ": " + what);
    }
  }

  const SimConfig cfg_;
  const NetworkConfig& net_;
  const TimingConfig& timing_;
  const MinDurations tau_;
  const bool trace_enabled_;

  RngStream motion_, measurement_, contention_, placement_, selection_;

  double ap_x_ = 0.0, ap_y_ = 0.0;
  std::vector<StaRecord> stas_;
  TargetState truth_;
  TimeNs truth_time_ = 0;
  std::vector<PolicyMemory> memories_;  // one per link, or one shared

  std::priority_queue<Event, std::vector<Event>, EventLater> queue_;
  std::uint64_t seq_ = 0;
  TimeNs last_event_time_ = 0;
  TimeNs window_end_ = 0;
  int windows_done_ = 0;

  std::vector<TimeNs> sta_busy_until_;
  std::vector<TimeNs> last_accrual_;
  std::vector<std::int64_t> carry_bits_ns_;
  std::vector<std::int64_t> arrived_;
  std::vector<std::int64_t> delivered_;
  std::vector<TimeNs> next_txop_;
  std::vector<bool> parked_;
  std::int64_t arrival_rate_bps_ = 0;

  RunMetrics metrics_;
  std::string trace_;
};

}  // namespace

RunMetrics run(const SimConfig& cfg, bool enable_trace) {
  const auto violations = validate_config(cfg.network, cfg.timing);
  if (!violations.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw std::invalid_argument(msg);
  }
  Engine engine(cfg, enable_trace);
  return engine.run();
}

}  // namespace emlsr
