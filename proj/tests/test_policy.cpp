#include "emlsr/policy.hpp"

#include "emlsr/crlb.hpp"
#include "emlsr/scheduler.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace emlsr;

namespace {

std::vector<StaRecord> make_stas(int m, int links = 3) {
  std::vector<StaRecord> stas(m);
  for (int i = 0; i < m; ++i) {
    stas[i].id = i;
    const double th = 2.0 * M_PI * i / m;
    stas[i].pos_x = 6.0 * std::cos(th);
    stas[i].pos_y = 6.0 * std::sin(th);
    stas[i].ul_snr.assign(links, 100.0 + i);
    stas[i].dl_snr.assign(links, 10000.0);
    stas[i].bytes_received = 1000 * i;
    stas[i].backlog = 4000;
  }
  return stas;
}

TxopContext make_ctx(const std::vector<StaRecord>& stas, TimeNs t, TimeNs window_end) {
  TxopContext ctx;
  ctx.t = t;
  ctx.link = 0;
  ctx.window_end = window_end;
  ctx.stas = &stas;
  for (const auto& s : stas) ctx.available.push_back(s.id);
  return ctx;
}

PolicyMemory make_mem(TimeNs t_prime, int n, TimeNs window_end) {
  PolicyMemory mem;
  mem.last_sensing_time = t_prime;
  mem.sensing_count_in_window = n;
  mem.window_end = window_end;
  mem.belief = initial_belief({0, 1, 0, 0});
  return mem;
}

}  // namespace

TEST_CASE("minimum exchange durations") {
  const TimingConfig t;  // 16 / 10.8 / 4.6 / 4.6 / NDP 172 us
  const MinDurations d = min_durations(t);
  CHECK(d.sensing == 246'200);
  CHECK(d.comm == 240'000);
  CHECK(d.overall == 246'200);
}

TEST_CASE("threshold time") {
  // First decision of the window, balanced control variable.
  CHECK(threshold_time_ns(0, 10'240'000, 0, 0.5) == doctest::Approx(5'120'000.0));

  // Control variable near one: the threshold hugs the last sensing time.
  const double near_one = threshold_time_ns(0, 10'240'000, 0, 0.999);
  CHECK(near_one - 0.0 <= 0.001 * 10'240'000.0 + 1e-6);

  // Sensing tendency decays with the per-window count.
  const double late = threshold_time_ns(0, 10'240'000, 1000, 0.5);
  CHECK(late == doctest::Approx(10'240'000.0).epsilon(1e-12));

  // Non-increasing in alpha.
  double prev = 1e300;
  for (double a : {0.01, 0.1, 0.5, 0.9, 0.99}) {
    const double t_star = threshold_time_ns(2'000'000, 10'240'000, 1, a);
    CHECK(t_star <= prev);
    prev = t_star;
  }

  CHECK_THROWS(threshold_time_ns(11'000'000, 10'240'000, 0, 0.5));
  CHECK_THROWS(threshold_time_ns(0, 10'240'000, 0, 1.0));
}

TEST_CASE("non-cooperative decision") {
  const NetworkConfig net;  // alpha 0.5
  const TimingConfig timing;
  const TimeNs window_end = 10'240'000;
  const auto stas = make_stas(6);
  const PolicyMemory mem = make_mem(0, 0, window_end);

  // Empty available set: skip.
  {
    TxopContext ctx = make_ctx(stas, 6'000'000, window_end);
    ctx.available.clear();
    const Decision d = decide_noncoop(mem, ctx, net, timing);
    CHECK(d.action == Action::Skip);
    CHECK(d.skip_reason == SkipReason::NoAvailableSta);
    CHECK(d.predicted.kind == BeliefKind::Predicted);
  }
  // Not enough window left: skip.
  {
    const TxopContext ctx = make_ctx(stas, window_end - 100'000, window_end);
    const Decision d = decide_noncoop(mem, ctx, net, timing);
    CHECK(d.action == Action::Skip);
    CHECK(d.skip_reason == SkipReason::WindowTooShort);
  }
  // Past the threshold with three or more stations: sense.
  {
    const TxopContext ctx = make_ctx(stas, 5'120'001, window_end);
    CHECK(decide_noncoop(mem, ctx, net, timing).action == Action::Sense);
  }
  // Exactly at the threshold: communicate (strict inequality).
  {
    const TxopContext ctx = make_ctx(stas, 5'120'000, window_end);
    const Decision d = decide_noncoop(mem, ctx, net, timing);
    CHECK(d.action == Action::Communicate);
    CHECK(d.budget_horizon == window_end);
  }
  // Two stations cannot trilaterate, whatever the time says.
  {
    TxopContext ctx = make_ctx(stas, 9'000'000, window_end);
    ctx.available = {0, 1};
    CHECK(decide_noncoop(mem, ctx, net, timing).action == Action::Communicate);
  }
  // The prediction advances the position by the elapsed time.
  {
    const TxopContext ctx = make_ctx(stas, 2'000'000, window_end);
    const Decision d = decide_noncoop(mem, ctx, net, timing);
    CHECK(d.predicted.state.x == doctest::Approx(0.002).epsilon(1e-9));
  }
}

TEST_CASE("raising alpha never turns sensing into communications") {
  const TimingConfig timing;
  const TimeNs window_end = 10'240'000;
  const auto stas = make_stas(5);
  const PolicyMemory mem = make_mem(1'000'000, 1, window_end);
  const TxopContext ctx = make_ctx(stas, 7'345'678, window_end);

  bool seen_sense = false;
  for (double a : {0.05, 0.2, 0.4, 0.6, 0.8, 0.95}) {
    NetworkConfig net;
    net.alpha = a;
    const bool sense = decide_noncoop(mem, ctx, net, timing).action == Action::Sense;
    if (seen_sense) CHECK(sense);
    seen_sense = seen_sense || sense;
  }
  CHECK(seen_sense);
}

TEST_CASE("sensing commit bookkeeping") {
  PolicyMemory mem = make_mem(0, 0, 10'240'000);
  const MotionModel model{0.1, CvOffdiag::Printed};
  const TrackBelief pred = predict(mem.belief, 0.003, model);
  const Measurement meas{{0.004, 0.001}, 1e-6};

  commit_sensing(mem, pred, meas, 3'000'000);
  CHECK(mem.sensing_count_in_window == 1);
  CHECK(mem.last_sensing_time == 3'000'000);
  CHECK(mem.belief.kind == BeliefKind::Updated);

  // The next threshold uses the incremented count: alpha^2 with one commit.
  const double t_star = threshold_time_ns(mem.last_sensing_time, 10'240'000,
                                          mem.sensing_count_in_window, 0.5);
  CHECK(t_star == doctest::Approx(0.25 * 3'000'000.0 + 0.75 * 10'240'000.0));
}

TEST_CASE("cooperative decision criteria") {
  NetworkConfig net;
  net.mode = Mode::Cooperative;
  const TimingConfig timing;
  const TimeNs window_end = 10'240'000;
  const auto stas = make_stas(8);

  // Criterion 1: a communications TXOP fits before the threshold.
  {
    const PolicyMemory mem = make_mem(0, 0, window_end);  // t* = 5.12 ms
    const TxopContext ctx = make_ctx(stas, 1'000'000, window_end);
    const Decision d = decide_coop(mem, ctx, net, timing);
    CHECK(d.action == Action::Communicate);
    CHECK(d.budget_horizon == 5'120'000);
  }
  // Criterion 2: the last sensing exchange is still in the air, a
  // communications TXOP finishes before the next scheduled TXOP, and the
  // first criterion no longer applies (t is within tau_c of t*).
  {
    NetworkConfig eager = net;
    eager.alpha = 0.9;
    const PolicyMemory mem = make_mem(6'000'000, 0, window_end);  // t* = 6.424 ms
    TxopContext ctx = make_ctx(stas, 6'200'000, window_end);      // during the exchange
    ctx.next_txop_time = 6'500'000;
    const Decision d = decide_coop(mem, ctx, eager, timing);
    CHECK(d.action == Action::Communicate);
    CHECK(d.budget_horizon == ctx.next_txop_time);
  }
  // Criterion 3: past both the threshold and the last sensing exchange.
  {
    const PolicyMemory mem = make_mem(1'000'000, 2, window_end);
    // t* = 0.125 * 1e6 + 0.875 * 10.24e6 = 9.085 ms
    const TxopContext ctx = make_ctx(stas, 9'200'000, window_end);
    const Decision d = decide_coop(mem, ctx, net, timing);
    CHECK(d.action == Action::Sense);
  }
  // Criterion 3 defers until every station is idle.
  {
    const PolicyMemory mem = make_mem(1'000'000, 2, window_end);
    TxopContext ctx = make_ctx(stas, 9'200'000, window_end);
    ctx.available.pop_back();
    const Decision d = decide_coop(mem, ctx, net, timing);
    CHECK(d.action == Action::Skip);
    CHECK(d.skip_reason == SkipReason::CoopAwaitFullAvailability);
  }
  // The uncovered gap between criteria: skip.
  {
    const PolicyMemory mem = make_mem(0, 0, window_end);  // t* = 5.12 ms
    // Inside (t* - tau_c, t*], not during a sensing exchange, so neither
    // communications criterion applies, and t <= t* blocks sensing.
    const TxopContext ctx = make_ctx(stas, 5'000'000, window_end);
    const Decision d = decide_coop(mem, ctx, net, timing);
    CHECK(d.action == Action::Skip);
    CHECK(d.skip_reason == SkipReason::CoopCriteriaGap);
  }
  // Gating mirrors the non-cooperative path.
  {
    const PolicyMemory mem = make_mem(0, 0, window_end);
    TxopContext ctx = make_ctx(stas, 1'000'000, window_end);
    ctx.available.clear();
    CHECK(decide_coop(mem, ctx, net, timing).skip_reason == SkipReason::NoAvailableSta);
  }
}

TEST_CASE("original sensing selection") {
  NetworkConfig net;
  net.k = 4;
  const TimingConfig timing;
  RngStream sel(1, StreamId::Selection);
  const auto stas = make_stas(3);
  TxopContext ctx = make_ctx(stas, 6'000'000, 10'240'000);

  Decision dec;
  dec.action = Action::Sense;
  dec.predicted = predict(initial_belief({0, 0, 0, 0}), 0.0, MotionModel{});
  select_for_decision(dec, ctx, net, timing, sel);
  CHECK(dec.action == Action::Sense);
  CHECK(dec.selection == std::vector<int>{0, 1, 2});
}

TEST_CASE("an all-degenerate candidate pool downgrades sensing to a skip") {
  NetworkConfig net;
  net.k = 4;
  const TimingConfig timing;
  RngStream sel(1, StreamId::Selection);
  // Three stations on the x-axis, predicted target position on the same line.
  std::vector<StaRecord> stas = make_stas(3);
  stas[0].pos_x = 2.0;  stas[0].pos_y = 0.0;
  stas[1].pos_x = 5.0;  stas[1].pos_y = 0.0;
  stas[2].pos_x = -4.0; stas[2].pos_y = 0.0;
  TxopContext ctx = make_ctx(stas, 6'000'000, 10'240'000);

  Decision dec;
  dec.action = Action::Sense;
  dec.predicted = predict(initial_belief({0, 0, 0, 0}), 0.0, MotionModel{});
  select_for_decision(dec, ctx, net, timing, sel);
  CHECK(dec.action == Action::Skip);
  CHECK(dec.skip_reason == SkipReason::DegenerateTriple);
  CHECK(dec.selection.empty());
}

TEST_CASE("cooperative sensing draws candidates from every station") {
  NetworkConfig net;
  net.mode = Mode::Cooperative;
  net.k = 8;
  const TimingConfig timing;
  RngStream sel(1, StreamId::Selection);
  const auto stas = make_stas(8);
  TxopContext ctx = make_ctx(stas, 6'000'000, 10'240'000);
  ctx.available = {0};  // only one listening, yet all eight are candidates

  Decision dec;
  dec.action = Action::Sense;
  dec.predicted = predict(initial_belief({0, 0, 0, 0}), 0.0, MotionModel{});
  select_for_decision(dec, ctx, net, timing, sel);
  CHECK(dec.action == Action::Sense);
  CHECK(dec.selection.size() == 3);
  // The pool had ids beyond the available set; with k = 8 every station was
  // eligible, and the spread-out ring makes some id > 0 optimal.
  bool beyond_available = false;
  for (int id : dec.selection) beyond_available = beyond_available || id > 0;
  CHECK(beyond_available);
}

TEST_CASE("communications selection grants against the horizon budget") {
  NetworkConfig net;
  const TimingConfig timing;
  RngStream sel(1, StreamId::Selection);
  const auto stas = make_stas(4);
  TxopContext ctx = make_ctx(stas, 2'000'000, 10'240'000);

  Decision dec;
  dec.action = Action::Communicate;
  dec.budget_horizon = 10'240'000;
  dec.predicted = predict(initial_belief({0, 0, 0, 0}), 0.0, MotionModel{});
  select_for_decision(dec, ctx, net, timing, sel);
  CHECK(dec.action == Action::Communicate);
  CHECK(dec.selection.size() == 4);  // ample budget, everyone granted in full
  for (std::size_t i = 0; i < dec.selection.size(); ++i)
    CHECK(dec.granted[i] == stas[dec.selection[i]].backlog);
}

TEST_CASE("empty backlogs degrade communications to a skip") {
  NetworkConfig net;
  const TimingConfig timing;
  RngStream sel(1, StreamId::Selection);
  auto stas = make_stas(4);
  for (auto& s : stas) s.backlog = 0;
  TxopContext ctx = make_ctx(stas, 2'000'000, 10'240'000);

  Decision dec;
  dec.action = Action::Communicate;
  dec.budget_horizon = 10'240'000;
  select_for_decision(dec, ctx, net, timing, sel);
  CHECK(dec.action == Action::Skip);
  CHECK(dec.skip_reason == SkipReason::EmptyCommSelection);
}

TEST_CASE("random subset draw is uniform") {
  RngStream sel(97, StreamId::Selection);
  const std::vector<int> ids = {1, 2};
  std::map<std::vector<int>, int> counts;
  const int n = 10'000;
  for (int i = 0; i < n; ++i) counts[rsms_subset(ids, sel)]++;
  CHECK(counts.size() == 4);
  double chi2 = 0.0;
  const double expect = n / 4.0;
  for (const auto& [subset, c] : counts) chi2 += (c - expect) * (c - expect) / expect;
  CHECK(chi2 < 11.345);  // chi-square critical value, 3 dof, p = 0.01
}

TEST_CASE("random triple draw is uniform over 3-subsets") {
  RngStream sel(13, StreamId::Selection);
  const std::vector<int> ids = {2, 4, 6, 8};
  std::map<std::array<int, 3>, int> counts;
  const int n = 10'000;
  for (int i = 0; i < n; ++i) counts[rsms_triple(ids, sel)]++;
  CHECK(counts.size() == 4);  // C(4,3)
  double chi2 = 0.0;
  const double expect = n / 4.0;
  for (const auto& [t, c] : counts) {
    CHECK(t[0] < t[1]);
    CHECK(t[1] < t[2]);
    chi2 += (c - expect) * (c - expect) / expect;
  }
  CHECK(chi2 < 11.345);
}
