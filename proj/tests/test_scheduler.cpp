#include "emlsr/scheduler.hpp"

#include "emlsr/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>

using namespace emlsr;

TEST_CASE("z-scores") {
  CHECK(zscore({5, 5, 5}) == std::vector<double>{0, 0, 0});
  const auto two = zscore({0, 10});
  CHECK(two[0] == doctest::Approx(-1.0));
  CHECK(two[1] == doctest::Approx(1.0));
  const auto four = zscore({1, 2, 3, 4});
  CHECK(four[0] == doctest::Approx(-1.3416).epsilon(1e-4));
  CHECK(four[1] == doctest::Approx(-0.4472).epsilon(1e-4));
  CHECK(four[2] == doctest::Approx(0.4472).epsilon(1e-4));
  CHECK(four[3] == doctest::Approx(1.3416).epsilon(1e-4));
  CHECK_THROWS(zscore({}));
}

TEST_CASE("weights decay in the z-score") {
  CHECK(pf_weight(0.0) == 1.0);
  CHECK(pf_weight(1.0) == doctest::Approx(0.36788).epsilon(1e-4));
  CHECK(pf_weight(-1.0) == doctest::Approx(2.71828).epsilon(1e-4));
}

TEST_CASE("utility per byte") {
  CHECK(utility_per_byte(1.0, 1) == 0.0);
  CHECK(utility_per_byte(1.0, 3) == doctest::Approx(std::log(3.0) / 3.0).epsilon(1e-12));
  CHECK(utility_per_byte(1.0, 100) == doctest::Approx(0.04605).epsilon(1e-3));
  CHECK(utility_per_byte(1.0, 10000) == doctest::Approx(0.000921).epsilon(1e-3));
  // Smaller backlog wins priority at equal weight.
  CHECK(utility_per_byte(1.0, 100) > utility_per_byte(1.0, 10000));
  CHECK_THROWS(utility_per_byte(1.0, 0));
}

TEST_CASE("byte budget from the Shannon rate") {
  CHECK(byte_budget(40e6, 15.0, 0.0) == 0);
  CHECK(byte_budget(40e6, 15.0, 1e-3) == 20'000);
  CHECK(byte_budget(40e6, 0.0, 10.0) == 0);
}

TEST_CASE("greedy selection follows the add-then-check discipline") {
  // One candidate fitting the budget is granted in full.
  {
    const CommSelection sel =
        select_comm_stas({{7, 0, 400, 1.0, utility_per_byte(1.0, 400)}}, 1000);
    CHECK(sel.ids == std::vector<int>{7});
    CHECK(sel.granted == std::vector<std::int64_t>{400});
  }
  // Equal weights: the small backlog sorts first; the big one overflows the
  // budget, is still included, and is truncated to what remained.
  {
    std::vector<CommCandidate> cands = {{0, 0, 100, 1.0, utility_per_byte(1.0, 100)},
                                        {1, 0, 10000, 1.0, utility_per_byte(1.0, 10000)}};
    const CommSelection sel = select_comm_stas(cands, 5000);
    CHECK(sel.ids == std::vector<int>{0, 1});
    CHECK(sel.granted == std::vector<std::int64_t>{100, 4900});
  }
  // A zero budget still includes the first candidate, with nothing granted.
  {
    std::vector<CommCandidate> cands = {{0, 0, 100, 1.0, utility_per_byte(1.0, 100)},
                                        {1, 0, 50, 1.0, utility_per_byte(1.0, 50)}};
    const CommSelection sel = select_comm_stas(cands, 0);
    CHECK(sel.ids.size() == 1);
    CHECK(sel.granted == std::vector<std::int64_t>{0});
  }
}

TEST_CASE("objective sums weighted log backlogs") {
  CHECK(weighted_pf_objective({}, {}) == 0.0);
  const std::vector<CommCandidate> cands = {{3, 0, 3, 2.0, 0.0}};
  CHECK(weighted_pf_objective(cands, {3}) == doctest::Approx(2.0 * std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("exhaustive knapsack oracle") {
  const auto mk = [](int id, std::int64_t b) {
    return CommCandidate{id, 0, b, 1.0, utility_per_byte(1.0, b)};
  };
  {
    const KnapsackResult r = exact_knapsack({mk(0, 5)}, 10);
    CHECK(r.ids == std::vector<int>{0});
  }
  {
    // ln 7 + ln 3 > ln 8, so the pair beats the single big item.
    const KnapsackResult r = exact_knapsack({mk(0, 8), mk(1, 7), mk(2, 3)}, 10);
    CHECK(r.ids == std::vector<int>{1, 2});
    CHECK(r.objective == doctest::Approx(std::log(7.0) + std::log(3.0)).epsilon(1e-12));
  }
  {
    const KnapsackResult r = exact_knapsack({mk(0, 2), mk(1, 3), mk(2, 4)}, 100);
    CHECK(r.ids == std::vector<int>{0, 1, 2});
  }
  CHECK_THROWS(exact_knapsack(std::vector<CommCandidate>(21), 10));
}

TEST_CASE("greedy output is utility-ordered and budget-feasible") {
  RngStream rng(19, StreamId::Selection);
  double ratio_sum = 0.0;
  double ratio_min = 1e300;
  const int instances = 500;
  for (int i = 0; i < instances; ++i) {
    const int n = 2 + static_cast<int>(rng.uniform_below(11));  // 2..12 stations
    std::vector<CommCandidate> cands;
    std::int64_t total = 0;
    for (int id = 0; id < n; ++id) {
      CommCandidate c;
      c.id = id;
      c.bytes_received = static_cast<std::int64_t>(rng.uniform_below(100'000));
      c.backlog = 1 + static_cast<std::int64_t>(rng.uniform_below(20'000));
      total += c.backlog;
      cands.push_back(c);
    }
    std::vector<double> received;
    for (const auto& c : cands) received.push_back(static_cast<double>(c.bytes_received));
    const std::vector<double> z = zscore(received);
    for (int id = 0; id < n; ++id) {
      cands[id].weight = pf_weight(z[id]);
      cands[id].utility_per_byte = utility_per_byte(cands[id].weight, cands[id].backlog);
    }
    const std::int64_t budget = static_cast<std::int64_t>(rng.uniform_below(total + 1));

    const CommSelection sel = select_comm_stas(cands, budget);

    // Grant order is non-increasing in utility per byte.
    auto util_of = [&cands](int id) {
      for (const auto& c : cands)
        if (c.id == id) return c.utility_per_byte;
      return -1.0;
    };
    for (std::size_t j = 0; j + 1 < sel.ids.size(); ++j)
      CHECK(util_of(sel.ids[j]) >= util_of(sel.ids[j + 1]));

    // Every prefix except the final element fits the budget whole, and the
    // truncated grants always fit.
    std::int64_t prefix = 0;
    for (std::size_t j = 0; j + 1 < sel.ids.size(); ++j) {
      for (const auto& c : cands)
        if (c.id == sel.ids[j]) prefix += c.backlog;
      CHECK(prefix <= budget);
    }
    std::int64_t granted_total = std::accumulate(sel.granted.begin(), sel.granted.end(),
                                                 static_cast<std::int64_t>(0));
    CHECK(granted_total <= budget);

    const double greedy_obj = weighted_pf_objective(cands, sel.ids);
    const KnapsackResult best = exact_knapsack(cands, budget);
    if (best.objective > 0.0) {
      const double ratio = greedy_obj / best.objective;
      CHECK(ratio > 0.0);
      ratio_sum += ratio;
      ratio_min = std::min(ratio_min, ratio);
    }
  }
  // Reported, not asserted: the heuristic carries no approximation bound.
  std::cout << "greedy/exact objective ratio: mean " << ratio_sum / instances << ", min "
            << ratio_min << " over " << instances << " instances\n";
}

TEST_CASE("a station with fewer received bytes never sorts later at equal backlog") {
  std::vector<CommCandidate> cands;
  for (int id = 0; id < 6; ++id) {
    CommCandidate c;
    c.id = id;
    c.bytes_received = 1000 * id;
    c.backlog = 5000;
    cands.push_back(c);
  }
  std::vector<double> recv;
  for (const auto& c : cands) recv.push_back(static_cast<double>(c.bytes_received));
  const auto z = zscore(recv);
  for (int id = 0; id < 6; ++id) {
    cands[id].weight = pf_weight(z[id]);
    cands[id].utility_per_byte = utility_per_byte(cands[id].weight, cands[id].backlog);
  }
  const CommSelection sel = select_comm_stas(cands, 1 << 30);
  CHECK(sel.ids == std::vector<int>{0, 1, 2, 3, 4, 5});
}

TEST_CASE("fairness index") {
  CHECK(jain_index({3, 3, 3}) == doctest::Approx(1.0));
  CHECK(jain_index({10, 0, 0, 0}) == doctest::Approx(0.25));
  CHECK(jain_index({1, 2, 3}) == doctest::Approx(36.0 / 42.0).epsilon(1e-12));
  CHECK(jain_index({0, 0}) == 1.0);
  CHECK_THROWS(jain_index({}));

  RngStream rng(23, StreamId::Selection);
  for (int i = 0; i < 200; ++i) {
    const int n = 1 + static_cast<int>(rng.uniform_below(16));
    std::vector<double> x;
    for (int j = 0; j < n; ++j) x.push_back(static_cast<double>(rng.uniform_below(1000)));
    const double jain = jain_index(x);
    CHECK(jain >= 1.0 / n - 1e-12);
    CHECK(jain <= 1.0 + 1e-12);
  }
}
