#include "emlsr/config.hpp"

#include <doctest.h>

#include <algorithm>

using namespace emlsr;

namespace {

bool has_violation(const std::vector<std::string>& v, const std::string& needle) {
  return std::any_of(v.begin(), v.end(),
                     [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

}  // namespace

TEST_CASE("default configuration is valid") {
  const SimConfig cfg;
  CHECK(validate_config(cfg.network, cfg.timing).empty());
}

TEST_CASE("alpha boundary is rejected") {
  SimConfig cfg;
  cfg.network.alpha = 1.0;
  const auto v = validate_config(cfg.network, cfg.timing);
  CHECK(has_violation(v, "alpha must lie in open interval (0,1)"));
  cfg.network.alpha = 0.0;
  CHECK(has_violation(validate_config(cfg.network, cfg.timing), "alpha"));
}

TEST_CASE("candidate cap below a triple is rejected") {
  SimConfig cfg;
  cfg.network.k = 2;
  CHECK(has_violation(validate_config(cfg.network, cfg.timing),
                      "k must allow a trilateration triple (k >= 3)"));
}

TEST_CASE("per-link arrays must match the link count") {
  SimConfig cfg;
  cfg.network.bandwidth_hz = {40e6};
  CHECK(has_violation(validate_config(cfg.network, cfg.timing), "bandwidth_hz"));
}

TEST_CASE("validation is pure") {
  SimConfig cfg;
  cfg.network.alpha = 2.0;
  cfg.network.k = 1;
  CHECK(validate_config(cfg.network, cfg.timing) == validate_config(cfg.network, cfg.timing));
}

TEST_CASE("durations land on exact nanoseconds") {
  const TimingConfig t;
  CHECK(t.sifs() == 16'000);
  CHECK(t.tf() == 10'800);
  CHECK(t.cts() == 4'600);
  CHECK(t.ack() == 4'600);
  CHECK(t.ndp() == 172'000);  // 44 us + 8 * 4 * 4 us
  CHECK(t.window() == 10'240'000);
}

TEST_CASE("config round-trips bitwise through the file format") {
  SimConfig cfg;
  cfg.network.alpha = 0.1;
  cfg.network.seed = 0xDEADBEEFCAFE1234ULL;
  cfg.network.scheme = Scheme::RsmsSC;
  cfg.network.mode = Mode::Cooperative;
  cfg.network.cv_offdiag = CvOffdiag::Standard;
  cfg.timing.tf_us = 10.8;
  const SimConfig back = parse_config(serialize_config(cfg));
  CHECK(back == cfg);
  // A second trip is a fixed point.
  CHECK(serialize_config(back) == serialize_config(cfg));
}

TEST_CASE("unknown keys are rejected") {
  CHECK_THROWS(parse_config(R"({"network": {"n_stas": 4, "typo_key": 1}})"));
  CHECK_THROWS(parse_config(R"({"banana": {}})"));
}

TEST_CASE("enum spellings") {
  Scheme s;
  CHECK(scheme_from_string("rsms_sc", s));
  CHECK(s == Scheme::RsmsSC);
  CHECK_FALSE(scheme_from_string("RSMS-SC", s));
  Mode m;
  CHECK(mode_from_string("cooperative", m));
  CHECK(m == Mode::Cooperative);
  CvOffdiag c;
  CHECK(cv_offdiag_from_string("standard", c));
  CHECK(c == CvOffdiag::Standard);
}
