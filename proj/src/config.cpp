#include "emlsr/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace emlsr {

namespace {

using nlohmann::json;

TimeNs us_to_ns(double us) { return static_cast<TimeNs>(std::llround(us * 1000.0)); }

void require_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      throw std::runtime_error("unknown key '" + item.key() + "' in " + where);
    }
  }
}

}  // namespace

TimeNs TimingConfig::sifs() const { return us_to_ns(sifs_us); }
TimeNs TimingConfig::tf() const { return us_to_ns(tf_us); }
TimeNs TimingConfig::cts() const { return us_to_ns(cts_us); }
TimeNs TimingConfig::ack() const { return us_to_ns(ack_us); }
TimeNs TimingConfig::ndp() const {
  return us_to_ns(ndp_base_us) + 8000LL * ltf_symbols * ltf_repetitions;
}
TimeNs TimingConfig::window() const { return us_to_ns(window_us); }

std::vector<std::string> validate_config(const NetworkConfig& net, const TimingConfig& timing) {
  std::vector<std::string> v;
  auto bad = [&v](const std::string& msg) { v.push_back(msg); };

  if (timing.sifs_us <= 0) bad("sifs_us must be positive");
  if (timing.tf_us <= 0) bad("tf_us must be positive");
  if (timing.cts_us <= 0) bad("cts_us must be positive");
  if (timing.ack_us <= 0) bad("ack_us must be positive");
  if (timing.ndp_base_us <= 0) bad("ndp_base_us must be positive");
  if (timing.ltf_symbols < 1) bad("ltf_symbols must be at least 1");
  if (timing.ltf_repetitions < 1) bad("ltf_repetitions must be at least 1");
  if (timing.window_us <= 0) bad("window_us must be positive");
  if (timing.n_windows < 1) bad("n_windows must be at least 1");

  if (net.n_links < 1) bad("n_links must be at least 1");
  if (net.n_stas < 1) bad("n_stas must be at least 1");
  if (static_cast<int>(net.carrier_freq_hz.size()) != net.n_links)
    bad("carrier_freq_hz must have one entry per link");
  if (static_cast<int>(net.bandwidth_hz.size()) != net.n_links)
    bad("bandwidth_hz must have one entry per link");
  for (double f : net.carrier_freq_hz)
    if (f <= 0) bad("carrier_freq_hz entries must be positive");
  for (double w : net.bandwidth_hz)
    if (w <= 0) bad("bandwidth_hz entries must be positive");
  if (net.mimo_tx < 1 || net.mimo_rx < 1) bad("mimo dimensions must be at least 1");
  if (net.arena_half_width_m <= 0) bad("arena_half_width_m must be positive");
  if (net.dl_arrival_rate_bps < 0) bad("dl_arrival_rate_bps must be nonnegative");
  if (!(net.alpha > 0.0 && net.alpha < 1.0)) bad("alpha must lie in open interval (0,1)");
  if (net.k < 3) bad("k must allow a trilateration triple (k >= 3)");
  if (net.process_noise_intensity <= 0) bad("process_noise_intensity must be positive");

  return v;
}

const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::Original: return "original";
    case Scheme::RsmsS: return "rsms_s";
    case Scheme::RsmsC: return "rsms_c";
    case Scheme::RsmsSC: return "rsms_sc";
  }
  return "?";
}

const char* to_string(Mode m) {
  return m == Mode::NonCooperative ? "noncooperative" : "cooperative";
}

const char* to_string(CvOffdiag c) { return c == CvOffdiag::Printed ? "printed" : "standard"; }

bool scheme_from_string(const std::string& s, Scheme& out) {
  if (s == "original") out = Scheme::Original;
  else if (s == "rsms_s") out = Scheme::RsmsS;
  else if (s == "rsms_c") out = Scheme::RsmsC;
  else if (s == "rsms_sc") out = Scheme::RsmsSC;
  else return false;
  return true;
}

bool mode_from_string(const std::string& s, Mode& out) {
  if (s == "noncooperative") out = Mode::NonCooperative;
  else if (s == "cooperative") out = Mode::Cooperative;
  else return false;
  return true;
}

bool cv_offdiag_from_string(const std::string& s, CvOffdiag& out) {
  if (s == "printed") out = CvOffdiag::Printed;
  else if (s == "standard") out = CvOffdiag::Standard;
  else return false;
  return true;
}

SimConfig parse_config(const std::string& json_text) {
  const json root = json::parse(json_text);
  require_keys(root, {"timing", "network"}, "config root");

  SimConfig cfg;
  if (root.contains("timing")) {
    const json& t = root.at("timing");
    require_keys(t,
                 {"sifs_us", "tf_us", "cts_us", "ack_us", "ndp_base_us", "ltf_symbols",
                  "ltf_repetitions", "window_us", "n_windows"},
                 "timing");
    TimingConfig& out = cfg.timing;
    if (t.contains("sifs_us")) out.sifs_us = t.at("sifs_us").get<double>();
    if (t.contains("tf_us")) out.tf_us = t.at("tf_us").get<double>();
    if (t.contains("cts_us")) out.cts_us = t.at("cts_us").get<double>();
    if (t.contains("ack_us")) out.ack_us = t.at("ack_us").get<double>();
    if (t.contains("ndp_base_us")) out.ndp_base_us = t.at("ndp_base_us").get<double>();
    if (t.contains("ltf_symbols")) out.ltf_symbols = t.at("ltf_symbols").get<int>();
    if (t.contains("ltf_repetitions")) out.ltf_repetitions = t.at("ltf_repetitions").get<int>();
    if (t.contains("window_us")) out.window_us = t.at("window_us").get<double>();
    if (t.contains("n_windows")) out.n_windows = t.at("n_windows").get<int>();
  }
  if (root.contains("network")) {
    const json& n = root.at("network");
    require_keys(n,
                 {"n_links", "n_stas", "carrier_freq_hz", "bandwidth_hz", "ap_tx_power_dbm",
                  "sta_tx_power_dbm", "mimo_tx", "mimo_rx", "noise_figure_db",
                  "arena_half_width_m", "dl_arrival_rate_bps", "alpha", "k",
                  "process_noise_intensity", "cv_offdiag", "scheme", "mode", "seed"},
                 "network");
    NetworkConfig& out = cfg.network;
    if (n.contains("n_links")) out.n_links = n.at("n_links").get<int>();
    if (n.contains("n_stas")) out.n_stas = n.at("n_stas").get<int>();
    if (n.contains("carrier_freq_hz"))
      out.carrier_freq_hz = n.at("carrier_freq_hz").get<std::vector<double>>();
    if (n.contains("bandwidth_hz"))
      out.bandwidth_hz = n.at("bandwidth_hz").get<std::vector<double>>();
    if (n.contains("ap_tx_power_dbm")) out.ap_tx_power_dbm = n.at("ap_tx_power_dbm").get<double>();
    if (n.contains("sta_tx_power_dbm"))
      out.sta_tx_power_dbm = n.at("sta_tx_power_dbm").get<double>();
    if (n.contains("mimo_tx")) out.mimo_tx = n.at("mimo_tx").get<int>();
    if (n.contains("mimo_rx")) out.mimo_rx = n.at("mimo_rx").get<int>();
    if (n.contains("noise_figure_db")) out.noise_figure_db = n.at("noise_figure_db").get<double>();
    if (n.contains("arena_half_width_m"))
      out.arena_half_width_m = n.at("arena_half_width_m").get<double>();
    if (n.contains("dl_arrival_rate_bps"))
      out.dl_arrival_rate_bps = n.at("dl_arrival_rate_bps").get<double>();
    if (n.contains("alpha")) out.alpha = n.at("alpha").get<double>();
    if (n.contains("k")) out.k = n.at("k").get<int>();
    if (n.contains("process_noise_intensity"))
      out.process_noise_intensity = n.at("process_noise_intensity").get<double>();
    if (n.contains("cv_offdiag")) {
      if (!cv_offdiag_from_string(n.at("cv_offdiag").get<std::string>(), out.cv_offdiag))
        throw std::runtime_error("cv_offdiag must be 'printed' or 'standard'");
    }
    if (n.contains("scheme")) {
      if (!scheme_from_string(n.at("scheme").get<std::string>(), out.scheme))
        throw std::runtime_error("scheme must be one of original, rsms_s, rsms_c, rsms_sc");
    }
    if (n.contains("mode")) {
      if (!mode_from_string(n.at("mode").get<std::string>(), out.mode))
        throw std::runtime_error("mode must be 'noncooperative' or 'cooperative'");
    }
    if (n.contains("seed")) out.seed = n.at("seed").get<std::uint64_t>();
  }
  return cfg;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const SimConfig& cfg) {
  json t = {
      {"sifs_us", cfg.timing.sifs_us},
      {"tf_us", cfg.timing.tf_us},
      {"cts_us", cfg.timing.cts_us},
      {"ack_us", cfg.timing.ack_us},
      {"ndp_base_us", cfg.timing.ndp_base_us},
      {"ltf_symbols", cfg.timing.ltf_symbols},
      {"ltf_repetitions", cfg.timing.ltf_repetitions},
      {"window_us", cfg.timing.window_us},
      {"n_windows", cfg.timing.n_windows},
  };
  json n = {
      {"n_links", cfg.network.n_links},
      {"n_stas", cfg.network.n_stas},
      {"carrier_freq_hz", cfg.network.carrier_freq_hz},
      {"bandwidth_hz", cfg.network.bandwidth_hz},
      {"ap_tx_power_dbm", cfg.network.ap_tx_power_dbm},
      {"sta_tx_power_dbm", cfg.network.sta_tx_power_dbm},
      {"mimo_tx", cfg.network.mimo_tx},
      {"mimo_rx", cfg.network.mimo_rx},
      {"noise_figure_db", cfg.network.noise_figure_db},
      {"arena_half_width_m", cfg.network.arena_half_width_m},
      {"dl_arrival_rate_bps", cfg.network.dl_arrival_rate_bps},
      {"alpha", cfg.network.alpha},
      {"k", cfg.network.k},
      {"process_noise_intensity", cfg.network.process_noise_intensity},
      {"cv_offdiag", to_string(cfg.network.cv_offdiag)},
      {"scheme", to_string(cfg.network.scheme)},
      {"mode", to_string(cfg.network.mode)},
      {"seed", cfg.network.seed},
  };
  json root = {{"timing", t}, {"network", n}};
  return root.dump(2) + "\n";
}

void save_config(const SimConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config file: " + path);
  out << serialize_config(cfg);
}

}  // namespace emlsr
