#include "emlsr/sweep.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace emlsr {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct Point {
  double alpha;
  int k;
  int m;
  Scheme scheme;
  Mode mode;
};

std::vector<Point> points_of(const SweepSpec& spec) {
  std::vector<Point> pts;
  for (double a : spec.alphas)
    for (int k : spec.ks)
      for (int m : spec.ms)
        for (Scheme s : spec.schemes)
          for (Mode mo : spec.modes) pts.push_back({a, k, m, s, mo});
  return pts;
}

ResultRow run_point(const SweepSpec& spec, const Point& p, int seed_idx) {
  SimConfig cfg = spec.base;
  cfg.network.alpha = p.alpha;
  cfg.network.k = p.k;
  cfg.network.n_stas = p.m;
  cfg.network.scheme = p.scheme;
  cfg.network.mode = p.mode;
  cfg.network.seed = spec.base_seed + static_cast<std::uint64_t>(seed_idx);

  const RunMetrics metrics = run(cfg, false);
  ResultRow row;
  row.alpha = p.alpha;
  row.k = p.k;
  row.m = p.m;
  row.scheme = p.scheme;
  row.mode = p.mode;
  row.seed = cfg.network.seed;
  row.mse_mean = metrics.mse_mean;
  row.throughput_bps = metrics.throughput_bps;
  row.jain = metrics.jain;
  row.sensing_count = metrics.sensing_count;
  row.comm_count = metrics.comm_count;
  return row;
}

}  // namespace

SweepSpec parse_sweep(const std::string& json_text, const std::string& base_dir) {
  const json root = json::parse(json_text);
  const std::set<std::string> allowed = {"base_config", "alpha", "k",     "m",        "scheme",
                                         "mode",        "seeds", "base_seed", "output"};
  for (const auto& item : root.items()) {
    if (!allowed.count(item.key()))
      throw std::runtime_error("unknown key '" + item.key() + "' in sweep spec");
  }

  SweepSpec spec;
  if (root.contains("base_config")) {
    std::filesystem::path p = root.at("base_config").get<std::string>();
    if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
    spec.base = load_config(p.string());
  }
  if (root.contains("alpha")) spec.alphas = root.at("alpha").get<std::vector<double>>();
  if (root.contains("k")) spec.ks = root.at("k").get<std::vector<int>>();
  if (root.contains("m")) spec.ms = root.at("m").get<std::vector<int>>();
  if (root.contains("scheme")) {
    spec.schemes.clear();
    for (const auto& s : root.at("scheme")) {
      Scheme sc;
      if (!scheme_from_string(s.get<std::string>(), sc))
        throw std::runtime_error("unknown scheme in sweep spec: " + s.get<std::string>());
      spec.schemes.push_back(sc);
    }
  }
  if (root.contains("mode")) {
    spec.modes.clear();
    for (const auto& s : root.at("mode")) {
      Mode mo;
      if (!mode_from_string(s.get<std::string>(), mo))
        throw std::runtime_error("unknown mode in sweep spec: " + s.get<std::string>());
      spec.modes.push_back(mo);
    }
  }
  if (root.contains("seeds")) spec.n_seeds = root.at("seeds").get<int>();
  if (root.contains("base_seed")) spec.base_seed = root.at("base_seed").get<std::uint64_t>();
  if (root.contains("output")) spec.output = root.at("output").get<std::string>();

  if (spec.alphas.empty() || spec.ks.empty() || spec.ms.empty() || spec.schemes.empty() ||
      spec.modes.empty())
    throw std::runtime_error("every sweep axis must be non-empty");
  if (spec.n_seeds < 1) throw std::runtime_error("sweep needs at least one seed");
  return spec;
}

SweepSpec load_sweep(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open sweep spec: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_sweep(ss.str(), std::filesystem::path(path).parent_path().string());
}

std::vector<ResultRow> run_sweep(const SweepSpec& spec, bool parallel) {
  const std::vector<Point> pts = points_of(spec);

  // Validate every point before fanning out; a throw inside the parallel
  // region would terminate instead of reporting.
  for (const Point& p : pts) {
    SimConfig cfg = spec.base;
    cfg.network.alpha = p.alpha;
    cfg.network.k = p.k;
    cfg.network.n_stas = p.m;
    const auto violations = validate_config(cfg.network, cfg.timing);
    if (!violations.empty()) {
      std::string msg = "invalid sweep point (alpha=" + fmt(p.alpha) +
                        ", k=" + std::to_string(p.k) + ", m=" + std::to_string(p.m) + "):";
      for (const auto& v : violations) msg += "\n  " + v;
      throw std::invalid_argument(msg);
    }
  }

  const std::int64_t n_jobs = static_cast<std::int64_t>(pts.size()) * spec.n_seeds;
  std::vector<ResultRow> rows(n_jobs);

#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::int64_t j = 0; j < n_jobs; ++j) {
    const Point& p = pts[j / spec.n_seeds];
    rows[j] = run_point(spec, p, static_cast<int>(j % spec.n_seeds));
  }
  return rows;
}

std::vector<ResultRow> run_sweep_serial(const SweepSpec& spec) { return run_sweep(spec, false); }

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::string out =
      "alpha,k,M,scheme,mode,seed,mse_mean,throughput_bps,jain,sensing_count,comm_count\n";
  auto row_prefix = [](const ResultRow& r) {
    return fmt(r.alpha) + ',' + std::to_string(r.k) + ',' + std::to_string(r.m) + ',' +
           to_string(r.scheme) + ',' + to_string(r.mode) + ',';
  };
  for (const ResultRow& r : rows) {
    out += row_prefix(r) + std::to_string(r.seed) + ',' + fmt(r.mse_mean) + ',' +
           fmt(r.throughput_bps) + ',' + fmt(r.jain) + ',' + std::to_string(r.sensing_count) +
           ',' + std::to_string(r.comm_count) + '\n';
  }

  // Per-point summary rows, in first-appearance order.
  std::map<std::tuple<double, int, int, int, int>, std::size_t> seen;
  std::vector<std::vector<const ResultRow*>> groups;
  for (const ResultRow& r : rows) {
    const auto key = std::make_tuple(r.alpha, r.k, r.m, static_cast<int>(r.scheme),
                                     static_cast<int>(r.mode));
    auto it = seen.find(key);
    if (it == seen.end()) {
      it = seen.emplace(key, groups.size()).first;
      groups.emplace_back();
    }
    groups[it->second].push_back(&r);
  }
  for (const auto& g : groups) {
    const double n = static_cast<double>(g.size());
    double mean[5] = {0, 0, 0, 0, 0};
    for (const ResultRow* r : g) {
      mean[0] += r->mse_mean;
      mean[1] += r->throughput_bps;
      mean[2] += r->jain;
      mean[3] += static_cast<double>(r->sensing_count);
      mean[4] += static_cast<double>(r->comm_count);
    }
    for (double& v : mean) v /= n;
    double var[5] = {0, 0, 0, 0, 0};
    for (const ResultRow* r : g) {
      const double d[5] = {r->mse_mean - mean[0], r->throughput_bps - mean[1], r->jain - mean[2],
                           static_cast<double>(r->sensing_count) - mean[3],
                           static_cast<double>(r->comm_count) - mean[4]};
      for (int i = 0; i < 5; ++i) var[i] += d[i] * d[i];
    }
    for (double& v : var) v /= n;

    const ResultRow& head = *g.front();
    const std::string prefix = row_prefix(head);
    out += prefix + "mean," + fmt(mean[0]) + ',' + fmt(mean[1]) + ',' + fmt(mean[2]) + ',' +
           fmt(mean[3]) + ',' + fmt(mean[4]) + '\n';
    out += prefix + "std," + fmt(std::sqrt(var[0])) + ',' + fmt(std::sqrt(var[1])) + ',' +
           fmt(std::sqrt(var[2])) + ',' + fmt(std::sqrt(var[3])) + ',' + fmt(std::sqrt(var[4])) +
           '\n';
  }
  return out;
}

const char* to_string(TrendStatus s) {
  switch (s) {
    case TrendStatus::Pass: return "PASS";
    case TrendStatus::Fail: return "FAIL";
    case TrendStatus::Missing: return "MISSING";
  }
  return "?";
}

namespace {

struct Means {
  double mse = 0.0;
  double tp = 0.0;
  double jain = 0.0;
  bool present = false;
};

using MeanTable = std::map<std::tuple<double, int, int, int, int>, Means>;

MeanTable build_means(const std::vector<ResultRow>& rows) {
  std::map<std::tuple<double, int, int, int, int>, std::pair<Means, int>> acc;
  for (const ResultRow& r : rows) {
    auto& [m, n] = acc[std::make_tuple(r.alpha, r.k, r.m, static_cast<int>(r.scheme),
                                       static_cast<int>(r.mode))];
    m.mse += r.mse_mean;
    m.tp += r.throughput_bps;
    m.jain += r.jain;
    ++n;
  }
  MeanTable table;
  for (auto& [key, value] : acc) {
    Means m = value.first;
    m.mse /= value.second;
    m.tp /= value.second;
    m.jain /= value.second;
    m.present = true;
    table[key] = m;
  }
  return table;
}

Means lookup(const MeanTable& t, double alpha, int k, int m, Scheme s, Mode mo) {
  const auto it =
      t.find(std::make_tuple(alpha, k, m, static_cast<int>(s), static_cast<int>(mo)));
  return it == t.end() ? Means{} : it->second;
}

const std::vector<double> kAlphas = {0.01, 0.1, 0.5, 0.9};

/// Non-increasing within a 2% noise band, with at least two of the steps
/// showing a real (>= 2%) decrease.
TrendCheck monotone_decreasing(const std::string& name, const std::vector<double>& values) {
  TrendCheck c{name, TrendStatus::Pass, ""};
  int strong_steps = 0;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    const double prev = values[i];
    const double next = values[i + 1];
    if (next > prev * 1.02) c.status = TrendStatus::Fail;
    if (next <= prev * 0.98) ++strong_steps;
    c.detail += (i ? " " : "") + fmt(prev) + "->" + fmt(next);
  }
  if (strong_steps < 2) c.status = TrendStatus::Fail;
  c.detail += " (steps with >=2% drop: " + std::to_string(strong_steps) + ")";
  return c;
}

}  // namespace

std::vector<TrendCheck> compare_schemes(const std::vector<ResultRow>& rows) {
  const MeanTable table = build_means(rows);
  std::vector<TrendCheck> checks;

  auto missing = [&checks](const std::string& name, const std::string& what) {
    checks.push_back({name, TrendStatus::Missing, "no rows for " + what});
  };

  // Alpha tradeoff: MSE and throughput both fall as alpha rises (k=4, M=12).
  for (Mode mo : {Mode::NonCooperative, Mode::Cooperative}) {
    std::vector<double> mses, tps;
    bool have_all = true;
    for (double a : kAlphas) {
      const Means m = lookup(table, a, 4, 12, Scheme::Original, mo);
      if (!m.present) have_all = false;
      mses.push_back(m.mse);
      tps.push_back(m.tp);
    }
    const std::string suffix = std::string("-") + to_string(mo);
    if (!have_all) {
      missing("alpha-tradeoff-mse" + suffix, "k=4 M=12 across alphas");
      missing("alpha-tradeoff-throughput" + suffix, "k=4 M=12 across alphas");
    } else {
      checks.push_back(monotone_decreasing("alpha-tradeoff-mse" + suffix, mses));
      checks.push_back(monotone_decreasing("alpha-tradeoff-throughput" + suffix, tps));
    }
  }

  // k-insensitivity: k=4 within 10% of k=12 on MSE and throughput (M=12).
  for (Mode mo : {Mode::NonCooperative, Mode::Cooperative}) {
    TrendCheck c{std::string("k-insensitivity-") + to_string(mo), TrendStatus::Pass, ""};
    bool have_all = true;
    for (double a : kAlphas) {
      const Means m4 = lookup(table, a, 4, 12, Scheme::Original, mo);
      const Means m12 = lookup(table, a, 12, 12, Scheme::Original, mo);
      if (!m4.present || !m12.present) {
        have_all = false;
        continue;
      }
      const double dm = std::abs(m4.mse - m12.mse) / m12.mse;
      const double dt = std::abs(m4.tp - m12.tp) / m12.tp;
      if (dm > 0.10 || dt > 0.10) c.status = TrendStatus::Fail;
      c.detail += "a=" + fmt(a) + ":dmse=" + fmt(dm) + ",dtp=" + fmt(dt) + " ";
    }
    if (!have_all) {
      c.status = TrendStatus::Missing;
      c.detail = "need k=4 and k=12 at M=12 across alphas";
    }
    checks.push_back(c);
  }

  // Mode ordering: cooperative tracks better, non-cooperative delivers more.
  {
    TrendCheck c{"mode-ordering", TrendStatus::Pass, ""};
    bool have_all = true;
    for (double a : kAlphas) {
      const Means nc = lookup(table, a, 4, 12, Scheme::Original, Mode::NonCooperative);
      const Means co = lookup(table, a, 4, 12, Scheme::Original, Mode::Cooperative);
      if (!nc.present || !co.present) {
        have_all = false;
        continue;
      }
      const bool mse_ok = a == 0.5 ? co.mse <= 0.98 * nc.mse : co.mse < nc.mse;
      const bool tp_ok = a == 0.5 ? nc.tp >= 1.02 * co.tp : nc.tp > co.tp;
      if (!mse_ok || !tp_ok) c.status = TrendStatus::Fail;
      c.detail += "a=" + fmt(a) + ":mse(co/nc)=" + fmt(co.mse / nc.mse) +
                  ",tp(nc/co)=" + fmt(nc.tp / co.tp) + " ";
    }
    if (!have_all) {
      c.status = TrendStatus::Missing;
      c.detail = "need both modes at k=4 M=12 across alphas";
    }
    checks.push_back(c);
  }

  // Station-count trend: MSE falls as M grows (alpha=0.5, k=4).
  for (Mode mo : {Mode::NonCooperative, Mode::Cooperative}) {
    TrendCheck c{std::string("sta-count-mse-") + to_string(mo), TrendStatus::Pass, ""};
    std::vector<double> mses;
    bool have_all = true;
    for (int m : {4, 8, 12}) {
      const Means mm = lookup(table, 0.5, 4, m, Scheme::Original, mo);
      if (!mm.present) have_all = false;
      mses.push_back(mm.mse);
    }
    if (!have_all) {
      c.status = TrendStatus::Missing;
      c.detail = "need M in {4,8,12} at alpha=0.5 k=4";
    } else {
      for (std::size_t i = 0; i + 1 < mses.size(); ++i) {
        if (mses[i + 1] > mses[i] * 1.02) c.status = TrendStatus::Fail;
      }
      if (!(mses[2] <= 0.95 * mses[0])) c.status = TrendStatus::Fail;
      c.detail = fmt(mses[0]) + "->" + fmt(mses[1]) + "->" + fmt(mses[2]) +
                 " (overall drop " + fmt((mses[0] - mses[2]) / mses[0]) + ")";
    }
    checks.push_back(c);
  }

  // Scheme comparison at alpha=0.5, k=4, M=8.
  for (Mode mo : {Mode::NonCooperative, Mode::Cooperative}) {
    TrendCheck c{std::string("scheme-comparison-") + to_string(mo), TrendStatus::Pass, ""};
    const Means orig = lookup(table, 0.5, 4, 8, Scheme::Original, mo);
    const Means rs = lookup(table, 0.5, 4, 8, Scheme::RsmsS, mo);
    const Means rc = lookup(table, 0.5, 4, 8, Scheme::RsmsC, mo);
    const Means rsc = lookup(table, 0.5, 4, 8, Scheme::RsmsSC, mo);
    if (!orig.present || !rs.present || !rc.present || !rsc.present) {
      c.status = TrendStatus::Missing;
      c.detail = "need all four schemes at alpha=0.5 k=4 M=8";
      checks.push_back(c);
      continue;
    }
    auto fail_if = [&c](bool bad, const std::string& what) {
      if (bad) {
        c.status = TrendStatus::Fail;
        c.detail += "[" + what + "] ";
      }
    };
    fail_if(!(orig.mse <= 0.95 * rs.mse), "mse vs rsms_s margin");
    fail_if(!(orig.tp >= 1.02 * rc.tp), "throughput vs rsms_c margin");
    fail_if(!(orig.jain >= 1.02 * rc.jain), "jain vs rsms_c margin");
    fail_if(!(orig.mse < rsc.mse && orig.tp > rsc.tp && orig.jain > rsc.jain),
            "dominance over rsms_sc");
    fail_if(std::abs(orig.tp - rs.tp) / rs.tp > 0.05, "throughput vs rsms_s similarity");
    fail_if(std::abs(orig.jain - rs.jain) / rs.jain > 0.05, "jain vs rsms_s similarity");
    fail_if(std::abs(orig.mse - rc.mse) / rc.mse > 0.05, "mse vs rsms_c similarity");
    c.detail += "mse o/s/c/sc=" + fmt(orig.mse) + "/" + fmt(rs.mse) + "/" + fmt(rc.mse) + "/" +
                fmt(rsc.mse) + " tp=" + fmt(orig.tp) + "/" + fmt(rs.tp) + "/" + fmt(rc.tp) + "/" +
                fmt(rsc.tp) + " jain=" + fmt(orig.jain) + "/" + fmt(rs.jain) + "/" + fmt(rc.jain) +
                "/" + fmt(rsc.jain);
    checks.push_back(c);
  }

  return checks;
}

}  // namespace emlsr
