// privcurve: command-line front end over the trade-off / amplification
// library. Subcommands: tradeoff, rdp-sweep, adversary, verify.
// Exit codes: 0 success, 1 verification failure, 2 usage/config error.

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "privcurve/amplification.h"
#include "privcurve/mechanisms.h"
#include "privcurve/oracle.h"
#include "privcurve/parallel.h"
#include "privcurve/rng.h"
#include "privcurve/special.h"
#include "privcurve/tradeoff.h"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace privcurve;

namespace {

// Config or command-line problems: exit 2 per the exit-code contract.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt_or_inf(double x, bool infinite) {
  if (infinite || std::isinf(x)) return "inf";
  return fmt17(x);
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("config parse error in " + path + ": " + e.what());
  }
}

// Unknown keys are rejected rather than ignored: a typo silently changing an
// experiment is worse than a hard error.
void reject_unknown_keys(const json& cfg, const std::set<std::string>& allowed,
                         const std::string& where) {
  if (!cfg.is_object()) throw UsageError(where + ": config must be an object");
  for (const auto& item : cfg.items()) {
    if (allowed.find(item.key()) == allowed.end()) {
      std::string known;
      for (const auto& k : allowed) known += (known.empty() ? "" : ", ") + k;
      throw UsageError(where + ": unknown config key \"" + item.key() +
                       "\" (known keys: " + known + ")");
    }
  }
}

template <typename T>
T get_or(const json& cfg, const std::string& key, T fallback) {
  if (!cfg.contains(key)) return fallback;
  try {
    return cfg.at(key).get<T>();
  } catch (const json::exception& e) {
    throw UsageError("config key \"" + key + "\": " + e.what());
  }
}

std::vector<double> get_list(const json& cfg, const std::string& key,
                             std::vector<double> fallback) {
  if (!cfg.contains(key)) return fallback;
  try {
    return cfg.at(key).get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw UsageError("config key \"" + key + "\": " + e.what());
  }
}

std::vector<double> interior_alphas(int count) {
  std::vector<double> a;
  a.reserve(size_t(count));
  for (int i = 1; i <= count; ++i) a.push_back(double(i) / (count + 1));
  return a;
}

fs::path ensure_out_dir(const std::string& out) {
  fs::path dir = out.empty() ? fs::path(".") : fs::path(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw UsageError("cannot create output directory " + dir.string());
  return dir;
}

// ---------------------------------------------------------------------------
// SVG plotting: fixed [0,1]^2 domain (trade-off curves), polyline per series.

struct SvgSeries {
  std::string name;
  std::string color;
  std::vector<std::pair<double, double>> points;
};

void write_svg(const fs::path& path, const std::string& title,
               const std::vector<SvgSeries>& series,
               const std::vector<double>& vlines) {
  const double W = 640, H = 480, ml = 60, mr = 20, mt = 40, mb = 45;
  const double pw = W - ml - mr, ph = H - mt - mb;
  auto px = [&](double x) { return ml + x * pw; };
  auto py = [&](double y) { return mt + (1.0 - y) * ph; };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
      << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H
      << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"15\">"
      << title << "</text>\n";
  out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw
      << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double g = 0.0; g <= 1.0001; g += 0.25) {
    out << "<line x1=\"" << px(g) << "\" y1=\"" << py(0) << "\" x2=\""
        << px(g) << "\" y2=\"" << py(0) + 5 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << px(g) << "\" y=\"" << py(0) + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << g << "</text>\n";
    out << "<line x1=\"" << ml - 5 << "\" y1=\"" << py(g) << "\" x2=\"" << ml
        << "\" y2=\"" << py(g) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << ml - 9 << "\" y=\"" << py(g) + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << g << "</text>\n";
  }
  for (const double v : vlines) {
    out << "<line x1=\"" << px(v) << "\" y1=\"" << py(0) << "\" x2=\""
        << px(v) << "\" y2=\"" << py(1)
        << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
  }
  int legend_y = int(mt) + 16;
  for (const auto& s : series) {
    out << "<polyline fill=\"none\" stroke=\"" << s.color
        << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : s.points) out << px(x) << "," << py(y) << " ";
    out << "\"/>\n";
    out << "<line x1=\"" << ml + pw - 150 << "\" y1=\"" << legend_y
        << "\" x2=\"" << ml + pw - 130 << "\" y2=\"" << legend_y
        << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << ml + pw - 124 << "\" y=\"" << legend_y + 4
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.name
        << "</text>\n";
    legend_y += 18;
  }
  out << "</svg>\n";
}

// ---------------------------------------------------------------------------
// Dataset ingestion: CSV, one sample per row, header x_1..x_d,y_1..y_n.

struct Dataset {
  Eigen::MatrixXd X, Y;
};

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open dataset: " + path);
  std::string line;
  if (!std::getline(in, line)) {
    throw UsageError(path + ": line 1: missing header");
  }
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) header.push_back(tok);
  }
  int d = 0, n = 0;
  for (size_t i = 0; i < header.size(); ++i) {
    const std::string want_x = "x_" + std::to_string(i + 1);
    const std::string want_y = "y_" + std::to_string(i - size_t(d) + 1);
    if (header[i] == want_x && n == 0) {
      ++d;
    } else if (header[i] == want_y) {
      ++n;
    } else {
      throw UsageError(path + ": line 1, column " + std::to_string(i + 1) +
                       ": expected x_1..x_d,y_1..y_n header, got \"" +
                       header[i] + "\"");
    }
  }
  if (d == 0 || n == 0) {
    throw UsageError(path + ": line 1: header needs x_* and y_* columns");
  }
  std::vector<std::vector<double>> rows;
  for (int lineno = 2; std::getline(in, line); ++lineno) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::vector<double> row;
    int col = 1;
    while (std::getline(ss, tok, ',')) {
      try {
        size_t used = 0;
        row.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw UsageError(path + ": line " + std::to_string(lineno) +
                         ", column " + std::to_string(col) +
                         ": not a number: \"" + tok + "\"");
      }
      ++col;
    }
    if (int(row.size()) != d + n) {
      throw UsageError(path + ": line " + std::to_string(lineno) +
                       ": expected " + std::to_string(d + n) +
                       " fields, got " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw UsageError(path + ": no data rows");
  Dataset ds;
  ds.X.resize(long(rows.size()), d);
  ds.Y.resize(long(rows.size()), n);
  for (size_t i = 0; i < rows.size(); ++i) {
    for (int j = 0; j < d; ++j) ds.X(long(i), j) = rows[i][size_t(j)];
    for (int j = 0; j < n; ++j) ds.Y(long(i), j) = rows[i][size_t(d + j)];
  }
  return ds;
}

// ---------------------------------------------------------------------------
// tradeoff

int cmd_tradeoff(const json& cfg, const std::string& out_flag, bool svg_flag) {
  reject_unknown_keys(cfg,
                      {"mode", "sigma_theta", "sigma_z", "d", "n", "l",
                       "delta", "C", "points", "out", "svg"},
                      "tradeoff");
  const std::string mode = get_or<std::string>(cfg, "mode", "single");
  if (mode != "single" && mode != "multi") {
    throw UsageError("tradeoff: mode must be \"single\" or \"multi\"");
  }
  MechanismSpec spec;
  spec.sigma_theta = get_or(cfg, "sigma_theta", 1.0);
  spec.sigma_z = get_or(cfg, "sigma_z", 1.0);
  spec.d = get_or(cfg, "d", 12);
  spec.n = get_or(cfg, "n", 1);
  spec.l = get_or(cfg, "l", 1);
  spec.Delta = get_or(cfg, "delta", 1.0);
  spec.C = get_or(cfg, "C", 1.0);
  const int points = get_or(cfg, "points", 1000);
  if (points < 2) throw UsageError("tradeoff: points must be >= 2");
  const std::string out =
      out_flag.empty() ? get_or<std::string>(cfg, "out", ".") : out_flag;
  const bool svg = svg_flag || get_or(cfg, "svg", false);
  const fs::path dir = ensure_out_dir(out);

  const TradeoffCurve h =
      mode == "single" ? single_point_bound(spec) : multi_point_bound(spec);
  const TradeoffCurve floor = h.components()[0];
  const TradeoffCurve branch = h.components()[1];

  export_curve_csv(h, (dir / "tradeoff.csv").string(), points);

  {
    std::FILE* f = std::fopen((dir / "components.csv").string().c_str(), "wb");
    if (!f) throw std::runtime_error("cannot write components.csv");
    std::fputs("alpha,floor_beta,branch_beta\n", f);
    for (int i = 1; i <= points; ++i) {
      const double a = double(i) / (points + 1);
      std::fprintf(f, "%.17g,%.17g,%.17g\n", a, floor.eval(a),
                   branch.eval(a));
    }
    std::fclose(f);
  }

  json summary;
  summary["command"] = "tradeoff";
  summary["mode"] = mode;
  summary["branch"] = mode == "single" ? "variance-shift" : "chi-squared";
  summary["branch_degenerate"] = branch.degenerate();
  if (const auto c = h.crossovers()) {
    summary["crossovers"] = {c->c1, c->c2};
  } else {
    summary["crossovers"] = nullptr;
  }
  summary["out"] = dir.string();

  if (svg) {
    std::vector<SvgSeries> series(3);
    series[0] = {"h (max)", "#1f77b4", {}};
    series[1] = {"gaussian floor", "#d62728", {}};
    series[2] = {mode == "single" ? "variance branch" : "chi2 branch",
                 "#2ca02c", {}};
    for (int i = 0; i <= 400; ++i) {
      const double a = double(i) / 400;
      series[0].points.push_back({a, h.eval(a)});
      series[1].points.push_back({a, floor.eval(a)});
      series[2].points.push_back({a, branch.eval(a)});
    }
    std::vector<double> vlines;
    if (const auto c = h.crossovers()) vlines = {c->c1, c->c2};
    write_svg(dir / "tradeoff.svg", "lower bound h", series, vlines);
    summary["svg"] = (dir / "tradeoff.svg").string();
  }

  std::cout << summary.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// rdp-sweep

int cmd_rdp_sweep(const json& cfg, const std::string& out_flag,
                  std::optional<uint64_t> seed_flag) {
  reject_unknown_keys(cfg,
                      {"mode", "sigma_theta", "sigma_z", "n", "l", "d_list",
                       "delta_list", "alpha", "L", "M", "master_seed", "out"},
                      "rdp-sweep");
  const std::string mode = get_or<std::string>(cfg, "mode", "single");
  if (mode != "single" && mode != "multi") {
    throw UsageError("rdp-sweep: mode must be \"single\" or \"multi\"");
  }
  MechanismSpec base;
  base.sigma_theta = get_or(cfg, "sigma_theta", 1.0);
  base.sigma_z = get_or(cfg, "sigma_z", 1.0);
  base.n = get_or(cfg, "n", 1);
  base.l = get_or(cfg, "l", 1);
  const std::vector<double> d_list =
      get_list(cfg, "d_list", {100, 1000, 10000});
  const std::vector<double> delta_list = get_list(cfg, "delta_list", {0.5});
  const double alpha = get_or(cfg, "alpha", 2.0);
  const long L = get_or<long>(cfg, "L", 500000);
  const int M = get_or(cfg, "M", 50);
  const uint64_t seed =
      seed_flag ? *seed_flag : get_or<uint64_t>(cfg, "master_seed", 0);
  const std::string out =
      out_flag.empty() ? get_or<std::string>(cfg, "out", ".") : out_flag;
  const fs::path dir = ensure_out_dir(out);

  std::FILE* f = std::fopen((dir / "rdp_sweep.csv").string().c_str(), "wb");
  if (!f) throw std::runtime_error("cannot write rdp_sweep.csv");
  std::fputs("d,n,l,delta,alpha,estimate,stderr\n", f);

  json records = json::array();
  uint64_t row = 0;
  for (const double delta : delta_list) {
    for (const double dval : d_list) {
      MechanismSpec spec = base;
      spec.d = int(std::llround(dval));
      spec.Delta = delta;
      const TradeoffCurve h =
          mode == "single" ? single_point_bound(spec) : multi_point_bound(spec);
      const RenyiEstimate est =
          fdp_to_rdp_mc(h, alpha, L, M, RngStream{seed, row});
      std::fprintf(f, "%d,%d,%d,%s,%s,%s,%s\n", spec.d, spec.n, spec.l,
                   fmt17(delta).c_str(), fmt17(alpha).c_str(),
                   fmt_or_inf(est.value, est.infinite).c_str(),
                   fmt_or_inf(est.std_error, false).c_str());
      json rec;
      rec["d"] = spec.d;
      rec["n"] = spec.n;
      rec["l"] = spec.l;
      rec["delta"] = delta;
      rec["alpha"] = est.alpha;
      rec["estimate"] =
          est.infinite ? json("inf") : json(est.value);
      rec["stderr"] = est.std_error;
      rec["replications"] = est.replications;
      rec["samples_per_rep"] = est.samples_per_rep;
      records.push_back(rec);
      ++row;
    }
  }
  std::fclose(f);

  json summary;
  summary["command"] = "rdp-sweep";
  summary["mode"] = mode;
  summary["master_seed"] = seed;
  summary["csv"] = (dir / "rdp_sweep.csv").string();
  summary["records"] = records;
  std::cout << summary.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// adversary

int cmd_adversary(const json& cfg, const std::string& out_flag) {
  reject_unknown_keys(cfg,
                      {"pathological", "dataset", "dataset_prime", "lambda",
                       "sigma_theta", "out"},
                      "adversary");
  const double sigma_theta = get_or(cfg, "sigma_theta", 1.0);
  if (!(sigma_theta > 0.0)) {
    throw UsageError("adversary: sigma_theta must be > 0");
  }
  const std::string out =
      out_flag.empty() ? get_or<std::string>(cfg, "out", ".") : out_flag;

  Eigen::MatrixXd w0, w1;
  if (cfg.contains("pathological")) {
    const json& p = cfg.at("pathological");
    reject_unknown_keys(p, {"a", "u", "v", "scale", "lambda"},
                        "adversary.pathological");
    auto vec = [&](const char* key) {
      const auto vals = get_list(p, key, {});
      if (vals.empty()) {
        throw UsageError(std::string("adversary.pathological: missing ") + key);
      }
      return Eigen::Map<const Eigen::VectorXd>(vals.data(), long(vals.size()))
          .eval();
    };
    const Eigen::VectorXd a = vec("a");
    Eigen::VectorXd u = vec("u");
    if (u.norm() == 0.0) throw UsageError("adversary.pathological: u is zero");
    u /= u.norm();
    const Eigen::VectorXd v = vec("v");
    const double scale = get_or(p, "scale", 2.0);
    const double lambda = get_or(p, "lambda", 1.0);
    const auto [d0, d1] = pathological_pair(a, u, v, scale, lambda);
    w0 = ridge_fit(d0);
    w1 = ridge_fit(d1);
  } else if (cfg.contains("dataset") && cfg.contains("dataset_prime")) {
    const Dataset ds0 = load_dataset(cfg.at("dataset").get<std::string>());
    const Dataset ds1 =
        load_dataset(cfg.at("dataset_prime").get<std::string>());
    if (ds0.X.cols() != ds1.X.cols() || ds0.Y.cols() != ds1.Y.cols()) {
      throw UsageError("adversary: datasets have different shapes");
    }
    const double lambda = get_or(cfg, "lambda", 1.0);
    RidgeProblem p0{ds0.X, ds0.Y, lambda, 0.0, 0.0, 0.0};
    RidgeProblem p1{ds1.X, ds1.Y, lambda, 0.0, 0.0, 0.0};
    std::cerr << "warning: norm bounds computed from data are data-dependent "
                 "(not DP); supply bounds for a private release\n";
    w0 = ridge_fit(p0);
    w1 = ridge_fit(p1);
  } else {
    throw UsageError(
        "adversary: need either \"pathological\" or both \"dataset\" and "
        "\"dataset_prime\"");
  }

  const int d = int(w0.cols());
  GaussianRowModel m0{w0, sigma_theta * sigma_theta *
                              Eigen::MatrixXd::Identity(d, d)};
  GaussianRowModel m1{w1, m0.row_cov};
  const WorstSeed ws = worst_seed(m0, m1);
  const double model_mu = (w0 - w1).norm() / sigma_theta;

  json report;
  report["command"] = "adversary";
  report["degenerate"] = ws.degenerate;
  report["worst_seed"] = std::vector<double>(ws.z.data(), ws.z.data() + d);
  report["achieved_mu"] = ws.achieved_mu;
  report["model_mu"] = model_mu;
  report["ratio"] = ws.degenerate ? json(nullptr)
                                  : json(ws.achieved_mu / model_mu);
  const fs::path dir = ensure_out_dir(out);
  std::ofstream(dir / "adversary.json") << report.dump(2) << "\n";
  std::cout << report.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// verify scenarios

// Exact trade-off polygon between Bern(p) and Bern(q), evaluated at alpha.
// Two atoms; the randomized likelihood-ratio test gives a piecewise-linear
// curve through the atom boundaries.
double bernoulli_tradeoff(double p, double q, double alpha) {
  // Atoms: outcome 1 (masses p, q) and outcome 0 (masses 1-p, 1-q).
  struct Atom {
    double ratio, pm, qm;
  };
  Atom atoms[2] = {{p > 0 ? q / p : std::numeric_limits<double>::infinity(),
                    p, q},
                   {p < 1 ? (1 - q) / (1 - p)
                          : std::numeric_limits<double>::infinity(),
                    1 - p, 1 - q}};
  if (atoms[1].ratio > atoms[0].ratio) std::swap(atoms[0], atoms[1]);
  double a0 = 0.0, b0 = 1.0;
  for (const Atom& at : atoms) {
    const double a1 = a0 + at.pm, b1 = b0 - at.qm;
    if (alpha <= a1) {
      if (at.pm == 0.0) return b1;
      const double w = (alpha - a0) / at.pm;
      return b0 + w * (b1 - b0);
    }
    a0 = a1;
    b0 = b1;
  }
  return 0.0;
}

json verify_single_point(const json& cfg, int* exit_code) {
  const std::vector<double> d_list = get_list(cfg, "d_list", {12, 50, 200});
  const std::vector<double> delta_list = get_list(cfg, "delta_list", {0.5, 1});
  const int alpha_count = get_or(cfg, "alpha_count", 50);
  const double tolerance = get_or(cfg, "tolerance", 1e-3);
  const std::vector<double> alphas = interior_alphas(alpha_count);

  json out = json::array();
  bool all_pass = true;
  for (const double delta : delta_list) {
    MechanismSpec spec;
    spec.Delta = delta;
    std::vector<int> ds;
    for (const double d : d_list) ds.push_back(int(std::llround(d)));
    const VerifyReport rep =
        verify_single_point_bound(spec, ds, alphas, tolerance);
    for (const VerifyDimension& dim : rep.dims) {
      json jd;
      jd["delta"] = delta;
      jd["d"] = dim.d;
      jd["discretization_bound"] = dim.discretization_bound;
      jd["pass"] = dim.pass;
      double worst = std::numeric_limits<double>::infinity();
      json failing = json::array();
      for (const VerifyRecord& r : dim.records) {
        worst = std::min(worst, r.margin);
        if (!r.pass) {
          failing.push_back({{"alpha", r.alpha},
                             {"exact_beta", r.exact_beta},
                             {"bound_beta", r.bound_beta},
                             {"floor_beta", r.floor_beta},
                             {"margin", r.margin}});
        }
      }
      jd["worst_margin"] = worst;
      jd["failing_records"] = failing;
      out.push_back(jd);
    }
    all_pass = all_pass && rep.pass;
  }
  if (!all_pass) *exit_code = 1;
  return out;
}

json verify_ngd_moments(const json& cfg, uint64_t seed, int* exit_code) {
  const int instances = get_or(cfg, "instances", 20);
  const int max_steps = get_or(cfg, "steps", 100);
  json out = json::array();
  Philox rng(RngStream{seed, 0x6e6764});
  for (int inst = 0; inst < instances; ++inst) {
    const int m = 2 + int(rng.next_u64() % 6);
    const int d = 1 + int(rng.next_u64() % 4);
    const int n = 1 + int(rng.next_u64() % 3);
    RidgeProblem prob;
    prob.X.resize(m, d);
    prob.Y.resize(m, n);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < d; ++j) prob.X(i, j) = rng.next_gaussian();
      for (int j = 0; j < n; ++j) prob.Y(i, j) = rng.next_gaussian();
    }
    prob.lambda = 0.5 + rng.next_double();
    NgdConfig config;
    config.sigma = 0.5 + rng.next_double();
    const Eigen::MatrixXd S =
        prob.X.transpose() * prob.X / double(m) +
        prob.lambda * Eigen::MatrixXd::Identity(d, d);
    const double smax =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(S).eigenvalues()
            .maxCoeff();
    config.eta = 0.4 / smax * rng.next_double();  // contraction holds

    // Ground truth: the literal recursion, term by term.
    const Eigen::MatrixXd M =
        Eigen::MatrixXd::Identity(d, d) - 2.0 * config.eta * S;
    const Eigen::MatrixXd B =
        (2.0 * config.eta / m) * prob.Y.transpose() * prob.X;
    Eigen::MatrixXd mu = Eigen::MatrixXd::Zero(n, d);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(d, d);
    double max_diff = 0.0;
    const int t_checks[] = {0, 1, 2, 5, max_steps / 2, max_steps};
    int next_check = 0;
    for (int t = 0; t <= max_steps; ++t) {
      if (next_check < 6 && t == t_checks[next_check]) {
        config.steps = t;
        const GaussianRowModel closed = ngd_moments(prob, config);
        max_diff = std::max(max_diff,
                            (closed.means - mu).cwiseAbs().maxCoeff());
        max_diff = std::max(max_diff,
                            (closed.row_cov - cov).cwiseAbs().maxCoeff());
        ++next_check;
      }
      mu = mu * M + B;
      cov = M * cov * M +
            2.0 * config.eta * config.sigma * config.sigma *
                Eigen::MatrixXd::Identity(d, d);
    }
    // Stationary law vs a long recursion run.
    NgdConfig stat = config;
    stat.stationary = true;
    const GaussianRowModel inf_model = ngd_moments(prob, stat);
    config.steps = 10000;
    config.stationary = false;
    const GaussianRowModel long_run = ngd_moments(prob, config);
    const double stat_diff =
        std::max((inf_model.means - long_run.means).cwiseAbs().maxCoeff(),
                 (inf_model.row_cov - long_run.row_cov).cwiseAbs().maxCoeff());

    json ji;
    ji["instance"] = inst;
    ji["m"] = m;
    ji["d"] = d;
    ji["n"] = n;
    ji["max_diff_recursion"] = max_diff;
    ji["stationary_vs_long_run"] = stat_diff;
    ji["pass"] = max_diff <= 1e-10 && stat_diff <= 1e-8;
    if (!ji["pass"].get<bool>()) *exit_code = 1;
    out.push_back(ji);
  }
  return out;
}

json verify_bessel_cf(const json& cfg, int* exit_code) {
  const int d = get_or(cfg, "d", 3);
  MechanismSpec spec;
  spec.d = d;
  const double hw = 12.0 * spec.sigma_z * spec.sigma_theta * std::sqrt(double(d));
  Grid1D grid(-hw, hw, 1 << 15);
  json out;
  out["d"] = d;
  try {
    const DensityGrid dens = density_vz_1d(0.0, spec, grid);
    double sup = 0.0;
    for (int i = 0; i < dens.grid.n_points; ++i) {
      sup = std::max(sup, std::abs(dens.grid.values[size_t(i)] -
                                   bessel_density_vz0(dens.grid.x(i), spec)));
    }
    out["sup_error"] = sup;
    out["mass"] = dens.mass;
    out["pass"] = sup <= 1e-6;
  } catch (const std::exception& e) {
    out["error"] = e.what();
    out["pass"] = false;
  }
  if (!out["pass"].get<bool>()) *exit_code = 1;
  return out;
}

json verify_sandwich(const json& cfg, uint64_t seed, int* exit_code) {
  const int pairs = get_or(cfg, "pairs", 200);
  Philox rng(RngStream{seed, 0x73616e64});
  json out;
  int failures = 0;
  double worst_violation = 0.0;
  for (int k = 0; k < pairs; ++k) {
    const double p = 0.05 + 0.9 * rng.next_double();
    const double q = 0.05 + 0.9 * rng.next_double();
    const double pt = std::min(0.999, std::max(0.001, p + 0.1 * (rng.next_double() - 0.5)));
    const double qt = std::min(0.999, std::max(0.001, q + 0.1 * (rng.next_double() - 0.5)));
    const double gamma = std::max(std::abs(p - pt), std::abs(q - qt));
    // Sandwich check: T(P,Q) is sandwiched by the shifted perturbed curve
    //   T~(a + gamma) - gamma <= T(a) and T(a + gamma) - gamma <= T~(a).
    for (int i = 0; i <= 500; ++i) {
      const double a = double(i) / 500;
      const double lower =
          std::max(0.0, bernoulli_tradeoff(pt, qt, std::min(1.0, a + gamma)) -
                            gamma);
      const double upper_src =
          std::max(0.0, bernoulli_tradeoff(p, q, std::min(1.0, a + gamma)) -
                            gamma);
      const double v1 = lower - bernoulli_tradeoff(p, q, a);
      const double v2 = upper_src - bernoulli_tradeoff(pt, qt, a);
      worst_violation = std::max({worst_violation, v1, v2});
      if (v1 > 1e-12 || v2 > 1e-12) {
        ++failures;
        break;
      }
    }
  }
  out["pairs"] = pairs;
  out["failures"] = failures;
  out["worst_violation"] = worst_violation;
  out["pass"] = failures == 0;
  if (failures != 0) *exit_code = 1;
  return out;
}

json verify_adversary_roc(const json& cfg, uint64_t seed, int* exit_code) {
  const int trials = get_or(cfg, "trials", 20000);
  const double sigma_theta = get_or(cfg, "sigma_theta", 1.0);
  // Canonical rank-1 pathological instance.
  Eigen::VectorXd a(2), u(2), v(2);
  a << 1, 1;
  u << 1, 0;
  v << 1, 0;
  const auto [d0, d1] = pathological_pair(a, u, v, 2.0, 1.0);
  const Eigen::MatrixXd w0 = ridge_fit(d0), w1 = ridge_fit(d1);
  const int dim = int(w0.cols());
  GaussianRowModel m0{w0,
                      sigma_theta * sigma_theta * Eigen::MatrixXd::Identity(dim, dim)};
  GaussianRowModel m1{w1, m0.row_cov};
  const WorstSeed ws = worst_seed(m0, m1);
  const double mu = ws.achieved_mu;

  // Simulate the released query V z under both datasets; the test statistic
  // is the released scalar itself, standardized.
  std::vector<Eigen::MatrixXd> s0, s1;
  s0.reserve(size_t(trials));
  s1.reserve(size_t(trials));
  Philox noise(RngStream{seed, 0x726f63});
  const double sd = sigma_theta * ws.z.norm();
  for (int t = 0; t < trials; ++t) {
    Eigen::MatrixXd n0(w0.rows(), w0.cols()), n1(w0.rows(), w0.cols());
    for (int i = 0; i < n0.rows(); ++i) {
      for (int j = 0; j < n0.cols(); ++j) {
        n0(i, j) = noise.next_gaussian();
        n1(i, j) = noise.next_gaussian();
      }
    }
    s0.push_back((w0 + sigma_theta * n0) * ws.z / sd);
    s1.push_back((w1 + sigma_theta * n1) * ws.z / sd);
  }
  // Orient so H1 is shifted upward.
  const double shift = ((w1 - w0) * ws.z).norm() / sd;
  const double sign =
      ((w1 - w0) * ws.z)(0) >= 0 ? 1.0 : -1.0;
  const auto stat = [sign](const Eigen::MatrixXd& s) { return sign * s(0, 0); };

  const std::vector<double> alphas = {0.05, 0.2, 0.5};
  std::vector<double> thresholds;
  for (const double al : alphas) {
    const double base = sign * ((w0 * ws.z)(0)) / sd;
    thresholds.push_back(base + normal_quantile_upper(al));
  }
  const EmpiricalRoc roc = empirical_power(s0, s1, stat, thresholds);
  const TradeoffCurve g = gaussian_tradeoff(mu);

  json records = json::array();
  bool pass = true;
  for (size_t i = 0; i < alphas.size(); ++i) {
    const double predicted = g.eval(roc.alpha_hat[i]);
    const double err = std::abs(roc.beta_hat[i] - predicted);
    const double limit = 3.0 * std::max(roc.beta_se[i], 1e-12) +
                         std::abs(g.deriv(roc.alpha_hat[i])) * 3.0 *
                             std::max(roc.alpha_se[i], 1e-12);
    json r;
    r["alpha_nominal"] = alphas[i];
    r["alpha_hat"] = roc.alpha_hat[i];
    r["beta_hat"] = roc.beta_hat[i];
    r["predicted_beta"] = predicted;
    r["error"] = err;
    r["limit_3se"] = limit;
    r["pass"] = err <= limit;
    pass = pass && (err <= limit);
    records.push_back(r);
  }
  json out;
  out["trials"] = trials;
  out["achieved_mu"] = mu;
  out["shift_check"] = shift;
  out["records"] = records;
  out["pass"] = pass;
  if (!pass) *exit_code = 1;
  return out;
}

int cmd_verify(const json& cfg, const std::string& scenario_arg,
               std::optional<uint64_t> seed_flag) {
  reject_unknown_keys(cfg,
                      {"scenario", "d_list", "delta_list", "alpha_count",
                       "tolerance", "instances", "steps", "pairs", "trials",
                       "sigma_theta", "d", "master_seed", "out"},
                      "verify");
  std::string scenario =
      scenario_arg.empty() ? get_or<std::string>(cfg, "scenario", "")
                           : scenario_arg;
  if (scenario.empty()) {
    throw UsageError(
        "verify: missing scenario (single-point, ngd-moments, bessel-cf, "
        "sandwich, adversary-roc)");
  }
  const uint64_t seed =
      seed_flag ? *seed_flag : get_or<uint64_t>(cfg, "master_seed", 0);

  int exit_code = 0;
  json report;
  report["command"] = "verify";
  report["scenario"] = scenario;
  if (scenario == "single-point") {
    report["dimensions"] = verify_single_point(cfg, &exit_code);
  } else if (scenario == "ngd-moments") {
    report["instances"] = verify_ngd_moments(cfg, seed, &exit_code);
  } else if (scenario == "bessel-cf") {
    report["result"] = verify_bessel_cf(cfg, &exit_code);
  } else if (scenario == "sandwich") {
    report["result"] = verify_sandwich(cfg, seed, &exit_code);
  } else if (scenario == "adversary-roc") {
    report["result"] = verify_adversary_roc(cfg, seed, &exit_code);
  } else {
    throw UsageError("verify: unknown scenario \"" + scenario + "\"");
  }
  report["pass"] = exit_code == 0;
  std::cout << report.dump(2) << "\n";
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "privcurve: trade-off curves, Renyi bounds, and verification tools for "
      "privately released linear models"};
  app.require_subcommand(1);

  std::string config_path, out_dir, verify_scenario;
  std::optional<uint64_t> seed;
  bool svg = false;

  CLI::App* t = app.add_subcommand("tradeoff", "tabulate the lower bound h");
  CLI::App* r = app.add_subcommand("rdp-sweep", "Monte Carlo RDP sweep");
  CLI::App* a = app.add_subcommand("adversary", "worst-case seed analysis");
  CLI::App* v = app.add_subcommand("verify", "oracle verification suites");
  for (CLI::App* sub : {t, r, a, v}) {
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--seed", seed, "master seed (overrides config)");
    sub->add_option("--out", out_dir, "output directory (overrides config)");
  }
  t->add_flag("--svg", svg, "also emit an SVG plot");
  v->add_option("scenario", verify_scenario,
                "single-point | ngd-moments | bessel-cf | sandwich | "
                "adversary-roc");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints help or error text
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    const json cfg = load_config(config_path);
    if (t->parsed()) return cmd_tradeoff(cfg, out_dir, svg);
    if (r->parsed()) return cmd_rdp_sweep(cfg, out_dir, seed);
    if (a->parsed()) return cmd_adversary(cfg, out_dir);
    if (v->parsed()) return cmd_verify(cfg, verify_scenario, seed);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
