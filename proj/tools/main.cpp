// primpoints: experiment runner for Diophantine approximation by points with
// coprimality constraints.  Subcommands cover the sieve/density checks,
// solution enumeration, divergence/convergence growth experiments, strip
// measure estimation and orbit exploration.  Every command resolves its
// configuration to a manifest (key=value, one per line) before writing any
// results, and rerunning the command from that manifest reproduces the CSV
// byte for byte at any thread count.
//
// Exit codes: 0 success, 2 config/validation error, 3 internal oracle
// mismatch, 4 resource budget exceeded.

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "pp/arith.hpp"
#include "pp/group.hpp"
#include "pp/measure.hpp"
#include "pp/partition.hpp"
#include "pp/psi.hpp"
#include "pp/rng.hpp"
#include "pp/solver.hpp"

namespace {

using pp::IVec;
using pp::Mat;
using pp::Vec;

using Config = std::map<std::string, std::string>;

// ---- config plumbing -------------------------------------------------------

void load_config_file(const std::string& path, Config& cfg) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config: expected key=value, got '" + line + "'");
    cfg[line.substr(0, eq)] = line.substr(eq + 1);
  }
}

void apply_kv_args(const std::vector<std::string>& kvs, Config& cfg) {
  for (const auto& kv : kvs) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("expected key=value argument, got '" + kv + "'");
    cfg[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
}

std::string get_or(const Config& cfg, const std::string& key, const std::string& fallback) {
  const auto it = cfg.find(key);
  return it == cfg.end() ? fallback : it->second;
}

std::int64_t get_int(const Config& cfg, const std::string& key, std::int64_t fallback) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  std::size_t pos = 0;
  const std::int64_t v = std::stoll(it->second, &pos);
  if (pos != it->second.size()) throw std::invalid_argument("config: bad integer for " + key + ": " + it->second);
  return v;
}

double get_double(const Config& cfg, const std::string& key, double fallback) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  std::size_t pos = 0;
  const double v = std::stod(it->second, &pos);
  if (pos != it->second.size()) throw std::invalid_argument("config: bad number for " + key + ": " + it->second);
  return v;
}

std::vector<std::int64_t> parse_int_list(const std::string& text) {
  std::vector<std::int64_t> out;
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) out.push_back(std::stoll(item));
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) out.push_back(std::stod(item));
  return out;
}

Mat parse_matrix(const std::string& text, int rows, int cols) {
  const auto vals = parse_double_list(text);
  if (static_cast<int>(vals.size()) != rows * cols)
    throw std::invalid_argument("expected " + std::to_string(rows * cols) + " matrix entries, got " +
                                std::to_string(vals.size()));
  return Mat(rows, cols, vals);
}

// psi accepts either a full spec string or a bare constant
pp::PsiFunction parse_psi_config(const std::string& text) {
  if (text.find(':') == std::string::npos) {
    std::size_t pos = 0;
    const double c = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("psi: bad spec '" + text + "'");
    return pp::make_power_psi(c, 0.0);
  }
  return pp::parse_psi(text);
}

pp::Partition trivial_partition(int m, int n) {
  std::vector<int> all(static_cast<std::size_t>(m + n));
  std::iota(all.begin(), all.end(), 1);
  return pp::validate_partition(m, n, {all});
}

// ---- output plumbing -------------------------------------------------------

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct CsvWriter {
  std::ofstream out;

  CsvWriter(const std::string& path, const std::string& header) : out(path, std::ios::binary) {
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[64];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    out << "# generated " << stamp << "\n";
    out << header << "\n";
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << "\n";
  }
};

void write_manifest(const std::string& path, const Config& cfg) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open manifest file '" + path + "'");
  for (const auto& [k, v] : cfg) out << k << "=" << v << "\n";
}

struct CommandContext {
  Config cfg;
  std::string out_dir;
  std::uint64_t seed = 1;
  std::int64_t budget = pp::kDefaultBudget;
  pp::Exec exec = pp::Exec::parallel;

  std::string path(const std::string& name) const { return out_dir + "/" + name; }
};

CommandContext make_context(const std::string& command, const std::string& config_file,
                            const std::vector<std::string>& kvs, const std::string& seed_flag,
                            const std::string& threads_flag, const std::string& out_flag,
                            const std::string& budget_flag) {
  CommandContext ctx;
  if (!config_file.empty()) load_config_file(config_file, ctx.cfg);
  apply_kv_args(kvs, ctx.cfg);
  if (!seed_flag.empty()) ctx.cfg["seed"] = seed_flag;
  if (!threads_flag.empty()) ctx.cfg["threads"] = threads_flag;
  if (!out_flag.empty()) ctx.cfg["out"] = out_flag;
  if (!budget_flag.empty()) ctx.cfg["budget"] = budget_flag;
  ctx.cfg["command"] = command;
  if (!ctx.cfg.count("seed")) ctx.cfg["seed"] = "1";
  if (!ctx.cfg.count("threads")) ctx.cfg["threads"] = "0";
  if (!ctx.cfg.count("out")) ctx.cfg["out"] = ".";
  if (!ctx.cfg.count("budget")) ctx.cfg["budget"] = std::to_string(pp::kDefaultBudget);

  ctx.seed = std::stoull(ctx.cfg["seed"]);
  ctx.out_dir = ctx.cfg["out"];
  ctx.budget = std::stoll(ctx.cfg["budget"]);
  const int threads = static_cast<int>(get_int(ctx.cfg, "threads", 0));
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#endif
  return ctx;
}

// ---- sieve -----------------------------------------------------------------

int cmd_sieve(const CommandContext& ctx) {
  const std::int64_t qmax = get_int(ctx.cfg, "qmax", 100);
  const std::int64_t Q = get_int(ctx.cfg, "Q", 200);
  const pp::Rational beta = pp::parse_rational(get_or(ctx.cfg, "beta", "1"));
  if (qmax < 1 || Q < 1) throw std::invalid_argument("sieve: qmax and Q must be >= 1");

  write_manifest(ctx.path("sieve_manifest.txt"), ctx.cfg);
  CsvWriter csv(ctx.path("sieve.csv"), "q,Q,beta,sieve_count,brute_count,match");
  bool all_match = true;
  const std::int64_t limit = beta.num * Q / beta.den;
  for (std::int64_t q = 1; q <= qmax; ++q) {
    const std::int64_t sieved = pp::legendre_sieve_count({beta, Q, q});
    std::int64_t brute = 0;
    for (std::int64_t n = 1; n <= limit; ++n)
      if (std::gcd(n, q) == 1) ++brute;
    const bool match = sieved == brute;
    all_match = all_match && match;
    csv.row({std::to_string(q), std::to_string(Q), pp::to_string(beta), std::to_string(sieved),
             std::to_string(brute), match ? "1" : "0"});
  }
  return all_match ? 0 : 3;
}

// ---- enumerate -------------------------------------------------------------

pp::ProblemInstance instance_from_config(const Config& cfg) {
  pp::ProblemInstance inst;
  inst.m = static_cast<int>(get_int(cfg, "m", 1));
  inst.n = static_cast<int>(get_int(cfg, "n", 1));
  inst.theta = parse_matrix(get_or(cfg, "theta", "0"), inst.n, inst.m);
  if (cfg.count("phi")) inst.phi = parse_matrix(cfg.at("phi"), inst.n, inst.n);
  inst.y = cfg.count("y") ? parse_double_list(cfg.at("y")) : Vec(static_cast<std::size_t>(inst.n), 0.0);
  inst.psi = parse_psi_config(get_or(cfg, "psi", "power:c=1,s=1"));
  inst.partition = cfg.count("pi") ? pp::parse_partition("m=" + std::to_string(inst.m) + " n=" +
                                                         std::to_string(inst.n) + " pi=" + cfg.at("pi"))
                                   : trivial_partition(inst.m, inst.n);
  pp::validate_instance(inst);
  return inst;
}

std::string solution_header(int m, int n) {
  std::string h;
  for (int j = 1; j <= m; ++j) h += "qx" + std::to_string(j) + ",";
  for (int i = 1; i <= n; ++i) h += "p" + std::to_string(i) + ",";
  return h + "shell,residual";
}

int cmd_enumerate(const CommandContext& ctx) {
  const pp::ProblemInstance inst = instance_from_config(ctx.cfg);
  const std::int64_t Q = get_int(ctx.cfg, "Q", 10);
  const bool constrained = get_int(ctx.cfg, "constrained", 1) != 0;
  pp::EnumerateOptions opts;
  opts.budget = ctx.budget;
  opts.exec = ctx.exec;

  write_manifest(ctx.path("enumerate_manifest.txt"), ctx.cfg);
  const auto records = inst.phi ? pp::enumerate_affine(inst, Q, constrained, opts)
                                : pp::enumerate_solutions(inst, Q, constrained, opts);
  CsvWriter csv(ctx.path("enumerate.csv"), solution_header(inst.m, inst.n));
  for (const auto& rec : records) {
    std::vector<std::string> cells;
    for (std::int64_t qi : rec.q) cells.push_back(std::to_string(qi));
    for (std::int64_t pi : rec.p) cells.push_back(std::to_string(pi));
    cells.push_back(std::to_string(rec.shell));
    cells.push_back(fmt_double(rec.residual));
    csv.row(cells);
  }
  return 0;
}

// ---- dichotomy -------------------------------------------------------------

struct DichotomySetup {
  int m = 1;
  int n = 1;
  pp::Partition partition;
  bool affine = false;  // sample a phi block as well
  bool random_y = true; // corollary-1.4 style doubly metric sampling
};

DichotomySetup dichotomy_setup(const Config& cfg) {
  DichotomySetup s;
  const std::string preset = get_or(cfg, "preset", "custom");
  if (preset == "corollary-1.4") {
    s.n = static_cast<int>(get_int(cfg, "n", 1));
    s.m = 1;
    s.partition = trivial_partition(s.m, s.n);
    s.affine = false;
    s.random_y = true;
  } else if (preset == "corollary-1.5") {
    const int k = static_cast<int>(get_int(cfg, "k", 1));
    if (k < 1) throw std::invalid_argument("dichotomy: k must be >= 1");
    s.m = 2 * k - 1;
    s.n = 1;
    std::vector<std::vector<int>> comps;
    for (int j = 1; j <= k; ++j) comps.push_back({2 * j - 1, 2 * j});
    s.partition = pp::validate_partition(s.m, s.n, comps);
    s.affine = true;
    s.random_y = false;
  } else if (preset == "custom") {
    s.m = static_cast<int>(get_int(cfg, "m", 1));
    s.n = static_cast<int>(get_int(cfg, "n", 1));
    s.partition = cfg.count("pi") ? pp::parse_partition("m=" + std::to_string(s.m) + " n=" +
                                                        std::to_string(s.n) + " pi=" + cfg.at("pi"))
                                  : trivial_partition(s.m, s.n);
    s.affine = cfg.count("affine") && get_int(cfg, "affine", 0) != 0;
    s.random_y = get_int(cfg, "random_y", 1) != 0;
  } else {
    throw std::invalid_argument("dichotomy: unknown preset '" + preset + "'");
  }
  return s;
}

void write_plot_script(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  out << R"PY(#!/usr/bin/env python3
"""Render N(Q) growth curves against the series proxy S(Q)."""
import csv
import sys
from collections import defaultdict

import matplotlib.pyplot as plt

src = sys.argv[1] if len(sys.argv) > 1 else "dichotomy_samples.csv"
per_sample = defaultdict(list)
series = {}
with open(src) as fh:
    rows = [r for r in fh if not r.startswith("#")]
for rec in csv.DictReader(rows):
    q = int(rec["Q"])
    per_sample[int(rec["sample"])].append((q, int(rec["N_constrained"])))
    series[q] = float(rec["S"])

fig, ax = plt.subplots(figsize=(7, 5))
for pts in per_sample.values():
    pts.sort()
    ax.plot([p[0] for p in pts], [p[1] for p in pts], color="steelblue", alpha=0.25, lw=0.8)
qs = sorted(series)
ax.plot(qs, [series[q] for q in qs], color="firebrick", lw=2, label="S(Q)")
ax.set_xscale("log")
ax.set_xlabel("Q")
ax.set_ylabel("count / series")
ax.legend()
fig.savefig("dichotomy.png", dpi=150)
print("wrote dichotomy.png")
)PY";
}

int cmd_dichotomy(const CommandContext& ctx) {
  const DichotomySetup setup = dichotomy_setup(ctx.cfg);
  const pp::PsiFunction psi = parse_psi_config(get_or(ctx.cfg, "psi", "power:c=0.4,s=1"));
  const std::string regime = get_or(ctx.cfg, "regime", "divergent");
  if (regime != "divergent" && regime != "convergent")
    throw std::invalid_argument("dichotomy: regime must be divergent or convergent");
  const std::int64_t samples = get_int(ctx.cfg, "samples", 50);
  if (samples < 1) throw std::invalid_argument("dichotomy: samples must be >= 1");
  const auto Qs = parse_int_list(get_or(ctx.cfg, "Qs", "100,1000,10000"));
  if (Qs.empty() || Qs.front() < 1) throw std::invalid_argument("dichotomy: bad Q schedule");
  for (std::size_t i = 1; i < Qs.size(); ++i)
    if (Qs[i] <= Qs[i - 1]) throw std::invalid_argument("dichotomy: Q schedule must be increasing");
  const double fixed_y = get_double(ctx.cfg, "y", 0.25);

  write_manifest(ctx.path("dichotomy_manifest.txt"), ctx.cfg);
  CsvWriter csv(ctx.path("dichotomy_samples.csv"), "sample,Q,N_constrained,N_unconstrained,S");

  std::vector<std::vector<std::int64_t>> nc(Qs.size()), nu(Qs.size());
  for (std::int64_t sample = 0; sample < samples; ++sample) {
    pp::SplitMix64 rng(pp::substream_seed(ctx.seed, static_cast<std::uint64_t>(sample)));
    pp::ProblemInstance inst;
    inst.m = setup.m;
    inst.n = setup.n;
    inst.partition = setup.partition;
    inst.psi = psi;
    inst.theta = Mat(setup.n, setup.m);
    for (auto& x : inst.theta.a) x = rng.next_box();
    inst.y.assign(static_cast<std::size_t>(setup.n), fixed_y);
    if (setup.random_y)
      for (auto& x : inst.y) x = rng.next_box();
    if (setup.affine) {
      Mat phi(setup.n, setup.n);
      // keep phi away from singularity so the candidate boxes stay bounded
      do {
        for (auto& x : phi.a) x = rng.next_box();
      } while (std::fabs(pp::max_abs(phi)) < 0.1);
      inst.phi = phi;
    }
    pp::EnumerateOptions opts;
    opts.budget = ctx.budget;
    opts.exec = ctx.exec;
    const auto curve_c = pp::growth_curve(inst, Qs, /*constrained=*/true, opts);
    const auto curve_u = pp::growth_curve(inst, Qs, /*constrained=*/false, opts);
    for (std::size_t i = 0; i < Qs.size(); ++i) {
      nc[i].push_back(curve_c.N[i]);
      nu[i].push_back(curve_u.N[i]);
      csv.row({std::to_string(sample), std::to_string(Qs[i]), std::to_string(curve_c.N[i]),
               std::to_string(curve_u.N[i]), fmt_double(curve_c.S[i])});
    }
  }

  CsvWriter agg(ctx.path("dichotomy_aggregate.csv"),
                "Q,p10_Nc,p50_Nc,p90_Nc,p10_Nu,p50_Nu,p90_Nu,frac_growth_c,frac_equal_u");
  auto pct = [](std::vector<std::int64_t> v, double p) {
    std::sort(v.begin(), v.end());
    const auto idx = static_cast<std::size_t>(p * (static_cast<double>(v.size()) - 1) + 0.5);
    return v[idx];
  };
  for (std::size_t i = 0; i < Qs.size(); ++i) {
    std::int64_t grew = 0, equal = 0;
    if (i > 0) {
      for (std::int64_t s = 0; s < samples; ++s) {
        if (nc[i][static_cast<std::size_t>(s)] > nc[i - 1][static_cast<std::size_t>(s)]) ++grew;
        if (nu[i][static_cast<std::size_t>(s)] == nu[i - 1][static_cast<std::size_t>(s)]) ++equal;
      }
    }
    agg.row({std::to_string(Qs[i]), std::to_string(pct(nc[i], 0.1)), std::to_string(pct(nc[i], 0.5)),
             std::to_string(pct(nc[i], 0.9)), std::to_string(pct(nu[i], 0.1)),
             std::to_string(pct(nu[i], 0.5)), std::to_string(pct(nu[i], 0.9)),
             fmt_double(samples && i ? static_cast<double>(grew) / static_cast<double>(samples) : 0.0),
             fmt_double(samples && i ? static_cast<double>(equal) / static_cast<double>(samples) : 0.0)});
  }
  write_plot_script(ctx.path("plot_dichotomy.py"));
  return 0;
}

// ---- measure ---------------------------------------------------------------

pp::StripVariant parse_variant(const std::string& text) {
  if (text == "F") return pp::StripVariant::Fq;
  if (text == "E") return pp::StripVariant::Eq;
  if (text == "R") return pp::StripVariant::Rv;
  throw std::invalid_argument("measure: variant must be F, E or R");
}

int cmd_measure(const CommandContext& ctx) {
  const std::string task = get_or(ctx.cfg, "task", "strip");
  const std::int64_t samples = get_int(ctx.cfg, "samples", 1'000'000);

  write_manifest(ctx.path("measure_manifest.txt"), ctx.cfg);
  CsvWriter csv(ctx.path("measure.csv"), "quantity,estimate,stderr,samples,seed");
  auto emit = [&](const std::string& quantity, double estimate, double std_err, std::int64_t nsamp) {
    csv.row({quantity, fmt_double(estimate), fmt_double(std_err), std::to_string(nsamp),
             std::to_string(ctx.seed)});
  };

  if (task == "strip") {
    pp::StripQuery query;
    query.variant = parse_variant(get_or(ctx.cfg, "variant", "F"));
    query.q = parse_int_list(get_or(ctx.cfg, "q", "1"));
    const int m = static_cast<int>(query.q.size());
    const int n = static_cast<int>(get_int(ctx.cfg, "n", 1));
    query.y = ctx.cfg.count("y") ? parse_double_list(ctx.cfg.at("y")) : Vec(static_cast<std::size_t>(n), 0.0);
    query.psi_value = get_double(ctx.cfg, "psi", 0.1);
    if (ctx.cfg.count("p")) query.p = parse_int_list(ctx.cfg.at("p"));
    const pp::Partition partition =
        ctx.cfg.count("pi")
            ? pp::parse_partition("m=" + std::to_string(m) + " n=" + std::to_string(n) + " pi=" + ctx.cfg.at("pi"))
            : trivial_partition(m, n);
    const auto est = pp::mc_measure(query, partition, samples, ctx.seed, ctx.exec);
    const std::string name = query.variant == pp::StripVariant::Fq   ? "lambda_F"
                             : query.variant == pp::StripVariant::Eq ? "lambda_E"
                                                                     : "lambda_R";
    emit(name, est.estimate, est.std_err, est.samples);
    return 0;
  }

  if (task == "pair") {
    const IVec q = parse_int_list(get_or(ctx.cfg, "q", "1"));
    const IVec qp = parse_int_list(get_or(ctx.cfg, "qprime", "1"));
    const int m = static_cast<int>(q.size());
    const int n = static_cast<int>(get_int(ctx.cfg, "n", 1));
    const Vec y = ctx.cfg.count("y") ? parse_double_list(ctx.cfg.at("y")) : Vec(static_cast<std::size_t>(n), 0.0);
    const pp::PsiFunction psi = parse_psi_config(get_or(ctx.cfg, "psi", "0.1"));
    const pp::StripVariant variant = parse_variant(get_or(ctx.cfg, "variant", "F"));
    const pp::Partition partition =
        ctx.cfg.count("pi")
            ? pp::parse_partition("m=" + std::to_string(m) + " n=" + std::to_string(n) + " pi=" + ctx.cfg.at("pi"))
            : trivial_partition(m, n);
    const auto pair = pp::mc_pair_measure(q, qp, y, psi, variant, partition, samples, ctx.seed, ctx.exec);
    emit("pair_estimate", pair.est.estimate, pair.est.std_err, pair.est.samples);
    if (pair.proportional)
      emit("pair_bound", pair.proportional_bound, 0.0, pair.est.samples);
    else
      emit("pair_product_value", pair.product_value, 0.0, pair.est.samples);
    return 0;
  }

  const int m = static_cast<int>(get_int(ctx.cfg, "m", 2));
  const int n = static_cast<int>(get_int(ctx.cfg, "n", 1));
  const pp::Partition partition =
      ctx.cfg.count("pi")
          ? pp::parse_partition("m=" + std::to_string(m) + " n=" + std::to_string(n) + " pi=" + ctx.cfg.at("pi"))
          : trivial_partition(m, n);
  const Vec y = ctx.cfg.count("y") ? parse_double_list(ctx.cfg.at("y")) : Vec(static_cast<std::size_t>(n), 0.25);

  if (task == "ratio") {
    const pp::PsiFunction psi = parse_psi_config(get_or(ctx.cfg, "psi", "power:c=0.4,s=1"));
    const auto Qs = parse_int_list(get_or(ctx.cfg, "Qs", "10,20,40"));
    const auto rows = pp::eq_shell_moments(m, n, partition, psi, y, Qs, samples, ctx.seed, ctx.budget, ctx.exec);
    for (const auto& row : rows) {
      const double ratio = row.mean_count == 0.0 ? 0.0 : row.mean_count * row.mean_count / row.mean_count_sq;
      emit("bc_ratio_Q" + std::to_string(row.Q), ratio, 0.0, samples);
      emit("strip_sum_Q" + std::to_string(row.Q), row.mean_count, row.std_err, samples);
    }
    return 0;
  }

  if (task == "averaged") {
    const pp::PsiFunction psi = parse_psi_config(get_or(ctx.cfg, "psi", "power:c=0.4,s=1"));
    const std::int64_t Q = get_int(ctx.cfg, "Q", 20);
    const auto avg = pp::averaged_lower_bound(m, n, partition, psi, y, Q, samples, ctx.seed, ctx.budget, ctx.exec);
    emit("averaged_lhs", avg.lhs, avg.lhs_estimate.std_err, samples);
    emit("averaged_rhs", avg.rhs, 0.0, samples);
    emit("averaged_ratio", avg.ratio, 0.0, samples);
    return 0;
  }

  if (task == "pushforward") {
    const IVec q = parse_int_list(get_or(ctx.cfg, "q", "1"));
    const int bins = static_cast<int>(get_int(ctx.cfg, "bins", 32));
    const auto res = pp::pushforward_check(q, n, samples, bins, ctx.seed, ctx.exec);
    emit("pushforward_chi2", res.statistic, 0.0, samples);
    emit("pushforward_dof", static_cast<double>(res.dof), 0.0, samples);
    emit("pushforward_lower", res.lower, 0.0, samples);
    emit("pushforward_upper", res.upper, 0.0, samples);
    emit("pushforward_within_band", res.within_band ? 1.0 : 0.0, 0.0, samples);
    return 0;
  }

  if (task == "stripbound") {
    const IVec q = parse_int_list(get_or(ctx.cfg, "q", "12"));
    const IVec p = parse_int_list(get_or(ctx.cfg, "p", "0"));
    const double psi_value = get_double(ctx.cfg, "psi", 0.1);
    const double bound = pp::strip_volume_lower_bound(q, p, y, psi_value, m, n);
    pp::StripQuery query{q, y, psi_value, pp::StripVariant::Rv, p};
    const auto est = pp::mc_measure(query, partition, samples, ctx.seed, ctx.exec);
    emit("strip_bound", bound, 0.0, samples);
    emit("lambda_R", est.estimate, est.std_err, est.samples);
    return 0;
  }

  throw std::invalid_argument("measure: unknown task '" + task + "'");
}

// ---- orbit -----------------------------------------------------------------

int cmd_orbit(const CommandContext& ctx) {
  if (!ctx.cfg.count("pi")) throw std::invalid_argument("orbit: pi is required");
  const std::int64_t bound = get_int(ctx.cfg, "bound", 1);
  const std::int64_t word_budget = get_int(ctx.cfg, "word_budget", 64);
  const int m = static_cast<int>(get_int(ctx.cfg, "m", 1));
  const int n = static_cast<int>(get_int(ctx.cfg, "n", 1));
  const pp::Partition partition =
      pp::parse_partition("m=" + std::to_string(m) + " n=" + std::to_string(n) + " pi=" + ctx.cfg.at("pi"));

  write_manifest(ctx.path("orbit_manifest.txt"), ctx.cfg);
  const auto orbit = pp::orbit_ball(partition, bound, word_budget);
  std::string header;
  for (int i = 1; i <= partition.dimension(); ++i) header += (i > 1 ? ",v" : "v") + std::to_string(i);
  CsvWriter csv(ctx.path("orbit.csv"), header);
  for (const auto& v : orbit.vectors) {
    std::vector<std::string> cells;
    for (std::int64_t x : v) cells.push_back(std::to_string(x));
    csv.row(cells);
  }
  if (ctx.cfg.count("reduce")) {
    // words reaching the given vectors from the all-ones base, one per line
    std::ofstream words(ctx.path("orbit_words.txt"), std::ios::binary);
    std::istringstream vs(ctx.cfg.at("reduce"));
    std::string item;
    while (std::getline(vs, item, ';')) {
      const IVec v = parse_int_list(item);
      words << pp::to_string(pp::reduce_to_base(v, partition)) << "\n";
    }
  }
  std::fprintf(stdout, "orbit: %zu vectors, %s (depth %" PRId64 ")\n", orbit.vectors.size(),
               orbit.completed ? "complete" : "word budget exhausted", orbit.depth_reached);
  return 0;
}

// ---- fiber -----------------------------------------------------------------

int cmd_fiber(const CommandContext& ctx) {
  const int m = static_cast<int>(get_int(ctx.cfg, "m", 2));
  const int n = static_cast<int>(get_int(ctx.cfg, "n", 1));
  if (m < 1) throw std::invalid_argument("fiber: m must be >= 1");
  const Mat theta_rest = m > 1 ? parse_matrix(get_or(ctx.cfg, "theta_rest", "0"), n, m - 1) : Mat(n, 0);
  const Mat phi = parse_matrix(get_or(ctx.cfg, "phi", "1"), n, n);
  const Vec y = ctx.cfg.count("y") ? parse_double_list(ctx.cfg.at("y")) : Vec(static_cast<std::size_t>(n), 0.0);
  const IVec v = parse_int_list(get_or(ctx.cfg, "v", "1,1"));
  const double psi_value = get_double(ctx.cfg, "psi", 0.1);

  write_manifest(ctx.path("fiber_manifest.txt"), ctx.cfg);
  const auto cube = pp::fiber_hypercube(theta_rest, phi, y, v, psi_value);
  CsvWriter csv(ctx.path("fiber.csv"), "i,lo,hi");
  for (std::size_t i = 0; i < cube.size(); ++i)
    csv.row({std::to_string(i + 1), fmt_double(cube[i].lo), fmt_double(cube[i].hi)});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"experiments on Diophantine approximation by coprime integer points"};
  app.require_subcommand(1);

  struct SubArgs {
    std::string config, seed, threads, out, budget;
    std::vector<std::string> kvs;
  };
  std::map<std::string, SubArgs> args;
  std::map<std::string, int (*)(const CommandContext&)> handlers{
      {"sieve", cmd_sieve},     {"enumerate", cmd_enumerate}, {"dichotomy", cmd_dichotomy},
      {"measure", cmd_measure}, {"orbit", cmd_orbit},         {"fiber", cmd_fiber}};
  const std::map<std::string, std::string> descriptions{
      {"sieve", "coprime counting: Moebius sieve vs brute force"},
      {"enumerate", "list solutions of the inequality system up to Q"},
      {"dichotomy", "growth curves N(Q) vs S(Q) over random instances"},
      {"measure", "Monte Carlo strip measures, ratios and uniformity checks"},
      {"orbit", "breadth-first orbit of the all-ones point under the group"},
      {"fiber", "solution fiber hypercube over the first column"}};

  for (const auto& [name, handler] : handlers) {
    auto* sub = app.add_subcommand(name, descriptions.at(name));
    auto& a = args[name];
    sub->add_option("--config", a.config, "key=value config file (or a previous manifest)");
    sub->add_option("--seed", a.seed, "64-bit master seed");
    sub->add_option("--threads", a.threads, "worker thread count (0 = library default)");
    sub->add_option("--out", a.out, "output directory");
    sub->add_option("--budget", a.budget, "enumeration / sampling budget");
    sub->add_option("kv", a.kvs, "key=value overrides");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  for (const auto& [name, handler] : handlers) {
    if (!app.get_subcommand(name)->parsed()) continue;
    const auto& a = args.at(name);
    try {
      const CommandContext ctx = make_context(name, a.config, a.kvs, a.seed, a.threads, a.out, a.budget);
      return handler(ctx);
    } catch (const pp::budget_error& e) {
      std::fprintf(stderr, "budget exceeded: %s\n", e.what());
      return 4;
    } catch (const std::invalid_argument& e) {
      std::fprintf(stderr, "invalid configuration: %s\n", e.what());
      return 2;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return 1;
    }
  }
  return 2;
}
