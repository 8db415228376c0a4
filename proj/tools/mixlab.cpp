#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mixlab/analysis.hpp"
#include "mixlab/constructions.hpp"
#include "mixlab/distance.hpp"
#include "mixlab/error.hpp"
#include "mixlab/hitting.hpp"
#include "mixlab/io.hpp"
#include "mixlab/large_deviation.hpp"
#include "mixlab/spectral.hpp"

namespace {

using namespace mixlab;
namespace fs = std::filesystem;

constexpr int kExitPrecondition = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitVerification = 4;

struct RunConfig {
  std::string example = "1";
  int n = 10;
  int M = 10;
  int L = 2;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  unsigned threads = 1;
  std::vector<std::string> metrics{"tv", "sep"};
  std::string metric = "tv";  // sweep
  std::vector<double> eps_grid = kDefaultEpsGrid;
  std::vector<int> n_grid;
  std::size_t horizon = 0;  // 0: per-example default
  std::string mode = "exact";
  std::string source = "a";
  std::string target = "z";
  std::vector<std::string> only;
  std::string out;
  std::string s_grid = "1:12:0.5";
  int N = 400;
  double s = 3.0;
  std::size_t chains = 200;
  bool inject_fault = false;
};

void load_config(const std::string& path, RunConfig& c) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
  }
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  try {
    get("example", c.example);
    get("n", c.n);
    get("M", c.M);
    get("L", c.L);
    get("seed", c.seed);
    get("out_dir", c.out_dir);
    get("threads", c.threads);
    get("metrics", c.metrics);
    get("metric", c.metric);
    get("eps_grid", c.eps_grid);
    get("n_grid", c.n_grid);
    get("horizon", c.horizon);
    get("mode", c.mode);
    get("source", c.source);
    get("target", c.target);
    get("only", c.only);
    get("out", c.out);
    get("s_grid", c.s_grid);
    get("N", c.N);
    get("s", c.s);
    get("chains", c.chains);
    get("inject_fault", c.inject_fault);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("config field has the wrong type: ") + e.what());
  }
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// "1,2,3" or "lo:hi:step".
std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw InvalidArgument("range grids are lo:hi:step");
    const double lo = std::stod(parts[0]), hi = std::stod(parts[1]), step = std::stod(parts[2]);
    if (!(step > 0.0)) throw InvalidArgument("grid step must be positive");
    for (int i = 0; lo + i * step <= hi + 1e-12; ++i) out.push_back(lo + i * step);
  } else {
    for (const auto& p : split(text, ',')) out.push_back(std::stod(p));
  }
  return out;
}

bool is_graph_example(const std::string& id) { return id == "4" || id == "5"; }

struct Built {
  std::string id;
  ChainSpec chain;
  RoleMap roles;
  std::optional<GraphSpec> graph;
  std::optional<double> expander_gap;
};

Built build_example(const RunConfig& c, int n) {
  if (is_graph_example(c.example)) {
    auto gc = c.example == "4" ? example4(n, c.L, c.seed) : example5(n, c.L, c.seed);
    return {gc.id, gc.chain, gc.graph.roles, gc.graph, gc.expander_gap};
  }
  auto ex = build_example_chain(c.example, n, c.M);
  return {ex.id, ex.chain, ex.roles, std::nullopt, std::nullopt};
}

std::string tag_of(const RunConfig& c) {
  std::string tag = "ex" + c.example + "_n" + std::to_string(c.n);
  if (c.example == "3") tag += "_M" + std::to_string(c.M);
  if (is_graph_example(c.example)) tag += "_L" + std::to_string(c.L) + "_seed" + std::to_string(c.seed);
  return tag;
}

// Horizon long enough to cover the slowest transition advertised for each example.
std::size_t default_horizon(const RunConfig& c) {
  const std::size_t n = static_cast<std::size_t>(std::max(c.n, 1));
  if (c.example == "2") return 60 * n;
  if (c.example == "3") return 15 * static_cast<std::size_t>(c.M) * n;
  if (is_graph_example(c.example)) return 100 * n;
  return 20 * n;
}

std::size_t horizon_of(const RunConfig& c) { return c.horizon ? c.horizon : default_horizon(c); }

// Role names or state labels, comma separated.
std::vector<std::size_t> resolve_states(const Built& b, const std::string& spec) {
  std::vector<std::size_t> out;
  for (const auto& item : split(spec, ',')) {
    if (auto it = b.roles.find(item); it != b.roles.end()) {
      out.insert(out.end(), it->second.begin(), it->second.end());
    } else {
      out.push_back(b.chain.index_of(item));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.empty()) throw EmptyTargetSet("no states selected by '" + spec + "'");
  return out;
}

fs::path out_path(const RunConfig& c, const std::string& name) { return fs::path(c.out_dir) / name; }

int cmd_build(const RunConfig& c) {
  const auto b = build_example(c, c.n);
  const auto tag = tag_of(c);
  const auto& labels = b.graph ? b.graph->labels() : b.chain.states();
  write_atomic(out_path(c, tag + ".edges"), b.graph ? edge_list(*b.graph) : edge_list(b.chain));
  write_atomic(out_path(c, tag + ".roles.json"), roles_json(b.roles, labels));
  std::map<std::string, double> params{{"n", c.n}};
  if (c.example == "3") params["M"] = c.M;
  if (is_graph_example(c.example)) {
    params["L"] = c.L;
    params["seed"] = static_cast<double>(c.seed);
    params["max_degree"] = static_cast<double>(b.graph->max_degree());
    if (b.expander_gap) params["expander_gap"] = *b.expander_gap;
  }
  write_atomic(out_path(c, tag + ".kernel.json"), kernel_summary_json(b.chain, b.id, params));
  std::cout << "built example " << c.example << ": " << b.chain.size() << " states -> " << c.out_dir << "/" << tag
            << ".{edges,roles.json,kernel.json}\n";
  return 0;
}

int cmd_distances(RunConfig c) {
  std::erase(c.metrics, std::string{});
  if (c.metrics.empty()) {
    std::cout << "no metrics requested\n";
    return 0;
  }
  const auto b = build_example(c, c.n);
  const auto tag = tag_of(c);
  const std::size_t horizon = horizon_of(c);
  std::vector<Metric> metrics;
  for (const auto& m : c.metrics) metrics.push_back(Metric::parse(m));

  std::vector<DistanceCurve> curves;
  if (c.mode == "exact") {
    try {
      curves = distance_curves(b.chain, metrics, horizon, kDefaultDenseLimit, tag);
    } catch (const DenseLimitExceeded&) {
      std::cerr << "hint: rerun with --mode designated to evaluate tv from the a/b roles and separation over "
                   "(a,b) plus a seeded pair sample\n";
      throw;
    }
  } else if (c.mode == "designated") {
    std::vector<std::size_t> sources;
    for (const char* r : {"a", "b"}) {
      if (auto it = b.roles.find(r); it != b.roles.end()) sources.insert(sources.end(), it->second.begin(), it->second.end());
    }
    if (sources.empty()) sources.push_back(0);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    if (sources.size() >= 2) {
      pairs.emplace_back(sources[0], sources[1]);
      pairs.emplace_back(sources[1], sources[0]);
    }
    Rng rng = make_stream(c.seed, "distances/pairs");
    for (int i = 0; i < 200; ++i) pairs.emplace_back(uniform_index(rng, b.chain.size()), uniform_index(rng, b.chain.size()));
    for (const auto& m : metrics) {
      if (m.kind == Metric::Kind::tv) {
        curves.push_back(tv_curve_from_sources(b.chain, sources, horizon, tag));
      } else if (m.kind == Metric::Kind::separation) {
        curves.push_back(separation_restricted(b.chain, pairs, horizon, tag));
      } else {
        throw InvalidArgument("designated mode supports tv and separation only");
      }
    }
  } else {
    throw InvalidArgument("mode must be exact or designated");
  }
  for (const auto& curve : curves) {
    auto name = curve.metric.name();
    std::replace(name.begin(), name.end(), ':', '_');
    write_atomic(out_path(c, tag + ".distance_" + name + ".csv"), curve_csv(curve));
    write_atomic(out_path(c, tag + ".distance_" + name + ".json"), curve_json(curve));
    std::cout << curve.metric.name() << (curve.restricted ? " (restricted pairs)" : "") << ": d(0)="
              << format_double(curve.values.front()) << " d(" << curve.horizon
              << ")=" << format_double(curve.values.back()) << "\n";
  }
  return 0;
}

int cmd_hitting(const RunConfig& c) {
  const auto b = build_example(c, c.n);
  const auto src = resolve_states(b, c.source);
  const auto target = resolve_states(b, c.target);
  Vector mu = Vector::Zero(static_cast<Eigen::Index>(b.chain.size()));
  for (auto x : src) mu[static_cast<Eigen::Index>(x)] = 1.0 / static_cast<double>(src.size());
  HittingOptions opts;
  if (c.horizon) opts.horizon = c.horizon;
  const auto h = hitting_pmf(b.chain, mu, target, opts, c.source).distribution;
  const auto tag = tag_of(c);
  write_atomic(out_path(c, tag + ".hitting.csv"), hitting_csv(h));
  write_atomic(out_path(c, tag + ".hitting.json"), hitting_json(h));
  const auto ms = mode_and_spread(h.pmf);
  std::cout << "T_" << c.target << " from " << c.source << ": horizon " << h.horizon << ", residual "
            << format_double(h.residual) << ", mode " << ms.mode << ", mean " << ms.mean << ", sd " << ms.sd << "\n";
  return 0;
}

int cmd_spectral(const RunConfig& c) {
  const auto b = build_example(c, c.n);
  const auto summary = eigen_summary(b.chain);
  const auto cheeger = b.chain.size() <= 20 ? cheeger_exact(b.chain) : cheeger_bounds(b.chain, summary);
  write_atomic(out_path(c, tag_of(c) + ".spectral.json"), spectral_json(summary, cheeger, b.chain.states()));
  std::cout << "lambda2 " << format_double(summary.lambda2) << ", lambda_min " << format_double(summary.lambda_min)
            << ", t_rel " << (summary.t_rel ? format_double(*summary.t_rel) : std::string("n/a")) << "\n";
  std::cout << "Cheeger: " << format_double(cheeger.lower) << " <= Phi <= " << format_double(cheeger.upper);
  if (cheeger.exact) std::cout << " (exact " << format_double(*cheeger.exact) << ")";
  std::cout << "\nwitness set: {";
  for (std::size_t i = 0; i < cheeger.witness_set.size(); ++i) {
    std::cout << (i ? ", " : "") << b.chain.label(cheeger.witness_set[i]);
  }
  std::cout << "}\n";
  return 0;
}

int cmd_ld_psi(const RunConfig& c) {
  std::ostringstream os;
  os << "s,psi\n";
  for (double sv : parse_grid(c.s_grid)) os << format_double(sv) << ',' << format_double(psi(sv)) << '\n';
  write_atomic(out_path(c, "ld_psi.csv"), os.str());
  std::cout << os.str();
  return 0;
}

int cmd_ld_check(const RunConfig& c) {
  const auto emp = empirical_rate(c.N, c.s);
  const double analytic = psi(c.s);
  nlohmann::json j{{"N", c.N},          {"s", c.s},
                   {"t", emp.t},        {"empirical", emp.value},
                   {"log_pmf", emp.log_pmf}, {"log_space", emp.log_space},
                   {"psi", analytic},   {"difference", emp.value - analytic}};
  write_atomic(out_path(c, "ld_check.json"), j.dump(2) + "\n");
  std::cout << "N=" << c.N << " s=" << c.s << " empirical " << format_double(emp.value) << " psi "
            << format_double(analytic) << " difference " << format_double(emp.value - analytic)
            << (emp.log_space ? " (scaled recursion)" : "") << "\n";
  return 0;
}

int cmd_verify(const RunConfig& c) {
  if (c.inject_fault) {
    Rng rng = make_stream(c.seed, "verify/fault");
    const auto chain = random_reversible_lazy(8, rng);
    build_chain(inject_fault(chain.kernel(), rng));  // expected to throw NotReversible
    std::cerr << "fault injection was not detected\n";
    return kExitVerification;
  }
  SuiteOptions o;
  o.seed = c.seed;
  o.chains = c.chains;
  o.bd_chains = c.chains;
  o.threads = c.threads;
  for (const auto& f : c.only) {
    for (const auto& part : split(f, ',')) o.only.push_back(part);
  }
  const auto report = run_verify_suite(o);
  const fs::path out = c.out.empty() ? out_path(c, "report.json") : fs::path(c.out);
  write_atomic(out, suite_report_json(report));
  for (const auto& s : report.summary) {
    std::printf("%-4s %-28s checks=%-5zu failures=%-4zu worst_slack=%s\n", s.failures ? "FAIL" : "ok",
                s.check_id.c_str(), s.count, s.failures, format_double(s.worst_slack).c_str());
  }
  std::cout << (report.all_pass() ? "all checks passed" : "some checks failed") << "; report: " << out.string() << "\n";
  return report.all_pass() ? 0 : kExitVerification;
}

int cmd_sweep(const RunConfig& c) {
  if (c.n_grid.empty()) throw InvalidArgument("sweep needs --n-grid");
  SweepOptions so;
  so.threads = c.threads;
  const auto report = cutoff_sweep([&](int n) { return build_example(c, n).chain; }, c.n_grid, c.eps_grid,
                                   Metric::parse(c.metric), so);
  auto name = report.metric.name();
  std::replace(name.begin(), name.end(), ':', '_');
  const std::string tag = "sweep_ex" + c.example + "_" + name;
  write_atomic(out_path(c, tag + ".json"), cutoff_report_json(report));
  write_atomic(out_path(c, tag + "_ratios.csv"), cutoff_ratio_csv(report));
  std::printf("%6s", "n");
  for (double e : report.eps_grid) std::printf("  r(%.2f)", e);
  std::printf("\n");
  for (const auto& r : report.rows) {
    std::printf("%6d", r.n);
    for (double v : r.ratio) std::printf("  %7.4f", v);
    std::printf("\n");
  }
  std::cout << "pre-cutoff ratio " << format_double(precutoff_ratio(report)) << ", verdict "
            << verdict_name(report.verdict) << " (heuristic)\n";
  return 0;
}

int exit_code_for(const Error& e) {
  switch (e.error_class()) {
    case ErrorClass::precondition: return kExitPrecondition;
    case ErrorClass::numerical_guard: return kExitNumerical;
    case ErrorClass::verification: return kExitVerification;
  }
  return 1;
}

std::optional<std::string> find_config_flag(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) return std::string(argv[i + 1]);
    if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
  }
  return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  try {
    if (auto path = find_config_flag(argc, argv)) load_config(*path, cfg);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }

  CLI::App app{"mixlab: exact mixing-time laboratory for finite reversible Markov chains"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON file with default settings (flags win)");
  app.add_option("--seed", cfg.seed, "root seed for every random stream");
  app.add_option("--out-dir", cfg.out_dir, "directory for output files");
  app.add_option("--threads", cfg.threads, "worker threads")->check(CLI::PositiveNumber);

  auto add_example = [&](CLI::App* sub) {
    sub->add_option("--example", cfg.example, "basic, aldous, 1, 2, 3, ratio2, 4 or 5")
        ->check(CLI::IsMember({"basic", "aldous", "1", "2", "3", "ratio2", "4", "5"}));
    sub->add_option("--n", cfg.n, "size parameter");
    sub->add_option("--M", cfg.M, "Example 3 length multiplier");
    sub->add_option("--L", cfg.L, "stretch factor for Examples 4 and 5");
  };

  auto* build = app.add_subcommand("build", "construct an example and write edges, roles and a kernel summary");
  add_example(build);

  auto* distances = app.add_subcommand("distances", "distance-to-equilibrium curves");
  add_example(distances);
  distances->add_option("--metrics", cfg.metrics, "tv, sep, dbar, lp:<p>, lp:inf")->delimiter(',');
  distances->add_option("--horizon", cfg.horizon, "last time step (default depends on the example)");
  distances->add_option("--mode", cfg.mode, "exact or designated")->check(CLI::IsMember({"exact", "designated"}));

  auto* hitting = app.add_subcommand("hitting", "hitting-time law of a target set");
  add_example(hitting);
  hitting->add_option("--source", cfg.source, "role or state labels (uniform over them)");
  hitting->add_option("--target", cfg.target, "role or state labels");
  hitting->add_option("--horizon", cfg.horizon, "fixed horizon (default: run until drained)");

  auto* spectral = app.add_subcommand("spectral", "eigenvalues, relaxation time and Cheeger bounds");
  add_example(spectral);

  auto* ld = app.add_subcommand("ld", "large-deviation rate function");
  ld->require_subcommand(1);
  auto* ld_psi = ld->add_subcommand("psi", "tabulate the rate function");
  ld_psi->add_option("--s", cfg.s_grid, "grid: a,b,c or lo:hi:step");
  auto* ld_check = ld->add_subcommand("check", "compare the exact level-N hitting law with the rate function");
  ld_check->add_option("--N", cfg.N, "level")->check(CLI::PositiveNumber);
  ld_check->add_option("--s", cfg.s, "time scale, T = floor(sN)");

  auto* verify = app.add_subcommand("verify", "run the inequality verification suite");
  std::string suite_name = "all";
  verify->add_option("suite", suite_name, "suite name")->check(CLI::IsMember({"all"}));
  verify->add_option("--only", cfg.only, "run only checks whose id contains one of these")->delimiter(',');
  verify->add_option("--out", cfg.out, "report path (default <out-dir>/report.json)");
  verify->add_option("--chains", cfg.chains, "random chains per family");
  verify->add_flag("--inject-fault", cfg.inject_fault, "perturb a kernel entry and expect a reversibility rejection");

  auto* sweep = app.add_subcommand("sweep", "mixing-time ratios over an n-grid and a cutoff verdict");
  add_example(sweep);
  sweep->add_option("--metric", cfg.metric, "tv or sep");
  sweep->add_option("--n-grid", cfg.n_grid, "sizes")->delimiter(',');
  sweep->add_option("--eps-grid", cfg.eps_grid, "levels in (0, 1/2)")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitPrecondition;
  }

  try {
    if (*build) return cmd_build(cfg);
    if (*distances) return cmd_distances(cfg);
    if (*hitting) return cmd_hitting(cfg);
    if (*spectral) return cmd_spectral(cfg);
    if (*ld_psi) return cmd_ld_psi(cfg);
    if (*ld_check) return cmd_ld_check(cfg);
    if (*verify) return cmd_verify(cfg);
    if (*sweep) return cmd_sweep(cfg);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
