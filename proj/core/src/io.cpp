#include "mixlab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "mixlab/error.hpp"

namespace mixlab {

namespace {

using nlohmann::json;

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json check_to_json(const CheckResult& c) {
  json params = json::object();
  for (const auto& [k, v] : c.params) params[k] = v;
  json j{{"check_id", c.check_id}, {"params", params}, {"slack", c.slack}, {"pass", c.pass}};
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

json labels_of(const std::vector<std::size_t>& set, const std::vector<std::string>& labels) {
  json out = json::array();
  for (auto v : set) out.push_back(v < labels.size() ? labels[v] : std::to_string(v));
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw InvalidArgument("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw InvalidArgument("cannot move " + tmp.string() + " into place: " + ec.message());
}

std::string curve_csv(const DistanceCurve& curve) {
  std::ostringstream os;
  os << "t,value,metric,chain_id\n";
  const auto name = curve.metric.name();
  for (std::size_t t = 0; t < curve.values.size(); ++t) {
    os << t << ',' << format_double(curve.values[t]) << ',' << name << ',' << curve.chain_id << '\n';
  }
  return os.str();
}

std::string curve_json(const DistanceCurve& curve) {
  json samples = json::array();
  for (std::size_t t = 0; t < curve.values.size(); ++t) samples.push_back(json::array({t, curve.values[t]}));
  return dump({{"metric", curve.metric.name()},
               {"horizon", curve.horizon},
               {"tolerance", curve.tolerance},
               {"restricted", curve.restricted},
               {"chain_id", curve.chain_id},
               {"samples", samples}});
}

std::string hitting_csv(const HittingDistribution& h) {
  std::ostringstream os;
  os << "t,pmf,survival\n";
  const auto s = h.survival_curve();
  for (std::size_t t = 0; t < h.pmf.size(); ++t) {
    os << t << ',' << format_double(h.pmf[t]) << ',' << format_double(s[t]) << '\n';
  }
  return os.str();
}

std::string hitting_json(const HittingDistribution& h) {
  return dump({{"source", h.source},
               {"target", h.target},
               {"horizon", h.horizon},
               {"residual", h.residual},
               {"pmf", h.pmf}});
}

std::string edge_list(const GraphSpec& g) {
  std::ostringstream os;
  for (const auto& [u, v] : g.edges()) os << u << ' ' << v << " 1\n";
  return os.str();
}

std::string edge_list(const ChainSpec& chain) {
  std::ostringstream os;
  const auto& k = chain.kernel();
  for (Eigen::Index x = 0; x < k.outerSize(); ++x) {
    for (SparseKernel::InnerIterator it(k, x); it; ++it) {
      if (it.col() > x && it.value() > 0.0) {
        os << x << ' ' << it.col() << ' ' << format_double(chain.stationary()[x] * it.value()) << '\n';
      }
    }
  }
  return os.str();
}

std::string roles_json(const RoleMap& roles, const std::vector<std::string>& labels) {
  json j = json::object();
  for (const auto& [name, members] : roles) {
    j[name] = {{"indices", members}, {"labels", labels_of(members, labels)}};
  }
  return dump(j);
}

std::string kernel_summary_json(const ChainSpec& chain, const std::string& id,
                                const std::map<std::string, double>& params) {
  const auto& k = chain.kernel();
  const Vector& pi = chain.stationary();
  double row_dev = 0.0, balance = 0.0;
  for (Eigen::Index x = 0; x < k.outerSize(); ++x) {
    double sum = 0.0;
    for (SparseKernel::InnerIterator it(k, x); it; ++it) {
      sum += it.value();
      balance = std::max(balance, std::abs(pi[x] * it.value() - pi[it.col()] * k.coeff(it.col(), x)));
    }
    row_dev = std::max(row_dev, std::abs(sum - 1.0));
  }
  json p = json::object();
  for (const auto& [key, v] : params) p[key] = v;
  return dump({{"id", id},
               {"params", p},
               {"states", chain.size()},
               {"nonzeros", k.nonZeros()},
               {"max_row_sum_deviation", row_dev},
               {"max_detailed_balance_residual", balance},
               {"laziness_floor", chain.laziness_floor()},
               {"lazy", chain.is_lazy()},
               {"pi_min", pi.minCoeff()},
               {"pi_max", pi.maxCoeff()}});
}

std::string spectral_json(const SpectralSummary& summary, const std::optional<CheegerEstimate>& cheeger,
                          const std::vector<std::string>& labels) {
  json j{{"eigenvalues", summary.eigenvalues},
         {"lambda2", summary.lambda2},
         {"lambda_min", summary.lambda_min},
         {"absolute_gap", summary.absolute_gap()},
         {"max_residual", summary.max_residual}};
  j["t_rel"] = summary.t_rel ? json(*summary.t_rel) : json(nullptr);
  if (cheeger) {
    json c{{"lower", cheeger->lower}, {"upper", cheeger->upper}, {"witness_set", labels_of(cheeger->witness_set, labels)}};
    c["exact"] = cheeger->exact ? json(*cheeger->exact) : json(nullptr);
    j["cheeger"] = c;
  }
  return dump(j);
}

std::string checks_json(const std::vector<CheckResult>& results) {
  json arr = json::array();
  for (const auto& c : results) arr.push_back(check_to_json(c));
  return dump(arr);
}

std::string suite_report_json(const SuiteReport& report) {
  json checks = json::array();
  for (const auto& c : report.results) checks.push_back(check_to_json(c));
  json summary = json::array();
  for (const auto& s : report.summary) {
    summary.push_back({{"check_id", s.check_id}, {"count", s.count}, {"failures", s.failures},
                       {"worst_slack", s.worst_slack}});
  }
  return dump({{"pass", report.all_pass()}, {"summary", summary}, {"checks", checks}});
}

std::string cutoff_report_json(const CutoffReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"n", r.n},
                    {"states", r.states},
                    {"t_eps", r.t_eps},
                    {"t_complement", r.t_complement},
                    {"ratio", r.ratio},
                    {"window", r.window}});
  }
  return dump({{"metric", report.metric.name()},
               {"n_grid", report.n_grid},
               {"eps_grid", report.eps_grid},
               {"rows", rows},
               {"precutoff_ratio", report.rows.empty() ? 0.0 : precutoff_ratio(report)},
               {"verdict", verdict_name(report.verdict)},
               {"rule", report.rule}});
}

std::string cutoff_ratio_csv(const CutoffReport& report) {
  std::ostringstream os;
  os << "n,eps,t_eps,t_complement,ratio,window\n";
  for (const auto& r : report.rows) {
    for (std::size_t e = 0; e < report.eps_grid.size(); ++e) {
      os << r.n << ',' << format_double(report.eps_grid[e]) << ',' << r.t_eps[e] << ',' << r.t_complement[e] << ','
         << format_double(r.ratio[e]) << ',' << format_double(r.window[e]) << '\n';
    }
  }
  return os.str();
}

}  // namespace mixlab
