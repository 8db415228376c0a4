#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mixlab/analysis.hpp"
#include "mixlab/chain.hpp"
#include "mixlab/distance.hpp"
#include "mixlab/graph.hpp"
#include "mixlab/hitting.hpp"
#include "mixlab/spectral.hpp"

namespace mixlab {

// %.17g: enough digits to round-trip any double.
std::string format_double(double v);

// Writes to a sibling temporary file and renames it over the target.
void write_atomic(const std::filesystem::path& path, const std::string& content);

// Header `t,value,metric,chain_id`.
std::string curve_csv(const DistanceCurve& curve);
// {metric, horizon, tolerance, restricted, chain_id, samples: [[t, value], ...]}
std::string curve_json(const DistanceCurve& curve);

// Header `t,pmf,survival`.
std::string hitting_csv(const HittingDistribution& h);
std::string hitting_json(const HittingDistribution& h);

// One `u v weight` line per edge, u < v. Graphs carry unit weights; chains
// carry the edge conductance π(u)P(u,v).
std::string edge_list(const GraphSpec& g);
std::string edge_list(const ChainSpec& chain);

std::string roles_json(const RoleMap& roles, const std::vector<std::string>& labels);
std::string kernel_summary_json(const ChainSpec& chain, const std::string& id,
                                const std::map<std::string, double>& params);

std::string spectral_json(const SpectralSummary& summary, const std::optional<CheegerEstimate>& cheeger,
                          const std::vector<std::string>& labels);

std::string checks_json(const std::vector<CheckResult>& results);
std::string suite_report_json(const SuiteReport& report);

std::string cutoff_report_json(const CutoffReport& report);
// Header `n,eps,t_eps,t_complement,ratio,window`.
std::string cutoff_ratio_csv(const CutoffReport& report);

}  // namespace mixlab
