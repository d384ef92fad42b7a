#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "lbbn/inference.hpp"
#include "lbbn/model.hpp"
#include "lbbn/oracle.hpp"

namespace lbbn::bench {

// Fixed, fully specified engine so reports replay across platforms.
using Rng = std::mt19937_64;
inline constexpr const char* kRngName = "mt19937_64";

// Uniform in [0, 1) from the top 53 bits of one draw.
double uniform01(Rng& rng);
// Uniform in [0, n) by rejection.
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);
// Uniform point of the (s-1)-simplex via normalized exponentials.
std::vector<double> sample_simplex(Rng& rng, std::size_t s);
// Componentwise minimum of the given distributions.
std::vector<double> componentwise_min(const std::vector<std::vector<double>>& points);

enum class Structure { kTree, kPolytree, kMulti };
const char* to_string(Structure s) noexcept;
Structure parse_structure(const std::string& text);

struct GenConfig {
  std::size_t node_count = 8;
  std::size_t states_per_node = 2;
  // Edges = round(density * nodes). Unset: n - 1 edges for trees and
  // polytrees, density 1.2 for multi-connected nets.
  std::optional<double> edge_density;
  Structure structure = Structure::kMulti;
  std::size_t vertex_count_for_lb = 3;
  std::optional<std::size_t> max_parents;
  std::uint64_t seed = 0;

  std::size_t edge_count() const;
};

// Throws InvalidArgument for inconsistent configurations.
void check_config(const GenConfig& cfg);

LowerBoundNetwork gen_network(const GenConfig& cfg);

// Random ancestor-closed set of ancestors of the query with random states.
Evidence sample_prognostic_evidence(const Network& net, std::string_view query, Rng& rng);

// Root of the mean squared deviation over every state of every node, with
// Q = 2 * (number of node states). Throws InvalidArgument on shape mismatch.
double mse(const std::vector<BoundedMarginal>& approx, const std::vector<ExactBounds>& exact);

enum class QueryPolicy { kAllNodes, kSinksOnly };
const char* to_string(QueryPolicy p) noexcept;
QueryPolicy parse_query_policy(const std::string& text);

struct ExperimentOptions {
  std::size_t instances = 100;
  QueryPolicy policy = QueryPolicy::kAllNodes;
  bool with_evidence = false;
  double oracle_cap = kDefaultOracleCap;
};

struct NodeRecord {
  std::string node;
  Evidence evidence;
  std::vector<std::string> labels;
  std::vector<double> lbbn_lower, lbbn_upper, exact_lower, exact_upper;
};

struct InstanceRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  bool feasible = true;
  std::string infeasible_reason;
  double combinations = 0.0;  // largest oracle enumeration among the queries
  double mse = 0.0;
  double max_violation = 0.0;
  std::vector<NodeRecord> nodes;
  double lbbn_ms = 0.0;
  double oracle_ms = 0.0;
};

struct Aggregate {
  std::size_t instances = 0;
  std::size_t feasible = 0;
  std::size_t infeasible = 0;
  std::size_t positive_mse = 0;
  double mean_mse = 0.0;
  double max_mse = 0.0;
  double max_violation = 0.0;
};

struct ExperimentReport {
  GenConfig config;
  ExperimentOptions options;
  std::vector<InstanceRecord> instances;
  Aggregate aggregate;
};

// Seed of instance i derived from the base seed.
std::uint64_t instance_seed(std::uint64_t base, std::size_t index);

ExperimentReport run_experiment(const GenConfig& cfg, const ExperimentOptions& options);

// Timings are wall-clock and break byte-for-byte replay; off by default.
std::string report_json(const ExperimentReport& report, bool include_timings = false);
std::string report_csv(const ExperimentReport& report);

}  // namespace lbbn::bench
