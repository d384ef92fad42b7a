#include "lbbn/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "lbbn/bench.hpp"
#include "lbbn/elicitation.hpp"
#include "lbbn/errors.hpp"
#include "lbbn/inference.hpp"
#include "lbbn/io.hpp"
#include "lbbn/oracle.hpp"
#include "lbbn/transform.hpp"

namespace lbbn::cli {

namespace {

using io::Json;

bool is_lower(const io::AnyNetwork& net) { return std::holds_alternative<LowerBoundNetwork>(net); }

Json labelled(const std::vector<std::string>& labels, const std::vector<double>& values) {
  Json obj = Json::object();
  for (std::size_t k = 0; k < labels.size(); ++k) obj[labels[k]] = io::round_sig(values[k]);
  return obj;
}

double oracle_cap(double flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("LBBN_ORACLE_CAP")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0)) throw InvalidArgument("LBBN_ORACLE_CAP must be a positive number");
    return v;
  }
  return kDefaultOracleCap;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot write " + path);
  f << text;
}

std::vector<std::uint64_t> parse_counts(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      if (item.empty() || item[0] == '-') throw std::invalid_argument("negative");
      v = std::stoull(item, &used);
    } catch (const std::exception&) {
      throw InvalidArgument("counts must be nonnegative integers, got '" + item + "'");
    }
    if (used != item.size()) throw InvalidArgument("counts must be nonnegative integers, got '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw InvalidArgument("no counts given");
  return out;
}

struct Flags {
  std::string net, query, evidence, format = "json";
  bool explain = false, unsafe = false;
  double cap = 0;
  // bench
  std::size_t nodes = 8, states = 2, instances = 100, vertices = 3, max_parents = 0;
  double density = -1;
  std::string structure = "multi", queries = "all-nodes", out, csv;
  std::uint64_t seed = 0;
  bool with_evidence = false, timings = false;
  // idm
  std::string counts, d = std::to_string(kDefaultIdmHyperparameter), batch;
};

int cmd_validate(const Flags& f, std::ostream& out, std::ostream& err) {
  const auto net = io::load_network(f.net);
  const auto report = std::visit([](const auto& n) { return validate(n); }, net);
  Json violations = Json::array();
  for (const auto& v : report.violations) {
    Json j = {{"node", v.node}, {"message", v.message}};
    j["row"] = v.row ? Json(*v.row) : Json(nullptr);
    violations.push_back(std::move(j));
  }
  out << Json{{"valid", report.ok()}, {"kind", is_lower(net) ? "lower" : "standard"}, {"violations", violations}}
             .dump(2)
      << "\n";
  if (report.ok()) return kOk;
  err << Json{{"error", "validation"}, {"message", report.to_string()}}.dump() << "\n";
  return kDomainError;
}

int cmd_transform(const Flags& f, std::ostream& out) {
  const auto net = io::load_network(f.net);
  if (!is_lower(net)) throw InvalidArgument("transform needs a network of kind \"lower\"");
  const auto artifact = to_lbbn(std::get<LowerBoundNetwork>(net));
  Json doc = io::to_json(artifact.network);
  if (f.explain) doc["provenance"] = io::provenance_json(artifact);
  out << doc.dump(2) << "\n";
  return kOk;
}

int cmd_infer(const Flags& f, std::ostream& out) {
  const auto net = io::load_network(f.net);
  const auto evidence = io::parse_evidence(f.evidence);
  std::vector<std::string> labels;
  std::vector<double> lower, upper;
  double ignorance = 0.0;
  bool guaranteed = true;
  if (is_lower(net)) {
    const auto b = lbbn_bounds(std::get<LowerBoundNetwork>(net), f.query, evidence, {f.unsafe});
    labels = b.labels;
    lower = b.lower;
    upper = b.induced_upper;
    ignorance = b.ignorance;
    guaranteed = b.guaranteed;
  } else {
    const auto& std_net = std::get<StandardNetwork>(net);
    // Plain elimination is exact; the interval degenerates to a point.
    require_valid(std_net);
    const auto d = eliminate(std_net, f.query, evidence);
    labels = d.labels;
    lower = d.p;
    upper = d.p;
  }
  const char* guarantee = guaranteed ? "outer-approximation" : "none";

  if (f.format == "csv") {
    std::ostringstream os;
    os.precision(io::kOutputDigits);
    os << "state,lower,upper,ignorance,guarantee\n";
    for (std::size_t k = 0; k < labels.size(); ++k)
      os << labels[k] << ',' << io::round_sig(lower[k]) << ',' << io::round_sig(upper[k]) << ','
         << io::round_sig(ignorance) << ',' << guarantee << '\n';
    out << os.str();
    return kOk;
  }
  Json doc = {{"query", f.query},
              {"kind", is_lower(net) ? "lower" : "standard"},
              {"evidence", evidence},
              {"guarantee", guarantee},
              {"states", labels},
              {"lower", labelled(labels, lower)},
              {"upper", labelled(labels, upper)},
              {"ignorance", io::round_sig(ignorance)}};
  if (!guaranteed) doc["warning"] = "no outer-approximation guarantee";
  out << doc.dump(2) << "\n";
  return kOk;
}

int cmd_oracle(const Flags& f, std::ostream& out) {
  const auto net = io::load_network(f.net);
  if (!is_lower(net)) throw InvalidArgument("oracle needs a network of kind \"lower\"");
  const auto evidence = io::parse_evidence(f.evidence);
  const auto b = exact_bounds(std::get<LowerBoundNetwork>(net), f.query, evidence, {oracle_cap(f.cap)});
  Json rows = Json::array();
  for (const auto& r : b.rows) rows.push_back({{"node", r.node}, {"row", r.row}, {"vertices", r.vertices}});
  Json argmin = Json::object(), argmax = Json::object();
  for (std::size_t k = 0; k < b.labels.size(); ++k) {
    argmin[b.labels[k]] = b.argmin[k];
    argmax[b.labels[k]] = b.argmax[k];
  }
  out << Json{{"query", f.query},
              {"evidence", evidence},
              {"states", b.labels},
              {"exact_lower", labelled(b.labels, b.exact_lower)},
              {"exact_upper", labelled(b.labels, b.exact_upper)},
              {"combinations", io::round_sig(b.combinations)},
              {"rows", rows},
              {"argmin_vertices", argmin},
              {"argmax_vertices", argmax}}
             .dump(2)
      << "\n";
  return kOk;
}

int cmd_bench(const Flags& f, std::ostream& out) {
  bench::GenConfig cfg;
  cfg.node_count = f.nodes;
  cfg.states_per_node = f.states;
  if (f.density >= 0) cfg.edge_density = f.density;
  cfg.structure = bench::parse_structure(f.structure);
  cfg.vertex_count_for_lb = f.vertices;
  if (f.max_parents > 0) cfg.max_parents = f.max_parents;
  cfg.seed = f.seed;
  bench::ExperimentOptions opts;
  opts.instances = f.instances;
  opts.policy = bench::parse_query_policy(f.queries);
  opts.with_evidence = f.with_evidence;
  opts.oracle_cap = oracle_cap(f.cap);

  const auto report = bench::run_experiment(cfg, opts);
  const auto json = bench::report_json(report, f.timings);
  if (f.out.empty())
    out << json;
  else
    write_text(f.out, json);
  if (!f.csv.empty()) write_text(f.csv, bench::report_csv(report));
  return kOk;
}

int cmd_idm(const Flags& f, std::ostream& out) {
  const Rational d = parse_rational(f.d);
  auto bounds_of = [&](const std::string& counts) { return idm_bounds({parse_counts(counts), d}); };
  if (!f.batch.empty()) {
    std::ifstream in(f.batch);
    if (!in) throw FormatError("cannot open " + f.batch);
    Json rows = Json::array(), uppers = Json::array(), ign = Json::array();
    std::string line;
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      line.erase(line.find_last_not_of(" \t\r") + 1);
      const auto b = bounds_of(line);
      Json r = Json::array(), u = Json::array();
      for (double v : b.lower_values()) r.push_back(io::round_sig(v));
      for (double v : b.upper_values()) u.push_back(io::round_sig(v));
      rows.push_back(std::move(r));
      uppers.push_back(std::move(u));
      ign.push_back(io::round_sig(b.ignorance_value()));
    }
    out << Json{{"d", f.d}, {"rows", rows}, {"upper", uppers}, {"ignorance", ign}}.dump(2) << "\n";
    return kOk;
  }
  if (f.counts.empty()) throw InvalidArgument("idm needs --counts or --batch");
  const auto b = bounds_of(f.counts);
  Json lower = Json::array(), upper = Json::array();
  for (double v : b.lower_values()) lower.push_back(io::round_sig(v));
  for (double v : b.upper_values()) upper.push_back(io::round_sig(v));
  out << Json{{"lower", lower}, {"upper", upper}, {"ignorance", io::round_sig(b.ignorance_value())}}.dump(2) << "\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lower-bound propagation in Bayesian networks", "lbbn"};
  app.require_subcommand(1);
  Flags f;

  auto* validate_cmd = app.add_subcommand("validate", "Check a network file");
  validate_cmd->add_option("--net", f.net, "Network JSON file")->required();

  auto* transform_cmd = app.add_subcommand("transform", "Emit the transformed network with the N state");
  transform_cmd->add_option("--net", f.net, "Lower-bound network JSON file")->required();
  transform_cmd->add_flag("--explain", f.explain, "Attach per-cell provenance");

  auto* infer_cmd = app.add_subcommand("infer", "Lower and induced upper bounds for one query");
  infer_cmd->add_option("--net", f.net, "Network JSON file")->required();
  infer_cmd->add_option("--query", f.query, "Query node id")->required();
  infer_cmd->add_option("--evidence", f.evidence, "Observations NODE=STATE[,NODE=STATE...]");
  infer_cmd->add_option("--format", f.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  infer_cmd->add_flag("--unsafe-any-query", f.unsafe, "Answer non-prognostic queries without a guarantee");

  auto* oracle_cmd = app.add_subcommand("oracle", "Exact bounds by credal vertex enumeration");
  oracle_cmd->add_option("--net", f.net, "Lower-bound network JSON file")->required();
  oracle_cmd->add_option("--query", f.query, "Query node id")->required();
  oracle_cmd->add_option("--evidence", f.evidence, "Observations NODE=STATE[,NODE=STATE...]");
  oracle_cmd->add_option("--cap", f.cap, "Maximum vertex combinations (default $LBBN_ORACLE_CAP or 1e7)");

  auto* bench_cmd = app.add_subcommand("bench", "Random-network accuracy experiment");
  bench_cmd->add_option("--nodes", f.nodes, "Nodes per network")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--states", f.states, "States per node")->check(CLI::Range(2, 64));
  bench_cmd->add_option("--density", f.density, "Edges per node (edges = round(density * nodes))")
      ->check(CLI::NonNegativeNumber);
  bench_cmd->add_option("--structure", f.structure, "tree | polytree | multi")
      ->check(CLI::IsMember({"tree", "polytree", "multi"}));
  bench_cmd->add_option("--instances", f.instances, "Number of random instances");
  bench_cmd->add_option("--seed", f.seed, "Base seed");
  bench_cmd->add_option("--vertices", f.vertices, "Simplex samples per CPT row")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--max-parents", f.max_parents, "Parent limit per node (0 = none)");
  bench_cmd->add_option("--queries", f.queries, "all-nodes | sinks-only")
      ->check(CLI::IsMember({"all-nodes", "sinks-only"}));
  bench_cmd->add_flag("--with-evidence", f.with_evidence, "Condition each query on random prognostic evidence");
  bench_cmd->add_option("--cap", f.cap, "Maximum oracle vertex combinations");
  bench_cmd->add_option("--out", f.out, "Write the JSON report here instead of stdout");
  bench_cmd->add_option("--csv", f.csv, "Also write a flat per-state CSV table here");
  bench_cmd->add_flag("--timings", f.timings, "Include wall-clock timings (breaks byte-identical replay)");

  auto* idm_cmd = app.add_subcommand("idm", "Bounds from expert statement counts");
  idm_cmd->add_option("--counts", f.counts, "Comma-separated counts, e.g. 6,2");
  idm_cmd->add_option("--d", f.d, "Hyperparameter d > 0 (decimal or p/q)");
  idm_cmd->add_option("--batch", f.batch, "File with one comma-separated count list per line");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return kUsageError;
  }

  try {
    if (validate_cmd->parsed()) return cmd_validate(f, out, err);
    if (transform_cmd->parsed()) return cmd_transform(f, out);
    if (infer_cmd->parsed()) return cmd_infer(f, out);
    if (oracle_cmd->parsed()) return cmd_oracle(f, out);
    if (bench_cmd->parsed()) return cmd_bench(f, out);
    if (idm_cmd->parsed()) return cmd_idm(f, out);
  } catch (const Error& e) {
    err << Json{{"error", e.kind()}, {"message", e.what()}}.dump() << "\n";
    return kDomainError;
  }
  return kUsageError;
}

}  // namespace lbbn::cli
