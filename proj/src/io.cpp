#include <cctype>
#include "lbbn/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "lbbn/errors.hpp"

namespace lbbn::io {

double round_sig(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return std::strtod(buf, nullptr);
}

namespace {

const Json& field(const Json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(where + ": missing field '" + key + "'");
  return *it;
}

std::vector<std::string> string_list(const Json& arr, const std::string& where) {
  if (!arr.is_array()) throw FormatError(where + ": expected an array of strings");
  std::vector<std::string> out;
  for (const auto& v : arr) {
    if (!v.is_string()) throw FormatError(where + ": expected an array of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

Cpt parse_cpt(const Json& obj, const std::string& where) {
  if (!obj.is_object()) throw FormatError(where + ": CPT must be an object");
  const auto& rows = field(obj, "rows", where);
  if (!rows.is_array()) throw FormatError(where + ": 'rows' must be an array");
  Cpt cpt;
  for (const auto& row : rows) {
    if (!row.is_array()) throw FormatError(where + ": each row must be an array");
    std::vector<double> r;
    for (const auto& v : row) {
      if (!v.is_number()) throw FormatError(where + ": CPT entries must be numbers");
      r.push_back(v.get<double>());
    }
    cpt.rows.push_back(std::move(r));
  }
  return cpt;
}

Json network_json(const Network& net, const char* kind) {
  Json doc;
  doc["kind"] = kind;
  Json nodes = Json::array();
  Json cpts = Json::object();
  for (std::size_t i = 0; i < net.size(); ++i) {
    const auto& n = net.node(i);
    nodes.push_back({{"id", n.id}, {"states", n.states.labels()}, {"parents", n.parents}});
    Json rows = Json::array();
    for (const auto& row : net.cpt(i).rows) {
      Json r = Json::array();
      for (double v : row) r.push_back(round_sig(v));
      rows.push_back(std::move(r));
    }
    cpts[n.id] = {{"rows", std::move(rows)}};
  }
  doc["nodes"] = std::move(nodes);
  doc["cpts"] = std::move(cpts);
  return doc;
}

}  // namespace

AnyNetwork parse_network(const Json& doc) {
  if (!doc.is_object()) throw FormatError("network document must be a JSON object");
  std::string kind = "lower";
  if (auto it = doc.find("kind"); it != doc.end()) {
    if (!it->is_string()) throw FormatError("'kind' must be a string");
    kind = it->get<std::string>();
  }
  if (kind != "lower" && kind != "standard") throw FormatError("unknown network kind '" + kind + "'");

  const auto& nodes_json = field(doc, "nodes", "network");
  if (!nodes_json.is_array()) throw FormatError("'nodes' must be an array");
  const auto& cpts_json = field(doc, "cpts", "network");
  if (!cpts_json.is_object()) throw FormatError("'cpts' must be an object");

  std::vector<NodeSpec> nodes;
  std::vector<Cpt> cpts;
  for (const auto& nj : nodes_json) {
    if (!nj.is_object()) throw FormatError("each node must be an object");
    const auto& idj = field(nj, "id", "node");
    if (!idj.is_string()) throw FormatError("node id must be a string");
    NodeSpec spec;
    spec.id = idj.get<std::string>();
    const std::string where = "node " + spec.id;
    spec.states = StateSpace(string_list(field(nj, "states", where), where + " states"));
    if (auto it = nj.find("parents"); it != nj.end()) spec.parents = string_list(*it, where + " parents");
    auto cj = cpts_json.find(spec.id);
    cpts.push_back(cj == cpts_json.end() ? Cpt{} : parse_cpt(*cj, where + " CPT"));
    nodes.push_back(std::move(spec));
  }
  for (const auto& [id, value] : cpts_json.items()) {
    bool known = false;
    for (const auto& n : nodes) known = known || n.id == id;
    if (!known) throw FormatError("CPT given for unknown node '" + id + "'");
  }

  if (kind == "standard") return StandardNetwork(std::move(nodes), std::move(cpts));
  return renormalize_rows(LowerBoundNetwork(std::move(nodes), std::move(cpts)));
}

AnyNetwork parse_network_text(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw FormatError(std::string("invalid JSON: ") + e.what());
  }
  return parse_network(doc);
}

AnyNetwork load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open network file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_network_text(ss.str());
}

Json to_json(const LowerBoundNetwork& net) { return network_json(net, "lower"); }
Json to_json(const StandardNetwork& net) { return network_json(net, "standard"); }

Json provenance_json(const LbbnArtifact& artifact) {
  Json out = Json::object();
  const auto& net = artifact.network;
  for (std::size_t i = 0; i < net.size(); ++i) {
    Json rows = Json::array();
    for (const auto& row : artifact.provenance[i]) {
      Json r = Json::array();
      for (const auto& cell : row) {
        Json c = {{"rule", to_string(cell.rule)}};
        if (cell.source_row) c["source_row"] = *cell.source_row;
        r.push_back(std::move(c));
      }
      rows.push_back(std::move(r));
    }
    out[net.node(i).id] = {{"rows", std::move(rows)}};
  }
  return out;
}

Evidence parse_evidence(std::string_view text) {
  Evidence ev;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    auto item = text.substr(pos, comma - pos);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.front()))) item.remove_prefix(1);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.back()))) item.remove_suffix(1);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 == item.size())
      throw FormatError("evidence item '" + std::string(item) + "' is not NODE=STATE");
    const std::string node(item.substr(0, eq));
    if (!ev.emplace(node, std::string(item.substr(eq + 1))).second)
      throw FormatError("evidence on " + node + " given twice");
    pos = comma + 1;
  }
  return ev;
}

}  // namespace lbbn::io
