#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "lbbn/cli.hpp"
#include "lbbn/errors.hpp"
#include "lbbn/io.hpp"
#include "support.hpp"

using namespace lbbn;
using lbbn::testing::data_path;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("lbbn_test_" + name);
}

}  // namespace

TEST_CASE("round_sig") {
  CHECK(io::round_sig(0.1 + 0.2) == 0.3);
  CHECK(io::round_sig(0.7519999999999999) == 0.752);
  CHECK(io::round_sig(0.0) == 0.0);
}

TEST_CASE("network files round trip") {
  const auto any = io::load_network(data_path("example.json"));
  REQUIRE(std::holds_alternative<LowerBoundNetwork>(any));
  const auto& net = std::get<LowerBoundNetwork>(any);
  CHECK(net.size() == 6);
  const auto text = io::to_json(net).dump();
  const auto again = io::parse_network_text(text);
  CHECK(std::get<LowerBoundNetwork>(again) == net);
  CHECK(io::to_json(std::get<LowerBoundNetwork>(again)).dump() == text);

  const auto lb = std::get<LowerBoundNetwork>(any);
  const auto std_text = io::to_json(to_lbbn(lb).network).dump();
  const auto std_back = io::parse_network_text(std_text);
  REQUIRE(std::holds_alternative<StandardNetwork>(std_back));
  CHECK(io::to_json(std::get<StandardNetwork>(std_back)).dump() == std_text);
}

TEST_CASE("malformed documents") {
  CHECK_THROWS_AS(io::parse_network_text("{"), FormatError);
  CHECK_THROWS_AS(io::parse_network_text(R"({"nodes": 3})"), FormatError);
  CHECK_THROWS_AS(io::parse_network_text(R"({"kind": "odd", "nodes": [], "cpts": {}})"), FormatError);
  CHECK_THROWS_AS(
      io::parse_network_text(R"({"nodes": [{"id": "A", "states": ["a"], "parents": []}], "cpts": {"B": {"rows": [[1]]}}})"),
      FormatError);
  CHECK_THROWS_AS(io::load_network(data_path("does_not_exist.json")), FormatError);
}

TEST_CASE("missing cpts are reported by validation, not by the parser") {
  const auto any = io::parse_network_text(R"({"nodes": [{"id": "A", "states": ["a1", "a2"], "parents": []}], "cpts": {}})");
  CHECK_FALSE(validate(std::get<LowerBoundNetwork>(any)).ok());
}

TEST_CASE("evidence syntax") {
  CHECK(io::parse_evidence("") == Evidence{});
  CHECK(io::parse_evidence("A=a1, B=b2") == Evidence{{"A", "a1"}, {"B", "b2"}});
  CHECK_THROWS_AS(io::parse_evidence("A"), FormatError);
  CHECK_THROWS_AS(io::parse_evidence("A=a1,A=a2"), FormatError);
}

TEST_CASE("cli infer on the example network") {
  const auto r = run({"infer", "--net", data_path("example.json"), "--query", "G"});
  CHECK(r.code == 0);
  const auto doc = io::Json::parse(r.out);
  CHECK(doc["lower"]["g1"].get<double>() == 0.752);
  CHECK(doc["guarantee"] == "outer-approximation");
  CHECK(r.out.find("\"g1\": 0.752") != std::string::npos);

  const auto csv = run({"infer", "--net", data_path("example.json"), "--query", "G", "--format", "csv"});
  CHECK(csv.code == 0);
  CHECK(csv.out.find("g1,0.752") != std::string::npos);
}

TEST_CASE("cli infer refuses non-prognostic queries unless told otherwise") {
  const auto net = data_path("example.json");
  const auto r = run({"infer", "--net", net, "--query", "E", "--evidence", "G=g1"});
  CHECK(r.code == 1);
  CHECK(r.err.find("non-prognostic") != std::string::npos);
  const auto u = run({"infer", "--net", net, "--query", "E", "--evidence", "G=g1", "--unsafe-any-query"});
  CHECK(u.code == 0);
  CHECK(u.out.find("\"guarantee\": \"none\"") != std::string::npos);
  CHECK(u.out.find("warning") != std::string::npos);
  const auto unknown = run({"infer", "--net", net, "--query", "Q"});
  CHECK(unknown.code == 1);
  CHECK(unknown.err.find("unknown-node") != std::string::npos);
}

TEST_CASE("cli validate") {
  const auto ok = run({"validate", "--net", data_path("example.json")});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("\"valid\": true") != std::string::npos);
  const auto bad = run({"validate", "--net", data_path("cyclic.json")});
  CHECK(bad.code == 1);
  CHECK(bad.out.find("\"valid\": false") != std::string::npos);
  CHECK(bad.out.find("cycle") != std::string::npos);
  CHECK(bad.out.find("A") != std::string::npos);
  CHECK(bad.err.find("\"error\":\"validation\"") != std::string::npos);
}

TEST_CASE("cli usage errors") {
  CHECK(run({}).code == 2);
  CHECK(run({"infer", "--net", "x.json"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"infer", "--net", "x.json", "--query", "G", "--format", "xml"}).code == 2);
}

TEST_CASE("cli transform with provenance") {
  const auto r = run({"transform", "--net", data_path("example.json"), "--explain"});
  CHECK(r.code == 0);
  const auto doc = io::Json::parse(r.out);
  CHECK(doc["kind"] == "standard");
  CHECK(doc["provenance"]["F"]["rows"][2][0]["rule"] == "min-over-N-parents");
  CHECK(doc["provenance"]["F"]["rows"][0][2]["rule"] == "free-mass");
  CHECK(doc["provenance"]["F"]["rows"][1][1]["rule"] == "direct-copy");
  const auto cpt = doc["cpts"]["F"]["rows"][2];
  CHECK(cpt[0].get<double>() == 0.3);
  CHECK(cpt[1].get<double>() == 0.5);
  CHECK(cpt[2].get<double>() == 0.2);
}

TEST_CASE("cli oracle and cap precedence") {
  const auto net = data_path("example.json");
  const auto r = run({"oracle", "--net", net, "--query", "G"});
  CHECK(r.code == 0);
  const auto doc = io::Json::parse(r.out);
  CHECK(doc["exact_lower"]["g1"].get<double>() == 0.752);
  CHECK(doc["combinations"].get<double>() == 8);

  const auto capped = run({"oracle", "--net", net, "--query", "G", "--cap", "4"});
  CHECK(capped.code == 1);
  CHECK(capped.err.find("oracle-infeasible") != std::string::npos);

  ::setenv("LBBN_ORACLE_CAP", "4", 1);
  CHECK(run({"oracle", "--net", net, "--query", "G"}).code == 1);
  CHECK(run({"oracle", "--net", net, "--query", "G", "--cap", "100"}).code == 0);
  ::unsetenv("LBBN_ORACLE_CAP");
}

TEST_CASE("cli idm") {
  const auto r = run({"idm", "--counts", "6,2"});
  CHECK(r.code == 0);
  const auto doc = io::Json::parse(r.out);
  CHECK(doc["lower"][0].get<double>() == 0.6);
  CHECK(doc["upper"][1].get<double>() == 0.4);
  CHECK(run({"idm", "--counts", "6,2", "--d", "0"}).code == 1);
  CHECK(run({"idm", "--counts", "6,x"}).code == 1);

  const auto batch = temp_file("idm.txt");
  {
    std::ofstream f(batch);
    f << "6,2\n\n3,3,4\n";
  }
  const auto b = run({"idm", "--batch", batch.string(), "--d", "2"});
  CHECK(b.code == 0);
  const auto bd = io::Json::parse(b.out);
  CHECK(bd["rows"].size() == 2);
  CHECK(bd["rows"][1][2].get<double>() == doctest::Approx(1.0 / 3.0));
  std::filesystem::remove(batch);
}

TEST_CASE("cli bench replays and exports csv") {
  const std::vector<std::string> args = {"bench", "--nodes", "5", "--instances", "3", "--seed", "11"};
  const auto a = run(args);
  const auto b = run(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("timings_ms") == std::string::npos);

  const auto out = temp_file("bench.json"), csv = temp_file("bench.csv");
  auto with_files = args;
  with_files.insert(with_files.end(), {"--out", out.string(), "--csv", csv.string()});
  CHECK(run(with_files).code == 0);
  std::ifstream jf(out), cf(csv);
  std::stringstream js, cs;
  js << jf.rdbuf();
  cs << cf.rdbuf();
  CHECK(js.str() == a.out);
  CHECK(cs.str().rfind("instance,node,state", 0) == 0);
  std::filesystem::remove(out);
  std::filesystem::remove(csv);

  const auto timed = run({"bench", "--nodes", "4", "--instances", "1", "--timings"});
  CHECK(timed.out.find("timings_ms") != std::string::npos);
  CHECK(run({"bench", "--structure", "tree", "--density", "2"}).code == 1);
}
