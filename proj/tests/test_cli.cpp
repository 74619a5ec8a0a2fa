#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "hypgrid/cli.hpp"
#include "hypgrid/grid.hpp"
#include "hypgrid/io.hpp"
#include "hypgrid/oracle.hpp"

using namespace hypgrid;
using Json = nlohmann::json;

namespace {

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult call_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("hypgrid");
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream captured_out;
  std::ostringstream captured_err;
  std::streambuf* old_out = std::cout.rdbuf(captured_out.rdbuf());
  std::streambuf* old_err = std::cerr.rdbuf(captured_err.rdbuf());
  CliResult r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  r.out = captured_out.str();
  r.err = captured_err.str();
  return r;
}

std::string write_temp(const std::string& name, const std::string& content) {
  std::ofstream out(name);
  out << content;
  return name;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("address text round-trips through format and parse") {
  Grid grid(GridParams{7, 1, 1});
  for (VertexId v : ball_vertices(grid, 4)) {
    const VertexAddress addr = grid.address_of(v);
    const std::string text = format_address(addr);
    CHECK(parse_address(text) == addr);
    CHECK(grid.vertex_at(parse_address(text)) == v);
  }
  CHECK(parse_address("").empty());
  CHECK(format_address({}) == "");
  CHECK_THROWS_WITH_AS(parse_address("0/x"), doctest::Contains("invalid-address"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_address("/"), doctest::Contains("invalid-address"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_address("0//1"), doctest::Contains("invalid-address"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_address("-1"), doctest::Contains("invalid-address"),
                       std::invalid_argument);
}

TEST_CASE("edge files round-trip and reject malformed lines") {
  const std::vector<std::pair<int, int>> edges = {{0, 1}, {2, 5}, {1, 4}};
  write_edge_file("cli_tmp_edges.txt", edges);
  CHECK(read_edge_file("cli_tmp_edges.txt") == edges);

  CHECK_THROWS_WITH_AS(read_edge_file("cli_tmp_missing.txt"), doctest::Contains("cannot open"),
                       std::runtime_error);
  write_temp("cli_tmp_bad1.txt", "1 2\n3\n");
  CHECK_THROWS_WITH_AS(read_edge_file("cli_tmp_bad1.txt"), doctest::Contains("bad edge line"),
                       std::invalid_argument);
  write_temp("cli_tmp_bad2.txt", "1 2 3\n");
  CHECK_THROWS_WITH_AS(read_edge_file("cli_tmp_bad2.txt"), doctest::Contains("bad edge line"),
                       std::invalid_argument);
  write_temp("cli_tmp_bad3.txt", "0 2\n");
  CHECK_THROWS_WITH_AS(read_edge_file("cli_tmp_bad3.txt"), doctest::Contains("bad edge line"),
                       std::invalid_argument);
  std::remove("cli_tmp_edges.txt");
  std::remove("cli_tmp_bad1.txt");
  std::remove("cli_tmp_bad2.txt");
  std::remove("cli_tmp_bad3.txt");
}

TEST_CASE("embedding files round-trip including the root line") {
  Grid grid(GridParams{7, 1, 0});
  const std::vector<VertexId> ball = ball_vertices(grid, 3);
  std::vector<VertexId> emb = {Grid::kRoot, ball[1], ball[10], ball[40], ball[84]};
  write_embedding_file("cli_tmp_emb.txt", grid, emb);
  CHECK(read_embedding_file("cli_tmp_emb.txt", grid) == emb);

  write_temp("cli_tmp_emb_bad1.txt", "1 0\n3 1 0\n");
  CHECK_THROWS_WITH_AS(read_embedding_file("cli_tmp_emb_bad1.txt", grid),
                       doctest::Contains("cover 1..n"), std::invalid_argument);
  write_temp("cli_tmp_emb_bad2.txt", "1 2 0\n");
  CHECK_THROWS_WITH_AS(read_embedding_file("cli_tmp_emb_bad2.txt", grid),
                       doctest::Contains("depth"), std::invalid_argument);
  write_temp("cli_tmp_emb_bad3.txt", "1 1 0\n1 1 1\n");
  CHECK_THROWS_WITH_AS(read_embedding_file("cli_tmp_emb_bad3.txt", grid),
                       doctest::Contains("cover 1..n"), std::invalid_argument);
  std::remove("cli_tmp_emb.txt");
  std::remove("cli_tmp_emb_bad1.txt");
  std::remove("cli_tmp_emb_bad2.txt");
  std::remove("cli_tmp_emb_bad3.txt");
}

TEST_CASE("grid info reports ring sizes and invariants") {
  const CliResult r = call_cli({"grid", "info", "--q", "7", "--a", "1", "--b", "0", "--radius", "3"});
  REQUIRE(r.code == 0);
  const Json out = Json::parse(r.out);
  CHECK(out["ring_sizes"] == Json::array({1, 7, 21, 56}));
  CHECK(out["d_bound"] == 2);
  CHECK(out["gamma"].get<double>() == doctest::Approx(2.6180339887).epsilon(1e-9));

  const CliResult r2 =
      call_cli({"grid", "info", "--q", "7", "--a", "1", "--b", "1", "--radius", "2"});
  REQUIRE(r2.code == 0);
  const Json out2 = Json::parse(r2.out);
  CHECK(out2["ring_sizes"] == Json::array({1, 7, 14}));
  CHECK(out2["d_bound"] == 3);
}

TEST_CASE("grid distance matches the ball reference distances") {
  Grid grid(GridParams{7, 1, 0});
  BallOracle oracle(grid, 4);
  const std::vector<VertexId>& verts = oracle.vertices();
  for (std::size_t i = 0; i < verts.size(); i += 37) {
    for (std::size_t j = i; j < verts.size(); j += 53) {
      const std::string a = format_address(grid.address_of(verts[i]));
      const std::string b = format_address(grid.address_of(verts[j]));
      const CliResult r = call_cli({"grid", "distance", "--q", "7", "--a", "1", "--b", "0", a, b});
      REQUIRE(r.code == 0);
      CHECK(std::stoi(r.out) == oracle.distance(verts[i], verts[j]));
    }
  }
}

TEST_CASE("binary distance matches the box reference distances") {
  const CliResult r = call_cli({"binary", "distance", "--dims", "2", "0", "3", "5", "3"});
  REQUIRE(r.code == 0);
  CHECK(std::stoi(r.out) == binary_box_distance(2, {0, 3}, {5, 3}, 8));
  const CliResult r3 =
      call_cli({"binary", "distance", "--dims", "3", "0", "0", "2", "3", "1", "2"});
  REQUIRE(r3.code == 0);
  CHECK(std::stoi(r3.out) == binary_box_distance(3, {0, 0, 2}, {3, 1, 2}, 8));
  CHECK(call_cli({"binary", "distance", "--dims", "2", "0", "1"}).code == 1);
}

TEST_CASE("grid export emits the ball subgraph in both formats") {
  Grid grid(GridParams{7, 1, 0});
  const int radius = 2;
  const std::vector<VertexId> ball = ball_vertices(grid, radius);
  const std::set<VertexId> in_ball(ball.begin(), ball.end());
  std::set<std::pair<VertexId, VertexId>> expected;
  for (VertexId v : ball) {
    for (VertexId w : grid.neighbors(v)) {
      if (in_ball.count(w)) expected.insert({std::min(v, w), std::max(v, w)});
    }
  }

  const CliResult r =
      call_cli({"grid", "export", "--q", "7", "--a", "1", "--b", "0", "--radius", "2"});
  REQUIRE(r.code == 0);
  std::set<std::pair<VertexId, VertexId>> got;
  for (const std::string& line : split_lines(r.out)) {
    const std::size_t space = line.find(' ');
    REQUIRE(space != std::string::npos);
    const VertexId u = grid.vertex_at(parse_address(line.substr(0, space)));
    const VertexId v = grid.vertex_at(parse_address(line.substr(space + 1)));
    CHECK(u != v);
    got.insert({std::min(u, v), std::max(u, v)});
  }
  CHECK(got == expected);
  CHECK(split_lines(r.out).size() == expected.size());

  const CliResult dot = call_cli(
      {"grid", "export", "--q", "7", "--a", "1", "--b", "0", "--radius", "2", "--format", "dot"});
  REQUIRE(dot.code == 0);
  const std::vector<std::string> lines = split_lines(dot.out);
  CHECK(lines.front() == "graph G {");
  CHECK(lines.back() == "}");
  CHECK(lines.size() == expected.size() + 2);
  CHECK(call_cli({"grid", "export", "--format", "svg"}).code == 1);
}

TEST_CASE("dhrg generate is deterministic and round-trips through loglik") {
  const std::vector<std::string> gen = {"dhrg",    "generate", "--n",         "25",
                                        "--radius", "4",        "--alpha",     "0.7",
                                        "--T",      "0.9",      "--seed",      "11",
                                        "--edges-out", "cli_tmp_e.txt", "--emb-out", "cli_tmp_m.txt"};
  const CliResult r1 = call_cli(gen);
  REQUIRE(r1.code == 0);
  const Json s1 = Json::parse(r1.out);
  std::ifstream e1("cli_tmp_e.txt"), m1("cli_tmp_m.txt");
  std::stringstream e1s, m1s;
  e1s << e1.rdbuf();
  m1s << m1.rdbuf();

  const CliResult r2 = call_cli(gen);
  REQUIRE(r2.code == 0);
  CHECK(r1.out == r2.out);
  std::ifstream e2("cli_tmp_e.txt"), m2("cli_tmp_m.txt");
  std::stringstream e2s, m2s;
  e2s << e2.rdbuf();
  m2s << m2.rdbuf();
  CHECK(e1s.str() == e2s.str());
  CHECK(m1s.str() == m2s.str());

  const CliResult ll = call_cli({"dhrg", "loglik", "--radius", "4", "--T", "0.9", "--edges",
                                 "cli_tmp_e.txt", "--emb", "cli_tmp_m.txt"});
  REQUIRE(ll.code == 0);
  const Json s2 = Json::parse(ll.out);
  CHECK(s2["loglik"].get<double>() == s1["loglik"].get<double>());
  CHECK(s2["edges"] == s1["edges"]);
  CHECK(s2["n"] == 25);
}

TEST_CASE("dhrg embed improves the likelihood and writes a consistent embedding") {
  const CliResult gen = call_cli({"dhrg", "generate", "--n", "20", "--radius", "4", "--alpha",
                                  "0.7", "--T", "0.9", "--seed", "3", "--edges-out", "cli_tmp_e.txt",
                                  "--emb-out", "cli_tmp_m.txt"});
  REQUIRE(gen.code == 0);
  const CliResult em = call_cli({"dhrg", "embed", "--radius", "4", "--T", "0.9", "--edges",
                                 "cli_tmp_e.txt", "--emb", "cli_tmp_m.txt", "--iters", "150",
                                 "--seed", "5", "--emb-out", "cli_tmp_m2.txt"});
  REQUIRE(em.code == 0);
  const Json s = Json::parse(em.out);
  CHECK(s["final_loglik"].get<double>() >= s["initial_loglik"].get<double>());
  CHECK(s["accepted"].get<long>() <= 150);

  const CliResult ll = call_cli({"dhrg", "loglik", "--radius", "4", "--T", "0.9", "--edges",
                                 "cli_tmp_e.txt", "--emb", "cli_tmp_m2.txt"});
  REQUIRE(ll.code == 0);
  CHECK(Json::parse(ll.out)["loglik"].get<double>() == s["final_loglik"].get<double>());
  std::remove("cli_tmp_e.txt");
  std::remove("cli_tmp_m.txt");
  std::remove("cli_tmp_m2.txt");
}

TEST_CASE("dhrg stats with a constant-half connection probability is exact") {
  const CliResult r = call_cli({"dhrg", "stats", "--n", "30", "--radius", "5", "--alpha", "0.6",
                                "--T", "0", "--Rprime", "0"});
  REQUIRE(r.code == 0);
  const Json out = Json::parse(r.out);
  CHECK(out["avg_degree"].get<double>() == doctest::Approx(15.0).epsilon(1e-9));
  CHECK(out["clustering"].get<double>() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(out["clustering_defined"] == true);
  for (const auto& d : out["degree_by_radius"]) {
    CHECK(d.get<double>() == doctest::Approx(15.0).epsilon(1e-9));
  }
}

TEST_CASE("betweenness prints one score line per embedded vertex") {
  Grid grid(GridParams{7, 1, 0});
  const std::vector<VertexId> ball = ball_vertices(grid, 3);
  const std::vector<VertexId> positions = {Grid::kRoot, ball[3], ball[17], ball[40], ball[17]};
  write_embedding_file("cli_tmp_bw_emb.txt", grid, positions);
  write_edge_file("cli_tmp_bw_edges.txt", {{0, 1}, {1, 2}, {3, 4}});

  const CliResult r = call_cli({"betweenness", "--edges", "cli_tmp_bw_edges.txt", "--emb",
                                "cli_tmp_bw_emb.txt", "--gamma", "0.5"});
  REQUIRE(r.code == 0);
  const std::vector<std::string> lines = split_lines(r.out);
  REQUIRE(lines.size() == positions.size() + 1);
  CHECK(lines[0] == "id,score");
  const std::vector<double> expected = brute_betweenness(grid, 3, positions, 0.5);
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const std::size_t comma = lines[i + 1].find(',');
    REQUIRE(comma != std::string::npos);
    CHECK(std::stoul(lines[i + 1].substr(0, comma)) == i + 1);
    CHECK(std::stod(lines[i + 1].substr(comma + 1)) == doctest::Approx(expected[i]).epsilon(1e-9));
  }
  std::remove("cli_tmp_bw_emb.txt");
  std::remove("cli_tmp_bw_edges.txt");
}

TEST_CASE("config files fill in options without overriding explicit flags") {
  write_temp("cli_tmp_cfg.json", "{\"n\": 30, \"radius\": 5, \"alpha\": 0.6, \"T\": 0.8}");
  const CliResult from_cfg = call_cli({"dhrg", "stats", "--config-json", "cli_tmp_cfg.json"});
  const CliResult from_flags =
      call_cli({"dhrg", "stats", "--n", "30", "--radius", "5", "--alpha", "0.6", "--T", "0.8"});
  REQUIRE(from_cfg.code == 0);
  CHECK(from_cfg.out == from_flags.out);

  const CliResult overridden =
      call_cli({"dhrg", "stats", "--config-json", "cli_tmp_cfg.json", "--n", "10"});
  REQUIRE(overridden.code == 0);
  CHECK(Json::parse(overridden.out)["n"] == 10);
  CHECK(Json::parse(overridden.out)["clustering"] == Json::parse(from_cfg.out)["clustering"]);

  write_temp("cli_tmp_cfg_bad.json", "{\"bogus\": 1}");
  CHECK(call_cli({"dhrg", "stats", "--config-json", "cli_tmp_cfg_bad.json"}).code == 1);
  write_temp("cli_tmp_cfg_bad2.json", "[1, 2]");
  CHECK(call_cli({"dhrg", "stats", "--config-json", "cli_tmp_cfg_bad2.json"}).code == 1);
  std::remove("cli_tmp_cfg.json");
  std::remove("cli_tmp_cfg_bad.json");
  std::remove("cli_tmp_cfg_bad2.json");
}

TEST_CASE("usage and runtime failures map to distinct exit codes") {
  CHECK(call_cli({}).code == 1);
  CHECK(call_cli({"grid"}).code == 1);
  CHECK(call_cli({"grid", "info", "--bogus"}).code == 1);
  CHECK(call_cli({"dhrg", "generate", "--n", "5"}).code == 1);
  CHECK(call_cli({"dhrg", "loglik", "--radius", "4"}).code == 1);
  CHECK(call_cli({"grid", "distance", "", "9/9/9"}).code == 2);
  CHECK(call_cli({"dhrg", "loglik", "--radius", "4", "--edges", "cli_tmp_nope.txt", "--emb",
                  "cli_tmp_nope.txt"})
            .code == 2);

  const CliResult help = call_cli({"grid", "distance", "--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("Usage") != std::string::npos);
  const CliResult bad = call_cli({"grid", "info", "--bogus"});
  CHECK(bad.err.find("error:") != std::string::npos);
}

TEST_CASE("built-in suites pass through the command-line entry point") {
  const CliResult r = call_cli({"selftest", "--suite", "loglik"});
  REQUIRE(r.code == 0);
  const Json out = Json::parse(r.out);
  CHECK(out["suite"] == "loglik");
  CHECK(out["pass"] == true);
  CHECK(out["failures"] == 0);
  CHECK(out["checks"].get<int>() > 0);

  const CliResult c = call_cli({"count", "selftest"});
  REQUIRE(c.code == 0);
  CHECK(Json::parse(c.out)["suite"] == "counter");
  CHECK(call_cli({"selftest", "--suite", "nosuch"}).code == 2);
}

TEST_CASE("the installed binary behaves like the library entry point") {
  FILE* pipe = popen("./hypgrid grid info --q 7 --a 1 --b 0 --radius 3 2>/dev/null", "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[512];
  while (std::size_t got = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, got);
  const int status = pclose(pipe);
  REQUIRE(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 0);
  CHECK(Json::parse(out)["ring_sizes"] == Json::array({1, 7, 21, 56}));

  FILE* bad = popen("./hypgrid grid distance \"\" 9/9/9 2>/dev/null", "r");
  REQUIRE(bad != nullptr);
  while (std::fread(buf, 1, sizeof buf, bad) > 0) {
  }
  const int bad_status = pclose(bad);
  REQUIRE(WIFEXITED(bad_status));
  CHECK(WEXITSTATUS(bad_status) == 2);
}
