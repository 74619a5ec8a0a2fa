#include "hypgrid/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hypgrid/centrality.hpp"
#include "hypgrid/dhrg.hpp"
#include "hypgrid/grid.hpp"
#include "hypgrid/io.hpp"
#include "hypgrid/metrics.hpp"
#include "hypgrid/oracle.hpp"
#include "hypgrid/selftest.hpp"
#include "hypgrid/stg.hpp"

namespace hypgrid {
namespace {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Option plumbing

/** Grid selection shared by most subcommands. */
struct GridOpts {
  int q = 7;
  int a = 1;
  int b = 0;
};

void add_grid_options(CLI::App* cmd, GridOpts* g) {
  cmd->add_option("--q", g->q, "base tessellation degree (7 or 8)")->capture_default_str();
  cmd->add_option("--a", g->a, "ring spacing parameter a")->capture_default_str();
  cmd->add_option("--b", g->b, "ring spacing parameter b")->capture_default_str();
}

void add_config_option(CLI::App* cmd, std::string* path) {
  cmd->add_option("--config-json", *path,
                  "JSON object supplying option values; explicit flags take precedence");
}

std::string json_to_arg(const Json& value) {
  return value.is_string() ? value.get<std::string>() : value.dump();
}

/**
 * Loads option values for `cmd` from a JSON object file.  Keys name long
 * options without the leading dashes; options given explicitly on the
 * command line keep their values.
 */
void apply_config(CLI::App* cmd, const std::string& path) {
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config-json", "cannot open " + path);
  Json obj;
  try {
    obj = Json::parse(in);
  } catch (const std::exception& e) {
    throw CLI::ValidationError("--config-json", e.what());
  }
  if (!obj.is_object()) throw CLI::ValidationError("--config-json", "expected a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (key == "config-json") {
      throw CLI::ValidationError("--config-json", "cannot nest config files");
    }
    CLI::Option* opt = cmd->get_option_no_throw("--" + key);
    if (opt == nullptr) throw CLI::ValidationError("--config-json", "unknown key: " + key);
    if (opt->count() > 0) continue;
    if (value.is_array()) {
      for (const auto& element : value) opt->add_result(json_to_arg(element));
    } else {
      opt->add_result(json_to_arg(value));
    }
    opt->run_callback();
  }
}

Json big_to_json(const mpz_class& z) {
  if (z.fits_ulong_p()) return static_cast<std::uint64_t>(z.get_ui());
  return z.get_str();
}

void with_output(const std::string& path, const std::function<void(std::ostream&)>& fn) {
  if (path.empty()) {
    fn(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("invalid-params: cannot open " + path);
  fn(out);
}

void print_json(const Json& out) { std::cout << out.dump() << "\n"; }

// ---------------------------------------------------------------------------
// grid subcommands

struct GridInfoOpts {
  GridOpts g;
  int radius = 3;
  std::string config;
};

void run_grid_info(const GridInfoOpts& o) {
  if (o.radius < 0) throw CLI::ValidationError("--radius", "must be >= 0");
  Grid grid(GridParams{o.g.q, o.g.a, o.g.b});
  Json rings = Json::array();
  for (int r = 0; r <= o.radius; ++r) rings.push_back(big_to_json(grid.ring_size(r)));
  Json out;
  out["q"] = o.g.q;
  out["a"] = o.g.a;
  out["b"] = o.g.b;
  out["radius"] = o.radius;
  out["ring_sizes"] = rings;
  out["type_count"] =
      static_cast<std::uint64_t>(build_type_table(GridParams{o.g.q, o.g.a, o.g.b}).type_count());
  out["d_bound"] = compute_d_bound(grid);
  out["gamma"] = growth_constant(grid);
  print_json(out);
}

void setup_grid_info(CLI::App* parent) {
  auto o = std::make_shared<GridInfoOpts>();
  CLI::App* cmd = parent->add_subcommand("info", "Print ring sizes and grid invariants as JSON");
  add_grid_options(cmd, &o->g);
  cmd->add_option("--radius", o->radius, "largest ring to report")->capture_default_str();
  add_config_option(cmd, &o->config);
  cmd->callback([cmd, o] {
    apply_config(cmd, o->config);
    run_grid_info(*o);
  });
}

struct GridExportOpts {
  GridOpts g;
  int radius = 3;
  std::string format = "edgelist";
  std::string out_path;
  std::string config;
};

void run_grid_export(const GridExportOpts& o) {
  if (o.radius < 0) throw CLI::ValidationError("--radius", "must be >= 0");
  if (o.format != "edgelist" && o.format != "dot") {
    throw CLI::ValidationError("--format", "expected edgelist or dot");
  }
  Grid grid(GridParams{o.g.q, o.g.a, o.g.b});
  const std::vector<VertexId> ball = ball_vertices(grid, o.radius);
  std::unordered_map<VertexId, std::size_t> index;
  std::vector<std::string> addr(ball.size());
  for (std::size_t i = 0; i < ball.size(); ++i) {
    index[ball[i]] = i;
    addr[i] = format_address(grid.address_of(ball[i]));
  }
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < ball.size(); ++i) {
    for (VertexId w : grid.neighbors(ball[i])) {
      auto it = index.find(w);
      if (it != index.end() && it->second > i) pairs.emplace_back(i, it->second);
    }
  }
  with_output(o.out_path, [&](std::ostream& out) {
    if (o.format == "edgelist") {
      for (const auto& [i, j] : pairs) out << addr[i] << " " << addr[j] << "\n";
    } else {
      out << "graph G {\n";
      for (const auto& [i, j] : pairs) {
        out << "  \"" << addr[i] << "\" -- \"" << addr[j] << "\";\n";
      }
      out << "}\n";
    }
  });
}

void setup_grid_export(CLI::App* parent) {
  auto o = std::make_shared<GridExportOpts>();
  CLI::App* cmd =
      parent->add_subcommand("export", "Write the ball subgraph as an address edge list or DOT");
  add_grid_options(cmd, &o->g);
  cmd->add_option("--radius", o->radius, "ball radius to export")->capture_default_str();
  cmd->add_option("--format", o->format, "edgelist or dot")->capture_default_str();
  cmd->add_option("--out", o->out_path, "output file (default: stdout)");
  add_config_option(cmd, &o->config);
  cmd->callback([cmd, o] {
    apply_config(cmd, o->config);
    run_grid_export(*o);
  });
}

struct GridDistanceOpts {
  GridOpts g;
  std::string addr1;
  std::string addr2;
  std::string config;
};

void run_grid_distance(const GridDistanceOpts& o) {
  Grid grid(GridParams{o.g.q, o.g.a, o.g.b});
  const VertexId u = grid.vertex_at(parse_address(o.addr1));
  const VertexId v = grid.vertex_at(parse_address(o.addr2));
  RghtStg stg(grid, compute_d_bound(grid));
  std::cout << stg_distance(stg, stg.vertex_node(u), stg.vertex_node(v)) << "\n";
}

void setup_grid_distance(CLI::App* parent) {
  auto o = std::make_shared<GridDistanceOpts>();
  CLI::App* cmd =
      parent->add_subcommand("distance", "Exact distance between two vertices given by address");
  add_grid_options(cmd, &o->g);
  cmd->add_option("addr1", o->addr1, "first vertex address (empty string = root)")->required();
  cmd->add_option("addr2", o->addr2, "second vertex address")->required();
  add_config_option(cmd, &o->config);
  cmd->callback([cmd, o] {
    apply_config(cmd, o->config);
    run_grid_distance(*o);
  });
}

// ---------------------------------------------------------------------------
// binary distance

struct BinaryDistanceOpts {
  int dims = 2;
  std::vector<std::int64_t> coords;
  std::string config;
};

void run_binary_distance(const BinaryDistanceOpts& o) {
  if (o.dims < 2) throw CLI::ValidationError("--dims", "must be >= 2");
  if (static_cast<int>(o.coords.size()) != 2 * o.dims) {
    throw CLI::ValidationError(
        "coords", "expected " + std::to_string(2 * o.dims) + " integers (x_1..x_{d-1} t, twice)");
  }
  BinaryStg stg(o.dims);
  const auto point_at = [&](int offset) {
    std::vector<std::int64_t> xs(o.coords.begin() + offset,
                                 o.coords.begin() + offset + o.dims - 1);
    return stg.point(xs, o.coords[static_cast<std::size_t>(offset + o.dims - 1)]);
  };
  const StgNode a = point_at(0);
  const StgNode b = point_at(o.dims);
  std::cout << stg_distance(stg, a, b) << "\n";
}

void setup_binary(CLI::App* app) {
  CLI::App* group = app->add_subcommand("binary", "Distance oracle for the binary grid");
  group->require_subcommand(1);
  auto o = std::make_shared<BinaryDistanceOpts>();
  CLI::App* cmd = group->add_subcommand(
      "distance", "Exact distance between two points (each d integers: x_1..x_{d-1} t)");
  cmd->add_option("--dims", o->dims, "grid dimension d")->capture_default_str();
  cmd->add_option("coords", o->coords, "2*d integers describing the two points");
  add_config_option(cmd, &o->config);
  cmd->callback([cmd, o] {
    apply_config(cmd, o->config);
    run_binary_distance(*o);
  });
}

// ---------------------------------------------------------------------------
// dhrg subcommands

struct ModelOpts {
  int n = 0;
  int radius = -1;
  double alpha = 1.0;
  double t = 1.0;
  double rprime = std::numeric_limits<double>::quiet_NaN();
};

void add_model_options(CLI::App* cmd, ModelOpts* m, bool with_n, bool with_alpha) {
  if (with_n) cmd->add_option("--n", m->n, "number of model vertices");
  cmd->add_option("--radius", m->radius, "ball radius of the model");
  if (with_alpha) {
    cmd->add_option("--alpha", m->alpha, "radial falloff: P(r) proportional to exp(alpha*r)")
        ->capture_default_str();
  }
  cmd->add_option("--T", m->t, "steepness in p(x) = 1/(1 + exp(T*x + Rprime))")
      ->capture_default_str();
  cmd->add_option("--Rprime", m->rprime, "shift in the connection probability (default: -radius)");
}

DhrgModel build_model(const ModelOpts& m, int n) {
  if (m.radius < 0) throw CLI::RequiredError("--radius");
  if (m.radius > 31) throw CLI::ValidationError("--radius", "must be at most 31");
  if (n < 1) throw CLI::RequiredError("--n");
  const double rp = std::isnan(m.rprime) ? -static_cast<double>(m.radius) : m.rprime;
  DhrgModel model{n, m.radius, DhrgModel::exponential_radial(m.radius, m.alpha),
                  DhrgModel::logistic_conn(m.radius, m.t, rp)};
  model.validate();
  return model;
}

struct DhrgGenerateOpts {
  GridOpts g;
  ModelOpts m;
  std::uint64_t seed = 1;
  std::string edges_out;
  std::string emb_out;
  std::string config;
};

void run_dhrg_generate(const DhrgGenerateOpts& o) {
  const DhrgModel model = build_model(o.m, o.m.n);
  Grid grid(GridParams{o.g.q, o.g.a, o.g.b});
  RghtStg stg(grid, compute_d_bound(grid));
  auto inst = DhrgInstance::generate(model, grid, stg, o.seed);
  if (!o.edges_out.empty()) write_edge_file(o.edges_out, inst.edges());
  if (!o.emb_out.empty()) write_embedding_file(o.emb_out, grid, inst.embedding());
  Json out;
  out["n"] = model.n;
  out["radius"] = model.radius;
  out["seed"] = o.seed;
  out["edges"] = static_cast<std::uint64_t>(inst.edges().size());
  out["loglik"] = inst.loglik();
  print_json(out);
}

void setup_dhrg_generate(CLI::App* parent) {
  auto o = std::make_shared<DhrgGenerateOpts>();
  CLI::App* cmd = parent->add_subcommand("generate", "Sample an embedding and edge set");
  add_grid_options(cmd, &o->g);
  add_model_options(cmd, &o->m, /*with_n=*/true, /*with_alpha=*/true);
  cmd->add_option("--seed", o->seed, "random seed")->capture_default_str();
  cmd->add_option("--edges-out", o->edges_out, "write the sampled edge list here");
  cmd->add_option("--emb-out", o->emb_out, "write the sampled embedding here");
  add_config_option(cmd, &o->config);
  cmd->callback([cmd, o] {
    apply_config(cmd, o->config);
    run_dhrg_generate(*o);
  });
}

struct DhrgFilesOpts {
  GridOpts g;
  ModelOpts m;
  std::string edges_path;
  std::string emb_path;
  std::string config;
};

void require_path(const char* name, const std::string& value) {
  if (value.empty()) throw CLI::RequiredError(name);
}

void run_dhrg_loglik(const DhrgFilesOpts& o) {
  require_path("--edges", o.edges_path);
  require_path("--emb", o.emb_path);
  Grid grid(GridParams{o.g.q, o.g.a, o.g.b});
  const std::vector<VertexId> emb = read_embedding_file(o.emb_path, grid);
  const std::vector<std::pair<int, int>> edges = read_edge_file(o.edges_path);
  const DhrgModel model = build_model(o.m, static_cast<int>(emb.size()));
  RghtStg stg(grid, compute_d_bound(grid));
  DhrgInstance inst(model, grid, stg, emb, edges);
  Json out;
  out["n"] = model.n;
  out["edges"] = static_cast<std::uint64_t>(edges.size());
  out["loglik"] = inst.loglik();
  print_json(out);
}

void setup_dhrg_loglik(CLI::App* parent) {
  auto o = std::make_shared<DhrgFilesOpts>();
  CLI::App* cmd =
      parent->add_subcommand("loglik", "Log-likelihood of an edge list under an embedding");
  add_grid_options(cmd, &o->g);
  add_model_options(cmd, &o->m, /*with_n=*/false, /*with_alpha=*/false);
  cmd->add_option("--edges", o->edges_path, "edge list file (1-based ids)");
  cmd->add_option("--emb", o->emb_path, "embedding file");
  add_config_option(cmd, &o->config);
  cmd->callback([cmd, o] {
    apply_config(cmd, o->config);
    run_dhrg_loglik(*o);
  });
}

struct DhrgEmbedOpts {
  DhrgFilesOpts f;
  long iters = 1000;
  std::uint64_t seed = 1;
  std::string emb_out;
};

void run_dhrg_embed(const DhrgEmbedOpts& o) {
  require_path("--edges", o.f.edges_path);
  require_path("--emb", o.f.emb_path);
  if (o.iters < 0) throw CLI::ValidationError("--iters", "must be >= 0");
  Grid grid(GridParams{o.f.g.q, o.f.g.a, o.f.g.b});
  const std::vector<VertexId> emb = read_embedding_file(o.f.emb_path, grid);
  const std::vector<std::pair<int, int>> edges = read_edge_file(o.f.edges_path);
  const DhrgModel model = build_model(o.f.m, static_cast<int>(emb.size()));
  RghtStg stg(grid, compute_d_bound(grid));
  DhrgInstance inst(model, grid, stg, emb, edges);
  const SearchLog log = inst.local_search(o.iters, o.seed);
  if (!o.emb_out.empty()) write_embedding_file(o.emb_out, grid, inst.embedding());
  Json out;
  out["n"] = model.n;
  out["edges"] = static_cast<std::uint64_t>(edges.size());
  out["iterations"] = o.iters;
  out["accepted"] = static_cast<std::uint64_t>(log.accepted.size());
  out["initial_loglik"] = log.trace.front();
  out["final_loglik"] = inst.loglik();
  print_json(out);
}

void setup_dhrg_embed(CLI::App* parent) {
  auto o = std::make_shared<DhrgEmbedOpts>();
  CLI::App* cmd = parent->add_subcommand(
      "embed", "Improve an embedding by accept-if-better local search");
  add_grid_options(cmd, &o->f.g);
  add_model_options(cmd, &o->f.m, /*with_n=*/false, /*with_alpha=*/false);
  cmd->add_option("--edges", o->f.edges_path, "edge list file (1-based ids)");
  cmd->add_option("--emb", o->f.emb_path, "initial embedding file");
  cmd->add_option("--iters", o->iters, "number of proposed moves")->capture_default_str();
  cmd->add_option("--seed", o->seed, "random seed")->capture_default_str();
  cmd->add_option("--emb-out", o->emb_out, "write the improved embedding here");
  add_config_option(cmd, &o->f.config);
  cmd->callback([cmd, o] {
    apply_config(cmd, o->f.config);
    run_dhrg_embed(*o);
  });
}

struct DhrgStatsOpts {
  GridOpts g;
  ModelOpts m;
  std::string config;
};

void run_dhrg_stats(const DhrgStatsOpts& o) {
  const DhrgModel model = build_model(o.m, o.m.n);
  Grid grid(GridParams{o.g.q, o.g.a, o.g.b});
  RghtStg stg(grid, compute_d_bound(grid));
  const ExpectedStats stats = dhrg_expected_stats(model, grid, stg);
  Json out;
  out["n"] = model.n;
  out["radius"] = model.radius;
  out["avg_degree"] = stats.avg_degree;
  out["degree_by_radius"] = stats.degree_by_radius;
  out["clustering"] = stats.clustering;  // NaN serializes as null
  out["clustering_defined"] = stats.clustering_defined;
  print_json(out);
}

void setup_dhrg_stats(CLI::App* parent) {
  auto o = std::make_shared<DhrgStatsOpts>();
  CLI::App* cmd =
      parent->add_subcommand("stats", "Expected degree and clustering without sampling");
  add_grid_options(cmd, &o->g);
  add_model_options(cmd, &o->m, /*with_n=*/true, /*with_alpha=*/true);
  add_config_option(cmd, &o->config);
  cmd->callback([cmd, o] {
    apply_config(cmd, o->config);
    run_dhrg_stats(*o);
  });
}

void setup_dhrg(CLI::App* app) {
  CLI::App* group =
      app->add_subcommand("dhrg", "Discrete hyperbolic random graph model tools");
  group->require_subcommand(1);
  setup_dhrg_generate(group);
  setup_dhrg_loglik(group);
  setup_dhrg_embed(group);
  setup_dhrg_stats(group);
}

// ---------------------------------------------------------------------------
// betweenness

struct BetweennessOpts {
  GridOpts g;
  double gamma = 0.0;
  int radius = -1;
  std::string edges_path;
  std::string emb_path;
  std::string config;
};

void run_betweenness(const BetweennessOpts& o) {
  require_path("--emb", o.emb_path);
  require_path("--edges", o.edges_path);
  if (o.gamma < 0.0 || o.gamma >= 1.0) {
    throw CLI::ValidationError("--gamma", "must lie in [0, 1)");
  }
  Grid grid(GridParams{o.g.q, o.g.a, o.g.b});
  const std::vector<VertexId> positions = read_embedding_file(o.emb_path, grid);
  const std::vector<std::pair<int, int>> edges = read_edge_file(o.edges_path);
  const int n = static_cast<int>(positions.size());
  for (const auto& [u, v] : edges) {
    if (u >= n || v >= n) {
      throw std::invalid_argument("invalid-params: edge endpoint beyond embedding size");
    }
  }
  int radius = o.radius;
  if (radius < 0) {
    radius = 0;
    for (VertexId v : positions) radius = std::max(radius, static_cast<int>(grid.depth(v)));
  }
  RghtStg stg(grid, compute_d_bound(grid));
  const BetweennessResult res = pseudo_betweenness(stg, radius, positions, o.gamma);
  std::cout << "id,score\n";
  char buf[64];
  for (std::size_t i = 0; i < res.scores.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i + 1, res.scores[i]);
    std::cout << buf;
  }
}

void setup_betweenness(CLI::App* app) {
  auto o = std::make_shared<BetweennessOpts>();
  CLI::App* cmd = app->add_subcommand(
      "betweenness", "Pseudo-betweenness scores of embedded vertices as CSV");
  add_grid_options(cmd, &o->g);
  cmd->add_option("--gamma", o->gamma, "detour discount factor in [0, 1)")->capture_default_str();
  cmd->add_option("--radius", o->radius, "ball radius (default: deepest embedded vertex)");
  cmd->add_option("--edges", o->edges_path, "edge list file (validated, not used by the score)");
  cmd->add_option("--emb", o->emb_path, "embedding file");
  add_config_option(cmd, &o->config);
  cmd->callback([cmd, o] {
    apply_config(cmd, o->config);
    run_betweenness(*o);
  });
}

// ---------------------------------------------------------------------------
// selftest

Json suite_to_json(const SuiteResult& r) {
  Json out;
  out["suite"] = r.name;
  out["checks"] = r.checks;
  out["failures"] = r.failures;
  out["pass"] = r.failures == 0;
  return out;
}

void run_selftest(const std::string& suite, int* exit_code) {
  if (suite != "all") {
    const SuiteResult r = run_selftest_suite(suite);
    print_json(suite_to_json(r));
    if (r.failures > 0) *exit_code = 2;
    return;
  }
  Json detail = Json::array();
  SuiteResult total{"all"};
  for (const std::string& name : selftest_suite_names()) {
    const SuiteResult r = run_selftest_suite(name);
    detail.push_back(suite_to_json(r));
    total.checks += r.checks;
    total.failures += r.failures;
  }
  Json out = suite_to_json(total);
  out["detail"] = detail;
  print_json(out);
  if (total.failures > 0) *exit_code = 2;
}

void setup_selftest(CLI::App* app, const std::shared_ptr<int>& exit_code) {
  auto o = std::make_shared<std::pair<std::string, std::string>>("all", "");
  CLI::App* cmd = app->add_subcommand(
      "selftest", "Verify the incremental structures against reference computations");
  cmd->add_option("--suite", o->first, "distance, counter, paircount, loglik, betweenness or all")
      ->capture_default_str();
  add_config_option(cmd, &o->second);
  cmd->callback([cmd, o, exit_code] {
    apply_config(cmd, o->second);
    run_selftest(o->first, exit_code.get());
  });
}

void setup_count(CLI::App* app, const std::shared_ptr<int>& exit_code) {
  CLI::App* group = app->add_subcommand("count", "Distance-profile counter tools");
  group->require_subcommand(1);
  CLI::App* cmd = group->add_subcommand(
      "selftest", "Compare counter results against direct enumeration");
  cmd->callback([exit_code] { run_selftest("counter", exit_code.get()); });
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{
      "Lazily generated hyperbolic triangulations: distance oracles, embedding "
      "counters and discrete hyperbolic random graphs"};
  app.name("hypgrid");
  app.require_subcommand(1);

  auto exit_code = std::make_shared<int>(0);
  CLI::App* grid_group = app.add_subcommand("grid", "Triangulation grid tools");
  grid_group->require_subcommand(1);
  setup_grid_info(grid_group);
  setup_grid_export(grid_group);
  setup_grid_distance(grid_group);
  setup_binary(&app);
  setup_dhrg(&app);
  setup_betweenness(&app);
  setup_count(&app, exit_code);
  setup_selftest(&app, exit_code);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help() << std::flush;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  }
  return *exit_code;
}

}  // namespace hypgrid
