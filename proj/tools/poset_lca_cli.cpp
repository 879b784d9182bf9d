// poset-lca: generators, sorter/corrector, MIS and matching LCAs, testers,
// learner and probe benchmarks behind one command line.
//
// Exit codes: 0 ok / Accept, 1 Reject, 2 bad arguments, 3 stage failure.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "poset_lca/poset_lca.hpp"

using namespace poset_lca;
using Json = nlohmann::ordered_json;

namespace {

constexpr int kSchemaVersion = 1;

struct ArgError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

// POSET_LCA_SEED wins over --seed.
std::uint64_t effective_seed(std::uint64_t cli_seed) {
  if (const char* env = std::getenv("POSET_LCA_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw ArgError("POSET_LCA_SEED must be an unsigned integer");
  }
  return cli_seed;
}

Json header(const std::string& command, std::uint64_t seed, const std::vector<std::string>& args) {
  // the seed enters once, as the effective value, so POSET_LCA_SEED=9 and
  // --seed 9 hash alike
  std::string canonical = command;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--seed") {
      ++i;
      continue;
    }
    if (args[i].rfind("--seed=", 0) == 0) continue;
    canonical += '\x1f' + args[i];
  }
  canonical += "\x1fseed=" + std::to_string(seed);
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  j["seed"] = seed;
  j["config_hash"] = hex(fnv1a(canonical));
  return j;
}

void emit(const Json& j) { std::cout << j.dump(2) << '\n'; }

Json stage_json(const StageProbes& s) {
  return Json{{"stage", s.stage},
              {"k", s.k},
              {"label_evals", s.label_evals},
              {"b_neighborhoods", s.b_neighborhoods},
              {"partner_queries", s.partner_queries},
              {"tape_bits", s.tape_bits},
              {"simulated_edges", s.simulated_edges},
              {"max_component", s.max_component}};
}

Json report_json(const ProbeReport& r) {
  Json stages = Json::array();
  for (const auto& s : r.stages) stages.push_back(stage_json(s));
  return Json{{"poset_probes", r.poset_probes},
              {"label_probes", r.label_probes},
              {"tape_bits", r.tape_bits},
              {"stage_breakdown", stages}};
}

// ---- shared poset / labeling options ------------------------------------

struct PosetOptions {
  std::string poset_file;
  std::optional<unsigned> hypercube;
  std::string truncated;  // n:eps
  std::string labels_file;
  std::string function;
  std::uint64_t function_seed = 0;

  void add(CLI::App* app) {
    auto* src = app->add_option_group("poset source");
    src->add_option("--poset", poset_file, "Poset file (N, then 'u v' per Hasse edge)");
    src->add_option("--hypercube", hypercube, "Boolean hypercube of dimension n");
    src->add_option("--truncated", truncated, "Truncated hypercube, as n:eps");
    src->require_option(1);
    auto* lab = app->add_option_group("labeling");
    lab->add_option("--labels", labels_file, "Labeling file ('id bit' per line)");
    lab->add_option("--function", function, "majority | parity | threshold:k | random:p");
    lab->require_option(1);
    app->add_option("--function-seed", function_seed, "Seed for random:p labelings");
  }

  Poset load_poset() const {
    if (!poset_file.empty()) {
      std::ifstream in(poset_file);
      if (!in) throw ArgError("cannot open poset file " + poset_file);
      return read_poset(in);
    }
    if (hypercube) return poset_lca::hypercube(*hypercube);
    const auto colon = truncated.find(':');
    if (colon == std::string::npos) throw ArgError("--truncated expects n:eps");
    try {
      return truncated_hypercube(static_cast<unsigned>(std::stoul(truncated.substr(0, colon))),
                                 std::stod(truncated.substr(colon + 1)));
    } catch (const std::logic_error& e) {
      throw ArgError(std::string("--truncated: ") + e.what());
    }
  }

  Labels load_labels(const Poset& poset) const {
    if (!labels_file.empty()) {
      std::ifstream in(labels_file);
      if (!in) throw ArgError("cannot open labels file " + labels_file);
      return read_labels(in, poset.id_bound());
    }
    return materialize(poset, poset_function(poset, parse_function_spec(function), function_seed));
  }
};

struct SorterOptions {
  double delta = 0.1;
  std::optional<unsigned> tau;
  std::optional<unsigned> exact_kwise;
  std::optional<std::size_t> component_cap;
  bool extra_stage = false;

  void add(CLI::App* app) {
    app->add_option("--delta", delta, "Failure budget across stages")->check(CLI::Range(1e-12, 1.0));
    app->add_option("--tau", tau, "MIS rounds per stage")->check(CLI::Range(1u, 120u));
    app->add_option("--exact-kwise", exact_kwise, "Use the exact k-wise independent tape");
    app->add_flag("--extra-stage", extra_stage, "Run one more (idempotent) stage");
    app->add_option("--component-cap", component_cap, "Largest undecided component tolerated")
        ->check(CLI::PositiveNumber);
  }

  SorterConfig config() const {
    SorterConfig c;
    c.delta = delta;
    c.tau = tau;
    c.component_cap = component_cap;
    c.extra_stage = extra_stage;
    if (exact_kwise) {
      c.tape_mode = TapeMode::exact_kwise;
      c.kwise = *exact_kwise;
    }
    return c;
  }
};

std::vector<Element> parse_queries(const std::vector<long long>& q, const Poset& poset) {
  std::vector<Element> out;
  for (long long x : q) {
    if (x < 0 || static_cast<std::uint64_t>(x) >= poset.size())
      throw ArgError("query element " + std::to_string(x) + " out of range");
    out.push_back(static_cast<Element>(x));
  }
  return out;
}

// ---- sort / correct -----------------------------------------------------

int run_sort(const std::string& command, const PosetOptions& po, const SorterOptions& so,
             std::uint64_t seed_arg, const std::vector<long long>& queries, bool all, bool global,
             bool global_check, const std::string& report_path,
             const std::vector<std::string>& args) {
  const Poset poset = po.load_poset();
  const Labels labels = po.load_labels(poset);
  const SorterConfig cfg = so.config();
  const LabelsView f{&labels};
  const auto picks = parse_queries(queries, poset);
  if (!all && picks.empty() && !global) throw ArgError("give --query <x>, --all or --global");

  Json j = header(command, effective_seed(seed_arg), args);
  const std::uint64_t requested = j["seed"];
  const StagePlan plan = plan_stages(poset, cfg);
  j["poset"] = {{"size", poset.size()},
                {"height", poset.height()},
                {"degree_bound", poset.degree_bound()},
                {"hasse_edges", poset.edge_count()}};
  j["stages"] = plan.stage_count();
  j["cutoffs"] = plan.cutoffs;
  j["tau"] = plan.mis.tau;

  auto [result, retries] = with_seed_retries(requested, [&](std::uint64_t s) {
    Json r;
    r["effective_seed"] = s;
    Labels out(poset.size(), 0);
    if (all || global_check || !picks.empty()) {
      LocalSorter<Poset> sorter(poset, f, s, cfg);
      if (all || global_check)
        for (Element x : poset.elements()) out[x] = sorter.query(x) ? 1 : 0;
      Json answers = Json::array();
      for (Element x : picks) {
        // cold per-query counts from a fresh sorter
        LocalSorter<Poset> cold(poset, f, s, cfg);
        const bool bit = cold.query(x);
        answers.push_back({{"x", x}, {"bit", bit ? 1 : 0}, {"probes", report_json(cold.report())}});
      }
      if (!picks.empty()) r["queries"] = answers;
      if (all || global_check) r["probes"] = report_json(sorter.report());
    }
    if (global || global_check) {
      const auto g = global_sort(poset, f, lca_matcher(poset, s, cfg), cfg);
      if (global_check) {
        bool same = true;
        for (Element x : poset.elements()) same = same && out[x] == g.output()[x];
        r["local_equals_global"] = same;
      } else {
        out = g.output();
      }
    }
    if (all || global || global_check) {
      std::size_t ones_in = 0, ones_out = 0;
      for (Element x : poset.elements()) {
        ones_in += labels[x];
        ones_out += out[x];
      }
      r["monotone"] = is_monotone(poset, LabelsView{&out});
      r["ones_preserved"] = ones_in == ones_out;
      r["distance_to_input"] = labeling_distance(poset, f, LabelsView{&out});
      std::string bits;
      for (Element x : poset.elements()) bits += out[x] ? '1' : '0';
      r["labels"] = bits;
    }
    return r;
  });
  j["stage_retries"] = retries;
  for (auto& [k, v] : result.items()) j[k] = v;
  if (!report_path.empty()) {
    std::ofstream rep(report_path);
    if (!rep) throw ArgError("cannot write " + report_path);
    Json pr{{"schema_version", kSchemaVersion}, {"seed", j["seed"]}, {"config_hash", j["config_hash"]}};
    if (j.contains("probes")) pr["aggregate"] = j["probes"];
    if (j.contains("queries")) {
      Json per = Json::array();
      for (const auto& q : j["queries"]) per.push_back({{"x", q["x"]}, {"probes", q["probes"]}});
      pr["per_query"] = per;
    }
    rep << pr.dump(2) << '\n';
  }
  emit(j);
  return 0;
}

// ---- mis / match --------------------------------------------------------

ExplicitGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgError("cannot open graph file " + path);
  return read_graph(in);
}

RandomTape make_tape(std::uint64_t seed, const std::optional<unsigned>& kwise) {
  return kwise ? RandomTape::exact_kwise(seed, *kwise) : RandomTape::prf(seed);
}

int run_mis(const std::string& graph_file, std::uint64_t seed_arg, std::optional<unsigned> tau,
            std::optional<unsigned> kwise, const std::vector<long long>& queries, bool all,
            double delta, const std::vector<std::string>& args) {
  const ExplicitGraph g = load_graph(graph_file);
  Json j = header("mis", effective_seed(seed_arg), args);
  MisConfig cfg{tau.value_or(std::min(default_tau(g.degree_bound()), DesireSum::kMaxRound)),
                default_component_cap(std::max<std::size_t>(1, g.vertex_count()), g.degree_bound(),
                                      delta)};
  MisLca<ExplicitGraph> lca(g, make_tape(j["seed"], kwise), cfg);
  j["graph"] = {{"vertices", g.vertex_count()}, {"degree_bound", g.degree_bound()}};
  j["tau"] = cfg.tau;
  std::vector<Vertex> picks;
  for (long long v : queries) {
    if (v < 0 || static_cast<std::uint64_t>(v) >= g.vertex_count())
      throw ArgError("vertex out of range");
    picks.push_back(static_cast<Vertex>(v));
  }
  if (all)
    for (Vertex v = 0; v < g.vertex_count(); ++v) picks.push_back(v);
  if (picks.empty()) throw ArgError("give --query <v> or --all");
  Json answers = Json::array();
  try {
    for (Vertex v : picks) {
      const Outcome o = lca.simulate(v);
      answers.push_back({{"v", v},
                         {"in_mis", lca.member(v) ? 1 : 0},
                         {"decided_round", o.round}});
    }
  } catch (const ComponentTooLarge& e) {
    j["error"] = e.what();
    emit(j);
    return 3;
  }
  j["answers"] = answers;
  if (all) {
    std::vector<bool> in(g.vertex_count());
    for (Vertex v = 0; v < g.vertex_count(); ++v) in[v] = lca.member(v);
    j["maximal_independent"] = is_maximal_independent_set(g, in);
  }
  const MisStats st = lca.stats();
  j["probes"] = {{"neighbor_reads", st.neighbor_reads},
                 {"tape_bits", st.tape_bits},
                 {"simulated_vertices", st.simulated_vertices},
                 {"max_component", st.max_component}};
  emit(j);
  return 0;
}

int run_match(const std::string& graph_file, std::uint64_t seed_arg, std::optional<unsigned> tau,
              std::optional<unsigned> kwise, const std::vector<long long>& vertices, bool all,
              double delta) {
  const ExplicitGraph g = load_graph(graph_file);
  const std::uint64_t seed = effective_seed(seed_arg);
  MisConfig cfg = line_graph_mis_config(std::max<std::size_t>(1, g.vertex_count()),
                                        g.degree_bound(), delta);
  cfg.tau = std::min(cfg.tau, DesireSum::kMaxRound);
  if (tau) cfg.tau = *tau;
  MatchingLca<ExplicitGraph> lca(g, g.vertex_count(), make_tape(seed, kwise), cfg);
  std::vector<Vertex> picks;
  for (long long v : vertices) {
    if (v < 0 || static_cast<std::uint64_t>(v) >= g.vertex_count())
      throw ArgError("vertex out of range");
    picks.push_back(static_cast<Vertex>(v));
  }
  if (all)
    for (Vertex v = 0; v < g.vertex_count(); ++v) picks.push_back(v);
  if (picks.empty()) throw ArgError("give --vertex <v> or --all");
  std::ostringstream out;
  try {
    for (Vertex v : picks) out << v << ' ' << lca.partner(v) << '\n';
  } catch (const ComponentTooLarge& e) {
    std::cerr << "stage failure: " << e.what() << '\n';
    return 3;
  }
  std::cout << out.str();
  return 0;
}

// ---- test-mono ------------------------------------------------------------

int run_test_mono(unsigned n, const std::string& function, double eps, const std::string& poset_file,
                  double trials_delta, std::uint64_t seed_arg, std::uint64_t function_seed,
                  const SorterOptions& so, const std::vector<std::string>& args) {
  Json j = header("test-mono", effective_seed(seed_arg), args);
  const FunctionSpec spec = parse_function_spec(function);
  TesterConfig tc;
  tc.sorter = so.config();
  TestVerdict v;
  if (!poset_file.empty()) {
    std::ifstream in(poset_file);
    if (!in) throw ArgError("cannot open poset file " + poset_file);
    const Poset poset = read_poset(in);
    const Labels labels = materialize(poset, poset_function(poset, spec, function_seed));
    v = tolerant_test_poset(poset, LabelsView{&labels}, eps, uniform_sampler(poset), trials_delta,
                            j["seed"], tc);
    j["tester"] = "poset";
  } else {
    if (n < 1 || n > kMaxImplicitDimension) throw ArgError("--n must be in 1..24");
    v = tolerant_test_cube(n, cube_function(n, spec, function_seed), eps, trials_delta, j["seed"],
                           tc);
    j["tester"] = "cube";
  }
  j["verdict"] = v.accept ? "Accept" : "Reject";
  j["estimate"] = v.estimate;
  j["threshold"] = v.threshold;
  j["samples_used"] = v.samples_used;
  j["runs"] = v.runs;
  j["stage_retries"] = v.stage_retries;
  emit(j);
  return v.accept ? 0 : 1;
}

// ---- learn ------------------------------------------------------------------

int run_learn(unsigned n, const std::string& target, double eps, bool agnostic, double noise,
              std::optional<std::size_t> samples, std::uint64_t seed_arg,
              const SorterOptions& so, const std::vector<std::string>& args) {
  if (n < 1 || n > kMaxLearnDimension) throw ArgError("--n must be in 1..20");
  Json j = header("learn", effective_seed(seed_arg), args);
  const std::uint64_t seed = j["seed"];
  const auto g = cube_function(n, parse_function_spec(target));
  const std::size_t need = lowdegree_required_samples(n, eps / 10, agnostic);
  const auto data = draw_samples(n, g, samples.value_or(need), noise, derive_seed(seed, 11));
  const LearnerOutput out = agnostic
                                ? learn_monotone_agnostic(data, n, eps, seed, {}, so.config())
                                : learn_monotone_proper(data, n, eps, seed, {}, so.config());
  const std::uint64_t size = std::uint64_t{1} << n;
  std::size_t differ = 0;
  for (std::uint64_t x = 0; x < size; ++x) differ += out(x) != g(x);
  std::size_t sample_err = 0;
  for (auto [x, y] : data) sample_err += out(x) != y;
  j["n"] = n;
  j["eps"] = eps;
  j["agnostic"] = agnostic;
  j["noise"] = noise;
  j["degree"] = out.degree;
  j["samples_used"] = out.samples_used;
  j["corrector_seed"] = out.seed;
  j["band"] = {{"lo", out.band.lo}, {"hi", out.band.hi}};
  j["monotone_certified"] = out.monotone_certified;
  j["error_vs_target"] = double(differ) / double(size);
  j["error_on_samples"] = data.empty() ? 0.0 : double(sample_err) / double(data.size());
  j["stage_retries"] = out.stage_retries;
  emit(j);
  return 0;
}

// ---- bench ---------------------------------------------------------------------

int run_bench(const std::vector<unsigned>& dims, double eps, double noise, std::size_t queries,
              std::uint64_t seed_arg, bool csv, const SorterOptions& so,
              const std::vector<std::string>& args) {
  Json j = header("bench", effective_seed(seed_arg), args);
  Json rows = Json::array();
  for (unsigned n : dims) {
    const BenchRow r = probe_bench(n, eps, noise, queries, derive_seed(j["seed"], n), so.config());
    Json stages = Json::array();
    for (const auto& s : r.stages)
      stages.push_back({{"stage", s.stage},
                        {"k", s.k},
                        {"mean_label_evals", s.mean_label_evals},
                        {"mean_b_neighborhoods", s.mean_b_neighborhoods},
                        {"mean_partner_queries", s.mean_partner_queries},
                        {"mean_tape_bits", s.mean_tape_bits},
                        {"blowup", s.blowup}});
    rows.push_back({{"n", n},
                    {"size", r.size},
                    {"height", r.height},
                    {"degree_bound", r.degree_bound},
                    {"tau", r.tau},
                    {"queries", r.queries},
                    {"failed_queries", r.failed_queries},
                    {"max_probes", r.max_probes},
                    {"mean_probes", r.mean_probes},
                    {"max_poset_probes", r.max_poset_probes},
                    {"max_label_probes", r.max_label_probes},
                    {"max_tape_bits", r.max_tape_bits},
                    {"sublinear", r.max_probes < r.size},
                    {"per_query", r.per_query},
                    {"stage_blowup", stages}});
  }
  if (csv) {
    std::cout << "n,size,height,queries,max_probes,mean_probes,stage,k,mean_label_evals,blowup\n";
    for (const auto& r : rows)
      for (const auto& s : r["stage_blowup"])
        std::cout << r["n"] << ',' << r["size"] << ',' << r["height"] << ',' << r["queries"] << ','
                  << r["max_probes"] << ',' << r["mean_probes"].get<double>() << ',' << s["stage"]
                  << ',' << s["k"] << ',' << s["mean_label_evals"].get<double>() << ','
                  << s["blowup"].get<double>() << '\n';
    return 0;
  }
  j["eps"] = eps;
  j["noise"] = noise;
  j["rows"] = rows;
  emit(j);
  return 0;
}

// ---- gen ---------------------------------------------------------------------------

int run_gen(std::optional<std::size_t> dag, double edge_prob, std::optional<std::size_t> graph,
            std::size_t max_degree, double mean_degree, std::uint64_t seed_arg) {
  const std::uint64_t seed = effective_seed(seed_arg);
  if (dag) {
    write_poset(std::cout, random_dag(*dag, edge_prob, seed));
  } else if (graph) {
    write_graph(std::cout, random_bounded_degree_graph(*graph, max_degree, mean_degree, seed));
  } else {
    throw ArgError("give --random-dag <N> or --random-graph <N>");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local computation algorithms for sorting labels on posets"};
  app.require_subcommand(1);
  std::vector<std::string> args(argv + 1, argv + argc);

  std::uint64_t seed = 1;
  auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "Master seed (POSET_LCA_SEED overrides)");
  };

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a random poset or graph file");
  std::optional<std::size_t> gen_dag, gen_graph;
  double edge_prob = 0.1, mean_degree = 3.0;
  std::size_t max_degree = 6;
  gen->add_option("--random-dag", gen_dag, "Random poset on N elements");
  gen->add_option("--edge-prob", edge_prob, "Pair probability (low id -> high id)")
      ->check(CLI::Range(0.0, 1.0));
  gen->add_option("--random-graph", gen_graph, "Random bounded-degree graph on N vertices");
  gen->add_option("--max-degree", max_degree);
  gen->add_option("--mean-degree", mean_degree);
  add_seed(gen);

  // sort / correct
  PosetOptions sort_po, correct_po;
  SorterOptions sort_so, correct_so, test_so, learn_so, bench_so;
  std::vector<long long> queries;
  bool all = false, global = false, global_check = false;
  std::string report_path;
  auto* sort = app.add_subcommand("sort", "Sort labels with the local sorter");
  auto* correct = app.add_subcommand("correct", "Monotonicity corrector (same machinery as sort)");
  for (auto [sub, po, so] : {std::tuple{sort, &sort_po, &sort_so},
                             std::tuple{correct, &correct_po, &correct_so}}) {
    po->add(sub);
    so->add(sub);
    add_seed(sub);
    sub->add_option("--query", queries, "Element(s) to query");
    sub->add_flag("--all", all, "Read out every element");
    sub->add_flag("--global", global, "Global sort with the seed's LCA matchings");
    sub->add_flag("--global-check", global_check, "Compare the local read-out with the global sort");
    sub->add_option("--report", report_path, "Write the probe report JSON here");
  }

  // mis / match
  std::string graph_file;
  std::optional<unsigned> g_tau, g_kwise;
  std::vector<long long> g_vertices;
  bool g_all = false;
  double g_delta = 0.1;
  auto* mis = app.add_subcommand("mis", "Maximal independent set LCA");
  auto* match = app.add_subcommand("match", "Maximal matching LCA");
  for (auto* sub : {mis, match}) {
    sub->add_option("--graph", graph_file, "Graph file (N, then 'u v' per edge)")->required();
    sub->add_option("--tau", g_tau)->check(CLI::Range(1u, 120u));
    sub->add_option("--exact-kwise", g_kwise);
    sub->add_flag("--all", g_all);
    sub->add_option("--delta", g_delta)->check(CLI::Range(1e-12, 1.0));
    add_seed(sub);
  }
  mis->add_option("--query", g_vertices);
  match->add_option("--vertex", g_vertices);

  // test-mono
  unsigned t_n = 0;
  std::string t_function, t_poset;
  double t_eps = 0.25, t_delta = 1.0 / 3.0;
  std::uint64_t t_fseed = 0;
  auto* test = app.add_subcommand("test-mono", "Tolerant monotonicity tester");
  test->add_option("--n", t_n, "Cube dimension");
  test->add_option("--function", t_function)->required();
  test->add_option("--eps", t_eps)->check(CLI::Range(1e-9, 1.0));
  test->add_option("--poset", t_poset, "Test over this poset instead of the cube");
  test->add_option("--trials-delta", t_delta, "Overall failure probability");
  test->add_option("--function-seed", t_fseed);
  test_so.add(test);
  add_seed(test);

  // learn
  unsigned l_n = 0;
  std::string l_target;
  double l_eps = 0.2, l_noise = 0;
  bool l_agnostic = false;
  std::optional<std::size_t> l_samples;
  auto* learn = app.add_subcommand("learn", "Proper learner for monotone functions");
  learn->add_option("--n", l_n)->required();
  learn->add_option("--target", l_target)->required();
  learn->add_option("--eps", l_eps)->check(CLI::Range(1e-9, 1.0));
  learn->add_flag("--agnostic", l_agnostic);
  learn->add_option("--noise", l_noise)->check(CLI::Range(0.0, 0.5));
  learn->add_option("--samples", l_samples, "Sample count (default: the learner's requirement)");
  learn_so.add(learn);
  add_seed(learn);

  // bench
  std::vector<unsigned> b_dims{10, 12, 14};
  double b_eps = 0.2, b_noise = 0.001;
  std::size_t b_queries = 200;
  bool b_csv = false;
  auto* bench = app.add_subcommand("bench", "Per-query probe counts on truncated hypercubes");
  bench->add_option("--n", b_dims, "Dimensions")->delimiter(',');
  bench->add_option("--eps", b_eps)->check(CLI::Range(1e-9, 1.0));
  bench->add_option("--noise", b_noise, "Label flip rate on top of majority")
      ->check(CLI::Range(0.0, 1.0));
  bench->add_option("--queries", b_queries);
  bench->add_flag("--csv", b_csv, "Emit the per-stage table as CSV");
  bench_so.add(bench);
  add_seed(bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*gen) return run_gen(gen_dag, edge_prob, gen_graph, max_degree, mean_degree, seed);
    if (*sort)
      return run_sort("sort", sort_po, sort_so, seed, queries, all, global, global_check,
                      report_path, args);
    if (*correct)
      return run_sort("correct", correct_po, correct_so, seed, queries, all, global, global_check,
                      report_path, args);
    if (*mis) return run_mis(graph_file, seed, g_tau, g_kwise, g_vertices, g_all, g_delta, args);
    if (*match) return run_match(graph_file, seed, g_tau, g_kwise, g_vertices, g_all, g_delta);
    if (*test)
      return run_test_mono(t_n, t_function, t_eps, t_poset, t_delta, seed, t_fseed, test_so, args);
    if (*learn)
      return run_learn(l_n, l_target, l_eps, l_agnostic, l_noise, l_samples, seed, learn_so, args);
    if (*bench) return run_bench(b_dims, b_eps, b_noise, b_queries, seed, b_csv, bench_so, args);
  } catch (const StageFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const ArgError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::length_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
