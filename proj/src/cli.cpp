#include "ctxpref/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ctxpref/knowledge.hpp"
#include "ctxpref/ltl.hpp"
#include "ctxpref/simulator.hpp"
#include "ctxpref/tableaux.hpp"
#include "ctxpref/world_graph.hpp"

namespace ctxpref::cli {

namespace {

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw InputError("cannot write " + path);
}

// Writes to the file when a path is given, else to `out`.
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    write_file(path, text);
  }
}

world::WorldGraph read_graph(const std::string& path) {
  try {
    return world::load_graph(read_file(path));
  } catch (const world::GraphError& e) {
    throw InputError(path + ": " + e.what());
  }
}

struct ProveArgs {
  std::string formula;
  bool valid = false;
  std::string tree;
};

struct SimulateArgs {
  std::string scenario;
  std::string output;
  std::string dot_graph;
  bool fallback_nearest = false;
  std::optional<std::size_t> threshold;
  std::optional<std::uint64_t> seed;
};

struct MineArgs {
  std::string events;
  std::string graph;
  std::string output;
  std::size_t threshold = knowledge::kDefaultNeverGateThreshold;
};

struct GraphArgs {
  std::string input;
  std::vector<std::string> parts;
  std::size_t k = 2;
  std::string output;
};

struct GenerateArgs {
  std::string graph;
  std::uint64_t seed = 1;
  std::size_t users = 1;
  std::size_t trips = 9;
  double affinity = 0.78;
  std::string output;
};

int prove(const ProveArgs& a, std::ostream& out, std::ostream& err) {
  ltl::Formula f = ltl::Formula::atom("p");
  try {
    f = ltl::parse(a.formula);
  } catch (const ltl::ParseError& e) {
    err << "error: " << e.what() << " at offset " << e.offset();
    if (!e.expected().empty()) {
      err << " (expected";
      for (const auto& x : e.expected()) err << ' ' << x;
      err << ')';
    }
    err << '\n';
    return kUsage;
  }
  std::optional<tableaux::ExportFormat> format;
  if (!a.tree.empty()) format = tableaux::parse_export_format(a.tree);

  const auto checked = a.valid ? ltl::Formula::negation(f) : f;
  const auto tree = tableaux::build_tree(checked);
  bool positive = false;
  if (a.valid) {
    const auto v = tree.is_open() ? tableaux::Validity::NotValid : tableaux::Validity::Valid;
    positive = v == tableaux::Validity::Valid;
    out << tableaux::to_string(v) << '\n';
  } else {
    const auto s = tree.is_open() ? tableaux::Satisfiability::Satisfiable : tableaux::Satisfiability::Unsatisfiable;
    positive = s == tableaux::Satisfiability::Satisfiable;
    out << tableaux::to_string(s) << '\n';
  }
  if (format) out << tableaux::export_tree(tree, *format);
  return positive ? kOk : kNegative;
}

int simulate(const SimulateArgs& a, std::ostream& out) {
  sim::Scenario scenario;
  try {
    scenario = sim::load_scenario(read_file(a.scenario));
  } catch (const sim::ScenarioError& e) {
    throw InputError(a.scenario + ": " + e.what());
  }
  if (a.fallback_nearest) scenario.config.fallback_nearest = true;
  if (a.threshold) scenario.config.never_gate_threshold = *a.threshold;
  if (a.seed) scenario.config.rng_seed = *a.seed;
  sim::SimulationReport report;
  try {
    report = sim::run(scenario);
  } catch (const sim::ScenarioError& e) {
    throw InputError(a.scenario + ": " + e.what());
  }
  emit(a.output, sim::format_report(report), out);
  if (!a.dot_graph.empty()) write_file(a.dot_graph, world::to_dot(report.final_graph));
  return kOk;
}

int mine(const MineArgs& a, std::ostream& out) {
  const auto graph = read_graph(a.graph);
  try {
    const auto log = knowledge::load_events(read_file(a.events));
    const auto trips = knowledge::reconstruct_trips(log, graph);
    emit(a.output, knowledge::save_store(knowledge::mine_store(trips, graph, a.threshold)), out);
  } catch (const knowledge::KnowledgeError& e) {
    throw InputError(a.events + ": " + e.what());
  }
  return kOk;
}

int graph_split(const GraphArgs& a, std::ostream& out) {
  const auto g = read_graph(a.input);
  world::GraphPartition p;
  try {
    p = world::split(g, a.k);
  } catch (const world::GraphError& e) {
    throw InputError(e.what());
  }
  std::filesystem::create_directories(a.output);
  for (std::size_t i = 0; i < p.parts.size(); ++i) {
    const auto name = "part" + std::to_string(i + 1) + ".graph";
    write_file((std::filesystem::path(a.output) / name).string(), world::save_graph(p.parts[i]));
    out << name << ": " << p.parts[i].node_count() << " nodes, " << p.parts[i].edge_count() << " edges\n";
  }
  out << "border:";
  for (const auto& id : p.border_nodes) out << ' ' << id;
  out << '\n';
  return kOk;
}

int graph_glue(const GraphArgs& a, std::ostream& out) {
  world::GraphPartition p;
  for (const auto& path : a.parts) p.parts.push_back(read_graph(path));
  try {
    emit(a.output, world::save_graph(world::glue(p)), out);
  } catch (const world::GraphError& e) {
    throw InputError(e.what());
  }
  return kOk;
}

int generate(const GenerateArgs& a, std::ostream& out) {
  const auto g = read_graph(a.graph);
  try {
    emit(a.output, sim::save_scenario(sim::generate(g, a.seed, {a.users, a.trips, a.affinity})), out);
  } catch (const sim::ScenarioError& e) {
    throw InputError(e.what());
  }
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Context-aware parking preferences: prover, miner, graph tools and simulator", "ctxpref"};
  app.require_subcommand(1, 1);

  ProveArgs prove_args;
  auto* prove_cmd = app.add_subcommand("prove", "Decide satisfiability (or validity) of a formula");
  prove_cmd->add_option("formula", prove_args.formula, "Formula, e.g. \"g2 & (g2 -> F p010)\"")->required();
  prove_cmd->add_flag("--valid", prove_args.valid, "Check validity instead of satisfiability");
  prove_cmd->add_option("--tree", prove_args.tree, "Print the truth tree")
      ->check(CLI::IsMember({"ascii", "dot"}));

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "Replay a scenario through the agents");
  sim_cmd->add_option("scenario", sim_args.scenario, "Scenario file")->required();
  sim_cmd->add_option("-o,--output", sim_args.output, "Report file (default: stdout)");
  sim_cmd->add_option("--dot-graph", sim_args.dot_graph, "Also write the final graph as DOT");
  sim_cmd->add_flag("--fallback-nearest", sim_args.fallback_nearest,
                    "Offer the nearest free place when no learned place is free");
  sim_cmd->add_option("--threshold", sim_args.threshold, "Trips before never-used gates are asserted")
      ->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed", sim_args.seed, "Seed recorded in the report");

  MineArgs mine_args;
  auto* mine_cmd = app.add_subcommand("mine", "Mine specification triples from an event log");
  mine_cmd->add_option("events", mine_args.events, "Events CSV (user,node,timestamp)")->required();
  mine_cmd->add_option("graph", mine_args.graph, "Graph file")->required();
  mine_cmd->add_option("-o,--output", mine_args.output, "Store file (default: stdout)");
  mine_cmd->add_option("--threshold", mine_args.threshold, "Trips before never-used gates are asserted")
      ->check(CLI::PositiveNumber);

  GraphArgs graph_args;
  auto* graph_cmd = app.add_subcommand("graph", "Graph tools");
  graph_cmd->require_subcommand(1, 1);
  auto* split_cmd = graph_cmd->add_subcommand("split", "Split a graph into k parts");
  split_cmd->add_option("graph", graph_args.input, "Graph file")->required();
  split_cmd->add_option("-k,--parts", graph_args.k, "Number of parts")->check(CLI::PositiveNumber);
  split_cmd->add_option("-o,--output", graph_args.output, "Directory for part files")->required();
  auto* glue_cmd = graph_cmd->add_subcommand("glue", "Glue part files back together");
  glue_cmd->add_option("parts", graph_args.parts, "Part files")->required();
  glue_cmd->add_option("-o,--output", graph_args.output, "Graph file (default: stdout)");
  auto* dot_cmd = graph_cmd->add_subcommand("dot", "Export a graph as DOT");
  dot_cmd->add_option("graph", graph_args.input, "Graph file")->required();
  dot_cmd->add_option("-o,--output", graph_args.output, "DOT file (default: stdout)");

  GenerateArgs gen_args;
  auto* gen_cmd = app.add_subcommand("generate", "Generate a synthetic scenario over a graph");
  gen_cmd->add_option("graph", gen_args.graph, "Graph file")->required();
  gen_cmd->add_option("--seed", gen_args.seed, "Random seed");
  gen_cmd->add_option("--users", gen_args.users, "Number of drivers")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--trips", gen_args.trips, "Trips per driver")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--affinity", gen_args.affinity, "Probability of choosing the favourite place")
      ->check(CLI::Range(0.0, 1.0));
  gen_cmd->add_option("-o,--output", gen_args.output, "Scenario file (default: stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*prove_cmd) return prove(prove_args, out, err);
    if (*sim_cmd) return simulate(sim_args, out);
    if (*mine_cmd) return mine(mine_args, out);
    if (*split_cmd) return graph_split(graph_args, out);
    if (*glue_cmd) return graph_glue(graph_args, out);
    if (*dot_cmd) {
      emit(graph_args.output, world::to_dot(read_graph(graph_args.input)), out);
      return kOk;
    }
    if (*gen_cmd) return generate(gen_args, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kUsage;
}

}  // namespace ctxpref::cli
