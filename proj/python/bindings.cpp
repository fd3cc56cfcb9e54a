#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <functional>

#include "ctxpref/agents.hpp"
#include "ctxpref/knowledge.hpp"
#include "ctxpref/ltl.hpp"
#include "ctxpref/simulator.hpp"
#include "ctxpref/tableaux.hpp"
#include "ctxpref/world_graph.hpp"

namespace py = pybind11;
using namespace ctxpref;

namespace {

ltl::Formula as_formula(const py::object& f) {
  if (py::isinstance<py::str>(f)) return ltl::parse(f.cast<std::string>());
  return f.cast<ltl::Formula>();
}

py::dict stats_dict(const sim::Stats& s) {
  py::dict d;
  d["decisions"] = s.decisions;
  d["trips"] = s.trips;
  d["contradictions_resolved"] = s.contradictions_resolved;
  d["suggestions_followed"] = s.suggestions_followed;
  d["followers_alive"] = s.followers_alive;
  return d;
}

py::list store_list(const knowledge::SpecStore& store) {
  py::list out;
  for (const auto& t : store.triples()) out.append(py::make_tuple(t.user, ltl::print(t.formula), t.r));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Temporal preference reasoning for parking: prover, graph tools, mining and simulation.";

  auto value_error = py::reinterpret_borrow<py::object>(PyExc_ValueError);
  // Kept alive for the life of the interpreter.
  static const py::handle parse_error = py::exception<ltl::ParseError>(m, "ParseError", value_error).release();
  py::register_exception<world::GraphError>(m, "GraphError", value_error);
  py::register_exception<knowledge::KnowledgeError>(m, "KnowledgeError", value_error);
  py::register_exception<agents::AgentError>(m, "AgentError", value_error);
  py::register_exception<sim::ScenarioError>(m, "ScenarioError", value_error);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ltl::ParseError& e) {
      const auto message = std::string(e.what()) + " at offset " + std::to_string(e.offset());
      PyErr_SetString(parse_error.ptr(), message.c_str());
    }
  });

  py::class_<ltl::Formula>(m, "Formula")
      .def(py::init([](const std::string& text) { return ltl::parse(text); }), py::arg("text"))
      .def("__str__", [](const ltl::Formula& f) { return ltl::print(f); })
      .def("__repr__", [](const ltl::Formula& f) { return "Formula('" + ltl::print(f) + "')"; })
      .def("__eq__", [](const ltl::Formula& a, const ltl::Formula& b) { return a == b; })
      .def("__hash__", [](const ltl::Formula& f) { return std::hash<std::string>{}(ltl::print(f)); })
      .def_property_readonly("connectives", &ltl::Formula::connectives)
      .def_property_readonly("temporal_depth", &ltl::Formula::temporal_depth)
      .def("atoms", [](const ltl::Formula& f) { return ltl::atoms(f); })
      .def("nnf", [](const ltl::Formula& f) { return ltl::nnf(f); });

  m.def("parse", &ltl::parse, py::arg("text"));
  m.def("print_formula", &ltl::print, py::arg("formula"));

  m.def(
      "is_satisfiable",
      [](const py::object& f) {
        return tableaux::is_satisfiable(as_formula(f)) == tableaux::Satisfiability::Satisfiable;
      },
      py::arg("formula"));
  m.def(
      "is_valid", [](const py::object& f) { return tableaux::is_valid(as_formula(f)) == tableaux::Validity::Valid; },
      py::arg("formula"));
  m.def(
      "truth_tree",
      [](const py::object& f, const std::string& format) {
        return tableaux::export_tree(tableaux::build_tree(as_formula(f)), tableaux::parse_export_format(format));
      },
      py::arg("formula"), py::arg("format") = "ascii");
  m.def(
      "open_consequences",
      [](const py::object& f) {
        std::vector<std::pair<std::size_t, std::set<std::string>>> out;
        for (const auto& c : tableaux::open_consequences(tableaux::build_tree(as_formula(f)))) {
          out.emplace_back(c.branch, c.atoms);
        }
        return out;
      },
      py::arg("formula"));

  py::class_<world::WorldGraph>(m, "WorldGraph")
      .def(py::init([](const std::string& text) { return world::load_graph(text); }), py::arg("text") = "")
      .def("__str__", [](const world::WorldGraph& g) { return world::save_graph(g); })
      .def("__eq__", [](const world::WorldGraph& a, const world::WorldGraph& b) { return a == b; })
      .def("__contains__", &world::WorldGraph::has_node)
      .def("__len__", &world::WorldGraph::node_count)
      .def_property_readonly("edge_count", &world::WorldGraph::edge_count)
      .def("kind", [](const world::WorldGraph& g, const std::string& id) { return std::string(1, world::to_letter(g.kind(id))); })
      .def("nodes", [](const world::WorldGraph& g) {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& [id, node] : g.nodes()) out.emplace_back(id, std::string(1, world::to_letter(node.kind)));
        return out;
      })
      .def("edges", [](const world::WorldGraph& g) {
        std::vector<std::tuple<std::string, std::string, std::string>> out;
        for (const auto& e : g.edges()) out.emplace_back(e.from, e.to, e.label);
        return out;
      })
      .def("to_dot", [](const world::WorldGraph& g) { return world::to_dot(g); })
      .def("car_enters", &world::car_enters, py::arg("car"), py::arg("gate"))
      .def("car_moves", &world::car_moves, py::arg("car"), py::arg("node"))
      .def("car_exits", &world::car_exits, py::arg("car"))
      .def("car_position", &world::car_position, py::arg("car"))
      .def("occupant", &world::occupant, py::arg("spot"))
      .def("is_free", &world::is_free, py::arg("spot"))
      .def("nearest_free_spot", &world::nearest_free_spot, py::arg("source"))
      .def("check_invariants", &world::check_invariants);

  m.def(
      "split",
      [](const world::WorldGraph& g, std::size_t k) {
        const auto p = world::split(g, k);
        return py::make_tuple(p.parts, p.border_nodes);
      },
      py::arg("graph"), py::arg("k"));
  m.def(
      "glue",
      [](const std::vector<world::WorldGraph>& parts) {
        world::GraphPartition p;
        p.parts = parts;
        return world::glue(p);
      },
      py::arg("parts"));

  m.def(
      "mine",
      [](const std::string& events_csv, const world::WorldGraph& g, std::size_t threshold) {
        const auto trips = knowledge::reconstruct_trips(knowledge::load_events(events_csv), g);
        return store_list(knowledge::mine_store(trips, g, threshold));
      },
      py::arg("events_csv"), py::arg("graph"), py::arg("threshold") = knowledge::kDefaultNeverGateThreshold,
      "Mines (user, formula, r) triples from a user,node,timestamp CSV.");

  m.def(
      "simulate",
      [](const std::string& scenario_text, std::optional<bool> fallback_nearest) {
        auto s = sim::load_scenario(scenario_text);
        if (fallback_nearest) s.config.fallback_nearest = *fallback_nearest;
        const auto report = sim::run(s);
        py::list decisions;
        for (const auto& [at, d] : report.decisions) {
          py::dict entry;
          entry["at"] = at.to_iso();
          entry["user"] = d.user;
          entry["gate"] = d.gate;
          entry["suggestion"] = d.suggestion;
          entry["rationale"] = std::string(agents::to_string(d.rationale));
          entry["summary"] = d.summary();
          decisions.append(entry);
        }
        py::dict out;
        out["stats"] = stats_dict(report.stats);
        out["decisions"] = decisions;
        out["store"] = store_list(report.final_store);
        out["graph"] = report.final_graph;
        out["report"] = sim::format_report(report);
        return out;
      },
      py::arg("scenario_text"), py::arg("fallback_nearest") = py::none());

  m.def(
      "generate",
      [](const world::WorldGraph& g, std::uint64_t seed, std::size_t users, std::size_t trips, double affinity) {
        return sim::save_scenario(sim::generate(g, seed, {users, trips, affinity}));
      },
      py::arg("graph"), py::arg("seed") = 1, py::arg("users") = 1, py::arg("trips") = 9, py::arg("affinity") = 0.78);
}
