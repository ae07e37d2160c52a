#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pdanet/cachesim.hpp"
#include "pdanet/checkpoint.hpp"
#include "pdanet/error.hpp"
#include "pdanet/graph.hpp"
#include "pdanet/neural.hpp"
#include "pdanet/pda.hpp"
#include "pdanet/pda_io.hpp"
#include "pdanet/placement.hpp"
#include "pdanet/seqcodec.hpp"
#include "pdanet/train.hpp"

namespace py = pybind11;
using namespace pdanet;

namespace {

// Python sees arrays as lists of rows with 0 for a star.
Pda pda_from_rows(const std::vector<std::vector<int>>& rows) { return Pda::from_grid(Grid::from_rows(rows)); }

py::dict verify_rows(const std::vector<std::vector<int>>& rows, std::optional<std::size_t> z) {
  const VerifyReport r = verify(Grid::from_rows(rows), z);
  py::list violations;
  for (const Violation& v : r.violations) {
    py::list cells;
    for (const Cell& c : v.cells) cells.append(py::make_tuple(c.row + 1, c.col + 1));
    violations.append(py::dict(py::arg("condition") = to_string(v.condition), py::arg("cells") = cells,
                               py::arg("detail") = v.detail));
  }
  return py::dict(py::arg("valid") = r.valid, py::arg("z") = r.z, py::arg("s") = r.s,
                  py::arg("violations") = violations);
}

std::vector<std::tuple<std::size_t, std::size_t, std::optional<int>>> graph_edges(const BipartiteColoredGraph& g) {
  std::vector<std::tuple<std::size_t, std::size_t, std::optional<int>>> out;
  for (const Edge& e : g.edges()) out.emplace_back(e.k, e.f, e.color);
  return out;
}

}  // namespace

PYBIND11_MODULE(_pdanet, m) {
  m.doc() = "Placement delivery arrays: construction, verification, learned coloring and delivery simulation";

  // Translators run newest first, so the base class goes first.
  py::register_exception<Error>(m, "PdaError", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<InvalidParameter>(m, "InvalidParameter", PyExc_ValueError);
  py::register_exception<InvalidPda>(m, "InvalidPda", PyExc_ValueError);

  py::class_<Pda>(m, "Pda")
      .def(py::init(&pda_from_rows), py::arg("rows"))
      .def_property_readonly("k", &Pda::k)
      .def_property_readonly("f", &Pda::f)
      .def_property_readonly("z", &Pda::z)
      .def_property_readonly("s", &Pda::s)
      .def("rows", [](const Pda& p) { return p.grid().to_rows(); })
      .def("rate", [](const Pda& p) { return rate(p).delivery_rate.str(); })
      .def("to_text", [](const Pda& p) { return format_pda_text(p); })
      .def("__eq__", [](const Pda& a, const Pda& b) { return a == b; })
      .def("__repr__", [](const Pda& p) {
        return "<Pda K=" + std::to_string(p.k()) + " F=" + std::to_string(p.f()) + " Z=" + std::to_string(p.z()) +
               " S=" + std::to_string(p.s()) + ">";
      });

  m.def("construct_mn", &construct_mn_pda, py::arg("k"), py::arg("t"));
  m.def("verify", &verify_rows, py::arg("rows"), py::arg("z") = std::nullopt);
  m.def("parse_pda", [](const std::string& text) { return to_pda(parse_pda_text(text)); }, py::arg("text"));
  m.def("canonicalize", [](const std::vector<std::vector<int>>& rows) {
    return canonicalize(Grid::from_rows(rows)).to_rows();
  });

  py::class_<BipartiteColoredGraph>(m, "Graph")
      .def_property_readonly("k_side", &BipartiteColoredGraph::k_side)
      .def_property_readonly("f_side", &BipartiteColoredGraph::f_side)
      .def("edges", &graph_edges)
      .def("color_count", &BipartiteColoredGraph::color_count)
      .def("uncolored", &BipartiteColoredGraph::uncolored)
      .def("is_strong_coloring", &is_strong_coloring)
      .def("to_json", &format_graph_json);

  m.def("pda_to_graph", py::overload_cast<const Pda&>(&pda_to_graph), py::arg("pda"));
  m.def("graph_to_pda", &graph_to_pda, py::arg("graph"));
  m.def("parse_graph", &parse_graph_json, py::arg("text"));
  m.def("subsample", &subsample, py::arg("graph"), py::arg("delta"), py::arg("seed"));
  m.def(
      "greedy_color",
      [](const BipartiteColoredGraph& g, bool shuffled, std::uint64_t seed) {
        return greedy_strong_color(g, shuffled ? EdgeOrderPolicy::Shuffled : EdgeOrderPolicy::Lexicographic, seed);
      },
      py::arg("graph"), py::arg("shuffled") = false, py::arg("seed") = 0);

  py::class_<TrainingPair>(m, "TrainingPair")
      .def_readonly("k", &TrainingPair::k)
      .def_readonly("f", &TrainingPair::f)
      .def_readonly("z", &TrainingPair::z)
      .def_property_readonly("edges",
                             [](const TrainingPair& p) {
                               std::vector<std::pair<std::size_t, std::size_t>> out;
                               for (const EdgePos& e : p.edges) out.emplace_back(e.row, e.col);
                               return out;
                             })
      .def_readonly("colors", &TrainingPair::colors)
      .def("to_json", &format_training_pair);
  m.def("training_pair", &make_training_pair, py::arg("pda"));
  m.def("parse_corpus", &parse_corpus, py::arg("text"));
  m.def("format_corpus", &format_corpus, py::arg("pairs"));

  py::class_<neural::ModelParams>(m, "Model")
      .def_static(
          "init",
          [](int hidden, int embed, int max_rows, int max_cols, std::uint64_t seed) {
            neural::ModelConfig c;
            c.hidden = hidden;
            c.embed = embed;
            c.max_rows = max_rows;
            c.max_cols = max_cols;
            c.seed = seed;
            return neural::ModelParams::init(c);
          },
          py::arg("hidden") = 16, py::arg("embed") = 16, py::arg("max_rows") = 16, py::arg("max_cols") = 8,
          py::arg("seed") = 1)
      .def_static("load", &neural::load_checkpoint, py::arg("path"))
      .def("save", [](const neural::ModelParams& p, const std::string& path) { neural::save_checkpoint(path, p); })
      .def("parameter_count", &neural::ModelParams::parameter_count);

  m.def(
      "color_placement",
      [](std::size_t k, std::size_t f, std::size_t z, const neural::ModelParams& params, bool mask, bool sample,
         std::uint64_t seed) {
        const AdjacencyMatrix adj = placement_to_adjacency(z, f, k, default_star_pattern(k, f, z));
        const neural::Episode ep = neural::rollout(
            adj, params, {sample ? neural::DecodeMode::Sample : neural::DecodeMode::Greedy, mask, seed});
        return py::make_tuple(ep.array.to_rows(), ep.reward == 1, ep.logprob);
      },
      py::arg("k"), py::arg("f"), py::arg("z"), py::arg("model"), py::arg("mask") = true, py::arg("sample") = false,
      py::arg("seed") = 0);

  m.def(
      "train",
      [](const std::vector<TrainingPair>& corpus, int supervised_epochs, int reinforce_epochs, int hidden,
         std::uint64_t seed) {
        neural::TrainConfig c;
        c.supervised_epochs = supervised_epochs;
        c.reinforce_epochs = reinforce_epochs;
        c.model.hidden = hidden;
        c.model.embed = hidden;
        c.seed = c.model.seed = seed;
        for (const TrainingPair& p : corpus) {
          c.model.max_rows = std::max(c.model.max_rows, static_cast<int>(p.f));
          c.model.max_cols = std::max(c.model.max_cols, static_cast<int>(p.k));
        }
        neural::TrainResult r = neural::train(corpus, c);
        return py::make_tuple(std::move(r.params), neural::format_log_csv(r.log));
      },
      py::arg("corpus"), py::arg("supervised_epochs") = 20, py::arg("reinforce_epochs") = 0, py::arg("hidden") = 16,
      py::arg("seed") = 1);

  m.def(
      "simulate",
      [](const Pda& p, std::size_t n_files, std::uint64_t seed) {
        const cachesim::Measurement r = cachesim::measure_all_demands(p, n_files, seed, 16);
        return py::dict(py::arg("delivery_rate") = r.delivery_rate.str(),
                        py::arg("uncoded_rate") = r.uncoded_rate.str(), py::arg("all_decoded") = r.all_decoded,
                        py::arg("trials") = r.trials.size());
      },
      py::arg("pda"), py::arg("n_files"), py::arg("seed") = 1);
}
