#pragma once

// Artifacts pinned by the golden files in tests/golden.

#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "pdanet/graph.hpp"
#include "pdanet/pda.hpp"
#include "pdanet/pda_io.hpp"
#include "pdanet/seqcodec.hpp"
#include "pdanet/train.hpp"

namespace golden {

inline std::string path(const std::string& name) { return std::string(PDANET_GOLDEN_DIR) + "/" + name; }

inline std::optional<std::string> read(const std::string& name) {
  std::ifstream in(path(name), std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string corpus_text() {
  using namespace pdanet;
  const auto g4 = pda_to_graph(construct_mn_pda(4, 1));
  const auto g6 = pda_to_graph(construct_mn_pda(4, 2));
  std::vector<TrainingPair> corpus;
  for (std::uint64_t i = 0; i < 8; ++i) {
    const auto& g = i % 2 ? g6 : g4;
    corpus.push_back(make_training_pair(graph_to_pda(subsample(g, 1 + i % 2, 100 + i))));
  }
  return format_corpus(corpus);
}

inline std::string log_text() {
  using namespace pdanet;
  neural::TrainConfig c;
  c.model.hidden = 5;
  c.model.embed = 4;
  c.model.max_rows = 6;
  c.model.max_cols = 4;
  c.supervised_epochs = 3;
  c.reinforce_epochs = 2;
  c.batch_size = 3;
  c.seed = 12;
  return neural::format_log_csv(neural::train(parse_corpus(corpus_text()), c).log);
}

}  // namespace golden
