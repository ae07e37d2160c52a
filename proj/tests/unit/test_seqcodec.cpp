#include <gtest/gtest.h>

#include "pdanet/error.hpp"
#include "pdanet/graph.hpp"
#include "pdanet/pda.hpp"
#include "pdanet/seqcodec.hpp"

using namespace pdanet;

TEST(Adjacency, FromPlacement) {
  const AdjacencyMatrix a = placement_to_adjacency(1, 3, 3, {{0}, {1}, {2}});
  EXPECT_EQ(a.rows(), 3u);
  EXPECT_EQ(a.cols(), 3u);
  EXPECT_EQ(a.ones(), 6u);
  EXPECT_EQ(a.at(1, 1), Link::Inf);
  EXPECT_EQ(a.at(1, 0), Link::One);
  EXPECT_EQ(a, adjacency_of(construct_mn_pda(3, 1)));
}

TEST(Adjacency, InvalidPlacements) {
  EXPECT_THROW(placement_to_adjacency(1, 3, 3, {{0}, {1}}), InvalidPlacement);
  EXPECT_THROW(placement_to_adjacency(1, 3, 3, {{0}, {1, 2}, {2}}), InvalidPlacement);
  EXPECT_THROW(placement_to_adjacency(1, 3, 3, {{0}, {3}, {2}}), InvalidPlacement);
  EXPECT_THROW(placement_to_adjacency(2, 3, 1, {{1, 1}}), InvalidPlacement);
}

TEST(EdgeSequence, ColumnMajorMnThreeOne) {
  const EdgeSequence e = extract_edge_sequence(adjacency_of(construct_mn_pda(3, 1)));
  const EdgeSequence expect{{1, 0}, {2, 0}, {0, 1}, {2, 1}, {0, 2}, {1, 2}};
  EXPECT_EQ(e, expect);
  const EdgeSequence rm = extract_edge_sequence(adjacency_of(construct_mn_pda(3, 1)), SequenceOrder::RowMajor);
  const EdgeSequence expect_rm{{0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 1}};
  EXPECT_EQ(rm, expect_rm);
}

TEST(EdgeSequence, LengthIsKTimesFMinusZ) {
  for (std::size_t k = 2; k <= 6; ++k) {
    for (std::size_t t = 1; t < k; ++t) {
      const Pda p = construct_mn_pda(k, t);
      EXPECT_EQ(extract_edge_sequence(adjacency_of(p)).size(), p.k() * (p.f() - p.z()));
    }
  }
}

TEST(Assemble, RebuildsTheArray) {
  const Pda p = construct_mn_pda(4, 2);
  const AdjacencyMatrix a = adjacency_of(p);
  const EdgeSequence e = extract_edge_sequence(a);
  const ColorSequence c = colors_along(p.grid(), e);
  EXPECT_EQ(c, (ColorSequence{1, 2, 3, 1, 2, 4, 1, 3, 4, 2, 3, 4}));
  EXPECT_EQ(assemble_array(a, e, c), p.grid());
}

TEST(Assemble, Mismatches) {
  const AdjacencyMatrix a = adjacency_of(construct_mn_pda(3, 1));
  const EdgeSequence e = extract_edge_sequence(a);
  EXPECT_THROW(assemble_array(a, e, {1, 2, 3}), LengthMismatch);
  EdgeSequence dup = e;
  dup[1] = dup[0];
  EXPECT_THROW(assemble_array(a, dup, {1, 2, 1, 3, 2, 3}), LengthMismatch);
  EdgeSequence star = e;
  star[0] = {0, 0};
  EXPECT_THROW(assemble_array(a, star, {1, 2, 1, 3, 2, 3}), LengthMismatch);
}

TEST(Canonical, FirstOccurrenceRenumbering) {
  EXPECT_EQ(canonical_colors({5, 3, 5, 9, 3}), (ColorSequence{1, 2, 1, 3, 2}));
  EXPECT_TRUE(is_canonical({1, 2, 1, 3}));
  EXPECT_FALSE(is_canonical({2, 1}));
  EXPECT_FALSE(is_canonical({1, 3}));
  EXPECT_TRUE(is_canonical({}));
}

TEST(TrainingPairs, FromPdaAndJson) {
  const TrainingPair pair = make_training_pair(construct_mn_pda(3, 1));
  EXPECT_EQ(pair.k, 3u);
  EXPECT_EQ(pair.f, 3u);
  EXPECT_EQ(pair.z, 1u);
  EXPECT_EQ(pair.colors, (ColorSequence{1, 2, 1, 3, 2, 3}));
  const std::string line = format_training_pair(pair);
  EXPECT_EQ(line, R"({"K":3,"F":3,"Z":1,"edges":[[2,1],[3,1],[1,2],[3,2],[1,3],[2,3]],"colors":[1,2,1,3,2,3]})");
  EXPECT_EQ(parse_training_pair(line), pair);
  EXPECT_EQ(pair.adjacency(), adjacency_of(construct_mn_pda(3, 1)));
}

TEST(TrainingPairs, CorpusRoundTripAndErrors) {
  std::vector<TrainingPair> corpus;
  for (std::size_t k = 2; k <= 5; ++k) corpus.push_back(make_training_pair(construct_mn_pda(k, 1)));
  const std::string text = format_corpus(corpus);
  EXPECT_EQ(parse_corpus(text), corpus);
  EXPECT_EQ(parse_corpus("\n" + text + "\n\n"), corpus);
  EXPECT_TRUE(parse_corpus("").empty());
  try {
    parse_corpus(format_training_pair(corpus[0]) + "\n{\"K\":2}\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse_corpus(R"({"K":2,"F":2,"Z":1,"edges":[[3,1]],"colors":[1]})"), ParseError);
  EXPECT_THROW(parse_corpus(R"({"K":2,"F":2,"Z":1,"edges":[[1,1]],"colors":[1,2]})"), ParseError);
}
