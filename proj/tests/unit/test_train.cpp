#include <gtest/gtest.h>

#include <set>

#include "pdanet/error.hpp"
#include "pdanet/graph.hpp"
#include "pdanet/pda.hpp"
#include "pdanet/train.hpp"

using namespace pdanet;
using namespace pdanet::neural;

namespace {

std::vector<TrainingPair> small_corpus(std::size_t n, std::uint64_t seed) {
  const auto g = pda_to_graph(construct_mn_pda(4, 1));
  std::vector<TrainingPair> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(make_training_pair(graph_to_pda(subsample(g, 1 + i % 2, seed + i))));
  return out;
}

TrainConfig quick_config() {
  TrainConfig c;
  c.model.hidden = 6;
  c.model.embed = 6;
  c.model.max_rows = 4;
  c.model.max_cols = 4;
  c.supervised_epochs = 4;
  c.reinforce_epochs = 2;
  c.batch_size = 4;
  c.seed = 3;
  return c;
}

}  // namespace

TEST(Train, OneSampleIsMemorized) {
  const std::vector<TrainingPair> corpus{make_training_pair(Pda::from_grid(Grid::from_rows({{0, 1}, {1, 0}})))};
  TrainConfig c = quick_config();
  c.model.max_rows = 2;
  c.model.max_cols = 2;
  c.supervised_epochs = 50;
  c.reinforce_epochs = 0;
  c.learning_rate = 0.5;
  const TrainResult r = train(corpus, c);
  ASSERT_EQ(r.log.size(), 51u);
  EXPECT_LT(r.log.back().loss, r.log.front().loss);
  EXPECT_EQ(r.log.front().phase, "init");
}

TEST(Train, SeededRunsAreIdentical) {
  const auto corpus = small_corpus(12, 1);
  const TrainResult a = train(corpus, quick_config());
  const TrainResult b = train(corpus, quick_config());
  EXPECT_EQ(format_log_csv(a.log), format_log_csv(b.log));
  EXPECT_EQ(a.log.size(), 7u);
  EXPECT_EQ(a.log.back().phase, "reinforce");
}

TEST(Train, ThreadCountDoesNotChangeResults) {
  const auto corpus = small_corpus(12, 2);
  TrainConfig c = quick_config();
  const TrainResult a = train(corpus, c);
  c.threads = 3;
  const TrainResult b = train(corpus, c);
  EXPECT_EQ(format_log_csv(a.log), format_log_csv(b.log));
}

TEST(Train, Errors) {
  EXPECT_THROW(train({}, quick_config()), InvalidBatch);
  TrainConfig c = quick_config();
  c.batch_size = 0;
  EXPECT_THROW(train(small_corpus(2, 1), c), InvalidParameter);
}

TEST(Train, DivergenceKeepsLastGoodParameters) {
  TrainConfig c = quick_config();
  c.learning_rate = std::numeric_limits<double>::infinity();
  try {
    train(small_corpus(4, 1), c);
    FAIL();
  } catch (const DivergenceError& e) {
    EXPECT_TRUE(e.last_good().all_finite());
    EXPECT_EQ(e.log().size(), 1u);
  }
}

TEST(Holdout, NoSampleLeaks) {
  auto corpus = small_corpus(30, 5);
  corpus.push_back(corpus[0]);
  corpus.push_back(corpus[1]);
  const auto [tr, ho] = split_holdout(corpus, 0.25, 7);
  EXPECT_EQ(tr.size() + ho.size(), corpus.size());
  EXPECT_FALSE(ho.empty());
  std::set<std::string> seen;
  for (const auto& p : tr) seen.insert(format_training_pair(p));
  for (const auto& p : ho) EXPECT_EQ(seen.count(format_training_pair(p)), 0u);
}

TEST(Holdout, SingleDistinctSampleStaysInTraining) {
  const auto one = small_corpus(1, 1);
  const std::vector<TrainingPair> corpus{one[0], one[0]};
  const auto [tr, ho] = split_holdout(corpus, 0.5, 1);
  EXPECT_EQ(tr.size(), 2u);
  EXPECT_TRUE(ho.empty());
}

TEST(ValidRate, MaskOnIsPerfect) {
  const auto corpus = small_corpus(10, 3);
  ModelConfig mc;
  mc.hidden = 4;
  mc.embed = 4;
  mc.max_rows = 4;
  mc.max_cols = 4;
  const ModelParams m = ModelParams::init(mc);
  EXPECT_EQ(valid_rate(corpus, m, true), 1.0);
  const double off = valid_rate(corpus, m, false);
  EXPECT_GE(off, 0.0);
  EXPECT_LE(off, 1.0);
}

TEST(LogCsv, Format) {
  const std::vector<LogRow> log{{0, "init", 1.5, -1.0, 0.25, 0}, {1, "supervised", 0.75, 0.5, 0.5, 12}};
  EXPECT_EQ(format_log_csv(log),
            "epoch,phase,loss,mean_reward,valid_rate,wall_ms\n"
            "0,init,1.500000000,-1.000000,0.250000,0\n"
            "1,supervised,0.750000000,0.500000,0.500000,12\n");
}
