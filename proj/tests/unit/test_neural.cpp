#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "gradcheck.hpp"
#include "oracles.hpp"
#include "pdanet/error.hpp"
#include "pdanet/graph.hpp"
#include "pdanet/neural.hpp"
#include "pdanet/placement.hpp"
#include "pdanet/random.hpp"

using namespace pdanet;
using namespace pdanet::neural;

namespace {

ModelConfig small_config(int h, int d, int rows = 6, int cols = 6, std::uint64_t seed = 1) {
  ModelConfig c;
  c.hidden = h;
  c.embed = d;
  c.max_rows = rows;
  c.max_cols = cols;
  c.seed = seed;
  return c;
}

// Larger weights than the default init so that gradients are not tiny.
ModelParams random_model(const ModelConfig& c, double spread = 6.0) {
  ModelParams p = ModelParams::init(c);
  p.scale(spread);
  return p;
}

double sig(double v) { return 1.0 / (1.0 + std::exp(-v)); }

// Loop-based GRU step written from the equations.
std::vector<double> ref_gru(const std::vector<double>& x, const std::vector<double>& y, const GruParams& p) {
  const std::size_t h = y.size();
  std::vector<double> out(h);
  for (std::size_t i = 0; i < h; ++i) {
    double ar = p.br[i];
    double az = p.bz[i];
    double as = p.bs[i];
    double ws = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      ar += p.ur(i, j) * x[j];
      az += p.uz(i, j) * x[j];
      as += p.us(i, j) * x[j];
    }
    for (std::size_t j = 0; j < h; ++j) {
      ar += p.wr(i, j) * y[j];
      az += p.wz(i, j) * y[j];
      ws += p.ws(i, j) * y[j];
    }
    const double r = sig(ar);
    const double z = sig(az);
    const double n = std::tanh(as + r * ws);
    out[i] = z * y[i] + (1.0 - z) * n;
  }
  return out;
}

Vector to_vec(const std::vector<double>& v) { return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())); }

// A valid training pair on a random placement with 1 <= L <= max_len.
TrainingPair random_pair(std::mt19937_64& gen, std::size_t max_len) {
  while (true) {
    const std::size_t k = 1 + gen() % 3;
    const std::size_t f = 1 + gen() % 4;
    const std::size_t z = gen() % f;
    const std::size_t len = k * (f - z);
    if (len == 0 || len > max_len) continue;
    std::vector<Edge> edges;
    const auto adj = placement_to_adjacency(z, f, k, cyclic_star_pattern(k, f, z));
    for (const EdgePos& e : extract_edge_sequence(adj)) edges.push_back({e.col, e.row, std::nullopt});
    const BipartiteColoredGraph g(k, f, edges);
    const auto colored = greedy_strong_color(g, EdgeOrderPolicy::Shuffled, gen());
    return make_training_pair(graph_to_pda(colored));
  }
}

}  // namespace

TEST(Gru, ZeroWeightsGiveZero) {
  const GruParams p = GruParams::zeros(3, 2);
  const Vector y = gru_step(Vector::Constant(3, 0.7), Vector::Zero(2), p);
  EXPECT_DOUBLE_EQ(y[0], 0.0);
  EXPECT_DOUBLE_EQ(y[1], 0.0);
}

TEST(Gru, ScalarHandComputed) {
  GruParams p = GruParams::zeros(1, 1);
  p.ur(0, 0) = 0.5;
  p.wr(0, 0) = -0.3;
  p.br[0] = 0.1;
  p.uz(0, 0) = 0.2;
  p.wz(0, 0) = 0.4;
  p.bz[0] = -0.1;
  p.us(0, 0) = 0.7;
  p.ws(0, 0) = -0.6;
  p.bs[0] = 0.05;
  const Vector y = gru_step(Vector::Constant(1, 1.0), Vector::Constant(1, 0.5), p);
  EXPECT_NEAR(y[0], 0.5055370869340456, 1e-14);
}

TEST(Gru, MatchesLoopReferenceAndStaysBounded) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> w(-2.0, 2.0);
  std::uniform_real_distribution<double> unit(-0.999, 0.999);
  for (int trial = 0; trial < 100; ++trial) {
    GruParams p = GruParams::zeros(3, 4);
    for (Matrix* m : {&p.ur, &p.wr, &p.uz, &p.wz, &p.us, &p.ws}) {
      for (Eigen::Index i = 0; i < m->size(); ++i) m->data()[i] = w(gen);
    }
    for (Vector* b : {&p.br, &p.bz, &p.bs}) {
      for (Eigen::Index i = 0; i < b->size(); ++i) (*b)[i] = w(gen);
    }
    std::vector<double> x{w(gen) * 3, w(gen) * 3, w(gen) * 3};
    std::vector<double> y{unit(gen), unit(gen), unit(gen), unit(gen)};
    const Vector got = gru_step(to_vec(x), to_vec(y), p);
    const auto want = ref_gru(x, y, p);
    for (std::size_t i = 0; i < 4; ++i) {
      EXPECT_NEAR(got[static_cast<Eigen::Index>(i)], want[i], 1e-13);
      EXPECT_LT(std::abs(got[static_cast<Eigen::Index>(i)]), 1.0);
    }
  }
}

TEST(Gru, ShapeErrors) {
  const GruParams p = GruParams::zeros(3, 2);
  EXPECT_THROW(gru_step(Vector::Zero(2), Vector::Zero(2), p), ShapeError);
  EXPECT_THROW(gru_step(Vector::Zero(3), Vector::Zero(3), p), ShapeError);
}

TEST(Encode, ComposesGruSteps) {
  const ModelParams m = random_model(small_config(3, 2, 4, 4, 9), 10.0);
  const EdgeSequence e{{1, 0}, {3, 2}, {0, 1}};
  const EncoderStates s = encode(e, m);
  ASSERT_EQ(s.length(), 3);
  std::vector<Vector> x;
  for (const EdgePos& p : e) x.push_back(m.embed.col(static_cast<Eigen::Index>(p.row)) + m.embed.col(4 + static_cast<Eigen::Index>(p.col)));
  Vector f = Vector::Zero(3);
  for (int l = 0; l < 3; ++l) {
    f = gru_step(x[static_cast<std::size_t>(l)], f, m.fwd);
    EXPECT_LT((s.states.col(l).head(3) - f).norm(), 1e-14);
  }
  Vector b = Vector::Zero(3);
  for (int l = 2; l >= 0; --l) {
    b = gru_step(x[static_cast<std::size_t>(l)], b, m.bwd);
    EXPECT_LT((s.states.col(l).tail(3) - b).norm(), 1e-14);
  }
}

TEST(Encode, ReversalSwapsDirections) {
  ModelParams m = random_model(small_config(3, 3, 4, 4, 2), 10.0);
  m.bwd = m.fwd;
  const EdgeSequence e{{0, 0}, {1, 2}, {3, 1}, {2, 3}};
  const EdgeSequence r(e.rbegin(), e.rend());
  const EncoderStates a = encode(e, m);
  const EncoderStates b = encode(r, m);
  for (int l = 0; l < 4; ++l) EXPECT_LT((a.states.col(l).tail(3) - b.states.col(3 - l).head(3)).norm(), 1e-14);
}

TEST(Encode, Errors) {
  const ModelParams m = ModelParams::init(small_config(2, 2, 3, 3));
  EXPECT_THROW(encode({}, m), InvalidParameter);
  EXPECT_THROW(encode({{3, 0}}, m), VocabularyError);
  EXPECT_THROW(encode({{0, 3}}, m), VocabularyError);
}

TEST(DecodeStep, HandComputedPair) {
  ModelParams m = ModelParams::zeros(small_config(1, 1, 2, 2));
  m.w1 << 0.5, -0.25;
  m.w2 << 1.0;
  m.beta << 2.0;
  EncoderStates s{Matrix(2, 2)};
  s.states << 1.0, 0.2, 0.0, 0.4;
  const Vector p = decode_step(s, Vector::Constant(1, 0.3), {true, true}, m);
  EXPECT_NEAR(p[0], 0.6781861021249402, 1e-14);
  EXPECT_NEAR(p[1], 0.3218138978750597, 1e-14);
}

TEST(DecodeStep, ZeroBetaIsUniformOverFeasible) {
  ModelParams m = random_model(small_config(3, 2));
  m.beta.setZero();
  const EncoderStates s = encode({{0, 0}, {1, 0}, {2, 1}, {0, 2}}, m);
  const Vector p = decode_step(s, Vector::Constant(3, 0.1), {true, false, true, true}, m);
  EXPECT_NEAR(p[0], 1.0 / 3.0, 1e-15);
  EXPECT_EQ(p[1], 0.0);
  EXPECT_NEAR(p[3], 1.0 / 3.0, 1e-15);
}

TEST(DecodeStep, SingleFeasibleAndErrors) {
  const ModelParams m = random_model(small_config(3, 2));
  const EncoderStates s = encode({{0, 0}, {1, 0}, {2, 1}}, m);
  const Vector p = decode_step(s, Vector::Constant(3, 0.4), {false, true, false}, m);
  EXPECT_EQ(p[1], 1.0);
  EXPECT_THROW(decode_step(s, Vector::Zero(3), {false, false, false}, m), NoFeasibleAction);
  EXPECT_THROW(decode_step(s, Vector::Zero(3), {true, true}, m), ShapeError);
  EXPECT_THROW(decode_step(s, Vector::Zero(2), {true, true, true}, m), ShapeError);
}

TEST(DecodeStep, SumsToOne) {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 200; ++trial) {
    const ModelParams m = random_model(small_config(4, 4, 6, 6, trial + 1), 50.0);
    const TrainingPair pair = random_pair(gen, 12);
    const EncoderStates s = encode(pair.edges, m);
    std::vector<bool> mask(pair.edges.size());
    for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = gen() % 2;
    mask[gen() % mask.size()] = true;
    Vector d(4);
    for (int i = 0; i < 4; ++i) d[i] = std::tanh(static_cast<double>(gen() % 1000) / 100.0 - 5.0);
    const Vector p = decode_step(s, d, mask, m);
    EXPECT_NEAR(p.sum(), 1.0, 1e-9);
    EXPECT_TRUE(p.allFinite());
  }
}

TEST(Pointers, Examples) {
  EXPECT_EQ(pointer_to_colors({0, 1, 2}), (ColorSequence{1, 2, 3}));
  EXPECT_EQ(pointer_to_colors({0, 0}), (ColorSequence{1, 1}));
  EXPECT_EQ(pointer_to_colors({0, 1, 0, 1}), (ColorSequence{1, 2, 1, 2}));
  EXPECT_EQ(pointer_to_colors({0, 1, 2, 1, 3}), (ColorSequence{1, 2, 3, 2, 2}));
  EXPECT_THROW(pointer_to_colors({1}), InvalidPointer);
  EXPECT_THROW(colors_to_pointers({2, 1}), BadTarget);
}

TEST(Pointers, RoundTripAllCanonicalSequences) {
  // Restricted growth strings enumerate every canonical sequence.
  std::size_t count = 0;
  std::function<void(ColorSequence&, int, std::size_t)> rec = [&](ColorSequence& c, int top, std::size_t len) {
    if (c.size() == len) {
      const auto ptr = colors_to_pointers(c);
      EXPECT_EQ(pointer_to_colors(ptr), c);
      for (std::size_t l = 0; l < ptr.size(); ++l) EXPECT_LE(ptr[l], l);
      ++count;
      return;
    }
    for (int v = 1; v <= top + 1; ++v) {
      c.push_back(v);
      rec(c, std::max(top, v), len);
      c.pop_back();
    }
  };
  for (std::size_t len = 0; len <= 6; ++len) {
    ColorSequence c;
    rec(c, 0, len);
  }
  // Bell numbers 1 + 1 + 2 + 5 + 15 + 52 + 203.
  EXPECT_EQ(count, 279u);
}

TEST(Pointers, EveryPointerSequenceGivesCanonicalColors) {
  std::function<void(std::vector<std::size_t>&, std::size_t)> rec = [&](std::vector<std::size_t>& p, std::size_t len) {
    if (p.size() == len) {
      const ColorSequence c = pointer_to_colors(p);
      EXPECT_TRUE(is_canonical(c));
      EXPECT_EQ(pointer_to_colors(colors_to_pointers(c)), c);
      return;
    }
    for (std::size_t j = 0; j <= p.size(); ++j) {
      p.push_back(j);
      rec(p, len);
      p.pop_back();
    }
  };
  for (std::size_t len = 1; len <= 6; ++len) {
    std::vector<std::size_t> p;
    rec(p, len);
  }
}

TEST(Rollout, TwoByTwoMaskedAlwaysValid) {
  const AdjacencyMatrix a = placement_to_adjacency(1, 2, 2, {{0}, {1}});
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const ModelParams m = random_model(small_config(3, 3, 2, 2, seed), 40.0);
    for (auto mode : {DecodeMode::Greedy, DecodeMode::Sample}) {
      const Episode ep = rollout(a, m, {mode, true, seed});
      EXPECT_EQ(ep.reward, 1);
      EXPECT_EQ(ep.output.size(), 2u);
    }
  }
}

TEST(Rollout, EmptySequence) {
  const AdjacencyMatrix a = placement_to_adjacency(2, 2, 3, {{0, 1}, {0, 1}, {0, 1}});
  const Episode ep = rollout(a, ModelParams::init(small_config(2, 2)), {});
  EXPECT_TRUE(ep.output.empty());
  EXPECT_EQ(ep.reward, 1);
  EXPECT_EQ(ep.logprob, 0.0);
  EXPECT_EQ(ep.array.rows(), 2u);
}

TEST(Rollout, SampleIsDeterministicPerSeed) {
  const AdjacencyMatrix a = adjacency_of(construct_mn_pda(4, 1));
  const ModelParams m = random_model(small_config(4, 4), 20.0);
  const Episode x = rollout(a, m, {DecodeMode::Sample, false, 77});
  const Episode y = rollout(a, m, {DecodeMode::Sample, false, 77});
  EXPECT_EQ(x.output, y.output);
  EXPECT_EQ(x.logprob, y.logprob);
  EXPECT_EQ(x.reward, verify(x.array).valid ? 1 : -1);
}

TEST(Rollout, LogProbMatchesTeacherForcedScore) {
  const AdjacencyMatrix a = adjacency_of(construct_mn_pda(4, 1));
  const ModelParams m = random_model(small_config(4, 4), 20.0);
  for (bool mask : {false, true}) {
    const Episode ep = rollout(a, m, {DecodeMode::Sample, mask, 5});
    EXPECT_NEAR(sequence_log_prob(m, a, ep.input, ep.choices, mask), ep.logprob, 1e-12);
  }
}

TEST(SupervisedLoss, UniformModelOnTwoEdges) {
  // Step one has one pointer (itself), step two has two.
  ModelParams m = random_model(small_config(3, 3, 2, 2));
  m.beta.setZero();
  const TrainingPair pair = make_training_pair(Pda::from_grid(Grid::from_rows({{0, 1}, {1, 0}})));
  ASSERT_EQ(pair.edges.size(), 2u);
  const std::vector<TrainingPair> batch{pair};
  EXPECT_NEAR(supervised_loss(batch, m).loss, std::log(2.0), 1e-14);
}

TEST(SupervisedLoss, Errors) {
  const ModelParams m = ModelParams::init(small_config(2, 2));
  EXPECT_THROW(supervised_loss({}, m), InvalidBatch);
  TrainingPair bad = make_training_pair(construct_mn_pda(3, 1));
  bad.colors[0] = 2;
  const std::vector<TrainingPair> batch{bad};
  EXPECT_THROW(supervised_loss(batch, m), BadTarget);
}

TEST(Gradients, SupervisedMatchesFiniteDifferences) {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 6; ++trial) {
    const int h = 2 + static_cast<int>(gen() % 5);
    const int d = 2 + static_cast<int>(gen() % 5);
    const ModelParams m = random_model(small_config(h, d, 4, 3, 100 + trial));
    std::vector<TrainingPair> batch{random_pair(gen, 6), random_pair(gen, 6)};
    const bool mask = trial % 2 == 1;
    const LossAndGrad lg = supervised_loss(batch, m, mask);
    const auto num = gradcheck::numeric(m, [&](const ModelParams& p) { return supervised_loss(batch, p, mask).loss; });
    EXPECT_LT(gradcheck::relative_error(lg.grad, num), 1e-4) << "trial " << trial;
  }
}

TEST(Gradients, NarrowAttentionWindow) {
  std::mt19937_64 gen(31);
  ModelConfig c = small_config(3, 3, 4, 3, 7);
  c.attention_window = 2;
  const ModelParams m = random_model(c);
  const TrainingPair pair = make_training_pair(construct_mn_pda(3, 1));
  const std::vector<TrainingPair> batch{pair};
  const LossAndGrad lg = supervised_loss(batch, m);
  const auto num = gradcheck::numeric(m, [&](const ModelParams& p) { return supervised_loss(batch, p).loss; });
  EXPECT_LT(gradcheck::relative_error(lg.grad, num), 1e-4);
}

TEST(Gradients, ReinforceMatchesFiniteDifferences) {
  for (int trial = 0; trial < 4; ++trial) {
    const ModelParams m = random_model(small_config(4, 3, 4, 3, 40 + trial));
    const AdjacencyMatrix a = adjacency_of(construct_mn_pda(3, 1));
    std::vector<Episode> batch;
    for (std::uint64_t s = 0; s < 3; ++s) batch.push_back(rollout(a, m, {DecodeMode::Sample, trial % 2 == 0, s + 10 * trial}));
    const ModelParams g = reinforce_gradient(batch, m);
    auto objective = [&](const ModelParams& p) {
      double total = 0.0;
      for (const Episode& ep : batch) {
        total += ep.reward * sequence_log_prob(p, ep.adjacency, ep.input, ep.choices, ep.masked);
      }
      return total / static_cast<double>(batch.size());
    };
    EXPECT_LT(gradcheck::relative_error(g, gradcheck::numeric(m, objective)), 1e-4) << "trial " << trial;
  }
}

TEST(Reinforce, OppositeRewardsCancel) {
  const ModelParams m = random_model(small_config(3, 3));
  const AdjacencyMatrix a = adjacency_of(construct_mn_pda(3, 1));
  Episode ep = rollout(a, m, {DecodeMode::Sample, false, 3});
  Episode neg = ep;
  ep.reward = 1;
  neg.reward = -1;
  const std::vector<Episode> batch{ep, neg};
  EXPECT_LT(std::sqrt(reinforce_gradient(batch, m).squared_norm()), 1e-15);
}

TEST(Reinforce, PositiveRewardIsSupervisedDirection) {
  const ModelParams m = random_model(small_config(3, 3));
  const AdjacencyMatrix a = adjacency_of(construct_mn_pda(3, 1));
  Episode ep = rollout(a, m, {DecodeMode::Sample, false, 4});
  ep.reward = 1;
  const std::vector<Episode> batch{ep};
  TrainingPair pair{3, 3, 1, ep.input, ep.output};
  const std::vector<TrainingPair> sup{pair};
  const ModelParams rg = reinforce_gradient(batch, m);
  const ModelParams sg = supervised_loss(sup, m).grad;
  auto a1 = gradcheck::flatten(rg);
  auto a2 = gradcheck::flatten(sg);
  for (double& v : a2) v = -v;
  EXPECT_LT(oracle::relative_error(a1, a2), 1e-12);
}

TEST(Reinforce, UpdateAndErrors) {
  const ModelParams m = random_model(small_config(3, 3));
  EXPECT_THROW(reinforce_update({}, m, 0.1), InvalidBatch);
  const AdjacencyMatrix a = adjacency_of(construct_mn_pda(3, 1));
  std::vector<Episode> batch{rollout(a, m, {DecodeMode::Sample, false, 9})};
  batch[0].reward = 1;
  const ModelParams next = reinforce_update(batch, m, 0.5, 1.0);
  ModelParams step = next;
  step.add_scaled(m, -1.0);
  EXPECT_NEAR(std::sqrt(step.squared_norm()), 0.5 * std::min(1.0, std::sqrt(reinforce_gradient(batch, m).squared_norm())), 1e-12);
  // Ascent raises the likelihood of a rewarded episode.
  EXPECT_GT(sequence_log_prob(next, a, batch[0].input, batch[0].choices, false), batch[0].logprob);
}

TEST(Mask, ValidWheneverACompletionExists) {
  // Exhaustive search over colorings with C2 pruning finds a completion;
  // the masked rollout must then reach a PDA.
  std::mt19937_64 gen(99);
  int instances = 0;
  for (std::size_t k = 1; k <= 4; ++k) {
    for (std::size_t f = 1; f <= 5; ++f) {
      for (std::size_t z = 0; z <= f; ++z) {
        const std::size_t len = k * (f - z);
        if (len > 8) continue;
        for (int rep = 0; rep < 6; ++rep) {
          std::vector<std::vector<std::size_t>> stars(k);
          for (auto& col : stars) {
            std::vector<std::size_t> rows(f);
            for (std::size_t i = 0; i < f; ++i) rows[i] = i;
            std::shuffle(rows.begin(), rows.end(), gen);
            col.assign(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(z));
          }
          const AdjacencyMatrix a = placement_to_adjacency(z, f, k, stars);
          const EdgeSequence e = extract_edge_sequence(a);
          oracle::Rows grid(f, std::vector<int>(k, 0));
          bool found = false;
          std::function<void(std::size_t, int)> search = [&](std::size_t l, int top) {
            if (found) return;
            if (l == e.size()) {
              found = oracle::is_pda(grid, z);
              return;
            }
            for (int c = 1; c <= top + 1 && !found; ++c) {
              grid[e[l].row][e[l].col] = c;
              search(l + 1, std::max(top, c));
              grid[e[l].row][e[l].col] = 0;
            }
          };
          search(0, 0);
          ASSERT_TRUE(found);
          const ModelParams m = random_model(small_config(3, 3, 5, 4, gen()), 30.0);
          for (auto mode : {DecodeMode::Greedy, DecodeMode::Sample}) {
            const Episode ep = rollout(a, m, {mode, true, gen()});
            EXPECT_EQ(ep.reward, 1);
            EXPECT_TRUE(oracle::is_pda(ep.array.to_rows(), z));
          }
          ++instances;
        }
      }
    }
  }
  EXPECT_GT(instances, 100);
}

TEST(Params, InitIsSeededAndBounded) {
  const ModelParams a = ModelParams::init(small_config(4, 4, 5, 5, 3));
  const ModelParams b = ModelParams::init(small_config(4, 4, 5, 5, 3));
  const auto fa = gradcheck::flatten(a);
  EXPECT_EQ(fa, gradcheck::flatten(b));
  for (double v : fa) EXPECT_LE(std::abs(v), 0.08);
  EXPECT_EQ(a.parameter_count(), fa.size());
  EXPECT_NE(fa, gradcheck::flatten(ModelParams::init(small_config(4, 4, 5, 5, 4))));
}

TEST(Params, ClipGradient) {
  ModelParams g = random_model(small_config(3, 3));
  const double norm = std::sqrt(g.squared_norm());
  EXPECT_EQ(clip_gradient(g, norm * 2), norm);
  EXPECT_NEAR(std::sqrt(g.squared_norm()), norm, 1e-12);
  clip_gradient(g, 0.5);
  EXPECT_NEAR(std::sqrt(g.squared_norm()), 0.5, 1e-12);
}
