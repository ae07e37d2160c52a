#include "pdanet/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <tuple>
#include <thread>

#include "pdanet/random.hpp"

namespace pdanet::neural {

namespace {

template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += threads) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

double mean_greedy_reward(std::span<const TrainingPair> samples, const ModelParams& params) {
  if (samples.empty()) return 0.0;
  double sum = 0.0;
  for (const TrainingPair& s : samples) {
    sum += rollout(s.adjacency(), params, {DecodeMode::Greedy, false, 0}).reward;
  }
  return sum / static_cast<double>(samples.size());
}

}  // namespace

std::pair<std::vector<TrainingPair>, std::vector<TrainingPair>> split_holdout(const std::vector<TrainingPair>& corpus,
                                                                              double fraction, std::uint64_t seed) {
  // Group identical samples by their serialized form.
  std::map<std::string, std::vector<std::size_t>> groups;
  std::vector<std::string> order;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    auto key = format_training_pair(corpus[i]);
    auto [it, fresh] = groups.try_emplace(key);
    if (fresh) order.push_back(key);
    it->second.push_back(i);
  }
  Rng rng(derive_seed(seed, 0x5eed));
  rng.shuffle(order);

  std::size_t n_hold = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(order.size())));
  if (fraction > 0.0 && n_hold == 0 && order.size() > 1) n_hold = 1;
  n_hold = std::min(n_hold, order.size() > 0 ? order.size() - 1 : 0);

  std::vector<TrainingPair> train_set;
  std::vector<TrainingPair> holdout;
  for (std::size_t g = 0; g < order.size(); ++g) {
    auto& dst = g < n_hold ? holdout : train_set;
    for (std::size_t i : groups[order[g]]) dst.push_back(corpus[i]);
  }
  return {std::move(train_set), std::move(holdout)};
}

double valid_rate(std::span<const TrainingPair> samples, const ModelParams& params, bool mask) {
  if (samples.empty()) return 0.0;
  std::size_t ok = 0;
  for (const TrainingPair& s : samples) {
    ok += rollout(s.adjacency(), params, {DecodeMode::Greedy, mask, 0}).reward > 0 ? 1 : 0;
  }
  return static_cast<double>(ok) / static_cast<double>(samples.size());
}

TrainResult train(const std::vector<TrainingPair>& corpus, const TrainConfig& config) {
  if (corpus.empty()) throw InvalidBatch("training corpus is empty");
  if (config.batch_size == 0) throw InvalidParameter("batch size must be positive");

  TrainResult result;
  std::tie(result.train_set, result.holdout_set) = split_holdout(corpus, config.holdout_fraction, config.seed);
  const auto& train_set = result.train_set;
  const std::span<const TrainingPair> eval_set =
      result.holdout_set.empty() ? std::span<const TrainingPair>(train_set) : std::span<const TrainingPair>(result.holdout_set);

  ModelConfig model_config = config.model;
  model_config.seed = config.seed;
  ModelParams params = ModelParams::init(model_config);

  using Clock = std::chrono::steady_clock;
  auto elapsed_ms = [&](Clock::time_point since) -> std::int64_t {
    if (!config.record_wall_time) return 0;
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - since).count();
  };

  {
    const auto t0 = Clock::now();
    LogRow row;
    row.epoch = 0;
    row.phase = "init";
    row.loss = supervised_loss(train_set, params).loss;
    row.mean_reward = mean_greedy_reward(train_set, params);
    row.valid_rate = valid_rate(eval_set, params, false);
    row.wall_ms = elapsed_ms(t0);
    result.log.push_back(row);
  }

  auto check_finite = [&](const ModelParams& next, const ModelParams& last_good, int epoch) {
    if (!next.all_finite()) {
      throw DivergenceError("non-finite parameters in epoch " + std::to_string(epoch), last_good, result.log);
    }
  };

  std::vector<std::size_t> order(train_set.size());
  int epoch = 0;

  for (int e = 0; e < config.supervised_epochs; ++e) {
    ++epoch;
    const auto t0 = Clock::now();
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(config.seed, 1000 + static_cast<std::uint64_t>(epoch)));
    rng.shuffle(order);

    double loss_sum = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      std::vector<TrainingPair> batch;
      batch.reserve(end - begin);
      for (std::size_t i = begin; i < end; ++i) batch.push_back(train_set[order[i]]);
      LossAndGrad lg = supervised_loss(batch, params);
      loss_sum += lg.loss * static_cast<double>(batch.size());
      clip_gradient(lg.grad, config.clip_norm);
      ModelParams next = params;
      next.add_scaled(lg.grad, -config.learning_rate);
      check_finite(next, params, epoch);
      params = std::move(next);
    }

    LogRow row;
    row.epoch = epoch;
    row.phase = "supervised";
    row.loss = loss_sum / static_cast<double>(train_set.size());
    row.mean_reward = mean_greedy_reward(train_set, params);
    row.valid_rate = valid_rate(eval_set, params, false);
    row.wall_ms = elapsed_ms(t0);
    result.log.push_back(row);
  }

  double baseline = 0.0;
  for (int e = 0; e < config.reinforce_epochs; ++e) {
    ++epoch;
    const auto t0 = Clock::now();
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(config.seed, 1000 + static_cast<std::uint64_t>(epoch)));
    rng.shuffle(order);

    double objective_sum = 0.0;
    double reward_sum = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      std::vector<Episode> episodes(end - begin);
      // Each episode draws from its own stream so results do not depend on threading.
      parallel_for(episodes.size(), config.threads, [&](std::size_t i) {
        const std::uint64_t index = static_cast<std::uint64_t>(epoch) * 1'000'003ULL + begin + i;
        episodes[i] = rollout(train_set[order[begin + i]].adjacency(), params,
                              {DecodeMode::Sample, config.mask_in_reinforce, derive_seed(config.seed, index)});
      });
      double batch_reward = 0.0;
      for (const Episode& ep : episodes) {
        objective_sum += ep.reward * ep.logprob;
        batch_reward += ep.reward;
      }
      reward_sum += batch_reward;

      ModelParams next = reinforce_update(episodes, params, config.reinforce_learning_rate, config.clip_norm,
                                          config.reward_baseline ? baseline : 0.0);
      check_finite(next, params, epoch);
      params = std::move(next);
      if (config.reward_baseline) baseline = 0.9 * baseline + 0.1 * batch_reward / static_cast<double>(episodes.size());
    }

    LogRow row;
    row.epoch = epoch;
    row.phase = "reinforce";
    row.loss = -objective_sum / static_cast<double>(train_set.size());
    row.mean_reward = reward_sum / static_cast<double>(train_set.size());
    row.valid_rate = valid_rate(eval_set, params, false);
    row.wall_ms = elapsed_ms(t0);
    result.log.push_back(row);
  }

  result.params = std::move(params);
  return result;
}

std::string format_log_csv(const std::vector<LogRow>& log) {
  std::string out = "epoch,phase,loss,mean_reward,valid_rate,wall_ms\n";
  char buf[256];
  for (const LogRow& r : log) {
    std::snprintf(buf, sizeof buf, "%d,%s,%.9f,%.6f,%.6f,%lld\n", r.epoch, r.phase.c_str(), r.loss, r.mean_reward,
                  r.valid_rate, static_cast<long long>(r.wall_ms));
    out += buf;
  }
  return out;
}

}  // namespace pdanet::neural
