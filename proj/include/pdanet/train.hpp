#pragma once

// Two-phase training of the pointer colorer: supervised pretraining on a
// corpus of valid colorings, then REINFORCE fine-tuning with the +1/-1 PDA
// validity reward.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pdanet/error.hpp"
#include "pdanet/neural.hpp"
#include "pdanet/seqcodec.hpp"

namespace pdanet::neural {

struct TrainConfig {
  ModelConfig model;
  int supervised_epochs = 60;
  int reinforce_epochs = 60;
  double learning_rate = 0.1;
  double reinforce_learning_rate = 0.05;
  std::size_t batch_size = 16;
  double clip_norm = 5.0;
  double holdout_fraction = 0.2;
  bool mask_in_reinforce = false;
  /// Subtract a moving average of rewards (ablation; off matches the plain objective).
  bool reward_baseline = false;
  /// When false the wall_ms column is written as 0 so logs are reproducible.
  bool record_wall_time = false;
  std::size_t threads = 1;
  std::uint64_t seed = 1;
};

struct LogRow {
  int epoch = 0;
  std::string phase;  ///< "init", "supervised" or "reinforce"
  double loss = 0.0;
  double mean_reward = 0.0;
  double valid_rate = 0.0;  ///< held-out greedy decode, mask off
  std::int64_t wall_ms = 0;

  friend bool operator==(const LogRow&, const LogRow&) = default;
};

struct TrainResult {
  ModelParams params;
  std::vector<LogRow> log;
  std::vector<TrainingPair> train_set;
  std::vector<TrainingPair> holdout_set;
};

/// Raised when an update produces non-finite parameters.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, ModelParams last_good, std::vector<LogRow> log)
      : Error(what), last_good_(std::move(last_good)), log_(std::move(log)) {}
  const ModelParams& last_good() const noexcept { return last_good_; }
  const std::vector<LogRow>& log() const noexcept { return log_; }

 private:
  ModelParams last_good_;
  std::vector<LogRow> log_;
};

/// Splits distinct samples so that no held-out sample also occurs in training.
std::pair<std::vector<TrainingPair>, std::vector<TrainingPair>> split_holdout(const std::vector<TrainingPair>& corpus,
                                                                              double fraction, std::uint64_t seed);

/// Fraction of samples whose greedy decode assembles into a PDA.
double valid_rate(std::span<const TrainingPair> samples, const ModelParams& params, bool mask);

/// Throws InvalidBatch for an empty corpus and DivergenceError on NaN.
TrainResult train(const std::vector<TrainingPair>& corpus, const TrainConfig& config);

/// Header: epoch,phase,loss,mean_reward,valid_rate,wall_ms
std::string format_log_csv(const std::vector<LogRow>& log);

}  // namespace pdanet::neural
