#pragma once

// Attention-based pointer colorer.
//
// The encoder is a bidirectional GRU over embedded edges; s_l concatenates the
// forward and backward states. The decoder is a GRU that starts from the final
// forward state. At step t it reads [context of step t-1; edge t; edge copied at
// step t-1] and scores encoder positions with
//
//     u_j = beta^T tanh(W1 s_j + W2 d_t).
//
// softmax(u) over a window of positions gives the attention context fed to the
// next step; softmax(u) over the pointer candidates gives the output
// distribution. Pointing at step t itself mints a fresh color, pointing at an
// earlier position copies that position's color. Candidates are the step itself
// plus the first position of every color used so far (at most
// `attention_window` of the most recent ones), optionally filtered to colors
// that keep the partial array a PDA.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "pdanet/pda.hpp"
#include "pdanet/seqcodec.hpp"

namespace pdanet::neural {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Weights of one GRU cell: u* act on the input, w* on the previous hidden state.
struct GruParams {
  Matrix ur, wr, uz, wz, us, ws;
  Vector br, bz, bs;

  static GruParams zeros(Eigen::Index input, Eigen::Index hidden);
  Eigen::Index input_size() const { return ur.cols(); }
  Eigen::Index hidden_size() const { return ur.rows(); }
};

struct ModelConfig {
  int hidden = 16;  ///< h
  int embed = 16;   ///< d
  int max_rows = 16;
  int max_cols = 8;
  int attention_window = 64;
  std::uint64_t seed = 1;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// A named view of one parameter tensor, column-major.
template <typename Scalar>
struct TensorView {
  std::string_view name;
  Scalar* data;
  Eigen::Index rows;
  Eigen::Index cols;
  Eigen::Index size() const { return rows * cols; }
};

struct ModelParams {
  ModelConfig config;
  Matrix embed;  ///< d x (max_rows + max_cols): row one-hot then column one-hot
  GruParams fwd;
  GruParams bwd;
  GruParams dec;
  Vector beta;  ///< h
  Matrix w1;    ///< h x 2h
  Matrix w2;    ///< h x h
  Vector start; ///< d, the go symbol

  static ModelParams zeros(const ModelConfig& config);
  /// Uniform in [-0.08, 0.08] from config.seed.
  static ModelParams init(const ModelConfig& config);

  /// Visits every tensor in a fixed order.
  template <typename Fn>
  void for_each_tensor(Fn&& fn);
  template <typename Fn>
  void for_each_tensor(Fn&& fn) const;

  std::size_t parameter_count() const;
  double squared_norm() const;
  bool all_finite() const;
  /// this += scale * other
  void add_scaled(const ModelParams& other, double scale);
  void scale(double factor);
};

struct EncoderStates {
  Matrix states;  ///< 2h x L, column l is s_l
  Eigen::Index length() const { return states.cols(); }
};

/// One GRU step. Throws ShapeError on inconsistent shapes.
Vector gru_step(const Vector& x, const Vector& y_prev, const GruParams& p);

/// Throws VocabularyError for edges outside the embedding range and
/// InvalidParameter for an empty sequence.
EncoderStates encode(const EdgeSequence& edges, const ModelParams& params);

/// Pointer distribution over all L positions for decoder state d_t; positions
/// with mask[l] == false get probability 0. Throws NoFeasibleAction if the mask
/// excludes everything.
Vector decode_step(const EncoderStates& states, const Vector& d_t, const std::vector<bool>& mask,
                   const ModelParams& params);

/// Step l pointing at l mints the next fresh color; pointing at j < l copies
/// color j. Throws InvalidPointer for forward pointers.
ColorSequence pointer_to_colors(const std::vector<std::size_t>& choices);
/// Inverse for canonical sequences: first occurrences self-point, repeats
/// point to the first occurrence. Throws BadTarget for non-canonical input.
std::vector<std::size_t> colors_to_pointers(const ColorSequence& colors);

enum class DecodeMode { Greedy, Sample };

struct RolloutOptions {
  DecodeMode mode = DecodeMode::Greedy;
  bool mask = true;  ///< drop pointers that would break C2 right away
  std::uint64_t seed = 0;
  bool evaluate = true;  ///< verify the assembled array; when off, reward is left at 0
};

struct Episode {
  AdjacencyMatrix adjacency;
  EdgeSequence input;
  ColorSequence output;
  std::vector<std::size_t> choices;
  double logprob = 0.0;
  int reward = 1;  ///< +1 if the assembled array is a PDA, -1 otherwise, 0 if not evaluated
  bool masked = true;
  Grid array;
};

/// Colors the canonical edge sequence of the adjacency.
Episode rollout(const AdjacencyMatrix& adjacency, const ModelParams& params, const RolloutOptions& options);

/// log p(choices | edges). When `grad` is given, adds scale * d(log p)/d(theta).
/// Throws BadTarget if a choice is not an available pointer.
double sequence_log_prob(const ModelParams& params, const AdjacencyMatrix& adjacency, const EdgeSequence& edges,
                         const std::vector<std::size_t>& choices, bool mask, ModelParams* grad = nullptr,
                         double scale = 1.0);

struct LossAndGrad {
  double loss = 0.0;
  ModelParams grad;
};

/// Mean negative log-likelihood of the target colorings and its gradient.
LossAndGrad supervised_loss(std::span<const TrainingPair> batch, const ModelParams& params, bool mask = false);

/// (1/K) sum_k (R_k - baseline) d log p(C_k | E_k) / d theta, an ascent direction.
ModelParams reinforce_gradient(std::span<const Episode> batch, const ModelParams& params, double baseline = 0.0);

/// One ascent step on the REINFORCE objective with gradient-norm clipping.
ModelParams reinforce_update(std::span<const Episode> batch, const ModelParams& params, double learning_rate,
                             double clip_norm = 5.0, double baseline = 0.0);

/// Rescales grad in place so its norm is at most max_norm. Returns the original norm.
double clip_gradient(ModelParams& grad, double max_norm);

// ---------------------------------------------------------------------------

template <typename Fn>
void ModelParams::for_each_tensor(Fn&& fn) {
  auto visit = [&](std::string_view name, auto& t) {
    fn(TensorView<double>{name, t.data(), t.rows(), t.cols()});
  };
  auto visit_gru = [&](std::string_view prefix, GruParams& g) {
    static constexpr std::string_view kNames[3][9] = {
        {"fwd.ur", "fwd.wr", "fwd.br", "fwd.uz", "fwd.wz", "fwd.bz", "fwd.us", "fwd.ws", "fwd.bs"},
        {"bwd.ur", "bwd.wr", "bwd.br", "bwd.uz", "bwd.wz", "bwd.bz", "bwd.us", "bwd.ws", "bwd.bs"},
        {"dec.ur", "dec.wr", "dec.br", "dec.uz", "dec.wz", "dec.bz", "dec.us", "dec.ws", "dec.bs"}};
    const auto& n = kNames[prefix == "fwd" ? 0 : prefix == "bwd" ? 1 : 2];
    visit(n[0], g.ur);
    visit(n[1], g.wr);
    visit(n[2], g.br);
    visit(n[3], g.uz);
    visit(n[4], g.wz);
    visit(n[5], g.bz);
    visit(n[6], g.us);
    visit(n[7], g.ws);
    visit(n[8], g.bs);
  };
  visit("embed", embed);
  visit_gru("fwd", fwd);
  visit_gru("bwd", bwd);
  visit_gru("dec", dec);
  visit("attn.beta", beta);
  visit("attn.w1", w1);
  visit("attn.w2", w2);
  visit("start", start);
}

template <typename Fn>
void ModelParams::for_each_tensor(Fn&& fn) const {
  const_cast<ModelParams*>(this)->for_each_tensor([&](TensorView<double> v) {
    fn(TensorView<const double>{v.name, v.data, v.rows, v.cols});
  });
}

}  // namespace pdanet::neural
