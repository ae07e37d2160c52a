#include "pdanet/neural.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pdanet/error.hpp"
#include "pdanet/random.hpp"

namespace pdanet::neural {

namespace {

Vector sigmoid(const Vector& v) { return (1.0 / (1.0 + (-v.array()).exp())).matrix(); }

/// Numerically stable log-softmax.
Vector log_softmax(const Vector& u) {
  const double m = u.maxCoeff();
  const double lse = m + std::log((u.array() - m).exp().sum());
  return (u.array() - lse).matrix();
}

struct GruCache {
  Vector x, y_prev, r, z, n, ws_y;
};

void check_gru_shapes(const Vector& x, const Vector& y, const GruParams& p) {
  const auto h = p.hidden_size();
  const auto in = p.input_size();
  const bool ok = x.size() == in && y.size() == h && p.wr.rows() == h && p.wr.cols() == h && p.uz.rows() == h &&
                  p.uz.cols() == in && p.wz.rows() == h && p.wz.cols() == h && p.us.rows() == h &&
                  p.us.cols() == in && p.ws.rows() == h && p.ws.cols() == h && p.br.size() == h &&
                  p.bz.size() == h && p.bs.size() == h;
  if (!ok) {
    throw ShapeError("GRU shape mismatch: input " + std::to_string(x.size()) + " vs " + std::to_string(in) +
                     ", hidden " + std::to_string(y.size()) + " vs " + std::to_string(h));
  }
}

Vector gru_forward(const GruParams& p, const Vector& x, const Vector& y, GruCache* cache) {
  Vector r = sigmoid(p.ur * x + p.wr * y + p.br);
  Vector z = sigmoid(p.uz * x + p.wz * y + p.bz);
  Vector ws_y = p.ws * y;
  Vector n = (p.us * x + r.cwiseProduct(ws_y) + p.bs).array().tanh().matrix();
  Vector out = z.cwiseProduct(y) + (Vector::Ones(z.size()) - z).cwiseProduct(n);
  if (cache) {
    cache->x = x;
    cache->y_prev = y;
    cache->r = std::move(r);
    cache->z = std::move(z);
    cache->n = std::move(n);
    cache->ws_y = std::move(ws_y);
  }
  return out;
}

/// Backpropagates dy through one cached step; writes dx and dy_prev.
void gru_backward(const GruParams& p, const GruCache& c, const Vector& dy, GruParams& g, Vector& dx,
                  Vector& dy_prev) {
  const auto ones = Vector::Ones(dy.size());
  const Vector dz = dy.cwiseProduct(c.y_prev - c.n);
  const Vector dn = dy.cwiseProduct(ones - c.z);
  dy_prev = dy.cwiseProduct(c.z);

  const Vector dn_pre = dn.cwiseProduct(ones - c.n.cwiseProduct(c.n));
  g.us.noalias() += dn_pre * c.x.transpose();
  g.bs += dn_pre;
  dx.noalias() = p.us.transpose() * dn_pre;

  const Vector dr = dn_pre.cwiseProduct(c.ws_y);
  const Vector dws_y = dn_pre.cwiseProduct(c.r);
  g.ws.noalias() += dws_y * c.y_prev.transpose();
  dy_prev.noalias() += p.ws.transpose() * dws_y;

  const Vector dz_pre = dz.cwiseProduct(c.z).cwiseProduct(ones - c.z);
  g.uz.noalias() += dz_pre * c.x.transpose();
  g.wz.noalias() += dz_pre * c.y_prev.transpose();
  g.bz += dz_pre;
  dx.noalias() += p.uz.transpose() * dz_pre;
  dy_prev.noalias() += p.wz.transpose() * dz_pre;

  const Vector dr_pre = dr.cwiseProduct(c.r).cwiseProduct(ones - c.r);
  g.ur.noalias() += dr_pre * c.x.transpose();
  g.wr.noalias() += dr_pre * c.y_prev.transpose();
  g.br += dr_pre;
  dx.noalias() += p.ur.transpose() * dr_pre;
  dy_prev.noalias() += p.wr.transpose() * dr_pre;
}

Vector embed_edge(const ModelParams& m, const EdgePos& e) {
  if (e.row >= static_cast<std::size_t>(m.config.max_rows) || e.col >= static_cast<std::size_t>(m.config.max_cols)) {
    throw VocabularyError("edge (" + std::to_string(e.row + 1) + "," + std::to_string(e.col + 1) +
                          ") outside the embedding range " + std::to_string(m.config.max_rows) + "x" +
                          std::to_string(m.config.max_cols));
  }
  return m.embed.col(static_cast<Eigen::Index>(e.row)) +
         m.embed.col(static_cast<Eigen::Index>(m.config.max_rows) + static_cast<Eigen::Index>(e.col));
}

struct EncoderTape {
  std::vector<Vector> x;
  std::vector<GruCache> fwd;
  std::vector<GruCache> bwd;
  Matrix states;
};

EncoderTape encode_with_tape(const EdgeSequence& edges, const ModelParams& m) {
  const auto L = static_cast<Eigen::Index>(edges.size());
  const Eigen::Index h = m.config.hidden;
  EncoderTape tape;
  tape.x.reserve(edges.size());
  for (const EdgePos& e : edges) tape.x.push_back(embed_edge(m, e));
  tape.fwd.resize(edges.size());
  tape.bwd.resize(edges.size());
  tape.states.resize(2 * h, L);

  Vector state = Vector::Zero(h);
  if (L > 0) check_gru_shapes(tape.x[0], state, m.fwd);
  for (Eigen::Index l = 0; l < L; ++l) {
    state = gru_forward(m.fwd, tape.x[l], state, &tape.fwd[l]);
    tape.states.col(l).head(h) = state;
  }
  state.setZero();
  for (Eigen::Index l = L - 1; l >= 0; --l) {
    state = gru_forward(m.bwd, tape.x[l], state, &tape.bwd[l]);
    tape.states.col(l).tail(h) = state;
  }
  return tape;
}

/// Tracks colors assigned so far and which pointers are available next.
class PointerState {
 public:
  PointerState(const AdjacencyMatrix& adjacency, const EdgeSequence& edges, bool mask, std::size_t window)
      : adjacency_(adjacency), edges_(edges), mask_(mask), window_(window), color_of_(edges.size(), 0) {}

  /// Available pointers for step t: recent color heads, then t itself.
  std::vector<std::size_t> candidates(std::size_t t) const {
    std::vector<std::size_t> out;
    const std::size_t first = heads_.size() > window_ ? heads_.size() - window_ : 0;
    for (std::size_t i = first; i < heads_.size(); ++i) {
      if (!mask_ || compatible(i, t)) out.push_back(heads_[i]);
    }
    out.push_back(t);
    return out;
  }

  void commit(std::size_t t, std::size_t choice) {
    if (choice == t) {
      heads_.push_back(t);
      members_.emplace_back();
      color_of_[t] = heads_.size();
    } else {
      color_of_[t] = color_of_[choice];
    }
    members_[color_of_[t] - 1].push_back(t);
  }

  int color(std::size_t t) const { return static_cast<int>(color_of_[t]); }

 private:
  /// Whether edge t may take color (index + 1) without breaking C2.
  bool compatible(std::size_t color_index, std::size_t t) const {
    const EdgePos e = edges_[t];
    for (std::size_t m : members_[color_index]) {
      const EdgePos o = edges_[m];
      if (o.row == e.row || o.col == e.col) return false;
      if (adjacency_.is_one(e.row, o.col) || adjacency_.is_one(o.row, e.col)) return false;
    }
    return true;
  }

  const AdjacencyMatrix& adjacency_;
  const EdgeSequence& edges_;
  bool mask_;
  std::size_t window_;
  std::vector<std::size_t> heads_;
  std::vector<std::vector<std::size_t>> members_;
  std::vector<std::size_t> color_of_;
};

struct StepTape {
  GruCache gru;
  Vector d;
  Vector q;
  Eigen::Index lo = 0;  // glimpse window [lo, lo + alpha.size())
  Vector alpha;
  std::vector<std::size_t> candidates;
  Vector probs;
  std::size_t chosen = 0;  // index into candidates
};

struct DecoderTape {
  EncoderTape enc;
  Matrix proj;  // W1 s_l, h x L
  std::vector<StepTape> steps;
  std::vector<std::size_t> choices;
  ColorSequence colors;
  double logprob = 0.0;
};

enum class Policy { Teacher, Greedy, Sample };

double score(const ModelParams& m, const Matrix& proj, Eigen::Index j, const Vector& q) {
  return m.beta.dot((proj.col(j) + q).array().tanh().matrix());
}

DecoderTape run_decoder(const ModelParams& m, const AdjacencyMatrix& adjacency, const EdgeSequence& edges, bool mask,
                        Policy policy, const std::vector<std::size_t>* targets, Rng* rng) {
  const Eigen::Index h = m.config.hidden;
  const auto L = static_cast<Eigen::Index>(edges.size());
  const auto window = static_cast<Eigen::Index>(std::max(1, m.config.attention_window));

  DecoderTape tape;
  tape.enc = encode_with_tape(edges, m);
  const Matrix& states = tape.enc.states;
  tape.proj.noalias() = m.w1 * states;
  tape.steps.resize(edges.size());
  tape.choices.resize(edges.size());
  tape.colors.resize(edges.size());

  PointerState pointers(adjacency, edges, mask, static_cast<std::size_t>(window));
  Vector d_prev = states.col(L - 1).head(h);
  Vector ctx = Vector::Zero(2 * h);
  Vector prev = m.start;
  Vector input(2 * h + 2 * m.config.embed);

  for (Eigen::Index t = 0; t < L; ++t) {
    StepTape& st = tape.steps[static_cast<std::size_t>(t)];
    input << ctx, tape.enc.x[static_cast<std::size_t>(t)], prev;
    if (t == 0) check_gru_shapes(input, d_prev, m.dec);
    st.d = gru_forward(m.dec, input, d_prev, &st.gru);
    st.q.noalias() = m.w2 * st.d;

    st.lo = L <= window ? 0 : std::clamp<Eigen::Index>(t - window / 2, 0, L - window);
    const Eigen::Index width = std::min(L, window);
    Vector u_win(width);
    for (Eigen::Index j = 0; j < width; ++j) u_win[j] = score(m, tape.proj, st.lo + j, st.q);
    st.alpha = log_softmax(u_win).array().exp().matrix();
    ctx.noalias() = states.middleCols(st.lo, width) * st.alpha;

    st.candidates = pointers.candidates(static_cast<std::size_t>(t));
    Vector u_c(static_cast<Eigen::Index>(st.candidates.size()));
    for (std::size_t c = 0; c < st.candidates.size(); ++c) {
      const auto j = static_cast<Eigen::Index>(st.candidates[c]);
      u_c[static_cast<Eigen::Index>(c)] =
          (j >= st.lo && j < st.lo + width) ? u_win[j - st.lo] : score(m, tape.proj, j, st.q);
    }
    const Vector logp = log_softmax(u_c);
    st.probs = logp.array().exp().matrix();

    std::size_t pick = 0;
    switch (policy) {
      case Policy::Teacher: {
        const std::size_t want = (*targets)[static_cast<std::size_t>(t)];
        const auto it = std::find(st.candidates.begin(), st.candidates.end(), want);
        if (it == st.candidates.end()) {
          throw BadTarget("pointer " + std::to_string(want + 1) + " is not available at step " +
                          std::to_string(t + 1));
        }
        pick = static_cast<std::size_t>(it - st.candidates.begin());
        break;
      }
      case Policy::Greedy: {
        Eigen::Index best = 0;
        st.probs.maxCoeff(&best);
        pick = static_cast<std::size_t>(best);
        break;
      }
      case Policy::Sample: {
        const double u = rng->uniform();
        double acc = 0.0;
        pick = st.candidates.size() - 1;
        for (std::size_t c = 0; c < st.candidates.size(); ++c) {
          acc += st.probs[static_cast<Eigen::Index>(c)];
          if (u < acc) {
            pick = c;
            break;
          }
        }
        break;
      }
    }
    st.chosen = pick;
    const std::size_t choice = st.candidates[pick];
    tape.logprob += logp[static_cast<Eigen::Index>(pick)];
    tape.choices[static_cast<std::size_t>(t)] = choice;
    pointers.commit(static_cast<std::size_t>(t), choice);
    tape.colors[static_cast<std::size_t>(t)] = pointers.color(static_cast<std::size_t>(t));

    prev = choice == static_cast<std::size_t>(t) ? m.start : tape.enc.x[choice];
    d_prev = st.d;
  }
  return tape;
}

/// Adds scale * d(tape.logprob)/d(theta) to grad.
void backward(const ModelParams& m, const EdgeSequence& edges, const DecoderTape& tape, double scale,
              ModelParams& grad) {
  const Eigen::Index h = m.config.hidden;
  const Eigen::Index d = m.config.embed;
  const auto L = static_cast<Eigen::Index>(edges.size());
  const Matrix& states = tape.enc.states;

  Matrix d_states = Matrix::Zero(2 * h, L);
  Matrix d_proj = Matrix::Zero(h, L);
  std::vector<Vector> dx(edges.size(), Vector::Zero(d));
  Vector dd_next = Vector::Zero(h);
  Vector dctx = Vector::Zero(2 * h);
  Vector d_input;
  Vector dd_prev;
  std::vector<std::pair<Eigen::Index, double>> du;

  for (Eigen::Index t = L - 1; t >= 0; --t) {
    const StepTape& st = tape.steps[static_cast<std::size_t>(t)];
    const auto width = st.alpha.size();
    du.clear();

    // Attention context of this step feeds step t+1.
    const auto window_states = states.middleCols(st.lo, width);
    const Vector dalpha = window_states.transpose() * dctx;
    const double mean = st.alpha.dot(dalpha);
    d_states.middleCols(st.lo, width).noalias() += dctx * st.alpha.transpose();
    for (Eigen::Index j = 0; j < width; ++j) du.emplace_back(st.lo + j, st.alpha[j] * (dalpha[j] - mean));

    // Pointer log-probability of the chosen candidate.
    for (std::size_t c = 0; c < st.candidates.size(); ++c) {
      const auto j = static_cast<Eigen::Index>(st.candidates[c]);
      const double g = scale * ((c == st.chosen ? 1.0 : 0.0) - st.probs[static_cast<Eigen::Index>(c)]);
      if (j >= st.lo && j < st.lo + width) {
        du[static_cast<std::size_t>(j - st.lo)].second += g;
      } else {
        du.emplace_back(j, g);
      }
    }

    Vector dq = Vector::Zero(h);
    for (const auto& [j, g] : du) {
      if (g == 0.0) continue;
      const Vector a = (tape.proj.col(j) + st.q).array().tanh().matrix();
      grad.beta.noalias() += g * a;
      const Vector dpre = (g * m.beta).cwiseProduct(Vector::Ones(h) - a.cwiseProduct(a));
      d_proj.col(j) += dpre;
      dq += dpre;
    }
    grad.w2.noalias() += dq * st.d.transpose();
    const Vector dd = dd_next + m.w2.transpose() * dq;

    gru_backward(m.dec, st.gru, dd, grad.dec, d_input, dd_prev);
    dctx = d_input.head(2 * h);
    dx[static_cast<std::size_t>(t)] += d_input.segment(2 * h, d);
    const auto dprev = d_input.tail(d);
    if (t == 0 || tape.choices[static_cast<std::size_t>(t - 1)] == static_cast<std::size_t>(t - 1)) {
      grad.start += dprev;
    } else {
      dx[tape.choices[static_cast<std::size_t>(t - 1)]] += dprev;
    }
    dd_next = dd_prev;
  }

  // The decoder starts from the last forward encoder state.
  d_states.col(L - 1).head(h) += dd_next;
  grad.w1.noalias() += d_proj * states.transpose();
  d_states.noalias() += m.w1.transpose() * d_proj;

  Vector dh = Vector::Zero(h);
  Vector dxl;
  Vector dh_prev;
  for (Eigen::Index l = L - 1; l >= 0; --l) {
    dh += d_states.col(l).head(h);
    gru_backward(m.fwd, tape.enc.fwd[static_cast<std::size_t>(l)], dh, grad.fwd, dxl, dh_prev);
    dx[static_cast<std::size_t>(l)] += dxl;
    dh = dh_prev;
  }
  dh.setZero();
  for (Eigen::Index l = 0; l < L; ++l) {
    dh += d_states.col(l).tail(h);
    gru_backward(m.bwd, tape.enc.bwd[static_cast<std::size_t>(l)], dh, grad.bwd, dxl, dh_prev);
    dx[static_cast<std::size_t>(l)] += dxl;
    dh = dh_prev;
  }

  for (std::size_t l = 0; l < edges.size(); ++l) {
    grad.embed.col(static_cast<Eigen::Index>(edges[l].row)) += dx[l];
    grad.embed.col(static_cast<Eigen::Index>(m.config.max_rows) + static_cast<Eigen::Index>(edges[l].col)) += dx[l];
  }
}

}  // namespace

GruParams GruParams::zeros(Eigen::Index input, Eigen::Index hidden) {
  GruParams g;
  for (Matrix* u : {&g.ur, &g.uz, &g.us}) *u = Matrix::Zero(hidden, input);
  for (Matrix* w : {&g.wr, &g.wz, &g.ws}) *w = Matrix::Zero(hidden, hidden);
  for (Vector* b : {&g.br, &g.bz, &g.bs}) *b = Vector::Zero(hidden);
  return g;
}

ModelParams ModelParams::zeros(const ModelConfig& config) {
  if (config.hidden < 1 || config.embed < 1 || config.max_rows < 1 || config.max_cols < 1) {
    throw ShapeError("model sizes must be positive");
  }
  const Eigen::Index h = config.hidden;
  const Eigen::Index d = config.embed;
  ModelParams m;
  m.config = config;
  m.embed = Matrix::Zero(d, config.max_rows + config.max_cols);
  m.fwd = GruParams::zeros(d, h);
  m.bwd = GruParams::zeros(d, h);
  m.dec = GruParams::zeros(2 * h + 2 * d, h);
  m.beta = Vector::Zero(h);
  m.w1 = Matrix::Zero(h, 2 * h);
  m.w2 = Matrix::Zero(h, h);
  m.start = Vector::Zero(d);
  return m;
}

ModelParams ModelParams::init(const ModelConfig& config) {
  ModelParams m = zeros(config);
  Rng rng(config.seed);
  m.for_each_tensor([&](TensorView<double> t) {
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data[i] = rng.uniform(-0.08, 0.08);
  });
  return m;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for_each_tensor([&](TensorView<const double> t) { n += static_cast<std::size_t>(t.size()); });
  return n;
}

double ModelParams::squared_norm() const {
  double s = 0.0;
  for_each_tensor([&](TensorView<const double> t) {
    for (Eigen::Index i = 0; i < t.size(); ++i) s += t.data[i] * t.data[i];
  });
  return s;
}

bool ModelParams::all_finite() const {
  bool ok = true;
  for_each_tensor([&](TensorView<const double> t) {
    for (Eigen::Index i = 0; i < t.size() && ok; ++i) ok = std::isfinite(t.data[i]);
  });
  return ok;
}

void ModelParams::add_scaled(const ModelParams& other, double factor) {
  std::vector<const double*> src;
  other.for_each_tensor([&](TensorView<const double> t) { src.push_back(t.data); });
  std::size_t k = 0;
  for_each_tensor([&](TensorView<double> t) {
    const double* s = src[k++];
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data[i] += factor * s[i];
  });
}

void ModelParams::scale(double factor) {
  for_each_tensor([&](TensorView<double> t) {
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data[i] *= factor;
  });
}

Vector gru_step(const Vector& x, const Vector& y_prev, const GruParams& p) {
  check_gru_shapes(x, y_prev, p);
  return gru_forward(p, x, y_prev, nullptr);
}

EncoderStates encode(const EdgeSequence& edges, const ModelParams& params) {
  if (edges.empty()) throw InvalidParameter("encode needs at least one edge");
  return {encode_with_tape(edges, params).states};
}

Vector decode_step(const EncoderStates& states, const Vector& d_t, const std::vector<bool>& mask,
                   const ModelParams& params) {
  const Eigen::Index L = states.length();
  const Eigen::Index h = params.config.hidden;
  if (static_cast<Eigen::Index>(mask.size()) != L) throw ShapeError("mask length differs from the sequence");
  if (d_t.size() != h || states.states.rows() != 2 * h) throw ShapeError("decoder state shape mismatch");
  if (std::none_of(mask.begin(), mask.end(), [](bool b) { return b; })) {
    throw NoFeasibleAction("every pointer position is masked");
  }
  const Matrix proj = params.w1 * states.states;
  const Vector q = params.w2 * d_t;
  Vector u(L);
  for (Eigen::Index j = 0; j < L; ++j) {
    u[j] = mask[static_cast<std::size_t>(j)] ? score(params, proj, j, q) : -std::numeric_limits<double>::infinity();
  }
  const double top = u.maxCoeff();
  Vector p = (u.array() - top).exp().matrix();
  for (Eigen::Index j = 0; j < L; ++j) {
    if (!mask[static_cast<std::size_t>(j)]) p[j] = 0.0;
  }
  return p / p.sum();
}

ColorSequence pointer_to_colors(const std::vector<std::size_t>& choices) {
  ColorSequence colors(choices.size(), 0);
  int next = 1;
  for (std::size_t l = 0; l < choices.size(); ++l) {
    if (choices[l] > l) {
      throw InvalidPointer("step " + std::to_string(l + 1) + " points forward to " + std::to_string(choices[l] + 1));
    }
    colors[l] = choices[l] == l ? next++ : colors[choices[l]];
  }
  return colors;
}

std::vector<std::size_t> colors_to_pointers(const ColorSequence& colors) {
  if (!is_canonical(colors)) throw BadTarget("target colors are not in canonical first-occurrence order");
  std::vector<std::size_t> first;
  std::vector<std::size_t> out(colors.size());
  for (std::size_t l = 0; l < colors.size(); ++l) {
    const auto c = static_cast<std::size_t>(colors[l]);
    if (c > first.size()) first.push_back(l);
    out[l] = first[c - 1];
  }
  return out;
}

Episode rollout(const AdjacencyMatrix& adjacency, const ModelParams& params, const RolloutOptions& options) {
  Episode ep;
  ep.adjacency = adjacency;
  ep.masked = options.mask;
  ep.input = extract_edge_sequence(adjacency);
  if (!ep.input.empty()) {
    Rng rng(options.seed);
    const auto policy = options.mode == DecodeMode::Greedy ? Policy::Greedy : Policy::Sample;
    DecoderTape tape = run_decoder(params, adjacency, ep.input, options.mask, policy, nullptr, &rng);
    ep.choices = std::move(tape.choices);
    ep.output = std::move(tape.colors);
    ep.logprob = tape.logprob;
  }
  ep.array = assemble_array(adjacency, ep.input, ep.output);
  ep.reward = options.evaluate ? (verify(ep.array).valid ? 1 : -1) : 0;
  return ep;
}

double sequence_log_prob(const ModelParams& params, const AdjacencyMatrix& adjacency, const EdgeSequence& edges,
                         const std::vector<std::size_t>& choices, bool mask, ModelParams* grad, double scale) {
  if (choices.size() != edges.size()) throw LengthMismatch("one pointer per edge is required");
  if (edges.empty()) return 0.0;
  const DecoderTape tape = run_decoder(params, adjacency, edges, mask, Policy::Teacher, &choices, nullptr);
  if (grad) backward(params, edges, tape, scale, *grad);
  return tape.logprob;
}

LossAndGrad supervised_loss(std::span<const TrainingPair> batch, const ModelParams& params, bool mask) {
  if (batch.empty()) throw InvalidBatch("supervised batch is empty");
  LossAndGrad out{0.0, ModelParams::zeros(params.config)};
  const double w = 1.0 / static_cast<double>(batch.size());
  for (const TrainingPair& pair : batch) {
    const auto targets = colors_to_pointers(pair.colors);
    out.loss -= w * sequence_log_prob(params, pair.adjacency(), pair.edges, targets, mask, &out.grad, -w);
  }
  return out;
}

ModelParams reinforce_gradient(std::span<const Episode> batch, const ModelParams& params, double baseline) {
  if (batch.empty()) throw InvalidBatch("REINFORCE batch is empty");
  ModelParams grad = ModelParams::zeros(params.config);
  const double w = 1.0 / static_cast<double>(batch.size());
  for (const Episode& ep : batch) {
    const double weight = w * (static_cast<double>(ep.reward) - baseline);
    if (weight == 0.0 || ep.input.empty()) continue;
    sequence_log_prob(params, ep.adjacency, ep.input, ep.choices, ep.masked, &grad, weight);
  }
  return grad;
}

double clip_gradient(ModelParams& grad, double max_norm) {
  const double norm = std::sqrt(grad.squared_norm());
  if (max_norm > 0.0 && norm > max_norm) grad.scale(max_norm / norm);
  return norm;
}

ModelParams reinforce_update(std::span<const Episode> batch, const ModelParams& params, double learning_rate,
                             double clip_norm, double baseline) {
  ModelParams grad = reinforce_gradient(batch, params, baseline);
  clip_gradient(grad, clip_norm);
  ModelParams next = params;
  next.add_scaled(grad, learning_rate);
  return next;
}

}  // namespace pdanet::neural
