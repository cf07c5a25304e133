#include "symbsel/policy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "symbsel/rng.hpp"

namespace symbsel {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Flat parameter layout. Gate rows are ordered i, f, g, o.
struct Layout {
  int input, hidden, lib;
  int l1_wx, l1_wh, l1_b;
  int l2_wx, l2_wh, l2_b;
  int out_w, out_b;
  int total;
};

Layout make_layout(int lib, int hidden) {
  const int input = 2 * (lib + 1);
  Layout L{};
  L.input = input;
  L.hidden = hidden;
  L.lib = lib;
  int off = 0;
  L.l1_wx = off;
  off += 4 * hidden * input;
  L.l1_wh = off;
  off += 4 * hidden * hidden;
  L.l1_b = off;
  off += 4 * hidden;
  L.l2_wx = off;
  off += 4 * hidden * hidden;
  L.l2_wh = off;
  off += 4 * hidden * hidden;
  L.l2_b = off;
  off += 4 * hidden;
  L.out_w = off;
  off += lib * hidden;
  L.out_b = off;
  off += lib;
  L.total = off;
  return L;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// z[0..4H) = b + Wx·x + Wh·h_prev, then gate activations in place.
void lstm_forward(const double* wx, const double* wh, const double* b,
                  std::span<const double> x, const double* h_prev,
                  const double* c_prev, int in_dim, int hidden, double* gates,
                  double* c, double* h) {
  const int rows = 4 * hidden;
  for (int r = 0; r < rows; ++r) {
    double z = b[r];
    const double* wxr = wx + static_cast<size_t>(r) * in_dim;
    for (int j = 0; j < in_dim; ++j) z += wxr[j] * x[static_cast<size_t>(j)];
    const double* whr = wh + static_cast<size_t>(r) * hidden;
    for (int j = 0; j < hidden; ++j) z += whr[j] * h_prev[j];
    gates[r] = z;
  }
  double* gi = gates;
  double* gf = gates + hidden;
  double* gg = gates + 2 * hidden;
  double* go = gates + 3 * hidden;
  for (int j = 0; j < hidden; ++j) {
    gi[j] = sigmoid(gi[j]);
    gf[j] = sigmoid(gf[j]);
    gg[j] = std::tanh(gg[j]);
    go[j] = sigmoid(go[j]);
    c[j] = gf[j] * c_prev[j] + gi[j] * gg[j];
    h[j] = go[j] * std::tanh(c[j]);
  }
}

// Backward through one LSTM step. dh/dc are gradients w.r.t. this step's
// h and c; dh_prev/dc_prev receive the previous step's, dx the input's.
// Parameter gradients accumulate into dwx/dwh/db.
void lstm_backward(const double* wx, const double* wh,
                   std::span<const double> x, const double* h_prev,
                   const double* c_prev, const double* gates, const double* c,
                   int in_dim, int hidden, const double* dh, const double* dc,
                   double* dwx, double* dwh, double* db, double* dx,
                   double* dh_prev, double* dc_prev, double* dz_scratch) {
  const double* gi = gates;
  const double* gf = gates + hidden;
  const double* gg = gates + 2 * hidden;
  const double* go = gates + 3 * hidden;
  double* dzi = dz_scratch;
  double* dzf = dz_scratch + hidden;
  double* dzg = dz_scratch + 2 * hidden;
  double* dzo = dz_scratch + 3 * hidden;
  for (int j = 0; j < hidden; ++j) {
    const double tc = std::tanh(c[j]);
    const double do_ = dh[j] * tc;
    const double dct = dc[j] + dh[j] * go[j] * (1.0 - tc * tc);
    const double di = dct * gg[j];
    const double df = dct * c_prev[j];
    const double dg = dct * gi[j];
    dc_prev[j] = dct * gf[j];
    dzi[j] = di * gi[j] * (1.0 - gi[j]);
    dzf[j] = df * gf[j] * (1.0 - gf[j]);
    dzg[j] = dg * (1.0 - gg[j] * gg[j]);
    dzo[j] = do_ * go[j] * (1.0 - go[j]);
  }
  const int rows = 4 * hidden;
  std::fill(dx, dx + in_dim, 0.0);
  std::fill(dh_prev, dh_prev + hidden, 0.0);
  for (int r = 0; r < rows; ++r) {
    const double dz = dz_scratch[r];
    if (dz == 0.0) continue;
    double* dwxr = dwx + static_cast<size_t>(r) * in_dim;
    const double* wxr = wx + static_cast<size_t>(r) * in_dim;
    for (int j = 0; j < in_dim; ++j) {
      dwxr[j] += dz * x[static_cast<size_t>(j)];
      dx[j] += wxr[j] * dz;
    }
    double* dwhr = dwh + static_cast<size_t>(r) * hidden;
    const double* whr = wh + static_cast<size_t>(r) * hidden;
    for (int j = 0; j < hidden; ++j) {
      dwhr[j] += dz * h_prev[j];
      dh_prev[j] += whr[j] * dz;
    }
    db[r] += dz;
  }
}

struct StepDist {
  std::vector<double> p;     // 0 where invalid
  std::vector<double> logp;  // meaningful where valid only
  double entropy = 0.0;
};

StepDist step_distribution(std::span<const double> adjusted,
                           std::span<const char> mask) {
  const int n = static_cast<int>(adjusted.size());
  StepDist d;
  d.p.assign(static_cast<size_t>(n), 0.0);
  d.logp.assign(static_cast<size_t>(n), kNegInf);
  double m = kNegInf;
  for (int j = 0; j < n; ++j) {
    if (mask[static_cast<size_t>(j)] && adjusted[static_cast<size_t>(j)] > m) {
      m = adjusted[static_cast<size_t>(j)];
    }
  }
  double z = 0.0;
  for (int j = 0; j < n; ++j) {
    if (mask[static_cast<size_t>(j)]) {
      z += std::exp(adjusted[static_cast<size_t>(j)] - m);
    }
  }
  const double log_z = std::log(z);
  double h = 0.0;
  for (int j = 0; j < n; ++j) {
    if (!mask[static_cast<size_t>(j)]) continue;
    const double lp = adjusted[static_cast<size_t>(j)] - m - log_z;
    d.logp[static_cast<size_t>(j)] = lp;
    const double p = std::exp(lp);
    d.p[static_cast<size_t>(j)] = p;
    h -= p * lp;
  }
  d.entropy = h;
  return d;
}

}  // namespace

PolicyNet::PolicyNet(int lib_size, int hidden, SoftLengthPrior prior)
    : lib_size_(lib_size), hidden_(hidden), prior_(prior) {
  const Layout L = make_layout(lib_size, hidden);
  params_.assign(static_cast<size_t>(L.total), 0.0);
}

void PolicyNet::init_weights(std::uint64_t seed) {
  const Layout L = make_layout(lib_size_, hidden_);
  Rng rng(seed);
  double* p = params_.data();

  auto uniform_fill = [&](int off, int count, double a) {
    for (int i = 0; i < count; ++i) p[off + i] = rng.uniform(-a, a);
  };
  // Orthogonalize each HxH gate block of a recurrent matrix in place.
  auto ortho_fill = [&](int off) {
    const int h = hidden_;
    for (int gate = 0; gate < 4; ++gate) {
      double* block = p + off + static_cast<size_t>(gate) * h * h;
      for (int i = 0; i < h * h; ++i) block[i] = rng.normal();
      for (int r = 0; r < h; ++r) {
        double* row = block + static_cast<size_t>(r) * h;
        for (int q = 0; q < r; ++q) {
          const double* prev = block + static_cast<size_t>(q) * h;
          double dot = 0.0;
          for (int j = 0; j < h; ++j) dot += row[j] * prev[j];
          for (int j = 0; j < h; ++j) row[j] -= dot * prev[j];
        }
        double norm = 0.0;
        for (int j = 0; j < h; ++j) norm += row[j] * row[j];
        norm = std::sqrt(std::max(norm, 1e-300));
        for (int j = 0; j < h; ++j) row[j] /= norm;
      }
    }
  };
  auto forget_bias = [&](int off) {
    std::fill(p + off, p + off + 4 * hidden_, 0.0);
    std::fill(p + off + hidden_, p + off + 2 * hidden_, 1.0);
  };

  uniform_fill(L.l1_wx, 4 * hidden_ * L.input, 1.0 / std::sqrt(L.input));
  ortho_fill(L.l1_wh);
  forget_bias(L.l1_b);
  uniform_fill(L.l2_wx, 4 * hidden_ * hidden_, 1.0 / std::sqrt(hidden_));
  ortho_fill(L.l2_wh);
  forget_bias(L.l2_b);
  uniform_fill(L.out_w, lib_size_ * hidden_, 1.0 / std::sqrt(hidden_));
  std::fill(p + L.out_b, p + L.out_b + lib_size_, 0.0);
}

RecurrentState PolicyNet::initial_state() const {
  RecurrentState s;
  s.h1.assign(static_cast<size_t>(hidden_), 0.0);
  s.c1.assign(static_cast<size_t>(hidden_), 0.0);
  s.h2.assign(static_cast<size_t>(hidden_), 0.0);
  s.c2.assign(static_cast<size_t>(hidden_), 0.0);
  return s;
}

void PolicyNet::step(std::span<const double> input, RecurrentState& state,
                     std::span<double> logits) const {
  const Layout L = make_layout(lib_size_, hidden_);
  const double* p = params_.data();
  std::vector<double> gates1(static_cast<size_t>(4 * hidden_));
  std::vector<double> gates2(static_cast<size_t>(4 * hidden_));
  std::vector<double> c1(static_cast<size_t>(hidden_));
  std::vector<double> h1(static_cast<size_t>(hidden_));
  std::vector<double> c2(static_cast<size_t>(hidden_));
  std::vector<double> h2(static_cast<size_t>(hidden_));

  lstm_forward(p + L.l1_wx, p + L.l1_wh, p + L.l1_b, input, state.h1.data(),
               state.c1.data(), L.input, hidden_, gates1.data(), c1.data(),
               h1.data());
  lstm_forward(p + L.l2_wx, p + L.l2_wh, p + L.l2_b,
               std::span<const double>(h1), state.h2.data(), state.c2.data(),
               hidden_, hidden_, gates2.data(), c2.data(), h2.data());
  for (int r = 0; r < lib_size_; ++r) {
    double z = p[L.out_b + r];
    const double* wr = p + L.out_w + static_cast<size_t>(r) * hidden_;
    for (int j = 0; j < hidden_; ++j) z += wr[j] * h2[static_cast<size_t>(j)];
    logits[static_cast<size_t>(r)] = z;
  }
  state.h1 = std::move(h1);
  state.c1 = std::move(c1);
  state.h2 = std::move(h2);
  state.c2 = std::move(c2);
}

SamplerState::SamplerState() { open_.push_back(Slot{-1, -1, false}); }

SlotContext SamplerState::current() const {
  if (open_.empty()) throw InvalidSequence("sequence already complete");
  return SlotContext{open_.back().parent, open_.back().sibling};
}

void SamplerState::advance(int token, const TokenLibrary& lib) {
  if (open_.empty()) throw InvalidSequence("advance past completion");
  const Slot slot = open_.back();
  open_.pop_back();
  if (slot.fill_below && !open_.empty()) open_.back().sibling = token;
  const int arity = lib.token(token).arity;
  if (arity == 1) {
    open_.push_back(Slot{token, -1, false});
  } else if (arity == 2) {
    open_.push_back(Slot{token, -1, false});  // second child
    open_.push_back(Slot{token, -1, true});   // first child, generated next
  }
  tokens_.push_back(token);
}

std::vector<SlotContext> slot_contexts(std::span<const int> seq,
                                       const TokenLibrary& lib) {
  SamplerState state;
  std::vector<SlotContext> out;
  out.reserve(seq.size());
  for (const int tok : seq) {
    out.push_back(state.current());
    state.advance(tok, lib);
  }
  return out;
}

std::vector<double> encode_state(const SlotContext& slot,
                                 const TokenLibrary& lib) {
  const int n = lib.size();
  std::vector<double> v(static_cast<size_t>(2 * (n + 1)), 0.0);
  const int pi = slot.parent < 0 ? n : slot.parent;
  const int si = slot.sibling < 0 ? n : slot.sibling;
  v[static_cast<size_t>(pi)] = 1.0;
  v[static_cast<size_t>(n + 1 + si)] = 1.0;
  return v;
}

void apply_priors(std::span<double> logits, std::span<const char> mask,
                  int step_index, const SoftLengthPrior& prior,
                  const TokenLibrary& lib) {
  const int n = static_cast<int>(logits.size());
  double penalty = 0.0;
  bool penalize_terminals = false;
  if (prior.enabled) {
    const double d = static_cast<double>(step_index) - prior.target;
    penalty = (d * d) / (2.0 * prior.sigma * prior.sigma);
    penalize_terminals = d < 0.0;
  }
  for (int j = 0; j < n; ++j) {
    if (!mask[static_cast<size_t>(j)]) {
      logits[static_cast<size_t>(j)] = kNegInf;
      continue;
    }
    if (penalty > 0.0) {
      const bool terminal = lib.token(j).arity == 0;
      if (terminal == penalize_terminals) {
        logits[static_cast<size_t>(j)] -= penalty;
      }
    }
  }
}

SampleResult sample_expression(const PolicyNet& net, const TokenLibrary& lib,
                               std::uint64_t seed) {
  Rng rng(seed);
  SamplerState state;
  RecurrentState rec = net.initial_state();
  SampleResult out;
  std::vector<double> logits(static_cast<size_t>(lib.size()));

  while (!state.complete()) {
    const auto mask = valid_next_tokens(state.tokens(), lib);
    const auto input = encode_state(state.current(), lib);
    net.step(input, rec, logits);
    apply_priors(logits, mask, static_cast<int>(state.tokens().size()),
                 net.prior(), lib);
    const StepDist dist = step_distribution(logits, mask);

    const double u = rng.u01();
    int chosen = -1;
    double cum = 0.0;
    for (int j = 0; j < lib.size(); ++j) {
      if (!mask[static_cast<size_t>(j)]) continue;
      cum += dist.p[static_cast<size_t>(j)];
      chosen = j;
      if (u < cum) break;
    }

    out.step_log_probs.push_back(dist.logp[static_cast<size_t>(chosen)]);
    out.step_entropies.push_back(dist.entropy);
    state.advance(chosen, lib);
  }
  out.tokens = state.tokens();
  out.log_likelihood = 0.0;
  for (const double lp : out.step_log_probs) out.log_likelihood += lp;
  return out;
}

SequenceForward::SequenceForward(const PolicyNet& net, const TokenLibrary& lib,
                                 std::span<const int> seq)
    : net_(&net), lib_(&lib), seq_(seq.begin(), seq.end()) {
  if (seq_.empty()) throw InvalidSequence("empty sequence");
  if (static_cast<int>(seq_.size()) > lib.max_length()) {
    throw InvalidSequence("sequence exceeds the library token budget");
  }
  const int hidden = net.hidden();
  const Layout L = make_layout(net.lib_size(), hidden);
  const double* p = net.params().data();
  const std::vector<double> zeros(static_cast<size_t>(hidden), 0.0);

  SamplerState state;
  for (size_t t = 0; t < seq_.size(); ++t) {
    if (state.complete()) {
      throw InvalidSequence("tokens continue after the tree closed");
    }
    const auto mask = valid_next_tokens(state.tokens(), lib);
    const int chosen = seq_[t];
    if (chosen < 0 || chosen >= lib.size() ||
        !mask[static_cast<size_t>(chosen)]) {
      throw InvalidSequence("token " + std::to_string(chosen) +
                            " invalid at position " + std::to_string(t));
    }
    inputs_.push_back(encode_state(state.current(), lib));
    masks_.push_back(mask);

    const double* h1p = t == 0 ? zeros.data() : hidden1_[t - 1].data();
    const double* c1p = t == 0 ? zeros.data() : cells1_[t - 1].data();
    const double* h2p = t == 0 ? zeros.data() : hidden2_[t - 1].data();
    const double* c2p = t == 0 ? zeros.data() : cells2_[t - 1].data();

    gates1_.emplace_back(static_cast<size_t>(4 * hidden));
    cells1_.emplace_back(static_cast<size_t>(hidden));
    hidden1_.emplace_back(static_cast<size_t>(hidden));
    lstm_forward(p + L.l1_wx, p + L.l1_wh, p + L.l1_b, inputs_[t], h1p, c1p,
                 L.input, hidden, gates1_[t].data(), cells1_[t].data(),
                 hidden1_[t].data());

    gates2_.emplace_back(static_cast<size_t>(4 * hidden));
    cells2_.emplace_back(static_cast<size_t>(hidden));
    hidden2_.emplace_back(static_cast<size_t>(hidden));
    lstm_forward(p + L.l2_wx, p + L.l2_wh, p + L.l2_b,
                 std::span<const double>(hidden1_[t]), h2p, c2p, hidden,
                 hidden, gates2_[t].data(), cells2_[t].data(),
                 hidden2_[t].data());

    std::vector<double> logits(static_cast<size_t>(lib.size()));
    for (int r = 0; r < lib.size(); ++r) {
      double z = p[L.out_b + r];
      const double* wr = p + L.out_w + static_cast<size_t>(r) * hidden;
      for (int j = 0; j < hidden; ++j) {
        z += wr[j] * hidden2_[t][static_cast<size_t>(j)];
      }
      logits[static_cast<size_t>(r)] = z;
    }
    apply_priors(logits, mask, static_cast<int>(t), net.prior(), lib);
    StepDist dist = step_distribution(logits, mask);

    logp_chosen_.push_back(dist.logp[static_cast<size_t>(chosen)]);
    entropies_.push_back(dist.entropy);
    probs_.push_back(std::move(dist.p));
    logps_.push_back(std::move(dist.logp));
    state.advance(chosen, lib);
  }
  if (!state.complete()) {
    throw InvalidSequence("sequence leaves open argument slots");
  }
  log_likelihood_ = 0.0;
  for (const double lp : logp_chosen_) log_likelihood_ += lp;
}

void SequenceForward::backward(double coef_ll,
                               std::span<const double> ent_coefs,
                               std::span<double> grad) const {
  const PolicyNet& net = *net_;
  const TokenLibrary& lib = *lib_;
  const int hidden = net.hidden();
  const int T = length();
  const Layout L = make_layout(net.lib_size(), hidden);
  const double* p = net.params().data();
  double* g = grad.data();
  const std::vector<double> zeros(static_cast<size_t>(hidden), 0.0);

  std::vector<double> dh1(static_cast<size_t>(hidden), 0.0);
  std::vector<double> dc1(static_cast<size_t>(hidden), 0.0);
  std::vector<double> dh2(static_cast<size_t>(hidden), 0.0);
  std::vector<double> dc2(static_cast<size_t>(hidden), 0.0);
  std::vector<double> dh1_prev(static_cast<size_t>(hidden));
  std::vector<double> dc1_prev(static_cast<size_t>(hidden));
  std::vector<double> dh2_prev(static_cast<size_t>(hidden));
  std::vector<double> dc2_prev(static_cast<size_t>(hidden));
  std::vector<double> dlogits(static_cast<size_t>(lib.size()));
  std::vector<double> dx2(static_cast<size_t>(hidden));
  std::vector<double> dx1(static_cast<size_t>(L.input));
  std::vector<double> dz(static_cast<size_t>(4 * hidden));

  for (int t = T - 1; t >= 0; --t) {
    const size_t ut = static_cast<size_t>(t);
    const double ec = ent_coefs.empty() ? 0.0 : ent_coefs[ut];
    const auto& mask = masks_[ut];
    const auto& pr = probs_[ut];
    const auto& lp = logps_[ut];
    const double H = entropies_[ut];
    const int chosen = seq_[ut];
    for (int j = 0; j < lib.size(); ++j) {
      if (!mask[static_cast<size_t>(j)]) {
        dlogits[static_cast<size_t>(j)] = 0.0;
        continue;
      }
      const double pj = pr[static_cast<size_t>(j)];
      double d = coef_ll * ((j == chosen ? 1.0 : 0.0) - pj);
      if (ec != 0.0) d += ec * (-pj * (lp[static_cast<size_t>(j)] + H));
      dlogits[static_cast<size_t>(j)] = d;
    }

    // output head
    const auto& h2 = hidden2_[ut];
    for (int r = 0; r < lib.size(); ++r) {
      const double dr = dlogits[static_cast<size_t>(r)];
      if (dr == 0.0) continue;
      double* gw = g + L.out_w + static_cast<size_t>(r) * hidden;
      const double* w = p + L.out_w + static_cast<size_t>(r) * hidden;
      for (int j = 0; j < hidden; ++j) {
        gw[j] += dr * h2[static_cast<size_t>(j)];
        dh2[static_cast<size_t>(j)] += w[j] * dr;
      }
      g[L.out_b + r] += dr;
    }

    const double* h1p = t == 0 ? zeros.data() : hidden1_[ut - 1].data();
    const double* c1p = t == 0 ? zeros.data() : cells1_[ut - 1].data();
    const double* h2p = t == 0 ? zeros.data() : hidden2_[ut - 1].data();
    const double* c2p = t == 0 ? zeros.data() : cells2_[ut - 1].data();

    lstm_backward(p + L.l2_wx, p + L.l2_wh,
                  std::span<const double>(hidden1_[ut]), h2p, c2p,
                  gates2_[ut].data(), cells2_[ut].data(), hidden, hidden,
                  dh2.data(), dc2.data(), g + L.l2_wx, g + L.l2_wh,
                  g + L.l2_b, dx2.data(), dh2_prev.data(), dc2_prev.data(),
                  dz.data());
    for (int j = 0; j < hidden; ++j) {
      dh1[static_cast<size_t>(j)] += dx2[static_cast<size_t>(j)];
    }

    lstm_backward(p + L.l1_wx, p + L.l1_wh,
                  std::span<const double>(inputs_[ut]), h1p, c1p,
                  gates1_[ut].data(), cells1_[ut].data(), L.input, hidden,
                  dh1.data(), dc1.data(), g + L.l1_wx, g + L.l1_wh,
                  g + L.l1_b, dx1.data(), dh1_prev.data(), dc1_prev.data(),
                  dz.data());

    dh1 = dh1_prev;
    dc1 = dc1_prev;
    dh2 = dh2_prev;
    dc2 = dc2_prev;
  }
}

double log_likelihood(const PolicyNet& net, const TokenLibrary& lib,
                      std::span<const int> seq) {
  return SequenceForward(net, lib, seq).log_likelihood();
}

void PolicyNet::save(const std::string& path, const TokenLibrary& lib) const {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw ExprError("cannot open checkpoint for writing: " + path);
  std::fprintf(f, "symbsel-checkpoint v1\n");
  std::fprintf(f, "fingerprint %016llx\n",
               static_cast<unsigned long long>(lib.fingerprint()));
  std::fprintf(f, "lib_size %d\n", lib_size_);
  std::fprintf(f, "hidden %d\n", hidden_);
  std::fprintf(f, "prior %d %a %a\n", prior_.enabled ? 1 : 0, prior_.target,
               prior_.sigma);
  std::fprintf(f, "params %d\n", num_params());
  for (size_t i = 0; i < params_.size(); ++i) {
    std::fprintf(f, "%a%c", params_[i], (i + 1) % 8 == 0 ? '\n' : ' ');
  }
  if (params_.size() % 8 != 0) std::fputc('\n', f);
  if (std::ferror(f)) {
    std::fclose(f);
    throw ExprError("checkpoint write failed: " + path);
  }
  std::fclose(f);
}

PolicyNet PolicyNet::load(const std::string& path, const TokenLibrary& lib) {
  std::ifstream f(path);
  if (!f) throw ExprError("cannot open checkpoint: " + path);
  std::string line;
  std::getline(f, line);
  if (line != "symbsel-checkpoint v1") {
    throw ExprError("unrecognized checkpoint format: " + path);
  }
  std::string key;
  std::string fp_hex;
  f >> key >> fp_hex;
  if (key != "fingerprint") throw ExprError("corrupt checkpoint: " + path);
  const std::uint64_t fp = std::stoull(fp_hex, nullptr, 16);
  if (fp != lib.fingerprint()) {
    throw LibraryMismatch(
        "checkpoint was trained against a different token library");
  }
  int lib_size = 0, hidden = 0;
  f >> key >> lib_size;
  if (key != "lib_size" || lib_size != lib.size()) {
    throw LibraryMismatch("checkpoint lib_size differs from given library");
  }
  f >> key >> hidden;
  if (key != "hidden") throw ExprError("corrupt checkpoint: " + path);
  int prior_enabled = 0;
  std::string target_s, sigma_s;
  f >> key >> prior_enabled >> target_s >> sigma_s;
  if (key != "prior") throw ExprError("corrupt checkpoint: " + path);
  SoftLengthPrior prior;
  prior.enabled = prior_enabled != 0;
  prior.target = std::strtod(target_s.c_str(), nullptr);
  prior.sigma = std::strtod(sigma_s.c_str(), nullptr);
  int n_params = 0;
  f >> key >> n_params;
  if (key != "params") throw ExprError("corrupt checkpoint: " + path);

  PolicyNet net(lib_size, hidden, prior);
  if (n_params != net.num_params()) {
    throw ExprError("checkpoint parameter count mismatch");
  }
  for (int i = 0; i < n_params; ++i) {
    std::string tok;
    if (!(f >> tok)) throw ExprError("checkpoint truncated: " + path);
    net.params_[static_cast<size_t>(i)] = std::strtod(tok.c_str(), nullptr);
  }
  return net;
}

}  // namespace symbsel
