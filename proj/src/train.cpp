#include "maze/train.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>

#include "maze/dataset.hpp"
#include "maze/error.hpp"
#include "maze/raster.hpp"

namespace maze::trainer {

namespace {

template <typename T>
void relu_backward_inplace(TensorT<T>& d, const TensorT<T>& post_activation) {
  for (std::size_t i = 0; i < d.data.size(); ++i) {
    if (post_activation.data[i] <= T(0)) d.data[i] = T(0);
  }
}

template <typename T>
TensorT<T> first_channels(const TensorT<T>& t, int count) {
  TensorT<T> out(count, t.height, t.width);
  std::copy(t.data.begin(), t.data.begin() + static_cast<std::ptrdiff_t>(out.data.size()),
            out.data.begin());
  return out;
}

// Adjoint of conv_apply: accumulates dW/dB into `grad` and, when requested,
// fills the gradient w.r.t. the layer input. Tap ranges mirror the forward
// pass exactly.
template <typename T>
void conv_backward(const TensorT<T>& input, const net::ConvLayerT<T>& layer,
                   const TensorT<T>& dout, net::ConvLayerT<T>& grad, TensorT<T>* dinput) {
  if (input.channels != layer.in_ch || dout.channels != layer.out_ch ||
      input.height != dout.height || input.width != dout.width) {
    throw ContractError("conv_backward shape mismatch");
  }
  const int h = input.height, w = input.width, k = layer.k, pad = k / 2;

  for (int oc = 0; oc < layer.out_ch; ++oc) {
    const T* dp = dout.plane(oc);
    T acc = 0;
    for (std::size_t i = 0; i < dout.plane_size(); ++i) acc += dp[i];
    grad.bias[static_cast<std::size_t>(oc)] += acc;
  }

  for (int oc = 0; oc < layer.out_ch; ++oc) {
    const T* dp = dout.plane(oc);
    for (int ic = 0; ic < layer.in_ch; ++ic) {
      const T* ip = input.plane(ic);
      T* wg = grad.weights.data() +
              (static_cast<std::size_t>(oc) * static_cast<std::size_t>(layer.in_ch) +
               static_cast<std::size_t>(ic)) *
                  static_cast<std::size_t>(k) * static_cast<std::size_t>(k);
      for (int ky = 0; ky < k; ++ky) {
        const int dy = ky - pad;
        const int y0 = std::max(0, -dy), y1 = std::min(h, h - dy);
        for (int kx = 0; kx < k; ++kx) {
          const int dx = kx - pad;
          const int x0 = std::max(0, -dx), x1 = std::min(w, w - dx);
          T acc = 0;
          for (int y = y0; y < y1; ++y) {
            const T* drow = dp + static_cast<std::size_t>(y) * static_cast<std::size_t>(w);
            const T* irow = ip + static_cast<std::size_t>(y + dy) * static_cast<std::size_t>(w) + dx;
            for (int x = x0; x < x1; ++x) acc += drow[x] * irow[x];
          }
          wg[ky * k + kx] += acc;
        }
      }
    }
  }

  if (dinput != nullptr) {
    *dinput = TensorT<T>(layer.in_ch, h, w);
    for (int oc = 0; oc < layer.out_ch; ++oc) {
      const T* dp = dout.plane(oc);
      for (int ic = 0; ic < layer.in_ch; ++ic) {
        T* gp = dinput->plane(ic);
        const T* wbase = layer.weights.data() +
                         (static_cast<std::size_t>(oc) * static_cast<std::size_t>(layer.in_ch) +
                          static_cast<std::size_t>(ic)) *
                             static_cast<std::size_t>(k) * static_cast<std::size_t>(k);
        for (int ky = 0; ky < k; ++ky) {
          const int dy = ky - pad;
          const int y0 = std::max(0, -dy), y1 = std::min(h, h - dy);
          for (int kx = 0; kx < k; ++kx) {
            const int dx = kx - pad;
            const int x0 = std::max(0, -dx), x1 = std::min(w, w - dx);
            const T wv = wbase[ky * k + kx];
            for (int y = y0; y < y1; ++y) {
              const T* drow = dp + static_cast<std::size_t>(y) * static_cast<std::size_t>(w);
              T* grow = gp + static_cast<std::size_t>(y + dy) * static_cast<std::size_t>(w) + dx;
              for (int x = x0; x < x1; ++x) grow[x] += wv * drow[x];
            }
          }
        }
      }
    }
  }
}

net::LayerStack<float> zero_like(const net::LayerStack<float>& layers) {
  net::LayerStack<float> out;
  out.reserve(layers.size());
  for (const auto& l : layers) out.push_back(net::ConvLayerT<float>::zeros(l.out_ch, l.in_ch, l.k));
  return out;
}

void axpy_layers(net::LayerStack<float>& dst, const net::LayerStack<float>& src, float scale) {
  for (std::size_t i = 0; i < dst.size(); ++i) {
    for (std::size_t j = 0; j < dst[i].weights.size(); ++j) {
      dst[i].weights[j] += scale * src[i].weights[j];
    }
    for (std::size_t j = 0; j < dst[i].bias.size(); ++j) dst[i].bias[j] += scale * src[i].bias[j];
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (m < 2) throw InputError("training regime m must be at least 2");
  if (alpha < 0.0 || alpha > 1.0) throw InputError("alpha must lie in [0,1]");
  if (batch_size < 1 || epochs < 0 || learning_rate <= 0) throw InputError("bad training config");
  if (probe_low < 1 || probe_high < probe_low || probe_step < 1) {
    throw InputError("bad probe iteration range");
  }
  if (train_dataset.empty()) throw InputError("train dataset path missing");
}

template <typename T>
LossGrad<T> cross_entropy_loss(const TensorT<T>& logits, const TensorT<T>& target) {
  if (logits.channels != 2 || target.channels != 1 || logits.height != target.height ||
      logits.width != target.width) {
    throw ContractError("cross_entropy_loss shape mismatch");
  }
  LossGrad<T> out;
  out.dlogits = TensorT<T>(2, logits.height, logits.width);
  const std::size_t pixels = logits.plane_size();
  const T inv = T(1) / static_cast<T>(pixels);
  const T* z0 = logits.plane(0);
  const T* z1 = logits.plane(1);
  const T* tp = target.plane(0);
  T* d0 = out.dlogits.plane(0);
  T* d1 = out.dlogits.plane(1);
  T loss = 0;
  for (std::size_t i = 0; i < pixels; ++i) {
    const T mx = std::max(z0[i], z1[i]);
    const T e0 = std::exp(z0[i] - mx);
    const T e1 = std::exp(z1[i] - mx);
    const T zsum = e0 + e1;
    const bool one = tp[i] >= T(0.5);
    loss += std::log(zsum) + mx - (one ? z1[i] : z0[i]);
    const T p0 = e0 / zsum;
    const T p1 = e1 / zsum;
    d0[i] = (p0 - (one ? T(0) : T(1))) * inv;
    d1[i] = (p1 - (one ? T(1) : T(0))) * inv;
  }
  out.loss = loss * inv;
  return out;
}

template <typename T>
BackwardResult<T> backward(const TensorT<T>& input, const net::NetworkConfig& config,
                           const net::LayerStack<T>& layers, int n_detached, int k_tracked,
                           const TensorT<T>& target) {
  if (n_detached < 0 || k_tracked < 1) {
    throw ContractError("backward requires n_detached >= 0 and k_tracked >= 1");
  }
  BackwardResult<T> result;
  result.grads.reserve(layers.size());
  for (const auto& l : layers) {
    result.grads.push_back(net::ConvLayerT<T>::zeros(l.out_ch, l.in_ch, l.k));
  }

  // Detached prefix: plain forward, no stored activations.
  TensorT<T> s = net::project(input, config, layers);
  TensorT<T> projection_out;
  if (n_detached == 0) projection_out = s;
  for (int i = 0; i < n_detached; ++i) s = net::rb_iterate(input, s, config, layers);

  // Tracked iterations with stored activations. outs[l-1] holds the
  // post-activation output of recurrent layer l.
  struct IterStore {
    TensorT<T> concat_in;
    std::array<TensorT<T>, 5> outs;
  };
  std::vector<IterStore> iters;
  iters.reserve(static_cast<std::size_t>(k_tracked));
  const bool rb_relu = config.rb_activation == net::RbActivation::Relu;
  for (int j = 0; j < k_tracked; ++j) {
    IterStore st;
    st.concat_in = net::concat_channels(s, input);
    const TensorT<T>* cur = &st.concat_in;
    for (int l = 1; l <= config.rb_layers; ++l) {
      TensorT<T> x = net::conv_apply(*cur, layers[static_cast<std::size_t>(l)]);
      if (rb_relu && l < config.rb_layers) net::relu_inplace(x);
      st.outs[static_cast<std::size_t>(l - 1)] = std::move(x);
      cur = &st.outs[static_cast<std::size_t>(l - 1)];
    }
    s = st.outs[4];
    iters.push_back(std::move(st));
  }

  // Head.
  const TensorT<T>& sk = iters.back().outs[4];
  TensorT<T> h6 = net::conv_apply(sk, layers[6]);
  net::relu_inplace(h6);
  TensorT<T> h7 = net::conv_apply(h6, layers[7]);
  net::relu_inplace(h7);
  TensorT<T> logits = net::conv_apply(h7, layers[8]);

  LossGrad<T> lg = cross_entropy_loss(logits, target);
  result.loss = lg.loss;

  TensorT<T> d7;
  conv_backward(h7, layers[8], lg.dlogits, result.grads[8], &d7);
  relu_backward_inplace(d7, h7);
  TensorT<T> d6;
  conv_backward(h6, layers[7], d7, result.grads[7], &d6);
  relu_backward_inplace(d6, h6);
  TensorT<T> ds;
  conv_backward(sk, layers[6], d6, result.grads[6], &ds);

  // Weight-tied recurrence: gradients accumulate across the k iterations.
  for (int j = k_tracked - 1; j >= 0; --j) {
    const IterStore& st = iters[static_cast<std::size_t>(j)];
    TensorT<T> dcur = std::move(ds);
    for (int l = config.rb_layers; l >= 1; --l) {
      if (rb_relu && l < config.rb_layers) {
        relu_backward_inplace(dcur, st.outs[static_cast<std::size_t>(l - 1)]);
      }
      const TensorT<T>& in_act =
          (l == 1) ? st.concat_in : st.outs[static_cast<std::size_t>(l - 2)];
      TensorT<T> dprev;
      conv_backward(in_act, layers[static_cast<std::size_t>(l)], dcur,
                    result.grads[static_cast<std::size_t>(l)], &dprev);
      dcur = std::move(dprev);
    }
    // Split the concat gradient; the raw-input slice is data, not a parameter.
    ds = first_channels(dcur, config.width);
  }

  // The projection sees gradients only when its output was tracked.
  if (n_detached == 0) {
    relu_backward_inplace(ds, projection_out);
    conv_backward(input, layers[0], ds, result.grads[0], static_cast<TensorT<T>*>(nullptr));
  }
  return result;
}

void Adam::step(net::LayerStack<float>& layers, const net::LayerStack<float>& grads) {
  if (layers.size() != grads.size()) throw ContractError("optimizer layer/grad count mismatch");
  if (m_.empty()) {
    m_ = zero_like(layers);
    v_ = zero_like(layers);
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, t_);
  const double bc2 = 1.0 - std::pow(beta2_, t_);
  auto update = [&](float& w, float& m, float& v, float g) {
    const double gd = g;
    const double mn = beta1_ * m + (1.0 - beta1_) * gd;
    const double vn = beta2_ * v + (1.0 - beta2_) * gd * gd;
    m = static_cast<float>(mn);
    v = static_cast<float>(vn);
    w -= static_cast<float>(lr_ * (mn / bc1) / (std::sqrt(vn / bc2) + eps_));
  };
  for (std::size_t i = 0; i < layers.size(); ++i) {
    for (std::size_t j = 0; j < layers[i].weights.size(); ++j) {
      update(layers[i].weights[j], m_[i].weights[j], v_[i].weights[j], grads[i].weights[j]);
    }
    for (std::size_t j = 0; j < layers[i].bias.size(); ++j) {
      update(layers[i].bias[j], m_[i].bias[j], v_[i].bias[j], grads[i].bias[j]);
    }
  }
}

StepResult progressive_step_forced(net::NetworkWeights& weights, Adam& optimizer,
                                   std::span<const Sample> batch, const TrainConfig& config, int n,
                                   int k) {
  if (batch.empty()) throw ContractError("progressive step needs a non-empty batch");
  net::LayerStack<float> grads_full = zero_like(weights.layers);
  net::LayerStack<float> grads_prog = zero_like(weights.layers);
  double loss_full = 0, loss_prog = 0;
  for (const Sample& sample : batch) {
    BackwardResult<float> full =
        backward<float>(sample.input, weights.config, weights.layers, 0, config.m, sample.target);
    BackwardResult<float> prog =
        backward<float>(sample.input, weights.config, weights.layers, n, k, sample.target);
    loss_full += full.loss;
    loss_prog += prog.loss;
    axpy_layers(grads_full, full.grads, 1.0f);
    axpy_layers(grads_prog, prog.grads, 1.0f);
  }
  const float inv_b = 1.0f / static_cast<float>(batch.size());
  net::LayerStack<float> total = zero_like(weights.layers);
  axpy_layers(total, grads_full, static_cast<float>(1.0 - config.alpha) * inv_b);
  axpy_layers(total, grads_prog, static_cast<float>(config.alpha) * inv_b);
  optimizer.step(weights.layers, total);

  StepResult result;
  result.loss_full = loss_full / static_cast<double>(batch.size());
  result.loss_prog = loss_prog / static_cast<double>(batch.size());
  result.n = n;
  result.k = k;
  return result;
}

StepResult progressive_step(net::NetworkWeights& weights, Adam& optimizer,
                            std::span<const Sample> batch, const TrainConfig& config, Rng& rng) {
  const int n = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(config.m)));
  const int k = 1 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(config.m - n)));
  return progressive_step_forced(weights, optimizer, batch, config, n, k);
}

std::vector<EvalPoint> evaluate_probe(const net::NetworkWeights& weights,
                                      const std::vector<EvalItem>& items, int low, int high,
                                      int step) {
  std::vector<int> probes;
  for (int i = low; i <= high; i += step) probes.push_back(i);
  if (probes.empty() || items.empty()) return {};

  std::vector<int> solved(probes.size(), 0);
  for (const EvalItem& item : items) {
    const ImageTensor input = raster::instance_to_image(item.instance);
    const net::ForwardResult fwd = net::forward(input, weights, probes.back(), probes);
    for (std::size_t p = 0; p < probes.size(); ++p) {
      const tc::TCReport report = tc::tc_explore(fwd.predictions[p], item.instance);
      if (report.solved && tree_length(*report.extracted_tree) == item.optimal_length) {
        ++solved[p];
      }
    }
  }
  std::vector<EvalPoint> out;
  for (std::size_t p = 0; p < probes.size(); ++p) {
    out.push_back({probes[p], static_cast<double>(solved[p]) / static_cast<double>(items.size())});
  }
  return out;
}

TrainOutcome train(const TrainConfig& config) {
  config.validate();
  std::filesystem::create_directories(config.out_dir);

  const dataset::Dataset train_set = dataset::load(config.train_dataset);
  if (train_set.entries.empty()) throw InputError("training dataset is empty");
  std::vector<Sample> samples;
  samples.reserve(train_set.entries.size());
  for (const auto& entry : train_set.entries) {
    samples.push_back(
        {raster::instance_to_image(entry.instance), read_pixmap(entry.target_path)});
  }

  std::vector<EvalItem> eval_items;
  const dataset::Dataset eval_set =
      config.eval_dataset.empty() ? train_set : dataset::load(config.eval_dataset);
  for (const auto& entry : eval_set.entries) {
    eval_items.push_back({entry.instance, entry.optimal_length});
  }

  net::NetworkConfig ncfg;
  ncfg.width = config.width;
  ncfg.rb_activation = config.rb_activation;
  net::NetworkWeights weights = net::init_weights(ncfg, derive_seed(config.seed, 10));
  weights.meta.note = "trained on " + config.train_dataset.string();

  Adam optimizer(config.learning_rate);
  Rng shuffle_rng(derive_seed(config.seed, 11));
  Rng step_rng(derive_seed(config.seed, 12));

  std::ofstream log(config.out_dir / "metrics.log", std::ios::trunc);
  log << "config m=" << config.m << " alpha=" << config.alpha << " lr=" << config.learning_rate
      << " batch=" << config.batch_size << " epochs=" << config.epochs
      << " width=" << config.width << " seed=" << config.seed
      << " adam_beta1=0.9 adam_beta2=0.999 adam_eps=1e-8 rb_activation="
      << (config.rb_activation == net::RbActivation::None ? "none" : "relu")
      << " init=fan_in_uniform\n";

  TrainOutcome outcome;
  int global_step = 0;
  bool stop = false;
  for (int epoch = 1; epoch <= config.epochs && !stop; ++epoch) {
    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), 0);
    shuffle_rng.shuffle(order);

    for (std::size_t at = 0; at < order.size() && !stop; at += static_cast<std::size_t>(config.batch_size)) {
      std::vector<Sample> batch;
      for (std::size_t i = at; i < std::min(order.size(), at + static_cast<std::size_t>(config.batch_size)); ++i) {
        batch.push_back(samples[order[i]]);
      }
      const StepResult sr = progressive_step(weights, optimizer, batch, config, step_rng);
      ++global_step;
      log << "step epoch=" << epoch << " step=" << global_step << " loss_full=" << sr.loss_full
          << " loss_prog=" << sr.loss_prog << " n=" << sr.n << " k=" << sr.k << "\n";
      if (config.max_steps > 0 && global_step >= config.max_steps) stop = true;
    }

    const bool do_eval = (epoch % config.eval_every_epochs == 0) || stop || epoch == config.epochs;
    if (!do_eval) continue;

    const std::vector<EvalPoint> curve =
        evaluate_probe(weights, eval_items, config.probe_low, config.probe_high, config.probe_step);
    double peak = 0;
    int peak_iter = 0;
    for (const EvalPoint& pt : curve) {
      log << "eval epoch=" << epoch << " iter=" << pt.iteration << " acc=" << pt.accuracy << "\n";
      if (pt.accuracy > peak) {
        peak = pt.accuracy;
        peak_iter = pt.iteration;
      }
    }

    weights.meta.epoch = static_cast<std::uint32_t>(epoch);
    char name[32];
    std::snprintf(name, sizeof(name), "epoch_%03d.mznw", epoch);
    const std::filesystem::path checkpoint = config.out_dir / name;
    net::save_weights(weights, checkpoint);
    log << "checkpoint epoch=" << epoch << " file=" << name << " peak_acc=" << peak
        << " peak_iter=" << peak_iter << "\n";

    if (peak > outcome.best_peak_accuracy || outcome.best_epoch < 0) {
      outcome.best_peak_accuracy = peak;
      outcome.best_peak_iteration = peak_iter;
      outcome.best_epoch = epoch;
      outcome.best_weights = checkpoint;
    }

    if (config.stop_when_eval_perfect) {
      bool all_optimal = true;
      for (const EvalItem& item : eval_items) {
        const tc::SolveResult sv = tc::solve(item.instance, weights, config.eval_tc);
        if (!sv.solved || sv.length != item.optimal_length) {
          all_optimal = false;
          break;
        }
      }
      if (all_optimal) {
        log << "solved-all epoch=" << epoch << " step=" << global_step << "\n";
        outcome.eval_perfect = true;
        outcome.best_peak_accuracy = 1.0;
        outcome.best_epoch = epoch;
        outcome.best_weights = checkpoint;
        stop = true;
      }
    }
  }

  outcome.steps_run = global_step;
  if (outcome.best_epoch >= 0) {
    const std::filesystem::path best = config.out_dir / "best.mznw";
    std::filesystem::copy_file(outcome.best_weights, best,
                               std::filesystem::copy_options::overwrite_existing);
    outcome.best_weights = best;
  }
  return outcome;
}

template struct LossGrad<float>;
template struct LossGrad<double>;
template LossGrad<float> cross_entropy_loss<float>(const TensorT<float>&, const TensorT<float>&);
template LossGrad<double> cross_entropy_loss<double>(const TensorT<double>&,
                                                     const TensorT<double>&);
template BackwardResult<float> backward<float>(const TensorT<float>&, const net::NetworkConfig&,
                                               const net::LayerStack<float>&, int, int,
                                               const TensorT<float>&);
template BackwardResult<double> backward<double>(const TensorT<double>&, const net::NetworkConfig&,
                                                 const net::LayerStack<double>&, int, int,
                                                 const TensorT<double>&);

}  // namespace maze::trainer
