#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "maze/core.hpp"
#include "maze/net.hpp"
#include "maze/rng.hpp"
#include "maze/tc.hpp"
#include "maze/tensor.hpp"

namespace maze::trainer {

struct TrainConfig {
  int m = 30;  // training regime: n + k <= m
  double alpha = 0.01;
  double learning_rate = 0.001;
  int batch_size = 25;
  int epochs = 20;
  int width = 128;
  std::uint64_t seed = 0;
  net::RbActivation rb_activation = net::RbActivation::None;

  std::filesystem::path train_dataset;
  std::filesystem::path eval_dataset;  // empty: evaluate on the training set
  std::filesystem::path out_dir;

  // Accuracy-vs-iteration probe range for the per-epoch evaluation.
  int probe_low = 2;
  int probe_high = 70;
  int probe_step = 2;
  int eval_every_epochs = 1;

  int max_steps = 0;                   // 0 = epochs decide
  bool stop_when_eval_perfect = false; // early exit once tc::solve is optimal everywhere
  tc::TCConfig eval_tc{};              // schedule for the early-exit check

  void validate() const;
};

template <typename T>
struct LossGrad {
  T loss = 0;
  TensorT<T> dlogits;
};

// Mean over pixels of two-class softmax cross-entropy against a 0/1 target.
template <typename T>
LossGrad<T> cross_entropy_loss(const TensorT<T>& logits, const TensorT<T>& target);

template <typename T>
struct BackwardResult {
  T loss = 0;
  net::LayerStack<T> grads;  // same shapes as the nine layers
};

// Progressive-loss gradient: run n_detached recurrent iterations without
// gradient tracking, treat that state as a constant, run k_tracked more with
// tracking, apply the head and the loss, and backpropagate. The recurrent
// layers accumulate gradients across the k tracked iterations; the projection
// only receives gradients when n_detached is zero.
template <typename T>
BackwardResult<T> backward(const TensorT<T>& input, const net::NetworkConfig& config,
                           const net::LayerStack<T>& layers, int n_detached, int k_tracked,
                           const TensorT<T>& target);

// Standard Adam with bias correction; beta1=0.9, beta2=0.999, eps=1e-8.
class Adam {
 public:
  explicit Adam(double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
                double epsilon = 1e-8)
      : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {}

  void step(net::LayerStack<float>& layers, const net::LayerStack<float>& grads);
  int steps_taken() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  int t_ = 0;
  net::LayerStack<float> m_, v_;  // lazily shaped on the first step
};

struct Sample {
  ImageTensor input;   // 3-channel raster
  ImageTensor target;  // 1-channel 0/1
};

struct StepResult {
  double loss_full = 0;
  double loss_prog = 0;
  int n = 0;
  int k = 0;
};

// One optimizer update on a batch: draws n in [0, m-1] and k in [1, m-n],
// combines the two loss terms as (1-alpha)*L_full + alpha*L_prog.
StepResult progressive_step(net::NetworkWeights& weights, Adam& optimizer,
                            std::span<const Sample> batch, const TrainConfig& config, Rng& rng);

// Deterministic variant with n and k supplied, used by tests and boundaries.
StepResult progressive_step_forced(net::NetworkWeights& weights, Adam& optimizer,
                                   std::span<const Sample> batch, const TrainConfig& config, int n,
                                   int k);

struct EvalItem {
  MazeInstance instance;
  int optimal_length = 0;
};

struct EvalPoint {
  int iteration = 0;
  double accuracy = 0;  // fraction solved-and-optimal under tc_explore
};

// Accuracy of the fixed-iteration prediction at each probe iteration,
// validated by exploring the prediction and comparing the extracted tree
// length with the oracle optimum.
std::vector<EvalPoint> evaluate_probe(const net::NetworkWeights& weights,
                                      const std::vector<EvalItem>& items, int low, int high,
                                      int step);

struct TrainOutcome {
  std::filesystem::path best_weights;
  int best_epoch = -1;
  double best_peak_accuracy = 0;
  int best_peak_iteration = 0;
  int steps_run = 0;
  bool eval_perfect = false;
};

// Full training run: epochs of progressive steps over the shuffled dataset,
// per-epoch probe evaluation and checkpointing, best checkpoint selected by
// peak probe accuracy. Identical configs produce identical weight bytes.
TrainOutcome train(const TrainConfig& config);

}  // namespace maze::trainer
