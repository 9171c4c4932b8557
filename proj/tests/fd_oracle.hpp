#pragma once

// Test-only finite-difference oracle for the training gradients. Follows the
// detachment semantics of the implementation under test: the state entering
// the tracked iterations is computed once with the base parameters and held
// constant while parameters are perturbed, which is exactly what "discarding
// gradients from the initial steps" means for the derivative.

#include "maze/net.hpp"
#include "maze/tensor.hpp"
#include "maze/train.hpp"

namespace maze::testing {

class FdOracle {
 public:
  FdOracle(TensorT<double> input, TensorT<double> target, net::NetworkConfig config,
           const net::LayerStack<double>& base_layers, int n_detached, int k_tracked)
      : input_(std::move(input)),
        target_(std::move(target)),
        config_(config),
        n_(n_detached),
        k_(k_tracked) {
    TensorT<double> s = net::project(input_, config_, base_layers);
    for (int i = 0; i < n_; ++i) s = net::rb_iterate(input_, s, config_, base_layers);
    entry_ = std::move(s);
  }

  double loss_at(const net::LayerStack<double>& layers) const {
    TensorT<double> s = (n_ == 0) ? net::project(input_, config_, layers) : entry_;
    for (int j = 0; j < k_; ++j) s = net::rb_iterate(input_, s, config_, layers);
    const TensorT<double> logits = net::head(s, config_, layers);
    return trainer::cross_entropy_loss(logits, target_).loss;
  }

  double central_difference(net::LayerStack<double> layers, int layer, bool bias, std::size_t index,
                            double h = 1e-5) const {
    double& v = bias ? layers[static_cast<std::size_t>(layer)].bias[index]
                     : layers[static_cast<std::size_t>(layer)].weights[index];
    const double base = v;
    v = base + h;
    const double up = loss_at(layers);
    v = base - h;
    const double down = loss_at(layers);
    return (up - down) / (2.0 * h);
  }

 private:
  TensorT<double> input_;
  TensorT<double> target_;
  net::NetworkConfig config_;
  int n_;
  int k_;
  TensorT<double> entry_;
};

// Symmetric relative error with an epsilon floor for near-zero gradients.
inline double gradient_error(double analytic, double numeric) {
  const double scale = std::abs(analytic) + std::abs(numeric) + 1e-6;
  return std::abs(analytic - numeric) / scale;
}

// Max gradient error over every parameter of every layer (stride subsamples
// for cheap smoke runs; stride 1 checks the full matrix).
inline double max_gradient_error(const TensorT<double>& input, const TensorT<double>& target,
                                 const net::NetworkConfig& config,
                                 const net::LayerStack<double>& layers, int n_detached,
                                 int k_tracked, std::size_t stride = 1) {
  const trainer::BackwardResult<double> analytic =
      trainer::backward<double>(input, config, layers, n_detached, k_tracked, target);
  const FdOracle oracle(input, target, config, layers, n_detached, k_tracked);
  double worst = 0;
  for (int layer = 0; layer < net::kNumLayers; ++layer) {
    const auto& grads = analytic.grads[static_cast<std::size_t>(layer)];
    for (std::size_t i = 0; i < grads.weights.size(); i += stride) {
      const double fd = oracle.central_difference(layers, layer, false, i);
      worst = std::max(worst, gradient_error(grads.weights[i], fd));
    }
    for (std::size_t i = 0; i < grads.bias.size(); i += stride) {
      const double fd = oracle.central_difference(layers, layer, true, i);
      worst = std::max(worst, gradient_error(grads.bias[i], fd));
    }
  }
  return worst;
}

}  // namespace maze::testing
