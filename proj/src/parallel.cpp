#include "maze/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cstring>
#include <thread>

#include "maze/error.hpp"

namespace maze::par {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

ImageTensor slice_rows(const ImageTensor& t, int y0, int y1) {
  ImageTensor out(t.channels, y1 - y0, t.width);
  for (int c = 0; c < t.channels; ++c) {
    std::memcpy(out.plane(c), t.plane(c) + static_cast<std::size_t>(y0) * static_cast<std::size_t>(t.width),
                out.plane_size() * sizeof(float));
  }
  return out;
}

int required_halo(const net::NetworkConfig& config) {
  // The deepest superstep is the recurrent block.
  const int per_layer = config.kernel / 2;
  return std::max({1, config.rb_layers, 3}) * per_layer;
}

}  // namespace

SectionPlan plan_sections(int height, int n_sections, int layers_per_superstep, int kernel) {
  if (height < 1 || n_sections < 1 || layers_per_superstep < 1 || kernel < 1 || kernel % 2 == 0) {
    throw PlanError("invalid section planning parameters");
  }
  const int halo = layers_per_superstep * (kernel / 2);
  if (n_sections > 1 && n_sections * (2 * halo + 1) > height) {
    throw PlanError("cannot split height " + std::to_string(height) + " into " +
                    std::to_string(n_sections) + " sections with halo " + std::to_string(halo));
  }

  SectionPlan plan;
  plan.height = height;
  plan.n_sections = n_sections;
  plan.halo = halo;
  const int base = height / n_sections;
  for (int i = 0; i < n_sections; ++i) {
    Section s;
    s.valid0 = i * base;
    s.valid1 = (i == n_sections - 1) ? height : (i + 1) * base;
    s.src0 = std::max(0, s.valid0 - halo);
    s.src1 = std::min(height, s.valid1 + halo);
    plan.sections.push_back(s);
  }
  return plan;
}

ImageTensor run_superstep(const ImageTensor& input, const SectionPlan& plan, int out_channels,
                          const std::function<ImageTensor(const ImageTensor&)>& stack,
                          SuperstepTimings* timings) {
  if (plan.height != input.height || plan.sections.empty()) {
    throw ContractError("section plan does not match the input height");
  }

  const auto t_split = Clock::now();
  std::vector<ImageTensor> slices;
  slices.reserve(plan.sections.size());
  for (const Section& s : plan.sections) slices.push_back(slice_rows(input, s.src0, s.src1));
  if (timings) timings->split_seconds += seconds_since(t_split);

  const auto t_compute = Clock::now();
  std::vector<ImageTensor> outputs(plan.sections.size());
  if (plan.sections.size() == 1) {
    outputs[0] = stack(slices[0]);
  } else {
    std::vector<std::thread> workers;
    workers.reserve(plan.sections.size());
    for (std::size_t i = 0; i < plan.sections.size(); ++i) {
      workers.emplace_back([&, i] { outputs[i] = stack(slices[i]); });
    }
    for (std::thread& w : workers) w.join();  // the merge barrier
  }
  if (timings) timings->compute_seconds += seconds_since(t_compute);

  const auto t_merge = Clock::now();
  ImageTensor merged(out_channels, input.height, input.width);
  for (std::size_t i = 0; i < plan.sections.size(); ++i) {
    const Section& s = plan.sections[i];
    const ImageTensor& out = outputs[i];
    if (out.channels != out_channels || out.height != s.src1 - s.src0 || out.width != input.width) {
      throw ContractError("superstep section produced unexpected shape");
    }
    const int trim_top = s.valid0 - s.src0;
    for (int c = 0; c < out_channels; ++c) {
      std::memcpy(merged.plane(c) + static_cast<std::size_t>(s.valid0) * static_cast<std::size_t>(input.width),
                  out.plane(c) + static_cast<std::size_t>(trim_top) * static_cast<std::size_t>(input.width),
                  static_cast<std::size_t>(s.valid1 - s.valid0) * static_cast<std::size_t>(input.width) *
                      sizeof(float));
    }
  }
  if (timings) timings->merge_seconds += seconds_since(t_merge);
  return merged;
}

net::ForwardResult parallel_forward(const ImageTensor& input, const net::NetworkWeights& weights,
                                    int iterations, std::vector<int> checkpoints,
                                    const SectionPlan& plan) {
  net::validate_chain(weights);
  if (iterations < 1) throw ContractError("parallel_forward requires at least one iteration");
  if (plan.halo < required_halo(weights.config)) {
    throw ContractError("plan halo " + std::to_string(plan.halo) + " is below the required " +
                        std::to_string(required_halo(weights.config)));
  }
  int covered = 0;
  for (const Section& s : plan.sections) {
    if (s.valid0 != covered || s.valid1 <= s.valid0) {
      throw ContractError("section valid ranges must tile the image exactly once");
    }
    covered = s.valid1;
  }
  if (covered != input.height) throw ContractError("section plan does not cover the image");

  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
  for (int c : checkpoints) {
    if (c < 1 || c > iterations) {
      throw ContractError("checkpoint " + std::to_string(c) + " outside [1, iterations]");
    }
  }

  const net::NetworkConfig& config = weights.config;
  const net::LayerStack<float>& layers = weights.layers;

  net::ForwardResult result;
  ImageTensor state = run_superstep(input, plan, config.width, [&](const ImageTensor& in) {
    return net::project(in, config, layers);
  });

  std::size_t next = 0;
  for (int i = 1; i <= iterations; ++i) {
    const ImageTensor joined = net::concat_channels(state, input);
    state = run_superstep(joined, plan, config.width, [&](const ImageTensor& in) {
      ImageTensor x = in;
      for (int l = 1; l <= config.rb_layers; ++l) {
        x = net::conv_apply(x, layers[static_cast<std::size_t>(l)]);
        if (config.rb_activation == net::RbActivation::Relu && l < config.rb_layers) {
          net::relu_inplace(x);
        }
      }
      return x;
    });
    if (next < checkpoints.size() && checkpoints[next] == i) {
      ImageTensor logits = run_superstep(state, plan, 2, [&](const ImageTensor& in) {
        return net::head(in, config, layers);
      });
      result.checkpoints.push_back(i);
      result.predictions.push_back(net::argmax_image(logits));
      result.logits.push_back(std::move(logits));
      ++next;
    }
  }
  result.final_state = std::move(state);
  return result;
}

net::ForwardResult parallel_forward(const ImageTensor& input, const net::NetworkWeights& weights,
                                    int iterations, const SectionPlan& plan) {
  return parallel_forward(input, weights, iterations, std::vector<int>{iterations}, plan);
}

}  // namespace maze::par
