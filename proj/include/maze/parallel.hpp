#pragma once

#include <functional>
#include <vector>

#include "maze/net.hpp"
#include "maze/tensor.hpp"

namespace maze::par {

struct Section {
  int valid0 = 0;  // output rows owned by this section: [valid0, valid1)
  int valid1 = 0;
  int src0 = 0;  // input rows sliced for it (valid range plus halo): [src0, src1)
  int src1 = 0;
};

struct SectionPlan {
  int height = 0;
  int n_sections = 1;
  int halo = 0;
  std::vector<Section> sections;
};

// Horizontal strips with equal-height valid ranges (remainder rows go to the
// last section) and halo = layers_per_superstep * (kernel/2) rows of overlap
// per interior side. Fails when the strips would be thinner than their halos.
SectionPlan plan_sections(int height, int n_sections, int layers_per_superstep, int kernel);

struct SuperstepTimings {
  double split_seconds = 0;
  double compute_seconds = 0;
  double merge_seconds = 0;
};

// One split -> convolve -> merge round: each worker receives its input slice
// (halo included, zero padding only where the slice edge is a true image
// border), applies `stack`, and the trimmed valid rows are concatenated.
// Bitwise identical to applying `stack` to the whole image because the
// per-pixel accumulation order of conv_apply does not depend on position.
ImageTensor run_superstep(const ImageTensor& input, const SectionPlan& plan, int out_channels,
                          const std::function<ImageTensor(const ImageTensor&)>& stack,
                          SuperstepTimings* timings = nullptr);

// Same contract and bit-identical output as net::forward, with every
// superstep (projection, each recurrent iteration, each head application)
// split across a worker pool according to the plan.
net::ForwardResult parallel_forward(const ImageTensor& input, const net::NetworkWeights& weights,
                                    int iterations, std::vector<int> checkpoints,
                                    const SectionPlan& plan);
net::ForwardResult parallel_forward(const ImageTensor& input, const net::NetworkWeights& weights,
                                    int iterations, const SectionPlan& plan);

}  // namespace maze::par
