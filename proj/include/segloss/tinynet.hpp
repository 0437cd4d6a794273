/* Copyright 2026 The segloss Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef SEGLOSS_TINYNET_HPP_
#define SEGLOSS_TINYNET_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "segloss/grid.hpp"

namespace segloss {

// 3x3 convolution, stride 1, zero "same" padding.
// weights are laid out [ky][kx][in][out] so the output channel is fastest.
struct ConvLayer {
  int in_channels = 0;
  int out_channels = 0;
  bool relu = true;
  std::vector<double> weights;
  std::vector<double> bias;

  static constexpr int kKernel = 3;
  std::size_t weight_index(int ky, int kx, int in, int out) const {
    return ((static_cast<std::size_t>(ky) * kKernel + kx) * in_channels + in) *
               out_channels + out;
  }
};

// Activations retained by forward for backward. inputs[l] is the input of
// layer l; outputs[l] its post-activation output.
struct ForwardCache {
  std::vector<Grid3> inputs;
  std::vector<Grid3> outputs;
  bool ready() const { return !inputs.empty(); }
};

struct NetGradients {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
  Grid3 input;

  void scale(double factor);
  void add(const NetGradients& other);
  double squared_norm() const;
};

// Small fully convolutional segmentation network: a stack of 3x3 same-padded
// convolutions with ReLU between layers and a linear final layer.
class TinyNet {
 public:
  TinyNet() = default;
  // channel_plan = {in, hidden..., classes}; at least two entries.
  // Zero-initialized.
  explicit TinyNet(std::vector<int> channel_plan);
  // He-normal weights, zero biases.
  static TinyNet random(std::vector<int> channel_plan, std::uint64_t seed);

  const std::vector<int>& channel_plan() const { return plan_; }
  int in_channels() const { return plan_.front(); }
  int out_channels() const { return plan_.back(); }
  const std::vector<ConvLayer>& layers() const { return layers_; }
  std::vector<ConvLayer>& layers() { return layers_; }
  std::size_t parameter_count() const;

  // Throws DimensionError on a channel mismatch. Fills cache if given.
  Grid3 forward(const Grid3& image, ForwardCache* cache = nullptr) const;
  // Throws StateError if the cache is empty.
  NetGradients backward(const ForwardCache& cache, const Grid3& grad_out) const;

  NetGradients zero_gradients() const;

 private:
  std::vector<int> plan_;
  std::vector<ConvLayer> layers_;
};

// SGD with momentum and step learning-rate decay.
struct TrainState {
  TinyNet net;
  std::vector<std::vector<double>> weight_momentum;
  std::vector<std::vector<double>> bias_momentum;
  double lr = 2.5e-4;
  double momentum = 0.9;
  double decay_rate = 0.9;
  int decay_interval = 500;  // 0 disables decay
  long iteration = 0;
  std::uint64_t rng_seed = 0;

  static TrainState for_net(TinyNet net, double lr, double momentum,
                            double decay_rate, int decay_interval);
};

// buffer <- momentum * buffer + grad; param <- param - lr * buffer. The
// iteration counter advances and lr is multiplied by decay_rate every
// decay_interval iterations.
void sgd_step(TrainState& state, const NetGradients& grads);

}  // namespace segloss

#endif  // SEGLOSS_TINYNET_HPP_
