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
#include "segloss/tinynet.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "segloss/error.hpp"

namespace segloss {
namespace {

constexpr int kK = ConvLayer::kKernel;

void conv_forward(const ConvLayer& layer, const Grid3& in, Grid3& out) {
  const int h = in.height();
  const int w = in.width();
  const int cin = layer.in_channels;
  const int cout = layer.out_channels;
  auto src = in.data();
  auto dst = out.data();
  const double* wt = layer.weights.data();
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      double* o = dst.data() + out.offset(i, j);
      std::copy(layer.bias.begin(), layer.bias.end(), o);
      for (int ky = 0; ky < kK; ++ky) {
        const int si = i + ky - 1;
        if (si < 0 || si >= h) continue;
        for (int kx = 0; kx < kK; ++kx) {
          const int sj = j + kx - 1;
          if (sj < 0 || sj >= w) continue;
          const double* x = src.data() + in.offset(si, sj);
          const double* wrow = wt + layer.weight_index(ky, kx, 0, 0);
          for (int ci = 0; ci < cin; ++ci) {
            const double v = x[ci];
            const double* wr = wrow + static_cast<std::size_t>(ci) * cout;
            for (int co = 0; co < cout; ++co) o[co] += v * wr[co];
          }
        }
      }
      if (layer.relu) {
        for (int co = 0; co < cout; ++co) o[co] = std::max(o[co], 0.0);
      }
    }
  }
}

}  // namespace

void NetGradients::scale(double factor) {
  for (auto& v : weights) for (double& x : v) x *= factor;
  for (auto& v : biases) for (double& x : v) x *= factor;
  for (double& x : input.data()) x *= factor;
}

void NetGradients::add(const NetGradients& other) {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    for (std::size_t k = 0; k < weights[l].size(); ++k) weights[l][k] += other.weights[l][k];
    for (std::size_t k = 0; k < biases[l].size(); ++k) biases[l][k] += other.biases[l][k];
  }
}

double NetGradients::squared_norm() const {
  double s = 0.0;
  for (const auto& v : weights) for (double x : v) s += x * x;
  for (const auto& v : biases) for (double x : v) s += x * x;
  return s;
}

TinyNet::TinyNet(std::vector<int> channel_plan) : plan_(std::move(channel_plan)) {
  if (plan_.size() < 2) {
    throw DimensionError("channel plan needs at least input and output channels");
  }
  for (int c : plan_) {
    if (c <= 0) throw DimensionError("channel counts must be positive");
  }
  for (std::size_t l = 0; l + 1 < plan_.size(); ++l) {
    ConvLayer layer;
    layer.in_channels = plan_[l];
    layer.out_channels = plan_[l + 1];
    layer.relu = l + 2 < plan_.size();
    layer.weights.assign(static_cast<std::size_t>(kK) * kK * layer.in_channels *
                             layer.out_channels, 0.0);
    layer.bias.assign(layer.out_channels, 0.0);
    layers_.push_back(std::move(layer));
  }
}

TinyNet TinyNet::random(std::vector<int> channel_plan, std::uint64_t seed) {
  TinyNet net(std::move(channel_plan));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (ConvLayer& layer : net.layers_) {
    const double fan_in = static_cast<double>(kK * kK * layer.in_channels);
    const double stddev = std::sqrt(2.0 / fan_in);
    for (double& w : layer.weights) w = stddev * normal(rng);
  }
  return net;
}

std::size_t TinyNet::parameter_count() const {
  std::size_t n = 0;
  for (const ConvLayer& l : layers_) n += l.weights.size() + l.bias.size();
  return n;
}

Grid3 TinyNet::forward(const Grid3& image, ForwardCache* cache) const {
  if (image.channels() != in_channels()) {
    throw DimensionError("network expects " + std::to_string(in_channels()) +
                         " input channels, image has " +
                         std::to_string(image.channels()));
  }
  if (cache) {
    cache->inputs.clear();
    cache->outputs.clear();
  }
  Grid3 current = image;
  for (const ConvLayer& layer : layers_) {
    Grid3 next(image.height(), image.width(), layer.out_channels);
    conv_forward(layer, current, next);
    if (cache) {
      cache->inputs.push_back(std::move(current));
      cache->outputs.push_back(next);
    }
    current = std::move(next);
  }
  return current;
}

NetGradients TinyNet::zero_gradients() const {
  NetGradients g;
  for (const ConvLayer& l : layers_) {
    g.weights.emplace_back(l.weights.size(), 0.0);
    g.biases.emplace_back(l.bias.size(), 0.0);
  }
  return g;
}

NetGradients TinyNet::backward(const ForwardCache& cache,
                               const Grid3& grad_out) const {
  if (!cache.ready() || cache.inputs.size() != layers_.size()) {
    throw StateError("backward called without a matching forward cache");
  }
  if (!cache.outputs.back().same_shape(grad_out)) {
    throw DimensionError("output gradient shape does not match network output");
  }
  NetGradients grads = zero_gradients();
  Grid3 upstream = grad_out;
  for (std::size_t li = layers_.size(); li-- > 0;) {
    const ConvLayer& layer = layers_[li];
    const Grid3& in = cache.inputs[li];
    const Grid3& out = cache.outputs[li];
    const int h = in.height();
    const int w = in.width();
    const int cin = layer.in_channels;
    const int cout = layer.out_channels;
    if (layer.relu) {
      auto u = upstream.data();
      auto y = out.data();
      for (std::size_t k = 0; k < u.size(); ++k) {
        if (y[k] <= 0.0) u[k] = 0.0;
      }
    }
    Grid3 down(h, w, cin);
    std::vector<double>& gw = grads.weights[li];
    std::vector<double>& gb = grads.biases[li];
    auto x = in.data();
    auto dz = upstream.data();
    auto dx = down.data();
    for (int i = 0; i < h; ++i) {
      for (int j = 0; j < w; ++j) {
        const double* d = dz.data() + upstream.offset(i, j);
        for (int co = 0; co < cout; ++co) gb[co] += d[co];
        for (int ky = 0; ky < kK; ++ky) {
          const int si = i + ky - 1;
          if (si < 0 || si >= h) continue;
          for (int kx = 0; kx < kK; ++kx) {
            const int sj = j + kx - 1;
            if (sj < 0 || sj >= w) continue;
            const double* xs = x.data() + in.offset(si, sj);
            double* dxs = dx.data() + down.offset(si, sj);
            const std::size_t base = layer.weight_index(ky, kx, 0, 0);
            for (int ci = 0; ci < cin; ++ci) {
              const double* wr = layer.weights.data() + base + static_cast<std::size_t>(ci) * cout;
              double* gwr = gw.data() + base + static_cast<std::size_t>(ci) * cout;
              const double xv = xs[ci];
              double acc = 0.0;
              for (int co = 0; co < cout; ++co) {
                gwr[co] += xv * d[co];
                acc += wr[co] * d[co];
              }
              dxs[ci] += acc;
            }
          }
        }
      }
    }
    upstream = std::move(down);
  }
  grads.input = std::move(upstream);
  return grads;
}

TrainState TrainState::for_net(TinyNet net, double lr, double momentum,
                               double decay_rate, int decay_interval) {
  TrainState s;
  for (const ConvLayer& l : net.layers()) {
    s.weight_momentum.emplace_back(l.weights.size(), 0.0);
    s.bias_momentum.emplace_back(l.bias.size(), 0.0);
  }
  s.net = std::move(net);
  s.lr = lr;
  s.momentum = momentum;
  s.decay_rate = decay_rate;
  s.decay_interval = decay_interval;
  return s;
}

void sgd_step(TrainState& state, const NetGradients& grads) {
  auto& layers = state.net.layers();
  if (grads.weights.size() != layers.size() ||
      state.weight_momentum.size() != layers.size()) {
    throw DimensionError("gradient layer count does not match network");
  }
  auto update = [&](std::vector<double>& param, std::vector<double>& buffer,
                    const std::vector<double>& grad) {
    if (param.size() != grad.size() || param.size() != buffer.size()) {
      throw DimensionError("gradient shape does not match parameters");
    }
    for (std::size_t k = 0; k < param.size(); ++k) {
      buffer[k] = state.momentum * buffer[k] + grad[k];
      param[k] -= state.lr * buffer[k];
    }
  };
  for (std::size_t l = 0; l < layers.size(); ++l) {
    update(layers[l].weights, state.weight_momentum[l], grads.weights[l]);
    update(layers[l].bias, state.bias_momentum[l], grads.biases[l]);
  }
  ++state.iteration;
  if (state.decay_interval > 0 && state.iteration % state.decay_interval == 0) {
    state.lr *= state.decay_rate;
  }
}

}  // namespace segloss
