// Copyright 2026 The PSR-Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "psrlab/nn/engine.h"

#include <algorithm>

#include "psrlab/util/error.h"
#include "src/nn/kernels.h"

namespace psrlab::nn {
namespace {

kernels::ConvGeometry Geometry(const Conv2d& c, const Shape& in,
                               const Shape& out) {
  return {in[0], in[1], in[2], in[3], c.out_channels, c.kernel,
          c.stride, c.pad, out[2], out[3]};
}

void CheckFinite(const Tensor& t, const Layer* layer) {
  if (t.AllFinite()) return;
  Fail(ErrorCode::kNonFinite,
       layer == nullptr ? std::string("non-finite model input")
                        : "non-finite activation after layer '" + layer->name +
                              "' (training diverged?)");
}

}  // namespace

Tensor Forward(const Model& model, const Tensor& batch, Tape* tape,
               ActivationHook* hook) {
  const Shape& expected = model.input_shape();
  Require(batch.rank() == expected.size() + 1 &&
              std::equal(expected.begin(), expected.end(),
                         batch.shape().begin() + 1),
          ErrorCode::kShapeMismatch,
          "input " + ShapeToString(batch.shape()) + " does not match model input " +
              ShapeToString(expected));
  CheckFinite(batch, nullptr);

  const auto& layers = model.layers();
  const ParameterStore& params = model.params();
  // Activations are always kept: residual sources need them even without a tape.
  std::vector<Tensor> local_sites;
  std::vector<Tensor>& sites = tape != nullptr ? tape->activations : local_sites;
  sites.clear();
  sites.reserve(layers.size() + 1);
  if (tape != nullptr) {
    tape->stats.assign(layers.size(), {});
    tape->argmax.assign(layers.size(), {});
    tape->pass.assign(layers.size() + 1, {});
    tape->recorded = false;
  }
  auto run_hook = [&](std::size_t site, Tensor& t) {
    if (hook == nullptr) return;
    std::vector<std::uint8_t>* pass = nullptr;
    if (tape != nullptr) {
      tape->pass[site].assign(t.size(), 1);
      pass = &tape->pass[site];
    }
    hook->OnActivation(site, t, pass);
  };

  sites.push_back(batch);
  run_hook(0, sites.back());

  for (std::size_t i = 0; i < layers.size(); ++i) {
    const Layer& layer = layers[i];
    const Tensor& x = sites[i];
    Tensor y(InferOutputShape(layer.kind, x.shape()));
    if (const auto* c = std::get_if<Conv2d>(&layer.kind)) {
      kernels::Conv2dForward(Geometry(*c, x.shape(), y.shape()), x.raw(),
                             params.at(layer.params[0]).raw(),
                             params.at(layer.params[1]).raw(), y.raw());
    } else if (const auto* g = std::get_if<GroupNorm>(&layer.kind)) {
      std::vector<double> stats(2 * x.dim(0) * g->groups);
      kernels::GroupNormForward(x.dim(0), g->channels, x.dim(2) * x.dim(3),
                                g->groups, g->eps, x.raw(),
                                params.at(layer.params[0]).raw(),
                                params.at(layer.params[1]).raw(), y.raw(),
                                stats.data());
      if (tape != nullptr) tape->stats[i] = std::move(stats);
    } else if (std::holds_alternative<ReLU>(layer.kind)) {
      for (std::size_t e = 0; e < x.size(); ++e) y[e] = std::max(x[e], 0.0f);
    } else if (const auto* l = std::get_if<Linear>(&layer.kind)) {
      kernels::LinearForward(x.dim(0), l->in_features, l->out_features,
                             x.raw(), params.at(layer.params[0]).raw(),
                             params.at(layer.params[1]).raw(), y.raw());
    } else if (std::holds_alternative<ResidualAdd>(layer.kind)) {
      const Tensor& src = sites[layer.source_site];
      Require(src.shape() == x.shape(), ErrorCode::kShapeMismatch,
              "residual '" + layer.name + "' shape mismatch");
      for (std::size_t e = 0; e < x.size(); ++e) y[e] = x[e] + src[e];
    } else if (const auto* p = std::get_if<MaxPool>(&layer.kind)) {
      std::vector<std::uint32_t> argmax(y.size());
      kernels::MaxPoolForward(x.dim(0), x.dim(1), x.dim(2), x.dim(3),
                              p->kernel, x.raw(), y.raw(), argmax.data());
      if (tape != nullptr) tape->argmax[i] = std::move(argmax);
    } else if (std::holds_alternative<GlobalAvgPool>(layer.kind)) {
      const std::size_t spatial = x.dim(2) * x.dim(3);
      for (std::size_t bc = 0; bc < x.dim(0) * x.dim(1); ++bc) {
        double sum = 0.0;
        for (std::size_t s = 0; s < spatial; ++s) sum += x[bc * spatial + s];
        y[bc] = static_cast<float>(sum / static_cast<double>(spatial));
      }
    } else if (std::holds_alternative<Flatten>(layer.kind)) {
      std::copy(x.data().begin(), x.data().end(), y.data().begin());
    }
    CheckFinite(y, &layer);
    sites.push_back(std::move(y));
    run_hook(i + 1, sites.back());
  }
  if (tape != nullptr) tape->recorded = true;
  return sites.back();
}

BackwardResult Backward(const Model& model, const Tape& tape,
                        const Tensor& grad_logits,
                        const BackwardOptions& options) {
  const auto& layers = model.layers();
  const ParameterStore& params = model.params();
  Require(tape.recorded && tape.activations.size() == layers.size() + 1,
          ErrorCode::kFailedPrecondition,
          "backward called without a recorded forward tape");
  Require(grad_logits.shape() == tape.activations.back().shape(),
          ErrorCode::kShapeMismatch,
          "logit gradient " + ShapeToString(grad_logits.shape()) +
              " does not match logits " +
              ShapeToString(tape.activations.back().shape()));

  BackwardResult result;
  if (options.parameter_grads) result.params = ZerosLike(params);

  std::vector<Tensor> site_grads(layers.size() + 1);
  site_grads.back() = grad_logits;
  auto apply_pass = [&](std::size_t site, Tensor& g) {
    const auto& mask = tape.pass[site];
    if (mask.empty()) return;
    for (std::size_t e = 0; e < g.size(); ++e) {
      if (mask[e] == 0) g[e] = 0.0f;
    }
  };
  auto accumulate = [&](std::size_t site, const Tensor& g) {
    if (site_grads[site].empty()) {
      site_grads[site] = g;
    } else {
      float* dst = site_grads[site].raw();
      for (std::size_t e = 0; e < g.size(); ++e) dst[e] += g[e];
    }
  };

  // The lowest layer whose parameters or input still need a gradient.
  std::size_t stop = 0;
  if (!options.input_grad) {
    stop = layers.size();
    for (std::size_t i = 0; i < layers.size(); ++i) {
      if (!layers[i].params.empty()) {
        stop = i;
        break;
      }
    }
  }

  for (std::size_t i = layers.size(); i-- > stop;) {
    const Layer& layer = layers[i];
    Tensor& dy = site_grads[i + 1];
    if (dy.empty()) dy = Tensor(tape.activations[i + 1].shape());
    apply_pass(i + 1, dy);
    const Tensor& x = tape.activations[i];
    const bool need_dx = options.input_grad || i > stop;
    Tensor dx;
    if (need_dx) dx = Tensor(x.shape());

    float* dw = nullptr;
    float* db = nullptr;
    if (options.parameter_grads && !layer.params.empty()) {
      dw = result.params[layer.params[0]].raw();
      db = result.params[layer.params[1]].raw();
    }

    if (const auto* c = std::get_if<Conv2d>(&layer.kind)) {
      kernels::Conv2dBackward(Geometry(*c, x.shape(), dy.shape()), x.raw(),
                              params.at(layer.params[0]).raw(), dy.raw(),
                              need_dx ? dx.raw() : nullptr, dw, db);
    } else if (const auto* g = std::get_if<GroupNorm>(&layer.kind)) {
      kernels::GroupNormBackward(x.dim(0), g->channels, x.dim(2) * x.dim(3),
                                 g->groups, x.raw(),
                                 params.at(layer.params[0]).raw(),
                                 tape.stats[i].data(), dy.raw(),
                                 need_dx ? dx.raw() : nullptr, dw, db);
    } else if (std::holds_alternative<ReLU>(layer.kind)) {
      if (need_dx) {
        for (std::size_t e = 0; e < x.size(); ++e) {
          dx[e] = x[e] > 0.0f ? dy[e] : 0.0f;
        }
      }
    } else if (const auto* l = std::get_if<Linear>(&layer.kind)) {
      kernels::LinearBackward(x.dim(0), l->in_features, l->out_features,
                              x.raw(), params.at(layer.params[0]).raw(),
                              dy.raw(), need_dx ? dx.raw() : nullptr, dw, db);
    } else if (std::holds_alternative<ResidualAdd>(layer.kind)) {
      if (need_dx) dx = dy;
      if (layer.source_site > stop || options.input_grad) {
        accumulate(layer.source_site, dy);
      }
    } else if (std::holds_alternative<MaxPool>(layer.kind)) {
      if (need_dx) {
        const auto& argmax = tape.argmax[i];
        for (std::size_t o = 0; o < dy.size(); ++o) dx[argmax[o]] += dy[o];
      }
    } else if (std::holds_alternative<GlobalAvgPool>(layer.kind)) {
      if (need_dx) {
        const std::size_t spatial = x.dim(2) * x.dim(3);
        const float inv = 1.0f / static_cast<float>(spatial);
        for (std::size_t bc = 0; bc < x.dim(0) * x.dim(1); ++bc) {
          for (std::size_t s = 0; s < spatial; ++s) {
            dx[bc * spatial + s] = dy[bc] * inv;
          }
        }
      }
    } else if (std::holds_alternative<Flatten>(layer.kind)) {
      if (need_dx) std::copy(dy.data().begin(), dy.data().end(), dx.data().begin());
    }
    dy = Tensor();  // release
    if (need_dx) accumulate(i, dx);
  }

  if (options.input_grad) {
    Tensor& dx = site_grads[0];
    if (dx.empty()) dx = Tensor(tape.activations[0].shape());
    apply_pass(0, dx);
    result.input = std::move(dx);
  }
  return result;
}

}  // namespace psrlab::nn
