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

#include "reference_net.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <variant>

#include "psrlab/nn/engine.h"

namespace psrlab::testing {
namespace {

std::size_t Count(const nn::Shape& s) {
  std::size_t n = 1;
  for (std::size_t d : s) n *= d;
  return n;
}

DTensor Conv(const DTensor& x, const nn::Conv2d& c, const std::vector<double>& w,
             const std::vector<double>& bias) {
  const std::size_t batch = x.shape[0], h = x.shape[2], wd = x.shape[3];
  const std::size_t oh = (h + 2 * c.pad - c.kernel) / c.stride + 1;
  const std::size_t ow = (wd + 2 * c.pad - c.kernel) / c.stride + 1;
  DTensor y{{batch, c.out_channels, oh, ow}, {}};
  y.v.assign(Count(y.shape), 0.0);
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t o = 0; o < c.out_channels; ++o)
      for (std::size_t i = 0; i < oh; ++i)
        for (std::size_t j = 0; j < ow; ++j) {
          double acc = bias[o];
          for (std::size_t ci = 0; ci < c.in_channels; ++ci)
            for (std::size_t ki = 0; ki < c.kernel; ++ki)
              for (std::size_t kj = 0; kj < c.kernel; ++kj) {
                const long r = static_cast<long>(i * c.stride + ki) - static_cast<long>(c.pad);
                const long s = static_cast<long>(j * c.stride + kj) - static_cast<long>(c.pad);
                if (r < 0 || s < 0 || r >= static_cast<long>(h) || s >= static_cast<long>(wd))
                  continue;
                acc += w[((o * c.in_channels + ci) * c.kernel + ki) * c.kernel + kj] *
                       x.v[((b * c.in_channels + ci) * h + r) * wd + s];
              }
          y.v[((b * c.out_channels + o) * oh + i) * ow + j] = acc;
        }
  return y;
}

DTensor Norm(const DTensor& x, const nn::GroupNorm& g, const std::vector<double>& gamma,
             const std::vector<double>& beta) {
  const std::size_t batch = x.shape[0], ch = x.shape[1];
  const std::size_t spatial = x.shape[2] * x.shape[3];
  const std::size_t per = ch / g.groups;
  DTensor y = x;
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t gi = 0; gi < g.groups; ++gi) {
      double mean = 0.0;
      for (std::size_t c = gi * per; c < (gi + 1) * per; ++c)
        for (std::size_t s = 0; s < spatial; ++s) mean += x.v[(b * ch + c) * spatial + s];
      mean /= static_cast<double>(per * spatial);
      double var = 0.0;
      for (std::size_t c = gi * per; c < (gi + 1) * per; ++c)
        for (std::size_t s = 0; s < spatial; ++s) {
          const double d = x.v[(b * ch + c) * spatial + s] - mean;
          var += d * d;
        }
      var /= static_cast<double>(per * spatial);
      for (std::size_t c = gi * per; c < (gi + 1) * per; ++c)
        for (std::size_t s = 0; s < spatial; ++s) {
          const std::size_t e = (b * ch + c) * spatial + s;
          y.v[e] = (x.v[e] - mean) / std::sqrt(var + g.eps) * gamma[c] + beta[c];
        }
    }
  return y;
}

DTensor Dense(const DTensor& x, const nn::Linear& l, const std::vector<double>& w,
              const std::vector<double>& bias) {
  const std::size_t batch = x.shape[0];
  DTensor y{{batch, l.out_features}, std::vector<double>(batch * l.out_features)};
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t o = 0; o < l.out_features; ++o) {
      double acc = bias[o];
      for (std::size_t i = 0; i < l.in_features; ++i)
        acc += w[o * l.in_features + i] * x.v[b * l.in_features + i];
      y.v[b * l.out_features + o] = acc;
    }
  return y;
}

DTensor Pool(const DTensor& x, const nn::MaxPool& p) {
  const std::size_t batch = x.shape[0], ch = x.shape[1], h = x.shape[2], w = x.shape[3];
  const std::size_t oh = h / p.kernel, ow = w / p.kernel;
  DTensor y{{batch, ch, oh, ow}, std::vector<double>(batch * ch * oh * ow)};
  for (std::size_t bc = 0; bc < batch * ch; ++bc)
    for (std::size_t i = 0; i < oh; ++i)
      for (std::size_t j = 0; j < ow; ++j) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t ki = 0; ki < p.kernel; ++ki)
          for (std::size_t kj = 0; kj < p.kernel; ++kj)
            best = std::max(best, x.v[(bc * h + i * p.kernel + ki) * w + j * p.kernel + kj]);
        y.v[(bc * oh + i) * ow + j] = best;
      }
  return y;
}

DTensor AvgPool(const DTensor& x) {
  const std::size_t batch = x.shape[0], ch = x.shape[1];
  const std::size_t spatial = x.shape[2] * x.shape[3];
  DTensor y{{batch, ch, 1, 1}, std::vector<double>(batch * ch, 0.0)};
  for (std::size_t bc = 0; bc < batch * ch; ++bc) {
    for (std::size_t s = 0; s < spatial; ++s) y.v[bc] += x.v[bc * spatial + s];
    y.v[bc] /= static_cast<double>(spatial);
  }
  return y;
}

}  // namespace

DTensor AsDouble(const nn::Tensor& t) {
  return {t.shape(), std::vector<double>(t.data().begin(), t.data().end())};
}

std::vector<std::vector<double>> ParamsAsDouble(const nn::Model& model) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < model.params().size(); ++i) {
    const auto d = model.params().at(i).data();
    out.emplace_back(d.begin(), d.end());
  }
  return out;
}

DTensor ReferenceLogits(const nn::Model& model,
                        const std::vector<std::vector<double>>& params,
                        const DTensor& x) {
  std::vector<DTensor> sites{x};
  for (const nn::Layer& layer : model.layers()) {
    const DTensor& in = sites.back();
    auto p = [&](std::size_t k) -> const std::vector<double>& {
      return params[layer.params[k]];
    };
    DTensor out;
    if (const auto* c = std::get_if<nn::Conv2d>(&layer.kind)) {
      out = Conv(in, *c, p(0), p(1));
    } else if (const auto* g = std::get_if<nn::GroupNorm>(&layer.kind)) {
      out = Norm(in, *g, p(0), p(1));
    } else if (std::holds_alternative<nn::ReLU>(layer.kind)) {
      out = in;
      for (double& v : out.v) v = std::max(v, 0.0);
    } else if (const auto* l = std::get_if<nn::Linear>(&layer.kind)) {
      out = Dense(in, *l, p(0), p(1));
    } else if (std::holds_alternative<nn::ResidualAdd>(layer.kind)) {
      out = in;
      for (std::size_t e = 0; e < out.v.size(); ++e) out.v[e] += sites[layer.source_site].v[e];
    } else if (const auto* m = std::get_if<nn::MaxPool>(&layer.kind)) {
      out = Pool(in, *m);
    } else if (std::holds_alternative<nn::GlobalAvgPool>(layer.kind)) {
      out = AvgPool(in);
    } else {
      out = in;
      out.shape = {in.shape[0], in.v.size() / in.shape[0]};
    }
    sites.push_back(std::move(out));
  }
  return sites.back();
}

double ReferenceLoss(const nn::Model& model,
                     const std::vector<std::vector<double>>& params, const DTensor& x,
                     const nn::Labels& labels) {
  const DTensor logits = ReferenceLogits(model, params, x);
  const std::size_t batch = logits.shape[0], k = logits.shape[1];
  double total = 0.0;
  for (std::size_t b = 0; b < batch; ++b) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j) m = std::max(m, logits.v[b * k + j]);
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) s += std::exp(logits.v[b * k + j] - m);
    total += m + std::log(s) - logits.v[b * k + labels[b]];
  }
  return total / static_cast<double>(batch);
}

std::vector<std::vector<double>> FiniteDifferenceParamGrads(const nn::Model& model,
                                                            const DTensor& x,
                                                            const nn::Labels& labels,
                                                            double h) {
  std::vector<std::vector<double>> params = ParamsAsDouble(model);
  std::vector<std::vector<double>> grads;
  for (auto& tensor : params) {
    std::vector<double> g(tensor.size());
    for (std::size_t e = 0; e < tensor.size(); ++e) {
      const double saved = tensor[e];
      tensor[e] = saved + h;
      const double up = ReferenceLoss(model, params, x, labels);
      tensor[e] = saved - h;
      const double down = ReferenceLoss(model, params, x, labels);
      tensor[e] = saved;
      g[e] = (up - down) / (2.0 * h);
    }
    grads.push_back(std::move(g));
  }
  return grads;
}

std::vector<double> FiniteDifferenceInputGrad(const nn::Model& model, const DTensor& x,
                                              const nn::Labels& labels, double h) {
  const std::vector<std::vector<double>> params = ParamsAsDouble(model);
  DTensor probe = x;
  std::vector<double> g(x.v.size());
  for (std::size_t e = 0; e < x.v.size(); ++e) {
    probe.v[e] = x.v[e] + h;
    const double up = ReferenceLoss(model, params, probe, labels);
    probe.v[e] = x.v[e] - h;
    const double down = ReferenceLoss(model, params, probe, labels);
    probe.v[e] = x.v[e];
    g[e] = (up - down) / (2.0 * h);
  }
  return g;
}

double RelativeError(const std::vector<double>& a, const std::vector<double>& b,
                     double floor) {
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nb), floor});
}

GradientCheckResult CheckGradients(const nn::Model& model, const nn::Tensor& x,
                                   const nn::Labels& labels, double h) {
  const DTensor xd = AsDouble(x);
  const auto fd_params = FiniteDifferenceParamGrads(model, xd, labels, h);
  const auto fd_input = FiniteDifferenceInputGrad(model, xd, labels, h);

  nn::Tape tape;
  const nn::Tensor logits = nn::Forward(model, x, &tape);
  const nn::LossResult loss = nn::CrossEntropy(logits, labels);
  const nn::BackwardResult grads =
      nn::Backward(model, tape, loss.grad_logits, {true, true});

  // Tensors whose true gradient vanishes (a conv bias feeding a per-channel
  // GroupNorm) are judged against a floor tied to the whole gradient.
  double total = 0.0;
  for (const auto& g : fd_params) {
    for (double v : g) total += v * v;
  }
  const double floor = 1e-4 * std::max(std::sqrt(total), 1e-12);

  GradientCheckResult result;
  for (std::size_t i = 0; i < fd_params.size(); ++i) {
    const auto g = grads.params[i].data();
    const double err = RelativeError({g.begin(), g.end()}, fd_params[i], floor);
    if (result.worst_param.empty() || err > result.max_param_rel_error) {
      result.max_param_rel_error = err;
      result.worst_param = model.params().name(i);
    }
  }
  const auto gi = grads.input.data();
  result.input_rel_error = RelativeError({gi.begin(), gi.end()}, fd_input);
  return result;
}

}  // namespace psrlab::testing
