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

#include "src/nn/kernels.h"

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Core>

namespace psrlab::nn::kernels {
namespace {

using MatR = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapR = Eigen::Map<MatR>;
using CMapR = Eigen::Map<const MatR>;

void Im2Col(const ConvGeometry& g, const float* x, float* col) {
  const std::size_t plane = g.out_h * g.out_w;
  for (std::size_t c = 0; c < g.in_c; ++c) {
    const float* xc = x + c * g.in_h * g.in_w;
    for (std::size_t ki = 0; ki < g.kernel; ++ki) {
      for (std::size_t kj = 0; kj < g.kernel; ++kj) {
        float* row = col + ((c * g.kernel + ki) * g.kernel + kj) * plane;
        for (std::size_t oh = 0; oh < g.out_h; ++oh) {
          const long ih = static_cast<long>(oh * g.stride + ki) -
                          static_cast<long>(g.pad);
          float* out = row + oh * g.out_w;
          if (ih < 0 || ih >= static_cast<long>(g.in_h)) {
            for (std::size_t ow = 0; ow < g.out_w; ++ow) out[ow] = 0.0f;
            continue;
          }
          const float* xrow = xc + ih * g.in_w;
          for (std::size_t ow = 0; ow < g.out_w; ++ow) {
            const long iw = static_cast<long>(ow * g.stride + kj) -
                            static_cast<long>(g.pad);
            out[ow] = (iw < 0 || iw >= static_cast<long>(g.in_w)) ? 0.0f
                                                                   : xrow[iw];
          }
        }
      }
    }
  }
}

void Col2ImAdd(const ConvGeometry& g, const float* col, float* dx) {
  const std::size_t plane = g.out_h * g.out_w;
  for (std::size_t c = 0; c < g.in_c; ++c) {
    float* dxc = dx + c * g.in_h * g.in_w;
    for (std::size_t ki = 0; ki < g.kernel; ++ki) {
      for (std::size_t kj = 0; kj < g.kernel; ++kj) {
        const float* row = col + ((c * g.kernel + ki) * g.kernel + kj) * plane;
        for (std::size_t oh = 0; oh < g.out_h; ++oh) {
          const long ih = static_cast<long>(oh * g.stride + ki) -
                          static_cast<long>(g.pad);
          if (ih < 0 || ih >= static_cast<long>(g.in_h)) continue;
          float* dxrow = dxc + ih * g.in_w;
          const float* in = row + oh * g.out_w;
          for (std::size_t ow = 0; ow < g.out_w; ++ow) {
            const long iw = static_cast<long>(ow * g.stride + kj) -
                            static_cast<long>(g.pad);
            if (iw >= 0 && iw < static_cast<long>(g.in_w)) dxrow[iw] += in[ow];
          }
        }
      }
    }
  }
}

}  // namespace

void Conv2dForward(const ConvGeometry& g, const float* x, const float* weight,
                   const float* bias, float* y) {
  const long k = static_cast<long>(g.in_c * g.kernel * g.kernel);
  const long p = static_cast<long>(g.out_h * g.out_w);
  const long oc = static_cast<long>(g.out_c);
  std::vector<float> col(static_cast<std::size_t>(k * p));
  CMapR w(weight, oc, k);
  for (std::size_t b = 0; b < g.batch; ++b) {
    Im2Col(g, x + b * g.in_c * g.in_h * g.in_w, col.data());
    MapR out(y + b * oc * p, oc, p);
    out.noalias() = w * CMapR(col.data(), k, p);
    for (long c = 0; c < oc; ++c) out.row(c).array() += bias[c];
  }
}

void Conv2dBackward(const ConvGeometry& g, const float* x, const float* weight,
                    const float* dy, float* dx, float* dweight, float* dbias) {
  const long k = static_cast<long>(g.in_c * g.kernel * g.kernel);
  const long p = static_cast<long>(g.out_h * g.out_w);
  const long oc = static_cast<long>(g.out_c);
  std::vector<float> col(static_cast<std::size_t>(k * p));
  CMapR w(weight, oc, k);
  for (std::size_t b = 0; b < g.batch; ++b) {
    CMapR grad_out(dy + b * oc * p, oc, p);
    if (dbias != nullptr) {
      for (long c = 0; c < oc; ++c) dbias[c] += grad_out.row(c).sum();
    }
    if (dweight != nullptr) {
      Im2Col(g, x + b * g.in_c * g.in_h * g.in_w, col.data());
      MapR(dweight, oc, k).noalias() +=
          grad_out * CMapR(col.data(), k, p).transpose();
    }
    if (dx != nullptr) {
      MapR(col.data(), k, p).noalias() = w.transpose() * grad_out;
      Col2ImAdd(g, col.data(), dx + b * g.in_c * g.in_h * g.in_w);
    }
  }
}

void LinearForward(std::size_t batch, std::size_t in, std::size_t out,
                   const float* x, const float* weight, const float* bias,
                   float* y) {
  const long b = static_cast<long>(batch);
  const long i = static_cast<long>(in);
  const long o = static_cast<long>(out);
  MapR result(y, b, o);
  result.noalias() = CMapR(x, b, i) * CMapR(weight, o, i).transpose();
  for (long r = 0; r < b; ++r) {
    result.row(r) += Eigen::Map<const Eigen::RowVectorXf>(bias, o);
  }
}

void LinearBackward(std::size_t batch, std::size_t in, std::size_t out,
                    const float* x, const float* weight, const float* dy,
                    float* dx, float* dweight, float* dbias) {
  const long b = static_cast<long>(batch);
  const long i = static_cast<long>(in);
  const long o = static_cast<long>(out);
  CMapR grad_out(dy, b, o);
  if (dweight != nullptr) {
    MapR(dweight, o, i).noalias() += grad_out.transpose() * CMapR(x, b, i);
  }
  if (dbias != nullptr) {
    for (long c = 0; c < o; ++c) dbias[c] += grad_out.col(c).sum();
  }
  if (dx != nullptr) {
    MapR(dx, b, i).noalias() += grad_out * CMapR(weight, o, i);
  }
}

void GroupNormForward(std::size_t batch, std::size_t channels,
                      std::size_t spatial, std::size_t groups, double eps,
                      const float* x, const float* gamma, const float* beta,
                      float* y, double* stats) {
  const std::size_t cpg = channels / groups;
  const std::size_t m = cpg * spatial;
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t gi = 0; gi < groups; ++gi) {
      const std::size_t offset = (b * channels + gi * cpg) * spatial;
      const float* xg = x + offset;
      double sum = 0.0;
      for (std::size_t e = 0; e < m; ++e) sum += xg[e];
      const double mean = sum / static_cast<double>(m);
      double sq = 0.0;
      for (std::size_t e = 0; e < m; ++e) {
        const double d = xg[e] - mean;
        sq += d * d;
      }
      const double inv_std = 1.0 / std::sqrt(sq / static_cast<double>(m) + eps);
      stats[2 * (b * groups + gi)] = mean;
      stats[2 * (b * groups + gi) + 1] = inv_std;
      float* yg = y + offset;
      for (std::size_t c = 0; c < cpg; ++c) {
        const std::size_t ch = gi * cpg + c;
        const double scale = inv_std * gamma[ch];
        for (std::size_t s = 0; s < spatial; ++s) {
          const std::size_t e = c * spatial + s;
          yg[e] = static_cast<float>((xg[e] - mean) * scale + beta[ch]);
        }
      }
    }
  }
}

void GroupNormBackward(std::size_t batch, std::size_t channels,
                       std::size_t spatial, std::size_t groups, const float* x,
                       const float* gamma, const double* stats,
                       const float* dy, float* dx, float* dgamma,
                       float* dbeta) {
  const std::size_t cpg = channels / groups;
  const std::size_t m = cpg * spatial;
  std::vector<double> xhat(m);
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t gi = 0; gi < groups; ++gi) {
      const std::size_t offset = (b * channels + gi * cpg) * spatial;
      const double mean = stats[2 * (b * groups + gi)];
      const double inv_std = stats[2 * (b * groups + gi) + 1];
      double sum_dxhat = 0.0;
      double sum_dxhat_xhat = 0.0;
      for (std::size_t c = 0; c < cpg; ++c) {
        const std::size_t ch = gi * cpg + c;
        double dg = 0.0;
        double db = 0.0;
        for (std::size_t s = 0; s < spatial; ++s) {
          const std::size_t e = c * spatial + s;
          xhat[e] = (x[offset + e] - mean) * inv_std;
          const double g = dy[offset + e];
          dg += g * xhat[e];
          db += g;
          const double dxh = g * gamma[ch];
          sum_dxhat += dxh;
          sum_dxhat_xhat += dxh * xhat[e];
        }
        if (dgamma != nullptr) dgamma[ch] += static_cast<float>(dg);
        if (dbeta != nullptr) dbeta[ch] += static_cast<float>(db);
      }
      if (dx == nullptr) continue;
      const double inv_m = 1.0 / static_cast<double>(m);
      for (std::size_t c = 0; c < cpg; ++c) {
        const std::size_t ch = gi * cpg + c;
        for (std::size_t s = 0; s < spatial; ++s) {
          const std::size_t e = c * spatial + s;
          const double dxh = dy[offset + e] * static_cast<double>(gamma[ch]);
          dx[offset + e] += static_cast<float>(
              inv_std * (dxh - inv_m * sum_dxhat - xhat[e] * inv_m * sum_dxhat_xhat));
        }
      }
    }
  }
}

void MaxPoolForward(std::size_t batch, std::size_t channels, std::size_t h,
                    std::size_t w, std::size_t k, const float* x, float* y,
                    std::uint32_t* argmax) {
  const std::size_t oh = h / k;
  const std::size_t ow = w / k;
  for (std::size_t bc = 0; bc < batch * channels; ++bc) {
    const float* plane = x + bc * h * w;
    for (std::size_t i = 0; i < oh; ++i) {
      for (std::size_t j = 0; j < ow; ++j) {
        float best = -std::numeric_limits<float>::infinity();
        std::size_t best_idx = 0;
        for (std::size_t a = 0; a < k; ++a) {
          for (std::size_t c = 0; c < k; ++c) {
            const std::size_t idx = (i * k + a) * w + (j * k + c);
            if (plane[idx] > best) {
              best = plane[idx];
              best_idx = idx;
            }
          }
        }
        const std::size_t o = bc * oh * ow + i * ow + j;
        y[o] = best;
        argmax[o] = static_cast<std::uint32_t>(bc * h * w + best_idx);
      }
    }
  }
}

}  // namespace psrlab::nn::kernels
