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

#include "psrlab/attack/attack.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "psrlab/attack/projection.h"
#include "psrlab/nn/loss.h"
#include "psrlab/util/error.h"
#include "psrlab/util/parallel.h"
#include "psrlab/util/rng.h"

namespace psrlab::attack {
namespace {

// Fixed so results do not depend on how many workers share the chunks.
constexpr std::size_t kChunk = 32;

float Sign(float v) { return v > 0.0f ? 1.0f : (v < 0.0f ? -1.0f : 0.0f); }

std::vector<std::size_t> DefaultOrigin(std::span<const std::size_t> origin,
                                       std::size_t n) {
  if (!origin.empty()) {
    Require(origin.size() == n, ErrorCode::kShapeMismatch,
            "origin index count does not match batch");
    return {origin.begin(), origin.end()};
  }
  std::vector<std::size_t> o(n);
  std::iota(o.begin(), o.end(), 0);
  return o;
}

void CheckInputs(const nn::Tensor& x, std::span<const std::size_t> labels) {
  Require(x.rank() >= 2, ErrorCode::kShapeMismatch, "attack input must be batched");
  Require(labels.size() == x.dim(0), ErrorCode::kShapeMismatch,
          "label count does not match batch");
}

void CheckGradient(const nn::Tensor& g) {
  Require(g.AllFinite(), ErrorCode::kNonFinite, "non-finite input gradient");
}

// Per-row cross-entropy from logits.
std::vector<double> RowLosses(const nn::Tensor& logits,
                              std::span<const std::size_t> labels) {
  const std::size_t k = logits.dim(1);
  std::vector<double> out(logits.dim(0));
  for (std::size_t b = 0; b < out.size(); ++b) {
    auto row = logits.data().subspan(b * k, k);
    const double mx = *std::max_element(row.begin(), row.end());
    double z = 0.0;
    for (float v : row) z += std::exp(static_cast<double>(v) - mx);
    out[b] = mx + std::log(z) - row[labels[b]];
  }
  return out;
}

double RowLinf(const nn::Tensor& a, const nn::Tensor& b, std::size_t row) {
  const std::size_t n = a.RowSize();
  double m = 0.0;
  for (std::size_t e = row * n; e < (row + 1) * n; ++e) {
    m = std::max(m, std::abs(static_cast<double>(a[e]) - b[e]));
  }
  return m;
}

void ClampToBall(const nn::Tensor& x, double eps, nn::Tensor& v) {
  const float lo_eps = static_cast<float>(eps);
  for (std::size_t e = 0; e < v.size(); ++e) {
    const float lo = std::max(0.0f, x[e] - lo_eps);
    const float hi = std::min(1.0f, x[e] + lo_eps);
    v[e] = std::clamp(v[e], lo, hi);
  }
}

// Runs `chunk_fn(begin, end)` over fixed-size row chunks and stitches the
// per-chunk results back together.
template <typename ChunkFn>
AdversarialBatch Chunked(const nn::Tensor& x, std::span<const std::size_t> labels,
                         std::span<const std::size_t> origin_in, int workers,
                         ChunkFn chunk_fn) {
  CheckInputs(x, labels);
  const std::size_t n = x.dim(0);
  const std::vector<std::size_t> origin = DefaultOrigin(origin_in, n);
  const std::size_t n_chunks = (n + kChunk - 1) / kChunk;
  std::vector<AdversarialBatch> parts(n_chunks);
  ParallelFor(n_chunks, workers, [&](std::size_t c) {
    const std::size_t begin = c * kChunk;
    const std::size_t end = std::min(n, begin + kChunk);
    parts[c] = chunk_fn(x.Slice(begin, end), labels.subspan(begin, end - begin),
                        std::span<const std::size_t>(origin).subspan(begin, end - begin));
  });
  AdversarialBatch out;
  std::vector<nn::Tensor> tensors;
  for (AdversarialBatch& p : parts) {
    tensors.push_back(std::move(p.x_adv));
    out.origin.insert(out.origin.end(), p.origin.begin(), p.origin.end());
    out.success.insert(out.success.end(), p.success.begin(), p.success.end());
    out.linf.insert(out.linf.end(), p.linf.begin(), p.linf.end());
  }
  out.x_adv = nn::Concat(tensors);
  return out;
}

AdversarialBatch FgsmChunk(const nn::Classifier& model, const nn::Tensor& x,
                           std::span<const std::size_t> labels, double eps,
                           std::span<const std::size_t> origin) {
  nn::Tensor g = model.LossInputGradient(x, labels);
  CheckGradient(g);
  nn::Tensor adv = x;
  const float step = static_cast<float>(eps);
  for (std::size_t e = 0; e < adv.size(); ++e) {
    adv[e] = std::clamp(x[e] + step * Sign(g[e]), 0.0f, 1.0f);
  }
  AdversarialBatch out;
  const nn::Labels pred = model.Predict(adv);
  out.origin.assign(origin.begin(), origin.end());
  for (std::size_t b = 0; b < labels.size(); ++b) {
    out.success.push_back(pred[b] != labels[b]);
    out.linf.push_back(RowLinf(adv, x, b));
  }
  out.x_adv = std::move(adv);
  return out;
}

AdversarialBatch PgdChunk(const nn::Classifier& model, const nn::Tensor& x,
                          std::span<const std::size_t> labels,
                          const AttackConfig& cfg,
                          std::span<const std::size_t> origin) {
  const std::size_t batch = x.dim(0);
  const std::size_t row = x.RowSize();
  nn::Tensor best = x;
  std::vector<double> best_loss(batch, -std::numeric_limits<double>::infinity());
  std::vector<std::uint8_t> best_wrong(batch, 0);
  const float step = static_cast<float>(cfg.step_size);

  for (int r = 0; r < cfg.restarts(); ++r) {
    nn::Tensor xt = x;
    if (cfg.random_start && cfg.eps > 0.0) {
      for (std::size_t b = 0; b < batch; ++b) {
        Rng rng(DeriveSeed(cfg.seed, {origin[b], static_cast<std::uint64_t>(r), 0x96d}));
        for (std::size_t e = b * row; e < (b + 1) * row; ++e) {
          xt[e] = std::clamp(
              x[e] + static_cast<float>(rng.Uniform(-cfg.eps, cfg.eps)), 0.0f, 1.0f);
        }
      }
    }
    for (int t = 0;; ++t) {
      nn::Classifier::Trace trace = model.Record(xt);
      const std::vector<double> losses = RowLosses(trace.logits, labels);
      Require(std::all_of(losses.begin(), losses.end(),
                          [](double v) { return std::isfinite(v); }),
              ErrorCode::kNonFinite, "non-finite loss during PGD");
      const nn::Labels pred = nn::Argmax(trace.logits);
      for (std::size_t b = 0; b < batch; ++b) {
        if (losses[b] > best_loss[b]) {
          best_loss[b] = losses[b];
          best_wrong[b] = pred[b] != labels[b];
          std::copy(xt.raw() + b * row, xt.raw() + (b + 1) * row, best.raw() + b * row);
        }
      }
      if (t == cfg.n_steps) break;
      nn::Tensor g = model.InputGradient(trace, nn::CrossEntropy(trace.logits, labels).grad_logits);
      CheckGradient(g);
      for (std::size_t e = 0; e < xt.size(); ++e) xt[e] += step * Sign(g[e]);
      ClampToBall(x, cfg.eps, xt);
    }
  }
  AdversarialBatch out;
  out.origin.assign(origin.begin(), origin.end());
  out.success = best_wrong;
  for (std::size_t b = 0; b < batch; ++b) out.linf.push_back(RowLinf(best, x, b));
  out.x_adv = std::move(best);
  return out;
}

// FAB state for one row: the working point and the smallest adversarial seen.
struct FabRow {
  std::vector<double> best;
  double best_norm = std::numeric_limits<double>::infinity();
};

constexpr double kFabNudge = 1e-4;

bool Misclassified(const nn::Classifier& model, std::span<const double> point,
                   const nn::Shape& row_shape, std::size_t label) {
  nn::Shape shape = row_shape;
  shape.insert(shape.begin(), 1);
  std::vector<float> data(point.begin(), point.end());
  return model.Predict(nn::Tensor(std::move(shape), std::move(data)))[0] != label;
}

double Linf(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

AdversarialBatch FabChunk(const nn::Classifier& model, const nn::Tensor& x,
                          std::span<const std::size_t> labels,
                          const AttackConfig& cfg,
                          std::span<const std::size_t> origin) {
  const std::size_t batch = x.dim(0);
  const std::size_t d = x.RowSize();
  const std::size_t k = model.n_classes();
  Require(k <= 16, ErrorCode::kInvalidArgument,
          "FAB scans every class; at most 16 classes are supported");
  const nn::Shape row_shape(x.shape().begin() + 1, x.shape().end());
  const std::vector<double> lower(d, 0.0);
  const std::vector<double> upper(d, 1.0);

  std::vector<FabRow> rows(batch);
  std::vector<std::vector<double>> x0(batch);
  for (std::size_t b = 0; b < batch; ++b) {
    x0[b].assign(x.raw() + b * d, x.raw() + (b + 1) * d);
  }
  // Already misclassified rows need no perturbation.
  const nn::Labels clean_pred = model.Predict(x);
  std::vector<std::uint8_t> active(batch, 1);
  for (std::size_t b = 0; b < batch; ++b) {
    if (clean_pred[b] != labels[b]) {
      rows[b].best = x0[b];
      rows[b].best_norm = 0.0;
      active[b] = 0;
    }
  }

  bool any_feasible = false;
  for (int r = 0; r < cfg.restarts(); ++r) {
    nn::Tensor xt = x;
    if (r > 0) {
      for (std::size_t b = 0; b < batch; ++b) {
        if (!active[b]) continue;
        const double radius = std::min(rows[b].best_norm, cfg.eps);
        Rng rng(DeriveSeed(cfg.seed, {origin[b], static_cast<std::uint64_t>(r), 0xfab}));
        for (std::size_t e = 0; e < d; ++e) {
          xt[b * d + e] = static_cast<float>(
              std::clamp(x0[b][e] + rng.Uniform(-radius, radius), 0.0, 1.0));
        }
      }
    }
    for (int t = 0; t < cfg.n_steps; ++t) {
      nn::Classifier::Trace trace = model.Record(xt);
      // grads[s] holds d(f_y - f_s)/dx for every row.
      std::vector<nn::Tensor> grads(k);
      for (std::size_t s = 0; s < k; ++s) {
        nn::Tensor seed(trace.logits.shape());
        bool any = false;
        for (std::size_t b = 0; b < batch; ++b) {
          if (!active[b] || labels[b] == s) continue;
          seed[b * k + labels[b]] = 1.0f;
          seed[b * k + s] = -1.0f;
          any = true;
        }
        if (!any) continue;
        grads[s] = model.InputGradient(trace, seed);
        CheckGradient(grads[s]);
      }
      for (std::size_t b = 0; b < batch; ++b) {
        if (!active[b]) continue;
        std::vector<double> xb(xt.raw() + b * d, xt.raw() + (b + 1) * d);
        const std::size_t y = labels[b];
        // Pick the class whose linearized boundary is closest to x_t.
        double best_dist = std::numeric_limits<double>::infinity();
        BoxHyperplaneProjection proj_t;
        BoxHyperplaneProjection proj_0;
        for (std::size_t s = 0; s < k; ++s) {
          if (s == y || grads[s].empty()) continue;
          std::vector<double> w(grads[s].raw() + b * d, grads[s].raw() + (b + 1) * d);
          if (std::all_of(w.begin(), w.end(), [](double v) { return v == 0.0; })) continue;
          const double g_val = static_cast<double>(trace.logits[b * k + y]) -
                               trace.logits[b * k + s];
          const double offset =
              g_val - std::inner_product(w.begin(), w.end(), xb.begin(), 0.0);
          try {
            BoxHyperplaneProjection pt = ProjectBoxHyperplane(xb, w, offset, lower, upper);
            if (pt.radius < best_dist) {
              BoxHyperplaneProjection p0 =
                  ProjectBoxHyperplane(x0[b], w, offset, lower, upper);
              best_dist = pt.radius;
              proj_t = std::move(pt);
              proj_0 = std::move(p0);
            }
          } catch (const Error& e) {
            if (e.code() != ErrorCode::kInfeasible) throw;
          }
        }
        if (!std::isfinite(best_dist)) continue;
        any_feasible = true;
        // The projection of the original point onto the linearized boundary,
        // nudged just past it, is itself a minimal-norm candidate.
        {
          std::vector<double> nudged(d);
          for (std::size_t e = 0; e < d; ++e) {
            nudged[e] = std::clamp(x0[b][e] + (1.0 + kFabNudge) * (proj_0.z[e] - x0[b][e]),
                                   0.0, 1.0);
          }
          if (Misclassified(model, nudged, row_shape, y)) {
            const double norm = Linf(nudged, x0[b]);
            if (norm < rows[b].best_norm) {
              rows[b].best_norm = norm;
              rows[b].best = std::move(nudged);
            }
          }
        }
        const double dist_t = proj_t.radius;
        const double dist_0 = proj_0.radius;
        const double alpha = dist_t + dist_0 > 0.0
                                 ? std::min(dist_t / (dist_t + dist_0), cfg.fab_alpha_max)
                                 : 0.0;
        std::vector<double> next(d);
        for (std::size_t e = 0; e < d; ++e) {
          const double from_t = xb[e] + cfg.fab_eta * (proj_t.z[e] - xb[e]);
          const double from_0 = x0[b][e] + cfg.fab_eta * (proj_0.z[e] - x0[b][e]);
          next[e] = std::clamp((1.0 - alpha) * from_t + alpha * from_0, 0.0, 1.0);
        }
        if (Misclassified(model, next, row_shape, y)) {
          const double norm = Linf(next, x0[b]);
          if (norm < rows[b].best_norm) {
            rows[b].best_norm = norm;
            rows[b].best = next;
          }
          for (std::size_t e = 0; e < d; ++e) {
            next[e] = (1.0 - cfg.fab_beta) * x0[b][e] + cfg.fab_beta * next[e];
          }
        }
        for (std::size_t e = 0; e < d; ++e) xt[b * d + e] = static_cast<float>(next[e]);
      }
    }
  }
  bool any_active = std::any_of(active.begin(), active.end(), [](auto a) { return a != 0; });
  Require(!any_active || any_feasible || cfg.n_steps == 0, ErrorCode::kInfeasible,
          "every FAB restart was infeasible");

  AdversarialBatch out;
  out.origin.assign(origin.begin(), origin.end());
  out.x_adv = x;
  for (std::size_t b = 0; b < batch; ++b) {
    FabRow& rb = rows[b];
    if (std::isfinite(rb.best_norm) && rb.best_norm > 0.0) {
      // Shrink toward the input along the segment while staying adversarial.
      double lo = 0.0;
      double hi = 1.0;
      std::vector<double> probe(d);
      for (int it = 0; it < cfg.fab_refine_steps; ++it) {
        const double mid = 0.5 * (lo + hi);
        for (std::size_t e = 0; e < d; ++e) {
          probe[e] = x0[b][e] + mid * (rb.best[e] - x0[b][e]);
        }
        if (Misclassified(model, probe, row_shape, labels[b])) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      if (hi < 1.0) {
        for (std::size_t e = 0; e < d; ++e) {
          rb.best[e] = x0[b][e] + hi * (rb.best[e] - x0[b][e]);
        }
        rb.best_norm = Linf(rb.best, x0[b]);
      }
    }
    const bool found = std::isfinite(rb.best_norm);
    if (found) {
      for (std::size_t e = 0; e < d; ++e) out.x_adv[b * d + e] = static_cast<float>(rb.best[e]);
    }
    const double norm = found ? RowLinf(out.x_adv, x, b) : 0.0;
    out.linf.push_back(found ? norm : std::numeric_limits<double>::infinity());
    out.success.push_back(found && norm <= cfg.eps + 1e-6);
  }
  return out;
}

}  // namespace

std::string_view MethodName(Method m) {
  switch (m) {
    case Method::kFgsm:
      return "fgsm";
    case Method::kPgd:
      return "pgd";
    case Method::kFab:
      return "fab";
  }
  return "unknown";
}

Method ParseMethod(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "fgsm") return Method::kFgsm;
  if (lower == "pgd") return Method::kPgd;
  if (lower == "fab") return Method::kFab;
  Fail(ErrorCode::kInvalidArgument, "unknown attack method '" + std::string(text) + "'");
}

double ParseRational(std::string_view text) {
  auto parse = [&](std::string_view s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    Require(ec == std::errc() && ptr == s.data() + s.size(),
            ErrorCode::kInvalidArgument, "not a number: '" + std::string(text) + "'");
    return v;
  };
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse(text);
  const double den = parse(text.substr(slash + 1));
  Require(den != 0.0, ErrorCode::kInvalidArgument, "zero denominator in '" + std::string(text) + "'");
  return parse(text.substr(0, slash)) / den;
}

int AttackConfig::restarts() const {
  if (n_restarts > 0) return n_restarts;
  return method == Method::kFab ? 3 : 1;
}

void AttackConfig::Validate() const {
  Require(eps >= 0.0 && eps <= 1.0, ErrorCode::kInvalidArgument,
          "attack budget must lie in [0, 1]");
  if (eps > 0.0) {
    Require(step_size > 0.0 && step_size <= eps, ErrorCode::kInvalidArgument,
            "step size must lie in (0, eps]");
  }
  Require(n_steps >= 0, ErrorCode::kInvalidArgument, "n_steps must be >= 0");
  Require(n_restarts >= 0, ErrorCode::kInvalidArgument, "n_restarts must be >= 0");
}

double AdversarialBatch::SuccessRate() const {
  if (success.empty()) return 0.0;
  return static_cast<double>(std::count(success.begin(), success.end(), 1)) /
         static_cast<double>(success.size());
}

AdversarialBatch Fgsm(const nn::Classifier& model, const nn::Tensor& x,
                      std::span<const std::size_t> labels, double eps,
                      std::span<const std::size_t> origin, int workers) {
  Require(eps >= 0.0 && eps <= 1.0, ErrorCode::kInvalidArgument,
          "attack budget must lie in [0, 1]");
  return Chunked(x, labels, origin, workers,
                 [&](const nn::Tensor& xc, std::span<const std::size_t> yc,
                     std::span<const std::size_t> oc) {
                   return FgsmChunk(model, xc, yc, eps, oc);
                 });
}

AdversarialBatch Pgd(const nn::Classifier& model, const nn::Tensor& x,
                     std::span<const std::size_t> labels, const AttackConfig& cfg,
                     std::span<const std::size_t> origin, int workers) {
  cfg.Validate();
  return Chunked(x, labels, origin, workers,
                 [&](const nn::Tensor& xc, std::span<const std::size_t> yc,
                     std::span<const std::size_t> oc) {
                   return PgdChunk(model, xc, yc, cfg, oc);
                 });
}

AdversarialBatch Fab(const nn::Classifier& model, const nn::Tensor& x,
                     std::span<const std::size_t> labels, const AttackConfig& cfg,
                     std::span<const std::size_t> origin, int workers) {
  cfg.Validate();
  return Chunked(x, labels, origin, workers,
                 [&](const nn::Tensor& xc, std::span<const std::size_t> yc,
                     std::span<const std::size_t> oc) {
                   return FabChunk(model, xc, yc, cfg, oc);
                 });
}

AdversarialBatch RunAttack(const nn::Classifier& model, const nn::Tensor& x,
                           std::span<const std::size_t> labels,
                           const AttackConfig& cfg,
                           std::span<const std::size_t> origin, int workers) {
  switch (cfg.method) {
    case Method::kFgsm:
      return Fgsm(model, x, labels, cfg.eps, origin, workers);
    case Method::kPgd:
      return Pgd(model, x, labels, cfg, origin, workers);
    case Method::kFab:
      return Fab(model, x, labels, cfg, origin, workers);
  }
  Fail(ErrorCode::kInvalidArgument, "unknown attack method");
}

void ProjectToBudget(const nn::Tensor& x, double eps, nn::Tensor& x_adv) {
  Require(x.shape() == x_adv.shape(), ErrorCode::kShapeMismatch,
          "adversarial batch shape differs from clean batch");
  ClampToBall(x, eps, x_adv);
}

}  // namespace psrlab::attack
