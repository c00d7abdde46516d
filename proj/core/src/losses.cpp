#include "graspwise/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "graspwise/error.hpp"

namespace graspwise {

namespace {

void check_distribution(std::span<const double> probs) {
  double sum = 0.0;
  for (double v : probs) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw Error(ErrorCode::kDomain, "probability outside [0, 1]");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw Error(ErrorCode::kDomain,
                "probabilities sum to " + std::to_string(sum) + ", not 1");
  }
}

double scale_for(std::size_t n, Reduction r) {
  return (r == Reduction::kMean && n > 0) ? 1.0 / static_cast<double>(n) : 1.0;
}

// d CE / d logits for probabilities that came from a softmax.
void cross_entropy_logit_grad(std::span<const double> probs, int target,
                              double scale, std::span<double> grad) {
  if (probs[target] < kProbabilityFloor) {
    // Clamped: the loss is flat in the logits here.
    std::fill(grad.begin(), grad.end(), 0.0);
    return;
  }
  for (std::size_t i = 0; i < probs.size(); ++i) {
    grad[i] = scale * (probs[i] - (static_cast<int>(i) == target ? 1.0 : 0.0));
  }
}

}  // namespace

double smooth_l1(std::span<const double> x, std::span<const double> target) {
  if (x.size() != target.size()) {
    throw Error(ErrorCode::kShape, "smooth_l1: length mismatch (" +
                                       std::to_string(x.size()) + " vs " +
                                       std::to_string(target.size()) + ")");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = std::abs(x[i] - target[i]);
    total += d < 1.0 ? 0.5 * d * d : d - 0.5;
  }
  return total;
}

void smooth_l1_grad(std::span<const double> x, std::span<const double> target,
                    std::span<double> grad) {
  if (x.size() != target.size() || grad.size() != x.size()) {
    throw Error(ErrorCode::kShape, "smooth_l1_grad: length mismatch");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - target[i];
    grad[i] = std::abs(d) < 1.0 ? d : (d > 0.0 ? 1.0 : -1.0);
  }
}

double cross_entropy(std::span<const double> probs, int target) {
  check_distribution(probs);
  if (target < 0 || static_cast<std::size_t>(target) >= probs.size()) {
    throw Error(ErrorCode::kDomain, "label " + std::to_string(target) +
                                        " outside the class range");
  }
  return -std::log(std::max(probs[target], kProbabilityFloor));
}

double loss_p(std::span<const ProposalPrediction> batch, double lambda1,
              Reduction reduction) {
  double cls = 0.0;
  double loc = 0.0;
  for (const auto& s : batch) {
    if (s.p_star != 0 && s.p_star != 1) {
      throw Error(ErrorCode::kDomain, "proposal label must be 0 or 1");
    }
    cls += cross_entropy(s.p, s.p_star);
    if (s.p_star == 1) loc += smooth_l1(s.t, s.t_star);
  }
  return scale_for(batch.size(), reduction) * (cls + lambda1 * loc);
}

double loss_g(std::span<const OrientationPrediction> batch, double lambda2,
              Reduction reduction) {
  double cls = 0.0;
  double loc = 0.0;
  for (const auto& s : batch) {
    cls += cross_entropy(s.rho, s.rho_star);
    if (s.rho_star != 0) loc += smooth_l1(s.beta, s.beta_star);
  }
  return scale_for(batch.size(), reduction) * (cls + lambda2 * loc);
}

double loss_s(std::span<const SurfacePrediction> batch, Reduction reduction) {
  double cls = 0.0;
  for (const auto& s : batch) {
    if (s.s_star != 0 && s.s_star != 1) {
      throw Error(ErrorCode::kDomain, "surface label must be 0 or 1");
    }
    cls += cross_entropy(s.s, s.s_star);
  }
  return scale_for(batch.size(), reduction) * cls;
}

double loss_total(std::span<const ProposalPrediction> proposals,
                  std::span<const OrientationPrediction> orientations,
                  std::span<const SurfacePrediction> surfaces,
                  const LossWeights& weights) {
  return loss_p(proposals, weights.lambda1, weights.reduction) +
         loss_g(orientations, weights.lambda2, weights.reduction) +
         loss_s(surfaces, weights.reduction);
}

void softmax(std::span<const double> logits, std::span<double> probs) {
  if (logits.size() != probs.size() || logits.empty()) {
    throw Error(ErrorCode::kShape, "softmax: size mismatch");
  }
  const double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    probs[i] = std::exp(logits[i] - m);
    sum += probs[i];
  }
  for (double& p : probs) p /= sum;
}

TotalLossFunction::TotalLossFunction(std::vector<ProposalPrediction> proposal_targets,
                                     std::vector<OrientationPrediction> orientation_targets,
                                     std::vector<SurfacePrediction> surface_targets,
                                     LossWeights weights)
    : proposals_(std::move(proposal_targets)),
      orientations_(std::move(orientation_targets)),
      surfaces_(std::move(surface_targets)),
      weights_(weights) {}

std::size_t TotalLossFunction::dimension() const {
  return proposals_.size() * 6 + orientations_.size() * 23 + surfaces_.size() * 2;
}

void TotalLossFunction::unpack(std::span<const double> params,
                               std::vector<ProposalPrediction>& p,
                               std::vector<OrientationPrediction>& g,
                               std::vector<SurfacePrediction>& s) const {
  if (params.size() != dimension()) {
    throw Error(ErrorCode::kShape, "parameter vector has " +
                                       std::to_string(params.size()) +
                                       " entries, expected " +
                                       std::to_string(dimension()));
  }
  p = proposals_;
  g = orientations_;
  s = surfaces_;
  std::size_t off = 0;
  for (auto& x : p) {
    softmax(params.subspan(off, 2), x.p);
    std::copy_n(params.begin() + off + 2, 4, x.t.begin());
    off += 6;
  }
  for (auto& x : g) {
    softmax(params.subspan(off, 19), x.rho);
    std::copy_n(params.begin() + off + 19, 4, x.beta.begin());
    off += 23;
  }
  for (auto& x : s) {
    softmax(params.subspan(off, 2), x.s);
    off += 2;
  }
}

double TotalLossFunction::evaluate(std::span<const double> params,
                                   std::span<double> grad) const {
  std::vector<ProposalPrediction> p;
  std::vector<OrientationPrediction> g;
  std::vector<SurfacePrediction> s;
  unpack(params, p, g, s);
  const double value = loss_total(p, g, s, weights_);
  if (grad.empty()) return value;
  if (grad.size() != params.size()) {
    throw Error(ErrorCode::kShape, "gradient buffer has the wrong size");
  }

  const double sp = scale_for(p.size(), weights_.reduction);
  const double sg = scale_for(g.size(), weights_.reduction);
  const double ss = scale_for(s.size(), weights_.reduction);
  std::size_t off = 0;
  for (const auto& x : p) {
    cross_entropy_logit_grad(x.p, x.p_star, sp, grad.subspan(off, 2));
    auto box = grad.subspan(off + 2, 4);
    if (x.p_star == 1) {
      smooth_l1_grad(x.t, x.t_star, box);
      for (double& v : box) v *= sp * weights_.lambda1;
    } else {
      std::fill(box.begin(), box.end(), 0.0);
    }
    off += 6;
  }
  for (const auto& x : g) {
    cross_entropy_logit_grad(x.rho, x.rho_star, sg, grad.subspan(off, 19));
    auto box = grad.subspan(off + 19, 4);
    if (x.rho_star != 0) {
      smooth_l1_grad(x.beta, x.beta_star, box);
      for (double& v : box) v *= sg * weights_.lambda2;
    } else {
      std::fill(box.begin(), box.end(), 0.0);
    }
    off += 23;
  }
  for (const auto& x : s) {
    cross_entropy_logit_grad(x.s, x.s_star, ss, grad.subspan(off, 2));
    off += 2;
  }
  return value;
}

double TotalLossFunction::kink_distance(std::span<const double> params) const {
  std::vector<ProposalPrediction> p;
  std::vector<OrientationPrediction> g;
  std::vector<SurfacePrediction> s;
  unpack(params, p, g, s);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& x : p) {
    if (x.p_star != 1) continue;
    for (int i = 0; i < 4; ++i) {
      best = std::min(best, std::abs(std::abs(x.t[i] - x.t_star[i]) - 1.0));
    }
  }
  for (const auto& x : g) {
    if (x.rho_star == 0) continue;
    for (int i = 0; i < 4; ++i) {
      best = std::min(best, std::abs(std::abs(x.beta[i] - x.beta_star[i]) - 1.0));
    }
  }
  return best;
}

GradCheckResult grad_check(const DifferentiableFn& fn, std::span<const double> point,
                           double h,
                           const std::function<double(std::span<const double>)>&
                               kink_distance,
                           double kink_margin) {
  GradCheckResult result;
  result.point.assign(point.begin(), point.end());
  if (kink_distance) {
    for (int attempt = 1; attempt <= 64 && kink_distance(result.point) < kink_margin;
         ++attempt) {
      // Alternate the nudge sign so repeated attempts do not drift far.
      const double step = (attempt % 2 ? 1.0 : -1.0) * 2.5 * kink_margin * attempt;
      for (double& v : result.point) v += step;
      result.perturbed = true;
    }
  }

  const std::size_t n = result.point.size();
  std::vector<double> analytic(n, 0.0);
  fn(result.point, analytic);
  std::vector<double> x = result.point;
  for (std::size_t i = 0; i < n; ++i) {
    const double orig = x[i];
    x[i] = orig + h;
    const double fp = fn(x, {});
    x[i] = orig - h;
    const double fm = fn(x, {});
    x[i] = orig;
    const double numeric = (fp - fm) / (2.0 * h);
    const double denom =
        std::max({std::abs(analytic[i]), std::abs(numeric), 1e-8});
    result.max_relative_error =
        std::max(result.max_relative_error, std::abs(analytic[i] - numeric) / denom);
  }
  return result;
}

}  // namespace graspwise
