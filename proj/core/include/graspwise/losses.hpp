#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

namespace graspwise {

/// Probabilities are clamped from below at this value inside cross entropy.
inline constexpr double kProbabilityFloor = 1e-12;

enum class Reduction { kSum, kMean };

/// Grasp-proposal head output for one proposal. Index 1 of `p` is the
/// grasp class and index 0 non-grasp; `p_star` is the class index.
struct ProposalPrediction {
  std::array<double, 2> p{};
  std::array<double, 4> t{};
  int p_star = 0;
  std::array<double, 4> t_star{};
};

/// Orientation head output: 19 class probabilities, class 0 is non-grasp.
struct OrientationPrediction {
  std::array<double, 19> rho{};
  std::array<double, 4> beta{};
  int rho_star = 0;
  std::array<double, 4> beta_star{};
};

/// Surface head output. Index 1 of `s` is "nothing on top".
struct SurfacePrediction {
  std::array<double, 2> s{};
  int s_star = 0;
};

/// Sum over components of 0.5 d^2 (|d| < 1) or |d| - 0.5 (otherwise).
/// Throws Error(kShape) on length mismatch.
double smooth_l1(std::span<const double> x, std::span<const double> target);
/// d smooth_l1 / d x, written into grad.
void smooth_l1_grad(std::span<const double> x, std::span<const double> target,
                    std::span<double> grad);

/// -log(max(p[target], floor)). Throws Error(kDomain) for invalid
/// distributions or labels.
double cross_entropy(std::span<const double> probs, int target);

double loss_p(std::span<const ProposalPrediction> batch, double lambda1 = 1.0,
              Reduction reduction = Reduction::kSum);
double loss_g(std::span<const OrientationPrediction> batch, double lambda2 = 1.0,
              Reduction reduction = Reduction::kSum);
double loss_s(std::span<const SurfacePrediction> batch,
              Reduction reduction = Reduction::kSum);

struct LossWeights {
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  Reduction reduction = Reduction::kSum;
};

double loss_total(std::span<const ProposalPrediction> proposals,
                  std::span<const OrientationPrediction> orientations,
                  std::span<const SurfacePrediction> surfaces,
                  const LossWeights& weights = {});

/// Numerically stable softmax.
void softmax(std::span<const double> logits, std::span<double> probs);

/// The total loss as a function of a flat parameter vector, for gradient
/// checking and as a training hook. Layout per sample, in batch order:
///   proposals:    2 logits, 4 box values
///   orientations: 19 logits, 4 box values
///   surfaces:     2 logits
/// Probabilities are the softmax of the logits.
class TotalLossFunction {
 public:
  TotalLossFunction(std::vector<ProposalPrediction> proposal_targets,
                    std::vector<OrientationPrediction> orientation_targets,
                    std::vector<SurfacePrediction> surface_targets,
                    LossWeights weights = {});

  std::size_t dimension() const;
  /// Loss value; writes the analytic gradient when `grad` is non-empty.
  double evaluate(std::span<const double> params, std::span<double> grad = {}) const;
  /// Smallest | |d| - 1 | over active smooth-L1 residuals.
  double kink_distance(std::span<const double> params) const;

  void unpack(std::span<const double> params, std::vector<ProposalPrediction>& p,
              std::vector<OrientationPrediction>& g,
              std::vector<SurfacePrediction>& s) const;

 private:
  std::vector<ProposalPrediction> proposals_;
  std::vector<OrientationPrediction> orientations_;
  std::vector<SurfacePrediction> surfaces_;
  LossWeights weights_;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  /// The point sat within `kink_margin` of a non-differentiable point and
  /// was moved before checking.
  bool perturbed = false;
  std::vector<double> point;
};

using DifferentiableFn =
    std::function<double(std::span<const double> x, std::span<double> grad)>;

/// Compares the analytic gradient with central differences of step h.
/// Relative error per component is |a - n| / max(|a|, |n|, 1e-8). When
/// `kink_distance` reports a value below `kink_margin` the point is nudged
/// deterministically until it clears the margin.
GradCheckResult grad_check(const DifferentiableFn& fn, std::span<const double> point,
                           double h = 1e-5,
                           const std::function<double(std::span<const double>)>&
                               kink_distance = {},
                           double kink_margin = 1e-3);

}  // namespace graspwise
