#include "rssvrg/objective.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rssvrg/errors.hpp"

namespace rssvrg {

namespace {

void require_nonnegative(double w, const char* name) {
  if (!(w >= 0.0) || !std::isfinite(w)) {
    throw InputError(std::string("regularizer weight ") + name + " must be finite and >= 0");
  }
}

}  // namespace

Regularizer Regularizer::l1(double l1_weight) {
  require_nonnegative(l1_weight, "lambda2");
  return {RegularizerKind::l1, 0.0, l1_weight};
}

Regularizer Regularizer::ridge(double ridge_weight) {
  require_nonnegative(ridge_weight, "lambda1");
  return {RegularizerKind::ridge, ridge_weight, 0.0};
}

Regularizer Regularizer::elastic_net(double ridge_weight, double l1_weight) {
  require_nonnegative(ridge_weight, "lambda1");
  require_nonnegative(l1_weight, "lambda2");
  return {RegularizerKind::elastic_net, ridge_weight, l1_weight};
}

double Regularizer::value(ConstPointRef x) const {
  double v = 0.0;
  if (ridge_ != 0.0) v += ridge_ * x.squaredNorm();
  if (l1_ != 0.0) v += l1_ * x.lpNorm<1>();
  return v;
}

Point Regularizer::prox(ConstPointRef y, double step) const {
  if (!(step > 0.0)) throw InputError("prox step must be positive");
  Point x = y;
  prox_in_place(x, step);
  return x;
}

void Regularizer::prox_in_place(PointRef y, double step) const {
  if (kind_ == RegularizerKind::none) return;
  const double threshold = step * l1_;
  const double scale = 1.0 / (1.0 + 2.0 * step * ridge_);
  if (threshold > 0.0) {
    for (Eigen::Index j = 0; j < y.size(); ++j) {
      const double a = std::abs(y[j]) - threshold;
      y[j] = a > 0.0 ? std::copysign(a, y[j]) * scale : 0.0;
    }
  } else if (scale != 1.0) {
    y *= scale;
  }
}

double ComponentFunctions::mean_value(ConstPointRef x) const {
  double sum = 0.0;
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) sum += value(i, x);
  return sum / static_cast<double>(n);
}

void ComponentFunctions::add_mean_subgradient(ConstPointRef x, double scale, PointRef out) const {
  const std::size_t n = size();
  const double w = scale / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) add_subgradient(i, x, w, out);
}

LinearComponents::LinearComponents(Eigen::MatrixXd coefficients) : coef_(std::move(coefficients)) {
  if (coef_.rows() == 0 || coef_.cols() == 0) throw InputError("LinearComponents: empty coefficient matrix");
}

double LinearComponents::value(std::size_t i, ConstPointRef x) const {
  return coef_.row(static_cast<Eigen::Index>(i)).dot(x);
}

void LinearComponents::add_subgradient(std::size_t i, ConstPointRef, double scale, PointRef out) const {
  out += scale * coef_.row(static_cast<Eigen::Index>(i)).transpose();
}

double LinearComponents::component_lipschitz(std::size_t i) const {
  return coef_.row(static_cast<Eigen::Index>(i)).norm();
}

AbsComponents::AbsComponents(Eigen::MatrixXd centers) : centers_(std::move(centers)) {
  if (centers_.rows() == 0 || centers_.cols() == 0) throw InputError("AbsComponents: empty center matrix");
}

double AbsComponents::value(std::size_t i, ConstPointRef x) const {
  return (x.transpose() - centers_.row(static_cast<Eigen::Index>(i))).lpNorm<1>();
}

void AbsComponents::add_subgradient(std::size_t i, ConstPointRef x, double scale, PointRef out) const {
  const auto c = centers_.row(static_cast<Eigen::Index>(i));
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double r = x[j] - c[j];
    if (r > 0.0) {
      out[j] += scale;
    } else if (r < 0.0) {
      out[j] -= scale;
    }
  }
}

CompositeProblem::CompositeProblem(std::shared_ptr<const ComponentFunctions> components, Regularizer regularizer,
                                   double lipschitz_l0, std::vector<double> component_lipschitz)
    : components_(std::move(components)), regularizer_(regularizer), l0_(lipschitz_l0),
      component_l_(std::move(component_lipschitz)) {
  if (!components_) throw InputError("CompositeProblem: null component oracle");
  if (components_->dim() == 0 || components_->size() == 0) {
    throw InputError("CompositeProblem: need dim >= 1 and N >= 1");
  }
  if (!component_l_.empty() && component_l_.size() != components_->size()) {
    throw InputError("CompositeProblem: component Lipschitz vector must have N entries");
  }
  if (l0_ < 0.0) {
    double best = 0.0;
    for (std::size_t i = 0; i < components_->size(); ++i) {
      const double li = components_->component_lipschitz(i);
      if (li < 0.0) throw InputError("CompositeProblem: L0 not given and components do not report one");
      best = std::max(best, li);
    }
    l0_ = best;
  }
}

double CompositeProblem::component_lipschitz(std::size_t i) const {
  check_index(i);
  return component_l_.empty() ? l0_ : component_l_[i];
}

void CompositeProblem::check_point(ConstPointRef x) const {
  if (static_cast<std::size_t>(x.size()) != dim()) {
    throw InputError("point has dimension " + std::to_string(x.size()) + ", problem expects " +
                     std::to_string(dim()));
  }
}

void CompositeProblem::check_index(std::size_t i) const {
  if (i >= size()) {
    throw InputError("component index " + std::to_string(i) + " out of range [0, " + std::to_string(size()) + ")");
  }
}

double CompositeProblem::component_value(std::size_t i, ConstPointRef x) const {
  check_index(i);
  check_point(x);
  return components_->value(i, x);
}

Point CompositeProblem::component_subgradient(std::size_t i, ConstPointRef x) const {
  check_index(i);
  check_point(x);
  Point g = Point::Zero(static_cast<Eigen::Index>(dim()));
  components_->add_subgradient(i, x, 1.0, g);
  return g;
}

double CompositeProblem::smooth_part(ConstPointRef x) const {
  check_point(x);
  return components_->mean_value(x);
}

double CompositeProblem::objective(ConstPointRef x) const { return smooth_part(x) + regularizer_.value(x); }

double evaluate_objective(const CompositeProblem& problem, ConstPointRef x) { return problem.objective(x); }

Point prox_step(const Regularizer& reg, ConstPointRef y, double step) { return reg.prox(y, step); }

Point component_subgradient(const CompositeProblem& problem, std::size_t i, ConstPointRef x) {
  return problem.component_subgradient(i, x);
}

bool all_finite(ConstPointRef x) { return x.allFinite(); }

}  // namespace rssvrg
