#pragma once

// Composite objective P(x) = (1/N) sum_i f_i(x) + R(x): component oracles,
// regularizers and their proximal maps.

#include <cmath>
#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace rssvrg {

using Point = Eigen::VectorXd;
using ConstPointRef = Eigen::Ref<const Point>;
using PointRef = Eigen::Ref<Point>;

enum class RegularizerKind { none, l1, ridge, elastic_net };

/// R(x) = ridge_weight * ||x||_2^2 + l1_weight * ||x||_1.
class Regularizer {
 public:
  Regularizer() = default;

  static Regularizer none() { return {}; }
  static Regularizer l1(double l1_weight);
  static Regularizer ridge(double ridge_weight);
  static Regularizer elastic_net(double ridge_weight, double l1_weight);

  RegularizerKind kind() const { return kind_; }
  double ridge_weight() const { return ridge_; }
  double l1_weight() const { return l1_; }

  double value(ConstPointRef x) const;

  /// argmin_x { 0.5 ||x - y||^2 + step * R(x) }. Soft-threshold, then scale.
  Point prox(ConstPointRef y, double step) const;
  /// In-place variant used on solver hot paths; `step` must be positive.
  void prox_in_place(PointRef y, double step) const;

 private:
  Regularizer(RegularizerKind kind, double ridge, double l1) : kind_(kind), ridge_(ridge), l1_(l1) {}

  RegularizerKind kind_ = RegularizerKind::none;
  double ridge_ = 0.0;
  double l1_ = 0.0;
};

/// The finite family f_1..f_N. Indices are zero-based; implementations may
/// assume `i < size()` and `x.size() == dim()` (CompositeProblem checks).
class ComponentFunctions {
 public:
  virtual ~ComponentFunctions() = default;

  virtual std::size_t dim() const = 0;
  virtual std::size_t size() const = 0;

  virtual double value(std::size_t i, ConstPointRef x) const = 0;

  /// out += scale * g for one deterministic g in the subdifferential of f_i at x.
  virtual void add_subgradient(std::size_t i, ConstPointRef x, double scale, PointRef out) const = 0;

  /// (1/N) sum_i f_i(x). Override when a batched form is cheaper.
  virtual double mean_value(ConstPointRef x) const;

  /// out += scale * (1/N) sum_i g_i(x).
  virtual void add_mean_subgradient(ConstPointRef x, double scale, PointRef out) const;

  /// Tight Lipschitz constant of f_i w.r.t. the l2 norm, when known.
  virtual double component_lipschitz(std::size_t /*i*/) const { return -1.0; }
};

/// f_i(x) = <c_i, x>. Rows of `coefficients` are the c_i.
class LinearComponents final : public ComponentFunctions {
 public:
  explicit LinearComponents(Eigen::MatrixXd coefficients);

  std::size_t dim() const override { return static_cast<std::size_t>(coef_.cols()); }
  std::size_t size() const override { return static_cast<std::size_t>(coef_.rows()); }
  double value(std::size_t i, ConstPointRef x) const override;
  void add_subgradient(std::size_t i, ConstPointRef x, double scale, PointRef out) const override;
  double component_lipschitz(std::size_t i) const override;

 private:
  Eigen::MatrixXd coef_;
};

/// f_i(x) = ||x - c_i||_1. The chosen subgradient at a kink coordinate is 0.
class AbsComponents final : public ComponentFunctions {
 public:
  explicit AbsComponents(Eigen::MatrixXd centers);

  std::size_t dim() const override { return static_cast<std::size_t>(centers_.cols()); }
  std::size_t size() const override { return static_cast<std::size_t>(centers_.rows()); }
  double value(std::size_t i, ConstPointRef x) const override;
  void add_subgradient(std::size_t i, ConstPointRef x, double scale, PointRef out) const override;
  double component_lipschitz(std::size_t /*i*/) const override {
    return std::sqrt(static_cast<double>(dim()));
  }

 private:
  Eigen::MatrixXd centers_;
};

/// P(x) = F(x) + R(x) with Lipschitz metadata. Immutable; share freely.
class CompositeProblem {
 public:
  /// `lipschitz_l0 < 0` means "take the max of the components' own constants".
  CompositeProblem(std::shared_ptr<const ComponentFunctions> components, Regularizer regularizer,
                   double lipschitz_l0 = -1.0, std::vector<double> component_lipschitz = {});

  std::size_t dim() const { return components_->dim(); }
  std::size_t size() const { return components_->size(); }
  const Regularizer& regularizer() const { return regularizer_; }
  const ComponentFunctions& components() const { return *components_; }
  double lipschitz_l0() const { return l0_; }
  /// L_i; falls back to L0 when no per-component constants were given.
  double component_lipschitz(std::size_t i) const;

  double component_value(std::size_t i, ConstPointRef x) const;
  Point component_subgradient(std::size_t i, ConstPointRef x) const;

  /// F(x) = (1/N) sum_i f_i(x).
  double smooth_part(ConstPointRef x) const;
  double objective(ConstPointRef x) const;

  /// Throws InputError on a dimension mismatch.
  void check_point(ConstPointRef x) const;
  void check_index(std::size_t i) const;

 private:
  std::shared_ptr<const ComponentFunctions> components_;
  Regularizer regularizer_;
  double l0_;
  std::vector<double> component_l_;
};

double evaluate_objective(const CompositeProblem& problem, ConstPointRef x);
Point prox_step(const Regularizer& reg, ConstPointRef y, double step);
Point component_subgradient(const CompositeProblem& problem, std::size_t i, ConstPointRef x);

bool all_finite(ConstPointRef x);

}  // namespace rssvrg
