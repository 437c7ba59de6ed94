#pragma once

// Synthetic bipartite ranking with a linear scorer: pair i contributes the
// hinge loss max{1 - <u_i, w>, 0} on the difference u_i = x_i - y_i.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "rssvrg/objective.hpp"

namespace rssvrg {

enum class RegSetting { lasso, ridge, elastic };

std::string_view to_string(RegSetting reg);
RegSetting parse_reg_setting(std::string_view name);
/// lasso: l1(0.01); ridge: ridge(0.01); elastic: elastic_net(0.01, 0.01).
Regularizer make_regularizer(RegSetting reg);

/// Hinge components over the rows of `diffs`. Tie-break at the kink
/// (1 - <u_i, w> == 0) is the zero subgradient.
class HingeComponents final : public ComponentFunctions {
 public:
  explicit HingeComponents(Eigen::MatrixXd diffs);

  std::size_t dim() const override { return static_cast<std::size_t>(diffs_.cols()); }
  std::size_t size() const override { return static_cast<std::size_t>(diffs_.rows()); }
  double value(std::size_t i, ConstPointRef w) const override;
  void add_subgradient(std::size_t i, ConstPointRef w, double scale, PointRef out) const override;
  double mean_value(ConstPointRef w) const override;
  void add_mean_subgradient(ConstPointRef w, double scale, PointRef out) const override;
  double component_lipschitz(std::size_t i) const override { return norms_[static_cast<Eigen::Index>(i)]; }

  const Eigen::MatrixXd& diffs() const { return diffs_; }

 private:
  Eigen::MatrixXd diffs_;
  Eigen::VectorXd norms_;
};

struct RankingInstance {
  /// N x d; row i is u_i.
  Eigen::MatrixXd diffs;
  RegSetting reg = RegSetting::ridge;
  /// Upper end of the raw feature range [0, feature_max].
  double feature_max = 100.0;

  std::size_t n_pairs() const { return static_cast<std::size_t>(diffs.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(diffs.cols()); }
};

/// Features of x_i and y_i i.i.d. uniform on [0, feature_max].
RankingInstance generate_instance(std::size_t n_pairs, std::size_t dim, std::uint64_t seed,
                                  RegSetting reg = RegSetting::ridge, double feature_max = 100.0);

/// Hinge problem with L0 = max_i ||u_i||_2 and the instance's regularizer.
CompositeProblem to_problem(const RankingInstance& instance);

/// One CSV row per pair holding the u_i entries (header u0,u1,...).
void write_instance_csv(const RankingInstance& instance, std::ostream& out);
void write_instance_csv(const RankingInstance& instance, const std::string& path);
RankingInstance read_instance_csv(std::istream& in, RegSetting reg);
RankingInstance read_instance_csv(const std::string& path, RegSetting reg);

}  // namespace rssvrg
