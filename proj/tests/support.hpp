#pragma once

#include <cmath>
#include <memory>

#include "rssvrg/bench.hpp"
#include "rssvrg/objective.hpp"
#include "rssvrg/ranking.hpp"

namespace testing {

inline rssvrg::CompositeProblem abs_problem(rssvrg::Regularizer reg = rssvrg::Regularizer::none()) {
  return rssvrg::CompositeProblem(std::make_shared<const rssvrg::AbsComponents>(Eigen::MatrixXd::Zero(1, 1)), reg);
}

inline rssvrg::CompositeProblem linear_problem(const Eigen::MatrixXd& coef,
                                               rssvrg::Regularizer reg = rssvrg::Regularizer::none()) {
  return rssvrg::CompositeProblem(std::make_shared<const rssvrg::LinearComponents>(coef), reg);
}

/// N=1000, d=10, seed 7 ranking instance with the given regularizer.
inline const rssvrg::RankingInstance& default_instance(rssvrg::RegSetting reg = rssvrg::RegSetting::ridge) {
  static const rssvrg::RankingInstance ridge = rssvrg::generate_instance(1000, 10, 7, rssvrg::RegSetting::ridge);
  static const rssvrg::RankingInstance lasso = rssvrg::generate_instance(1000, 10, 7, rssvrg::RegSetting::lasso);
  static const rssvrg::RankingInstance elastic = rssvrg::generate_instance(1000, 10, 7, rssvrg::RegSetting::elastic);
  switch (reg) {
    case rssvrg::RegSetting::lasso:
      return lasso;
    case rssvrg::RegSetting::elastic:
      return elastic;
    default:
      return ridge;
  }
}

/// Standard normal CDF.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace testing
