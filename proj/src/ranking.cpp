#include "rssvrg/ranking.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "rssvrg/errors.hpp"
#include "rssvrg/random.hpp"
#include "rssvrg/trace_io.hpp"

namespace rssvrg {

std::string_view to_string(RegSetting reg) {
  switch (reg) {
    case RegSetting::lasso:
      return "lasso";
    case RegSetting::ridge:
      return "ridge";
    case RegSetting::elastic:
      return "elastic";
  }
  return "unknown";
}

RegSetting parse_reg_setting(std::string_view name) {
  if (name == "lasso") return RegSetting::lasso;
  if (name == "ridge") return RegSetting::ridge;
  if (name == "elastic") return RegSetting::elastic;
  throw InputError("unknown regularizer setting '" + std::string(name) + "' (expected lasso, ridge, elastic)");
}

Regularizer make_regularizer(RegSetting reg) {
  switch (reg) {
    case RegSetting::lasso:
      return Regularizer::l1(0.01);
    case RegSetting::ridge:
      return Regularizer::ridge(0.01);
    case RegSetting::elastic:
      return Regularizer::elastic_net(0.01, 0.01);
  }
  throw InputError("unknown regularizer setting");
}

HingeComponents::HingeComponents(Eigen::MatrixXd diffs) : diffs_(std::move(diffs)) {
  if (diffs_.rows() == 0 || diffs_.cols() == 0) throw InputError("ranking instance needs N >= 1 pairs and d >= 1");
  if (!diffs_.allFinite()) throw InputError("ranking instance has non-finite entries");
  norms_ = diffs_.rowwise().norm();
}

double HingeComponents::value(std::size_t i, ConstPointRef w) const {
  const double slack = 1.0 - diffs_.row(static_cast<Eigen::Index>(i)).dot(w);
  return slack > 0.0 ? slack : 0.0;
}

void HingeComponents::add_subgradient(std::size_t i, ConstPointRef w, double scale, PointRef out) const {
  const auto u = diffs_.row(static_cast<Eigen::Index>(i));
  if (1.0 - u.dot(w) > 0.0) out -= scale * u.transpose();
}

double HingeComponents::mean_value(ConstPointRef w) const {
  const Eigen::VectorXd slack = (1.0 - (diffs_ * w).array()).max(0.0).matrix();
  return slack.mean();
}

void HingeComponents::add_mean_subgradient(ConstPointRef w, double scale, PointRef out) const {
  const Eigen::VectorXd active = ((1.0 - (diffs_ * w).array()) > 0.0).cast<double>().matrix();
  out -= (scale / static_cast<double>(diffs_.rows())) * (diffs_.transpose() * active);
}

RankingInstance generate_instance(std::size_t n_pairs, std::size_t dim, std::uint64_t seed, RegSetting reg,
                                  double feature_max) {
  if (n_pairs == 0 || dim == 0) throw InputError("generate_instance needs n_pairs >= 1 and dim >= 1");
  if (!(feature_max > 0.0)) throw InputError("feature range must be positive");
  RandomStream rng(seed);
  RankingInstance inst;
  inst.reg = reg;
  inst.feature_max = feature_max;
  inst.diffs.resize(static_cast<Eigen::Index>(n_pairs), static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < inst.diffs.rows(); ++i) {
    for (Eigen::Index j = 0; j < inst.diffs.cols(); ++j) {
      const double positive = rng.uniform(0.0, feature_max);
      const double negative = rng.uniform(0.0, feature_max);
      inst.diffs(i, j) = positive - negative;
    }
  }
  return inst;
}

CompositeProblem to_problem(const RankingInstance& instance) {
  auto hinge = std::make_shared<const HingeComponents>(instance.diffs);
  return CompositeProblem(hinge, make_regularizer(instance.reg));
}

void write_instance_csv(const RankingInstance& instance, std::ostream& out) {
  for (Eigen::Index j = 0; j < instance.diffs.cols(); ++j) out << (j ? ",u" : "u") << std::to_string(j);
  out << '\n';
  for (Eigen::Index i = 0; i < instance.diffs.rows(); ++i) {
    for (Eigen::Index j = 0; j < instance.diffs.cols(); ++j) {
      if (j) out << ',';
      out << format_double(instance.diffs(i, j));
    }
    out << '\n';
  }
}

void write_instance_csv(const RankingInstance& instance, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  write_instance_csv(instance, out);
}

RankingInstance read_instance_csv(std::istream& in, RegSetting reg) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("instance CSV is empty");
  const auto header = split_csv_line(line);
  const std::size_t d = header.size();
  for (std::size_t j = 0; j < d; ++j) {
    if (header[j] != "u" + std::to_string(j)) throw InputError("instance CSV header must be u0,u1,...");
  }
  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != d) {
      throw InputError("instance CSV row " + std::to_string(rows + 1) + " has " + std::to_string(fields.size()) +
                       " fields, expected " + std::to_string(d));
    }
    for (const auto& f : fields) values.push_back(parse_double(f));
    ++rows;
  }
  if (rows == 0) throw InputError("instance CSV has no rows");
  RankingInstance inst;
  inst.reg = reg;
  inst.diffs.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      inst.diffs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i * d + j];
    }
  }
  inst.feature_max = inst.diffs.cwiseAbs().maxCoeff();
  return inst;
}

RankingInstance read_instance_csv(const std::string& path, RegSetting reg) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open instance file '" + path + "'");
  return read_instance_csv(in, reg);
}

}  // namespace rssvrg
