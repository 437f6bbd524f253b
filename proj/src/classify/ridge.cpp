#include "lakecausal/classify/ridge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "lakecausal/core/error.hpp"

namespace lakecausal::classify {
namespace {

constexpr double kLeverageGuard = 1e-12;

Eigen::MatrixXd json_matrix(const nlohmann::json& rows, Eigen::Index cols) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), cols);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const auto& row = rows.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != cols) throw DomainError("ragged weight matrix");
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = row.at(static_cast<std::size_t>(j)).get<double>();
  }
  return m;
}

Eigen::VectorXd json_vector(const nlohmann::json& arr) {
  const auto v = arr.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

void RidgeModel::validate() const {
  const auto p = mean.size();
  const auto k = static_cast<Eigen::Index>(classes.size());
  if (k < 2) throw DomainError("ridge model needs at least two classes");
  if (!std::is_sorted(classes.begin(), classes.end()) ||
      std::adjacent_find(classes.begin(), classes.end()) != classes.end()) {
    throw DomainError("ridge model classes must be unique and in canonical order");
  }
  if (scale.size() != p || weights.rows() != p || weights.cols() != k || intercepts.size() != k) {
    throw DomainError("ridge model dimensions disagree");
  }
  if (!weights.allFinite() || !intercepts.allFinite() || !mean.allFinite() || !scale.allFinite()) {
    throw DomainError("ridge model has non-finite entries");
  }
  if ((scale.array() <= 0.0).any()) throw DomainError("ridge model scale must be positive");
  if (std::find(alphas.begin(), alphas.end(), chosen_alpha) == alphas.end()) {
    throw DomainError("chosen alpha is not a grid point");
  }
}

std::vector<double> default_alpha_grid() {
  std::vector<double> grid;
  for (int i = 0; i < 10; ++i) grid.push_back(std::pow(10.0, -3.0 + 6.0 * i / 9.0));
  return grid;
}

void standardize_columns(const Eigen::MatrixXd& x, Eigen::VectorXd& mean, Eigen::VectorXd& scale) {
  const double n = static_cast<double>(x.rows());
  mean = x.colwise().mean().transpose();
  scale.resize(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double var = (x.col(j).array() - mean(j)).square().sum() / n;
    const double sd = std::sqrt(var);
    scale(j) = sd > 0.0 ? sd : 1.0;
  }
}

RidgeSolver::RidgeSolver(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  if (x.rows() != y.rows() || x.rows() < 2) throw DomainError("ridge solver needs matching rows, at least two");
  y_mean_ = y.colwise().mean();
  yc_ = y.rowwise() - y_mean_;
  xc_ = x.rowwise() - x.colwise().mean();
  primal_ = x.rows() > x.cols();
  if (primal_) {
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(xc_.cols(), xc_.cols());
    gram.selfadjointView<Eigen::Lower>().rankUpdate(xc_.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram.selfadjointView<Eigen::Lower>());
    eigenvalues_ = eig.eigenvalues().cwiseMax(0.0);
    eigenvectors_ = eig.eigenvectors();
    basis_ = xc_ * eigenvectors_;
    projected_ = basis_.transpose() * yc_;
  } else {
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(xc_.rows(), xc_.rows());
    gram.selfadjointView<Eigen::Lower>().rankUpdate(xc_);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram.selfadjointView<Eigen::Lower>());
    eigenvalues_ = eig.eigenvalues().cwiseMax(0.0);
    eigenvectors_ = eig.eigenvectors();
    projected_ = eigenvectors_.transpose() * yc_;
  }
}

Eigen::MatrixXd RidgeSolver::weights(double alpha) const {
  const Eigen::VectorXd inv = (eigenvalues_.array() + alpha).inverse();
  if (primal_) return eigenvectors_ * (inv.asDiagonal() * projected_);
  return xc_.transpose() * (eigenvectors_ * (inv.asDiagonal() * projected_));
}

Eigen::MatrixXd RidgeSolver::loo_residuals(double alpha) const {
  const double n = static_cast<double>(xc_.rows());
  Eigen::MatrixXd fitted;
  Eigen::VectorXd leverage;
  if (primal_) {
    // X V diag(1/(l+a)) V'X'Y; leverage is the row norm of X V scaled by 1/(l+a).
    const Eigen::VectorXd inv = (eigenvalues_.array() + alpha).inverse();
    fitted = basis_ * (inv.asDiagonal() * projected_);
    leverage = basis_.array().square().matrix() * inv;
  } else {
    const Eigen::VectorXd shrink = eigenvalues_.array() / (eigenvalues_.array() + alpha);
    fitted = eigenvectors_ * (shrink.asDiagonal() * projected_);
    leverage = eigenvectors_.array().square().matrix() * shrink;
  }
  leverage.array() += 1.0 / n;
  Eigen::MatrixXd residual = yc_ - fitted;
  for (Eigen::Index i = 0; i < residual.rows(); ++i) {
    const double denom = 1.0 - leverage(i);
    if (denom < kLeverageGuard) {
      residual.row(i).setConstant(std::numeric_limits<double>::infinity());
    } else {
      residual.row(i) /= denom;
    }
  }
  return residual;
}

RidgeModel ridge_fit(const Eigen::MatrixXd& x, std::span<const Label> y, std::span<const double> alphas) {
  if (x.rows() < 2) throw DomainError("ridge_fit needs at least two rows");
  if (static_cast<std::size_t>(x.rows()) != y.size()) throw DomainError("ridge_fit: one label per row required");
  if (x.cols() < 1) throw DomainError("ridge_fit needs at least one feature");
  if (!x.allFinite()) throw DomainError("ridge_fit: non-finite features");
  if (alphas.empty()) throw DomainError("ridge_fit: empty alpha grid");
  for (double a : alphas) {
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("ridge_fit: alphas must be positive and finite");
  }

  RidgeModel model;
  for (Label l : kLabels) {
    if (std::find(y.begin(), y.end(), l) != y.end()) model.classes.push_back(l);
  }
  if (model.classes.size() < 2) throw DomainError("ridge_fit needs at least two classes");

  const auto k = static_cast<Eigen::Index>(model.classes.size());
  Eigen::MatrixXd targets = Eigen::MatrixXd::Constant(x.rows(), k, -1.0);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const auto pos = std::find(model.classes.begin(), model.classes.end(), y[static_cast<std::size_t>(i)]);
    targets(i, pos - model.classes.begin()) = 1.0;
  }

  standardize_columns(x, model.mean, model.scale);
  const Eigen::MatrixXd xs =
      ((x.rowwise() - model.mean.transpose()).array().rowwise() / model.scale.transpose().array()).matrix();
  const RidgeSolver solver(xs, targets);

  model.alphas.assign(alphas.begin(), alphas.end());
  std::size_t best = 0;
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    model.loo_errors.push_back(solver.loo_residuals(alphas[a]).squaredNorm());
    if (model.loo_errors[a] < model.loo_errors[best]) best = a;
  }
  model.chosen_alpha = alphas[best];
  model.weights = solver.weights(model.chosen_alpha);
  model.intercepts = solver.intercepts().transpose();
  return model;
}

Eigen::MatrixXd ridge_scores(const Eigen::MatrixXd& x, const RidgeModel& model) {
  if (static_cast<std::size_t>(x.cols()) != model.num_features()) {
    throw DomainError("feature count " + std::to_string(x.cols()) + " does not match the model's " +
                      std::to_string(model.num_features()));
  }
  const Eigen::MatrixXd xs =
      ((x.rowwise() - model.mean.transpose()).array().rowwise() / model.scale.transpose().array()).matrix();
  return (xs * model.weights).rowwise() + model.intercepts.transpose();
}

std::vector<Label> ridge_predict(const Eigen::MatrixXd& x, const RidgeModel& model) {
  const Eigen::MatrixXd scores = ridge_scores(x, model);
  std::vector<Label> out;
  out.reserve(static_cast<std::size_t>(scores.rows()));
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    Eigen::Index arg = 0;
    for (Eigen::Index j = 1; j < scores.cols(); ++j) {
      if (scores(i, j) > scores(i, arg)) arg = j;
    }
    out.push_back(model.classes[static_cast<std::size_t>(arg)]);
  }
  return out;
}

nlohmann::ordered_json model_to_json(const RidgeModel& model) {
  nlohmann::ordered_json classes = nlohmann::ordered_json::array();
  for (Label l : model.classes) classes.push_back(to_string(l));
  nlohmann::ordered_json weights = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < model.weights.rows(); ++i) {
    std::vector<double> row(model.weights.row(i).begin(), model.weights.row(i).end());
    weights.push_back(row);
  }
  auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.begin(), v.end()); };
  return {{"classes", classes},
          {"chosen_alpha", model.chosen_alpha},
          {"alphas", model.alphas},
          {"loo_errors", model.loo_errors},
          {"intercepts", vec(model.intercepts)},
          {"mean", vec(model.mean)},
          {"scale", vec(model.scale)},
          {"weights", weights}};
}

RidgeModel model_from_json(const nlohmann::json& doc) {
  RidgeModel model;
  try {
    for (const auto& name : doc.at("classes")) {
      const auto l = parse_label(name.get<std::string>());
      if (!l) throw DomainError("unknown class " + name.get<std::string>());
      model.classes.push_back(*l);
    }
    model.chosen_alpha = doc.at("chosen_alpha").get<double>();
    model.alphas = doc.at("alphas").get<std::vector<double>>();
    model.loo_errors = doc.at("loo_errors").get<std::vector<double>>();
    model.intercepts = json_vector(doc.at("intercepts"));
    model.mean = json_vector(doc.at("mean"));
    model.scale = json_vector(doc.at("scale"));
    model.weights = json_matrix(doc.at("weights"), static_cast<Eigen::Index>(model.classes.size()));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("ridge model", 0, "", e.what());
  }
  model.validate();
  return model;
}

}  // namespace lakecausal::classify
