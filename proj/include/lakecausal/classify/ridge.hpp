#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "lakecausal/core/lake.hpp"

namespace lakecausal::classify {

// One-vs-rest ridge classifier. Weights act on standardized features:
// score = ((x - mean) / scale) * weights + intercepts.
struct RidgeModel {
  std::vector<Label> classes;  // present classes, canonical order; one score column each
  Eigen::MatrixXd weights;     // features x classes
  Eigen::VectorXd intercepts;
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;
  double chosen_alpha = 1.0;
  std::vector<double> alphas;
  std::vector<double> loo_errors;  // summed squared LOO residuals, one per alpha

  std::size_t num_features() const noexcept { return static_cast<std::size_t>(mean.size()); }
  void validate() const;
};

// 10 values spaced evenly in log10 between 1e-3 and 1e3.
std::vector<double> default_alpha_grid();

// Column mean and population standard deviation; zero deviation becomes 1.
void standardize_columns(const Eigen::MatrixXd& x, Eigen::VectorXd& mean, Eigen::VectorXd& scale);

// Ridge with unpenalized intercept on a fixed design, diagonalized once so
// that every alpha costs O(n * min(n, p)).
class RidgeSolver {
 public:
  // x is the (already standardized) design; y holds one target column per output.
  RidgeSolver(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

  // Weights (p x k) at alpha; the intercepts are the target means.
  Eigen::MatrixXd weights(double alpha) const;
  const Eigen::RowVectorXd& intercepts() const noexcept { return y_mean_; }
  // Leave-one-out residuals (n x k) in closed form: (y - yhat) / (1 - h).
  Eigen::MatrixXd loo_residuals(double alpha) const;

 private:
  bool primal_ = false;  // true: eigenbasis of X'X, false: of XX'
  Eigen::MatrixXd xc_;
  Eigen::MatrixXd yc_;
  Eigen::RowVectorXd y_mean_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
  Eigen::MatrixXd projected_;  // eigenvectors' * (X'Y or Y)
  Eigen::MatrixXd basis_;      // X * V (primal) or the eigenvectors themselves
};

// Requires at least two rows and two classes; throws DomainError on
// non-finite features or an invalid grid. Ties in LOO error go to the
// earliest alpha of the grid.
RidgeModel ridge_fit(const Eigen::MatrixXd& x, std::span<const Label> y, std::span<const double> alphas);

Eigen::MatrixXd ridge_scores(const Eigen::MatrixXd& x, const RidgeModel& model);

// Argmax of the scores; equal scores go to the earlier canonical class.
std::vector<Label> ridge_predict(const Eigen::MatrixXd& x, const RidgeModel& model);

nlohmann::ordered_json model_to_json(const RidgeModel& model);
RidgeModel model_from_json(const nlohmann::json& doc);

}  // namespace lakecausal::classify
