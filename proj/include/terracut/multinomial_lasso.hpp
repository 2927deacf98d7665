#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "terracut/ingest.hpp"

namespace terracut {

/// Symmetric multinomial coefficients at one penalty value: column k holds
/// class k's slopes.
struct CoefficientMatrix {
  Eigen::VectorXd intercepts;  // K
  Eigen::MatrixXd slopes;      // p x K
  double lambda = 0.0;
};

struct FitDiagnostics {
  int iterations = 0;           // outer sweeps
  double objective = 0.0;       // penalized objective at the solution
  double objective_change = 0.0;  // change over the final sweep
  double deviance = 0.0;        // -2 * log-likelihood (summed)
  std::vector<double> objective_trace;  // per-sweep objective when recorded
};

struct LassoOptions {
  int max_sweeps = 20000;
  int max_inner = 500;
  double tolerance = 1e-7;      // max coefficient change per sweep
  double kkt_tolerance = 1e-8;  // stop only once KKT residuals are below this
  bool record_trace = false;
};

struct LassoFit {
  std::vector<CoefficientMatrix> path;  // lambdas strictly decreasing
  std::vector<FitDiagnostics> diagnostics;
  std::vector<int> classes;             // original label of column k
  std::optional<Standardization> scaling;
};

/// Penalized objective: mean negative log-likelihood + lambda * sum |slopes|.
double penalized_objective(const Eigen::MatrixXd& x, std::span<const std::size_t> y, const CoefficientMatrix& coefs);

/// Smallest lambda at which the intercept-only fit satisfies the KKT conditions:
/// max_jk |x_j . (1{y=k} - class frequency_k)| / n.
double lambda_max(const Eigen::MatrixXd& x, std::span<const int> y);

/// `count` log-spaced values from lambda_max down to ratio * lambda_max.
std::vector<double> lambda_grid(double lambda_max, std::size_t count = 100, double ratio = 1e-3);

/// Warm-started cyclic coordinate descent along a strictly decreasing lambda
/// path. Each class update solves the penalized weighted least-squares problem
/// from the partial Newton step; if that step raises the objective it is
/// replaced by the step from the 1/4 curvature bound, which cannot.
/// `classes` fixes the class set (every one must occur in y); when empty it is
/// the sorted distinct labels.
LassoFit fit_multinomial_lasso(const Eigen::MatrixXd& x, std::span<const int> y, std::span<const double> lambdas,
                               const LassoOptions& options = {}, std::vector<int> classes = {});

/// Softmax of intercept + slopes^T x. Logits are centred and clipped to +-30
/// before exponentiation so every probability stays inside (0, 1).
Eigen::VectorXd predict_proba(const CoefficientMatrix& coefs, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Row i holds the class probabilities for row i of x.
Eigen::MatrixXd predict_proba_rows(const CoefficientMatrix& coefs, const Eigen::MatrixXd& x);

/// Class probabilities as one covariate sweeps `grid` with the others held at
/// their column means. Result is grid.size() x K.
Eigen::MatrixXd probability_curves(const CoefficientMatrix& coefs, const Eigen::MatrixXd& x, std::size_t var_index,
                                   std::span<const double> grid);

/// Column k minus the reference column, for intercepts and slopes.
/// `reference` is a column index; throws BadReference when out of range.
CoefficientMatrix contrasts_vs_reference(const CoefficientMatrix& coefs, std::size_t reference);

struct CrossValidation {
  std::vector<double> lambdas;
  std::vector<double> mean_deviance;  // held-out deviance per observation
  std::size_t selected_index = 0;
  double selected_lambda = 0.0;
};

/// Stratified K-fold cross-validation over the full-data path; picks the
/// lambda with the smallest mean held-out deviance (ties to the larger
/// lambda). Throws FoldTooSmall when a class has fewer members than folds.
CrossValidation cv_lambda(const Eigen::MatrixXd& x, std::span<const int> y, std::size_t folds, std::uint64_t seed,
                          std::size_t path_length = 100, const LassoOptions& options = {});

/// Coefficient table: header `term,cluster_<label>...`, one intercept row then
/// one row per covariate.
std::string coefficient_table_csv(const CoefficientMatrix& coefs, const std::vector<std::string>& covariates,
                                  const std::vector<int>& classes);

struct CoefficientTable {
  std::vector<std::string> covariates;
  std::vector<int> classes;
  CoefficientMatrix coefs;
};

CoefficientTable parse_coefficient_table(std::string_view csv, const std::string& source);

}  // namespace terracut
