#include "terracut/multinomial_lasso.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "terracut/error.hpp"
#include "terracut/io.hpp"
#include "terracut/parallel.hpp"
#include "terracut/random.hpp"

namespace terracut {

namespace {

constexpr double kMinWeight = 1e-5;
constexpr double kLogitCap = 30.0;

struct Encoded {
  std::vector<std::size_t> y;
  std::vector<int> classes;
};

Encoded encode_labels(std::span<const int> labels, std::vector<int> classes) {
  if (classes.empty()) {
    classes.assign(labels.begin(), labels.end());
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  }
  std::map<int, std::size_t> index;
  for (std::size_t k = 0; k < classes.size(); ++k) {
    if (!index.emplace(classes[k], k).second) fail(ErrorCode::InvalidArgument, "duplicate class label");
  }
  Encoded out;
  out.classes = std::move(classes);
  std::vector<std::size_t> counts(out.classes.size(), 0);
  out.y.reserve(labels.size());
  for (int l : labels) {
    const auto it = index.find(l);
    if (it == index.end()) fail(ErrorCode::InvalidArgument, "label " + std::to_string(l) + " is not a declared class");
    out.y.push_back(it->second);
    ++counts[it->second];
  }
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] == 0) fail(ErrorCode::DegenerateClass, "class " + std::to_string(out.classes[k]) + " has no members");
  }
  return out;
}

// Row-wise log-sum-exp of the linear predictor.
Eigen::VectorXd log_normalizer(const Eigen::MatrixXd& eta) {
  const Eigen::VectorXd top = eta.rowwise().maxCoeff();
  const Eigen::ArrayXXd shifted = (eta.colwise() - top).array().exp();  // materialized so exp vectorizes
  return top.array() + shifted.rowwise().sum().log();
}

double mean_nll(const Eigen::MatrixXd& eta, std::span<const std::size_t> y) {
  const Eigen::VectorXd lse = log_normalizer(eta);
  double total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    total += lse(r) - eta(r, static_cast<Eigen::Index>(y[i]));
  }
  return total / static_cast<double>(y.size());
}

Eigen::MatrixXd indicator_matrix(std::span<const std::size_t> y, std::size_t classes) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(y.size()), static_cast<Eigen::Index>(classes));
  for (std::size_t i = 0; i < y.size(); ++i) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(y[i])) = 1.0;
  return out;
}

double soft_threshold(double u, double lambda) {
  if (u > lambda) return u - lambda;
  if (u < -lambda) return u + lambda;
  return 0.0;
}

void require_design(const Eigen::MatrixXd& x, std::size_t n_labels) {
  if (static_cast<std::size_t>(x.rows()) != n_labels) fail(ErrorCode::DimensionMismatch, "design rows != labels");
  if (!x.allFinite()) fail(ErrorCode::InvalidArgument, "design matrix has non-finite entries");
}

class Solver {
 public:
  Solver(const Eigen::MatrixXd& x, std::span<const std::size_t> y, std::size_t classes, const LassoOptions& options)
      : x_(x), y_(y), options_(options), n_(static_cast<double>(x.rows())),
        Y_(indicator_matrix(y, classes)),
        b0_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(classes))),
        B_(Eigen::MatrixXd::Zero(x.cols(), static_cast<Eigen::Index>(classes))),
        augmented_(x.rows(), x.cols() + 1) {
    augmented_.col(0).setOnes();
    augmented_.rightCols(x.cols()) = x;
    const Eigen::VectorXd freq = Y_.colwise().mean().transpose();
    b0_ = freq.array().log();
    b0_.array() -= b0_.mean();
    eta_ = (x_ * B_).rowwise() + b0_.transpose();
    refresh();
  }

  FitDiagnostics solve(double lambda) {
    FitDiagnostics diag;
    lambda_ = lambda;
    double objective = current_objective();
    const Eigen::Index K = B_.cols();
    for (int sweep = 1; sweep <= options_.max_sweeps; ++sweep) {
      refresh();
      objective = current_objective();
      const double before = objective;
      double max_change = 0.0;
      for (Eigen::Index k = 0; k < K; ++k) max_change = std::max(max_change, update_class(k, objective));
      diag.iterations = sweep;
      diag.objective_change = before - objective;
      if (options_.record_trace) diag.objective_trace.push_back(objective);
      if (max_change < options_.tolerance && kkt_residual() <= options_.kkt_tolerance) {
        b0_.array() -= b0_.mean();
        eta_ = (x_ * B_).rowwise() + b0_.transpose();
        refresh();
        diag.objective = current_objective();
        diag.deviance = 2.0 * n_ * mean_nll(eta_, y_);
        return diag;
      }
    }
    fail(ErrorCode::NonConvergence, "lambda = " + io::format_number(lambda) + " after " +
                                        std::to_string(options_.max_sweeps) + " sweeps");
  }

  CoefficientMatrix coefficients() const { return {b0_, B_, lambda_}; }

 private:
  // The softmax is tracked as exp_ = exp(eta - shift_) with row sums total_, so a
  // class update costs n exponentials instead of n * K.
  void refresh() {
    shift_ = eta_.rowwise().maxCoeff();
    exp_ = (eta_.colwise() - shift_).array().exp();
    total_ = exp_.rowwise().sum();
  }

  void refresh_row(Eigen::Index i) {
    shift_(i) = eta_.row(i).maxCoeff();
    exp_.row(i) = (eta_.row(i).array() - shift_(i)).exp();
    total_(i) = exp_.row(i).sum();
  }

  void set_class_eta(Eigen::Index k, const Eigen::VectorXd& column) {
    eta_.col(k) = column;
    for (Eigen::Index i = 0; i < column.size(); ++i) {
      const double exponent = column(i) - shift_(i);
      if (exponent > 50.0) {
        refresh_row(i);
        continue;
      }
      const double fresh = std::exp(exponent);
      const double updated = total_(i) - exp_(i, k) + fresh;
      if (updated < 1e-3 * total_(i)) {
        refresh_row(i);  // the old term dominated; avoid cancellation
        continue;
      }
      exp_(i, k) = fresh;
      total_(i) = updated;
    }
  }

  double current_objective() const {
    double nll = 0.0;
    for (std::size_t i = 0; i < y_.size(); ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      nll += shift_(r) + std::log(total_(r)) - eta_(r, static_cast<Eigen::Index>(y_[i]));
    }
    return nll / n_ + lambda_ * B_.cwiseAbs().sum();
  }

  Eigen::MatrixXd probabilities() const { return exp_.array().colwise() / total_.array(); }

  Eigen::VectorXd class_probability(Eigen::Index k) const { return exp_.col(k).cwiseQuotient(total_); }

  double kkt_residual() const {
    const Eigen::MatrixXd R = Y_ - probabilities();
    const Eigen::MatrixXd score = x_.transpose() * R / n_;
    double worst = (R.colwise().sum() / n_).cwiseAbs().maxCoeff();
    for (Eigen::Index k = 0; k < B_.cols(); ++k) {
      for (Eigen::Index j = 0; j < B_.rows(); ++j) {
        const double b = B_(j, k);
        const double s = score(j, k);
        const double v = b == 0.0 ? std::max(0.0, std::abs(s) - lambda_) : std::abs(s - lambda_ * (b > 0 ? 1.0 : -1.0));
        worst = std::max(worst, v);
      }
    }
    return worst;
  }

  // Minimizes the weighted quadratic model of class k by coordinate descent,
  // starting from the current coefficients. Returns the proposed intercept and slopes.
  // Works on the (p+1)-square Gram matrix of [1 X]; passes alternate between all
  // coordinates and the currently nonzero ones.
  std::pair<double, Eigen::VectorXd> inner_solve(Eigen::Index k, const Eigen::VectorXd& w,
                                                 const Eigen::VectorXd& gradient) const {
    const Eigen::MatrixXd H = augmented_.transpose() * (augmented_.array().colwise() * w.array()).matrix() / n_;
    Eigen::VectorXd r = augmented_.transpose() * gradient / n_;  // partial gradients of the model
    Eigen::VectorXd theta(augmented_.cols());
    theta(0) = b0_(k);
    theta.tail(B_.rows()) = B_.col(k);
    const double inner_tol = 0.01 * options_.tolerance;

    auto pass = [&](bool active_only) {
      double max_delta = 0.0;
      for (Eigen::Index j = 0; j < theta.size(); ++j) {
        if (active_only && j > 0 && theta(j) == 0.0) continue;
        const double v = H(j, j);
        if (!(v > 0.0)) continue;
        const double penalty = j == 0 ? 0.0 : lambda_;
        const double updated = soft_threshold(v * theta(j) + r(j), penalty) / v;
        const double delta = updated - theta(j);
        if (delta != 0.0) {
          r -= delta * H.col(j);
          theta(j) = updated;
          max_delta = std::max(max_delta, std::abs(delta));
        }
      }
      return max_delta;
    };

    for (int it = 0; it < options_.max_inner; ++it) {
      if (pass(false) < inner_tol) break;
      for (; it < options_.max_inner; ++it) {
        if (pass(true) < inner_tol) break;
      }
    }
    return {theta(0), theta.tail(B_.rows())};
  }

  // One partial Newton step for class k; returns the largest coefficient change.
  double update_class(Eigen::Index k, double& objective) {
    const Eigen::VectorXd p = class_probability(k);
    const Eigen::VectorXd gradient = Y_.col(k) - p;

    const double old_b0 = b0_(k);
    const Eigen::VectorXd old_beta = B_.col(k);
    const Eigen::VectorXd old_eta = eta_.col(k);
    const Eigen::VectorXd old_shift = shift_;
    const Eigen::MatrixXd old_exp = exp_;
    const Eigen::VectorXd old_total = total_;

    auto apply = [&](double b0, const Eigen::VectorXd& beta) {
      b0_(k) = b0;
      B_.col(k) = beta;
      set_class_eta(k, ((x_ * beta).array() + b0).matrix());
      return current_objective();
    };
    auto restore = [&] {
      b0_(k) = old_b0;
      B_.col(k) = old_beta;
      eta_.col(k) = old_eta;
      shift_ = old_shift;
      exp_ = old_exp;
      total_ = old_total;
    };

    const Eigen::VectorXd newton = p.cwiseProduct((1.0 - p.array()).matrix()).cwiseMax(kMinWeight);
    auto [b0, beta] = inner_solve(k, newton, gradient);
    double trial = apply(b0, beta);
    if (trial > objective + 1e-15 * std::max(1.0, std::abs(objective))) {
      // The 1/4 bound majorizes the class-k Hessian, so this step never increases the objective.
      restore();
      std::tie(b0, beta) = inner_solve(k, Eigen::VectorXd::Constant(p.size(), 0.25), gradient);
      trial = apply(b0, beta);
      if (trial > objective) {
        restore();
        return 0.0;
      }
    }
    objective = trial;
    return std::max(std::abs(b0 - old_b0), (beta - old_beta).cwiseAbs().maxCoeff());
  }

  const Eigen::MatrixXd& x_;
  std::span<const std::size_t> y_;
  LassoOptions options_;
  double n_;
  Eigen::MatrixXd Y_;
  Eigen::VectorXd b0_;
  Eigen::MatrixXd B_;
  Eigen::MatrixXd augmented_;  // [1 X]
  Eigen::MatrixXd eta_;
  Eigen::VectorXd shift_;
  Eigen::MatrixXd exp_;
  Eigen::VectorXd total_;
  double lambda_ = 0.0;
};

}  // namespace

double penalized_objective(const Eigen::MatrixXd& x, std::span<const std::size_t> y, const CoefficientMatrix& coefs) {
  const Eigen::MatrixXd eta = (x * coefs.slopes).rowwise() + coefs.intercepts.transpose();
  return mean_nll(eta, y) + coefs.lambda * coefs.slopes.cwiseAbs().sum();
}

double lambda_max(const Eigen::MatrixXd& x, std::span<const int> y) {
  require_design(x, y.size());
  const Encoded enc = encode_labels(y, {});
  const Eigen::MatrixXd Y = indicator_matrix(enc.y, enc.classes.size());
  const Eigen::RowVectorXd freq = Y.colwise().mean();
  const Eigen::MatrixXd centred = Y.rowwise() - freq;
  if (x.cols() == 0) return 0.0;
  return (x.transpose() * centred).cwiseAbs().maxCoeff() / static_cast<double>(x.rows());
}

std::vector<double> lambda_grid(double lmax, std::size_t count, double ratio) {
  if (count == 0) fail(ErrorCode::InvalidArgument, "lambda grid needs at least one point");
  if (!(lmax > 0.0)) return {0.0};
  if (count == 1) return {lmax};
  std::vector<double> grid(count);
  const double step = std::log(ratio) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) grid[i] = lmax * std::exp(step * static_cast<double>(i));
  grid.front() = lmax;
  return grid;
}

LassoFit fit_multinomial_lasso(const Eigen::MatrixXd& x, std::span<const int> y, std::span<const double> lambdas,
                               const LassoOptions& options, std::vector<int> classes) {
  require_design(x, y.size());
  Encoded enc = encode_labels(y, std::move(classes));
  const std::size_t K = enc.classes.size();
  if (K < 2) fail(ErrorCode::DegenerateClass, "need at least two classes");
  if (y.size() < K) fail(ErrorCode::InvalidArgument, "fewer observations than classes");
  if (lambdas.empty()) fail(ErrorCode::InvalidArgument, "empty lambda path");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] >= 0.0) || !std::isfinite(lambdas[i])) fail(ErrorCode::InvalidArgument, "lambda must be finite and >= 0");
    if (i > 0 && !(lambdas[i] < lambdas[i - 1])) fail(ErrorCode::InvalidArgument, "lambda path must be strictly decreasing");
  }

  LassoFit fit;
  fit.classes = enc.classes;
  Solver solver(x, enc.y, K, options);
  for (double lambda : lambdas) {
    fit.diagnostics.push_back(solver.solve(lambda));
    fit.path.push_back(solver.coefficients());
  }
  return fit;
}

Eigen::VectorXd predict_proba(const CoefficientMatrix& coefs, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != coefs.slopes.rows()) {
    fail(ErrorCode::DimensionMismatch, "covariate vector has length " + std::to_string(x.size()) + ", expected " +
                                           std::to_string(coefs.slopes.rows()));
  }
  Eigen::VectorXd eta = coefs.intercepts + coefs.slopes.transpose() * x;
  eta.array() -= eta.mean();
  eta = eta.cwiseMax(-kLogitCap).cwiseMin(kLogitCap);
  eta.array() -= eta.maxCoeff();
  Eigen::VectorXd e = eta.array().exp();
  return e / e.sum();
}

Eigen::MatrixXd predict_proba_rows(const CoefficientMatrix& coefs, const Eigen::MatrixXd& x) {
  Eigen::MatrixXd out(x.rows(), coefs.slopes.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) out.row(i) = predict_proba(coefs, x.row(i).transpose()).transpose();
  return out;
}

Eigen::MatrixXd probability_curves(const CoefficientMatrix& coefs, const Eigen::MatrixXd& x, std::size_t var_index,
                                   std::span<const double> grid) {
  if (x.cols() != coefs.slopes.rows()) fail(ErrorCode::DimensionMismatch, "design columns != coefficient rows");
  if (var_index >= static_cast<std::size_t>(x.cols())) fail(ErrorCode::DimensionMismatch, "covariate index out of range");
  if (grid.empty()) fail(ErrorCode::InvalidArgument, "empty grid");
  Eigen::VectorXd point = x.colwise().mean().transpose();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(grid.size()), coefs.slopes.cols());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    point(static_cast<Eigen::Index>(var_index)) = grid[g];
    out.row(static_cast<Eigen::Index>(g)) = predict_proba(coefs, point).transpose();
  }
  return out;
}

CoefficientMatrix contrasts_vs_reference(const CoefficientMatrix& coefs, std::size_t reference) {
  if (reference >= static_cast<std::size_t>(coefs.slopes.cols())) {
    fail(ErrorCode::BadReference, "reference column " + std::to_string(reference) + " out of range");
  }
  const auto r = static_cast<Eigen::Index>(reference);
  CoefficientMatrix out = coefs;
  out.intercepts.array() -= coefs.intercepts(r);
  out.slopes = coefs.slopes.colwise() - coefs.slopes.col(r);
  return out;
}

CrossValidation cv_lambda(const Eigen::MatrixXd& x, std::span<const int> y, std::size_t folds, std::uint64_t seed,
                          std::size_t path_length, const LassoOptions& options) {
  if (folds < 2) fail(ErrorCode::InvalidArgument, "cross-validation needs at least 2 folds");
  require_design(x, y.size());
  const Encoded enc = encode_labels(y, {});
  const std::size_t K = enc.classes.size();
  if (K < 2) fail(ErrorCode::DegenerateClass, "need at least two classes");

  // Stratified assignment: shuffle each class, then deal members round-robin.
  std::vector<std::vector<std::size_t>> members(K);
  for (std::size_t i = 0; i < enc.y.size(); ++i) members[enc.y[i]].push_back(i);
  Rng rng = Rng(seed).split(0xcf);
  std::vector<std::size_t> fold_of(y.size());
  std::size_t dealt = 0;
  for (std::size_t k = 0; k < K; ++k) {
    if (members[k].size() < folds) {
      fail(ErrorCode::FoldTooSmall, "class " + std::to_string(enc.classes[k]) + " has " +
                                        std::to_string(members[k].size()) + " members for " + std::to_string(folds) + " folds");
    }
    std::shuffle(members[k].begin(), members[k].end(), rng.engine());
    for (std::size_t i : members[k]) fold_of[i] = dealt++ % folds;
  }

  CrossValidation cv;
  cv.lambdas = lambda_grid(lambda_max(x, y), path_length);
  std::vector<Eigen::VectorXd> fold_deviance(folds);
  parallel_for(folds, [&](std::size_t f) {
    std::vector<Eigen::Index> train;
    std::vector<Eigen::Index> test;
    for (std::size_t i = 0; i < fold_of.size(); ++i) (fold_of[i] == f ? test : train).push_back(static_cast<Eigen::Index>(i));
    const Eigen::MatrixXd x_train = x(train, Eigen::all);
    const Eigen::MatrixXd x_test = x(test, Eigen::all);
    std::vector<int> y_train;
    for (auto i : train) y_train.push_back(y[static_cast<std::size_t>(i)]);
    const LassoFit fit = fit_multinomial_lasso(x_train, y_train, cv.lambdas, options, enc.classes);
    Eigen::VectorXd deviance(static_cast<Eigen::Index>(cv.lambdas.size()));
    for (std::size_t l = 0; l < fit.path.size(); ++l) {
      const auto& c = fit.path[l];
      const Eigen::MatrixXd eta = (x_test * c.slopes).rowwise() + c.intercepts.transpose();
      std::vector<std::size_t> y_test;
      for (auto i : test) y_test.push_back(enc.y[static_cast<std::size_t>(i)]);
      deviance(static_cast<Eigen::Index>(l)) = 2.0 * mean_nll(eta, y_test) * static_cast<double>(test.size());
    }
    fold_deviance[f] = deviance;
  });

  Eigen::VectorXd total = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cv.lambdas.size()));
  for (const auto& d : fold_deviance) total += d;
  total /= static_cast<double>(y.size());
  cv.mean_deviance.assign(total.data(), total.data() + total.size());
  for (std::size_t l = 1; l < cv.mean_deviance.size(); ++l)
    if (cv.mean_deviance[l] < cv.mean_deviance[cv.selected_index]) cv.selected_index = l;
  cv.selected_lambda = cv.lambdas[cv.selected_index];
  return cv;
}

std::string coefficient_table_csv(const CoefficientMatrix& coefs, const std::vector<std::string>& covariates,
                                  const std::vector<int>& classes) {
  if (covariates.size() != static_cast<std::size_t>(coefs.slopes.rows()) ||
      classes.size() != static_cast<std::size_t>(coefs.slopes.cols())) {
    fail(ErrorCode::DimensionMismatch, "coefficient table labels do not match the matrix");
  }
  std::string out = "term";
  for (int c : classes) out += ",cluster_" + std::to_string(c);
  out += "\nintercept";
  for (Eigen::Index k = 0; k < coefs.intercepts.size(); ++k) out += "," + io::format_number(coefs.intercepts(k));
  out += "\n";
  for (Eigen::Index j = 0; j < coefs.slopes.rows(); ++j) {
    out += covariates[static_cast<std::size_t>(j)];
    for (Eigen::Index k = 0; k < coefs.slopes.cols(); ++k) out += "," + io::format_number(coefs.slopes(j, k));
    out += "\n";
  }
  return out;
}

CoefficientTable parse_coefficient_table(std::string_view csv, const std::string& source) {
  const io::CsvTable table = io::parse_csv(csv, source);
  if (table.header.size() < 2 || table.header[0] != "term") fail(ErrorCode::ParseError, source + ": expected a term column");
  if (table.rows.empty() || table.rows[0][0] != "intercept") fail(ErrorCode::ParseError, source + ": first row must be the intercept");
  CoefficientTable out;
  const std::string prefix = "cluster_";
  for (std::size_t c = 1; c < table.header.size(); ++c) {
    const std::string& h = table.header[c];
    if (h.rfind(prefix, 0) != 0) fail(ErrorCode::ParseError, source + ": bad class column " + h);
    out.classes.push_back(static_cast<int>(io::parse_number(h.substr(prefix.size()), source + " header")));
  }
  const auto K = static_cast<Eigen::Index>(out.classes.size());
  const auto p = static_cast<Eigen::Index>(table.rows.size() - 1);
  out.coefs.intercepts.resize(K);
  out.coefs.slopes.resize(p, K);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::string context = source + ":" + std::to_string(table.line_numbers[r]);
    for (Eigen::Index k = 0; k < K; ++k) {
      const double v = io::parse_number(table.rows[r][static_cast<std::size_t>(k) + 1], context);
      if (r == 0) {
        out.coefs.intercepts(k) = v;
      } else {
        out.coefs.slopes(static_cast<Eigen::Index>(r) - 1, k) = v;
      }
    }
    if (r > 0) out.covariates.push_back(table.rows[r][0]);
  }
  return out;
}

}  // namespace terracut
