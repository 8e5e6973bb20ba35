#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "safe/bip_data.hpp"

namespace safe {

// Standard normal CDF, strictly inside (0, 1) for finite input.
double probit_cdf(double z);

double probit_pdf(double z);

// Inverse of probit_cdf. Acklam's rational approximation polished with one
// Halley step, good to near machine precision across the whole open interval.
double probit_quantile(double p);

// Column layouts, intercept first (`d` is distance for flyballs/liners and
// angle for grounders, `dir` the direction indicator):
//   Full:          1, d, d*dir, d*v, d*v*dir
//   Illustration:  1, d, v, dir   (predictors rescaled to mean 0, sd 0.5)
enum class ModelForm { Full, Illustration };

int coef_count(ModelForm form);
std::string to_string(ModelForm form);
std::optional<ModelForm> parse_model_form(const std::string& token);

// Affine rescaling of the raw (d, v, dir) predictors used by the
// illustration form. A zero-variance predictor maps to zero.
struct Standardizer {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  Eigen::Vector3d scale = Eigen::Vector3d::Ones();

  static Standardizer fit(const std::vector<CovariateRow>& rows,
                          double target_sd = 0.5);
  Eigen::Vector3d apply(double d, double v, double dir) const;
  bool operator==(const Standardizer& other) const;
};

struct DesignMatrix {
  Eigen::MatrixXd X;  // n x k, first column all ones
  Eigen::VectorXd y;  // n entries, each 0 or 1

  int n() const { return static_cast<int>(X.rows()); }
  int k() const { return static_cast<int>(X.cols()); }
  void validate() const;
};

// One design row for the given form; shared by design construction and by
// probability-curve evaluation so the two can never drift apart.
Eigen::RowVectorXd design_row(ModelForm form,
                              const std::optional<Standardizer>& standardizer,
                              double d, double v, int dir);

DesignMatrix build_design(const std::vector<CovariateRow>& rows, ModelForm form,
                          const std::optional<Standardizer>& standardizer = {});

struct ProbitFit {
  Eigen::VectorXd beta;
  double loglik = 0.0;
  bool converged = false;
  int iterations = 0;
  std::string diagnostic;  // "separation", "singular" or "maxiter" when not converged
};

// Bernoulli-probit log likelihood with probabilities clamped to
// [1e-12, 1 - 1e-12].
double log_likelihood(const DesignMatrix& design, const Eigen::VectorXd& beta);

// Fisher-scoring maximizer with step halving. Convergence means the score
// max-norm dropped below 1e-8 within 100 iterations.
ProbitFit fit_probit_mle(const DesignMatrix& design);

}  // namespace safe
