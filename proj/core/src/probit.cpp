#include "safe/probit.hpp"

#include <cmath>
#include <limits>

#include "safe/errors.hpp"

namespace safe {

namespace {

constexpr double kSqrt2Inv = 0.7071067811865476;
constexpr double kSqrt2Pi = 2.5066282746310002;
constexpr double kProbClamp = 1e-12;

}  // namespace

double probit_cdf(double z) {
  if (std::isnan(z)) throw validation_error("probit_cdf: non-finite input");
  double p = 0.5 * std::erfc(-z * kSqrt2Inv);
  if (p <= 0.0) return std::numeric_limits<double>::denorm_min();
  if (p >= 1.0) return std::nextafter(1.0, 0.0);
  return p;
}

double probit_pdf(double z) { return std::exp(-0.5 * z * z) / kSqrt2Pi; }

double probit_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw validation_error("probit_quantile: p must lie in (0, 1)");

  // Acklam's rational approximation.
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // One Halley step against erfc; skipped only where exp(x^2/2) would overflow.
  if (x > -37.5 && x < 37.5) {
    const double err = 0.5 * std::erfc(-x * kSqrt2Inv) - p;
    const double u = err * kSqrt2Pi * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

int coef_count(ModelForm form) { return form == ModelForm::Full ? 5 : 4; }

std::string to_string(ModelForm form) {
  return form == ModelForm::Full ? "full" : "illustration";
}

std::optional<ModelForm> parse_model_form(const std::string& token) {
  if (token == "full") return ModelForm::Full;
  if (token == "illustration") return ModelForm::Illustration;
  return std::nullopt;
}

Standardizer Standardizer::fit(const std::vector<CovariateRow>& rows,
                               double target_sd) {
  if (rows.empty()) throw validation_error("standardizer needs at least one row");
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  for (const auto& r : rows)
    sum += Eigen::Vector3d(r.distance, r.velocity, static_cast<double>(r.direction));
  const double n = static_cast<double>(rows.size());
  Standardizer s;
  s.mean = sum / n;
  Eigen::Vector3d ss = Eigen::Vector3d::Zero();
  for (const auto& r : rows) {
    const Eigen::Vector3d v(r.distance, r.velocity, static_cast<double>(r.direction));
    ss += (v - s.mean).cwiseAbs2();
  }
  for (int j = 0; j < 3; ++j) {
    const double sd = std::sqrt(ss[j] / n);
    s.scale[j] = sd > 1e-12 ? target_sd / sd : 0.0;
  }
  return s;
}

Eigen::Vector3d Standardizer::apply(double d, double v, double dir) const {
  const Eigen::Vector3d raw(d, v, dir);
  return (raw - mean).cwiseProduct(scale);
}

bool Standardizer::operator==(const Standardizer& other) const {
  return mean == other.mean && scale == other.scale;
}

void DesignMatrix::validate() const {
  if (X.rows() < 1) throw validation_error("design matrix must have rows");
  if (X.rows() != y.size())
    throw validation_error("design matrix and outcomes disagree on row count");
  if (!X.allFinite()) throw validation_error("design matrix has non-finite entries");
  if ((X.col(0).array() != 1.0).any())
    throw validation_error("design matrix first column must be the intercept");
  if (((y.array() != 0.0) && (y.array() != 1.0)).any())
    throw validation_error("outcomes must be 0 or 1");
}

Eigen::RowVectorXd design_row(ModelForm form,
                              const std::optional<Standardizer>& standardizer,
                              double d, double v, int dir) {
  if (form == ModelForm::Full) {
    Eigen::RowVectorXd row(5);
    row << 1.0, d, d * dir, d * v, d * v * dir;
    return row;
  }
  Eigen::RowVectorXd row(4);
  if (standardizer) {
    const Eigen::Vector3d z = standardizer->apply(d, v, static_cast<double>(dir));
    row << 1.0, z[0], z[1], z[2];
  } else {
    row << 1.0, d, v, static_cast<double>(dir);
  }
  return row;
}

DesignMatrix build_design(const std::vector<CovariateRow>& rows, ModelForm form,
                          const std::optional<Standardizer>& standardizer) {
  if (rows.empty()) throw validation_error("cannot build a design from zero rows");
  DesignMatrix d;
  const int k = coef_count(form);
  d.X.resize(static_cast<Eigen::Index>(rows.size()), k);
  d.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (Eigen::Index i = 0; i < d.X.rows(); ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    d.X.row(i) = design_row(form, standardizer, r.distance, r.velocity, r.direction);
    d.y[i] = static_cast<double>(r.outcome);
  }
  return d;
}

double log_likelihood(const DesignMatrix& design, const Eigen::VectorXd& beta) {
  if (beta.size() != design.X.cols())
    throw validation_error("log_likelihood: coefficient dimension mismatch");
  const Eigen::VectorXd eta = design.X * beta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    double p = probit_cdf(eta[i]);
    p = std::min(std::max(p, kProbClamp), 1.0 - kProbClamp);
    ll += design.y[i] > 0.5 ? std::log(p) : std::log(1.0 - p);
  }
  return ll;
}

ProbitFit fit_probit_mle(const DesignMatrix& design) {
  design.validate();
  const int n = design.n();
  const int k = design.k();
  if (n < k) throw validation_error("probit MLE needs at least as many rows as columns");

  ProbitFit fit;
  fit.beta = Eigen::VectorXd::Zero(k);

  const double successes = design.y.sum();
  if (successes == 0.0 || successes == static_cast<double>(n)) {
    fit.diagnostic = "separation";
    fit.loglik = log_likelihood(design, fit.beta);
    return fit;
  }

  double ll = log_likelihood(design, fit.beta);
  Eigen::VectorXd w(n), resid(n);
  for (int it = 1; it <= 100; ++it) {
    fit.iterations = it;
    const Eigen::VectorXd eta = design.X * fit.beta;
    for (int i = 0; i < n; ++i) {
      double p = probit_cdf(eta[i]);
      p = std::min(std::max(p, kProbClamp), 1.0 - kProbClamp);
      const double phi = probit_pdf(eta[i]);
      const double denom = p * (1.0 - p);
      w[i] = phi * phi / denom;
      resid[i] = phi * (design.y[i] - p) / denom;
    }
    const Eigen::VectorXd score = design.X.transpose() * resid;
    if (score.lpNorm<Eigen::Infinity>() < 1e-8) {
      fit.converged = true;
      break;
    }
    const Eigen::MatrixXd info =
        design.X.transpose() * w.asDiagonal() * design.X;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
    const Eigen::VectorXd dvec = ldlt.vectorD();
    if (ldlt.info() != Eigen::Success ||
        dvec.minCoeff() <= 1e-12 * std::max(dvec.maxCoeff(), 1.0)) {
      fit.diagnostic = "singular";
      fit.loglik = ll;
      return fit;
    }
    const Eigen::VectorXd step = ldlt.solve(score);

    // Step halving keeps the likelihood from decreasing.
    double t = 1.0;
    Eigen::VectorXd cand = fit.beta + step;
    double cand_ll = log_likelihood(design, cand);
    for (int h = 0; h < 30 && cand_ll < ll - 1e-12; ++h) {
      t *= 0.5;
      cand = fit.beta + t * step;
      cand_ll = log_likelihood(design, cand);
    }
    fit.beta = cand;
    ll = cand_ll;
    if (fit.beta.lpNorm<Eigen::Infinity>() > 1e4) {
      fit.diagnostic = "separation";
      fit.loglik = ll;
      return fit;
    }
  }
  fit.loglik = ll;
  if (!fit.converged) fit.diagnostic = "maxiter";
  return fit;
}

}  // namespace safe
