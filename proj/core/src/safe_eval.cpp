#include "safe/safe_eval.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "safe/errors.hpp"

namespace safe {

namespace {

bool standardizers_match(const std::optional<Standardizer>& a,
                         const std::optional<Standardizer>& b) {
  if (a.has_value() != b.has_value()) return false;
  if (!a) return true;
  return (a->mean - b->mean).lpNorm<Eigen::Infinity>() < 1e-12 &&
         (a->scale - b->scale).lpNorm<Eigen::Infinity>() < 1e-12;
}

}  // namespace

bool CurveContext::compatible_with(const CurveContext& other) const {
  return form == other.form && centroid.bip_type == other.centroid.bip_type &&
         std::abs(centroid.x0 - other.centroid.x0) < 1e-9 &&
         std::abs(centroid.y0 - other.centroid.y0) < 1e-9 &&
         std::abs(centroid.phi0_deg - other.centroid.phi0_deg) < 1e-9 &&
         standardizers_match(standardizer, other.standardizer);
}

double ProbCurve::eval_planar(double x, double y, double velocity) const {
  const double d = std::hypot(x - context.centroid.x0, y - context.centroid.y0);
  const int forward =
      radial_distance(x, y) <
              radial_distance(context.centroid.x0, context.centroid.y0)
          ? 1
          : 0;
  const Eigen::RowVectorXd row =
      design_row(context.form, context.standardizer, d, velocity, forward);
  return probit_cdf(row.dot(beta));
}

double ProbCurve::eval_angular(double angle_deg, double velocity) const {
  const double theta = std::abs(angle_deg - context.centroid.phi0_deg);
  const int left = angle_deg < context.centroid.phi0_deg ? 1 : 0;
  const Eigen::RowVectorXd row =
      design_row(context.form, context.standardizer, theta, velocity, left);
  return probit_cdf(row.dot(beta));
}

double ProbCurve::eval(const Grid& grid, std::size_t point, double velocity) const {
  if (grid.kind == Grid::Kind::Planar)
    return eval_planar(grid.xs[point], grid.ys[point], velocity);
  return eval_angular(grid.angles[point], velocity);
}

ProbCurve average_curve(const ProbitFit& pooled_fit, const CurveContext& context) {
  if (!pooled_fit.converged)
    throw numerical_error("pooled fit did not converge: " + pooled_fit.diagnostic);
  ProbCurve curve;
  curve.beta = pooled_fit.beta;
  curve.context = context;
  curve.source = "pooled-mle";
  return curve;
}

ProbCurve average_curve(const PosteriorDraws& draws, const CurveContext& context) {
  if (draws.n_draws() == 0) throw validation_error("no draws for average curve");
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(draws.n_coef());
  for (int d = 0; d < draws.n_draws(); ++d)
    for (int k = 0; k < draws.n_coef(); ++k) mu[k] += draws.mu(d, k);
  mu /= static_cast<double>(draws.n_draws());
  ProbCurve curve;
  curve.beta = mu;
  curve.context = context;
  curve.source = "posterior-mean-mu";
  return curve;
}

SafeIntegrator::SafeIntegrator(const CurveContext& context,
                               const WeightField& weights, Position pos)
    : context_(context) {
  const bool angular = context.centroid.bip_type == BipType::Grounder;
  if (angular != (weights.grid.kind == Grid::Kind::Angular))
    throw validation_error("grid mismatch: weight field does not match the curve context");
  const int pos_idx = weights.position_index(pos);
  if (pos_idx < 0)
    throw validation_error("position has no responsibility share in this weight field");

  const std::size_t npts = weights.grid.size();
  const int k = coef_count(context.form);
  rows_.resize(static_cast<Eigen::Index>(npts * kVelocities.size()), k);
  weights_.resize(static_cast<Eigen::Index>(npts * kVelocities.size()));
  const double cell = weights.grid.cell_measure();

  Eigen::Index at = 0;
  for (int v : kVelocities) {
    const auto& freq = weights.freq[static_cast<std::size_t>(v - 1)];
    const auto& run = weights.run_value[static_cast<std::size_t>(v - 1)];
    const auto& resp =
        weights.responsibility[static_cast<std::size_t>(pos_idx)][static_cast<std::size_t>(v - 1)];
    for (std::size_t g = 0; g < npts; ++g, ++at) {
      double d, dir;
      if (angular) {
        const double angle = weights.grid.angles[g];
        d = std::abs(angle - context.centroid.phi0_deg);
        dir = angle < context.centroid.phi0_deg ? 1.0 : 0.0;
      } else {
        const double x = weights.grid.xs[g];
        const double y = weights.grid.ys[g];
        d = std::hypot(x - context.centroid.x0, y - context.centroid.y0);
        dir = radial_distance(x, y) <
                      radial_distance(context.centroid.x0, context.centroid.y0)
                  ? 1.0
                  : 0.0;
      }
      rows_.row(at) = design_row(context.form, context.standardizer, d,
                                 static_cast<double>(v), static_cast<int>(dir));
      weights_[at] = freq[g] * run[g] * resp[g] * cell;
    }
  }
}

Eigen::VectorXd SafeIntegrator::probs(const Eigen::VectorXd& beta) const {
  Eigen::VectorXd eta = rows_ * beta;
  for (Eigen::Index i = 0; i < eta.size(); ++i) eta[i] = probit_cdf(eta[i]);
  return eta;
}

double SafeIntegrator::integrate_gap(const Eigen::VectorXd& probs_player,
                                     const Eigen::VectorXd& probs_avg) const {
  if (probs_player.size() != weights_.size() || probs_avg.size() != weights_.size())
    throw validation_error("grid mismatch: probability vectors do not match the grid");
  return weights_.dot(probs_player - probs_avg);
}

double SafeIntegrator::integrate(const Eigen::VectorXd& beta_player,
                                 const Eigen::VectorXd& beta_avg) const {
  return integrate_gap(probs(beta_player), probs(beta_avg));
}

double integrate_safe(const ProbCurve& player_curve, const ProbCurve& avg_curve,
                      const WeightField& weights, Position pos) {
  if (!player_curve.context.compatible_with(avg_curve.context))
    throw validation_error("grid mismatch: player and average curves disagree");
  const SafeIntegrator integrator(avg_curve.context, weights, pos);
  return integrator.integrate(player_curve.beta, avg_curve.beta);
}

std::vector<double> safe_posterior(const PosteriorDraws& draws, int player_index,
                                   const ProbCurve& avg_curve,
                                   const WeightField& weights, Position pos) {
  if (player_index < 0 || player_index >= draws.n_players())
    throw validation_error("player index out of range");
  if (draws.n_coef() != coef_count(avg_curve.context.form))
    throw validation_error("grid mismatch: draw width does not match the curve form");
  if (draws.n_draws() < 40)
    std::cerr << "warning: fewer than 40 retained draws; interval unreliable\n";

  const SafeIntegrator integrator(avg_curve.context, weights, pos);
  const Eigen::VectorXd avg_probs = integrator.probs(avg_curve.beta);

  std::vector<double> values(static_cast<std::size_t>(draws.n_draws()));
  Eigen::VectorXd beta(draws.n_coef());
  for (int d = 0; d < draws.n_draws(); ++d) {
    for (int k = 0; k < draws.n_coef(); ++k) beta[k] = draws.beta(d, player_index, k);
    values[static_cast<std::size_t>(d)] =
        integrator.integrate_gap(integrator.probs(beta), avg_probs);
  }
  return values;
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw validation_error("percentile of empty sample");
  std::sort(values.begin(), values.end());
  const double idx = p * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(idx));
  const std::size_t hi = static_cast<std::size_t>(std::ceil(idx));
  const double frac = idx - static_cast<double>(lo);
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

DrawSummary summarize_draws(const std::vector<double>& draws, double coverage) {
  if (draws.empty()) throw validation_error("cannot summarize zero draws");
  DrawSummary s;
  double sum = 0.0;
  for (double v : draws) sum += v;
  s.mean = sum / static_cast<double>(draws.size());
  const double tail = 0.5 * (1.0 - coverage);
  s.lo = percentile(draws, tail);
  s.hi = percentile(draws, 1.0 - tail);
  return s;
}

SafeResult total_safe(const std::map<BipType, std::vector<double>>& per_type,
                      Position pos) {
  std::vector<BipType> required = {BipType::Flyball, BipType::Liner};
  if (is_infield(pos)) required.push_back(BipType::Grounder);
  for (BipType t : required)
    if (!per_type.count(t))
      throw validation_error("missing SAFE draws for BIP type " + to_string(t));
  if (!is_infield(pos) && per_type.count(BipType::Grounder))
    throw validation_error("grounder draws supplied for an outfield position");

  std::size_t n = 0;
  for (BipType t : required) {
    const auto& d = per_type.at(t);
    if (d.empty()) throw validation_error("empty SAFE draws for " + to_string(t));
    if (n == 0) n = d.size();
    if (d.size() != n)
      throw validation_error("draw count mismatch across BIP types");
  }

  SafeResult result;
  result.position = pos;
  result.total_draws.assign(n, 0.0);
  for (BipType t : required) {
    const auto& d = per_type.at(t);
    result.type_draws[t] = d;
    for (std::size_t i = 0; i < n; ++i) result.total_draws[i] += d[i];
  }
  const DrawSummary s = summarize_draws(result.total_draws);
  result.mean = s.mean;
  result.lo = s.lo;
  result.hi = s.hi;
  result.interval_unreliable = n < 40;
  return result;
}

Leaderboard rank_players(const std::vector<SafeResult>& results, int min_bip,
                         int top_k, int bottom_k) {
  std::vector<const SafeResult*> kept;
  for (const auto& r : results)
    if (r.n_bip > min_bip) kept.push_back(&r);
  std::sort(kept.begin(), kept.end(), [](const SafeResult* a, const SafeResult* b) {
    if (a->mean != b->mean) return a->mean > b->mean;
    if (a->player_id != b->player_id) return a->player_id < b->player_id;
    return a->year < b->year;
  });

  const auto to_row = [](const SafeResult& r) {
    return LeaderboardRow{r.player_id, r.year, r.position, r.mean, r.lo, r.hi, r.n_bip};
  };

  Leaderboard lb;
  lb.min_bip = min_bip;
  const int n = static_cast<int>(kept.size());
  for (int i = 0; i < std::min(top_k, n); ++i) lb.best.push_back(to_row(*kept[static_cast<std::size_t>(i)]));
  for (int i = 0; i < std::min(bottom_k, n); ++i)
    lb.worst.push_back(to_row(*kept[static_cast<std::size_t>(n - 1 - i)]));
  return lb;
}

}  // namespace safe
