#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "safe/gibbs.hpp"
#include "safe/probit.hpp"
#include "safe/weights.hpp"

namespace safe {

// Everything needed to turn a coefficient vector into success probabilities
// over the field: the model form, the starting-location reference and any
// predictor rescaling used by the fit.
struct CurveContext {
  ModelForm form = ModelForm::Full;
  Centroid centroid;
  std::optional<Standardizer> standardizer;

  bool compatible_with(const CurveContext& other) const;
};

// Fitted success-probability surface for one coefficient vector.
struct ProbCurve {
  Eigen::VectorXd beta;
  CurveContext context;
  std::string source;  // "pooled-mle", "posterior-mean-mu", "draw", ...

  double eval_planar(double x, double y, double velocity) const;
  double eval_angular(double angle_deg, double velocity) const;
  double eval(const Grid& grid, std::size_t point, double velocity) const;
};

enum class AverageMode { PooledMLE, PosteriorMeanMu };

// Average-player curve from the pooled maximum likelihood fit.
ProbCurve average_curve(const ProbitFit& pooled_fit, const CurveContext& context);

// Average-player curve from the posterior mean of the population means.
ProbCurve average_curve(const PosteriorDraws& draws, const CurveContext& context);

// Precomputed quadrature: design rows for every (grid point, velocity) and
// the nonnegative weight f * r_tot * s_pos * cellMeasure at each of them.
// Reused across players and posterior draws.
class SafeIntegrator {
 public:
  SafeIntegrator(const CurveContext& context, const WeightField& weights,
                 Position pos);

  Eigen::VectorXd probs(const Eigen::VectorXd& beta) const;
  double integrate_gap(const Eigen::VectorXd& probs_player,
                       const Eigen::VectorXd& probs_avg) const;
  double integrate(const Eigen::VectorXd& beta_player,
                   const Eigen::VectorXd& beta_avg) const;
  double total_weight() const { return weights_.sum(); }
  const CurveContext& context() const { return context_; }

 private:
  CurveContext context_;
  Eigen::MatrixXd rows_;
  Eigen::VectorXd weights_;
};

// Riemann midpoint sum of f * r_tot * s_pos * (p_i - p_plus) over the grid
// and velocity strata.
double integrate_safe(const ProbCurve& player_curve, const ProbCurve& avg_curve,
                      const WeightField& weights, Position pos);

// One SAFE value per retained draw of the player's coefficients, all
// integrated against the same average curve.
std::vector<double> safe_posterior(const PosteriorDraws& draws, int player_index,
                                   const ProbCurve& avg_curve,
                                   const WeightField& weights, Position pos);

struct DrawSummary {
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

// Equal-tailed central interval from sorted draws (linear interpolation).
DrawSummary summarize_draws(const std::vector<double>& draws,
                            double coverage = 0.95);

double percentile(std::vector<double> values, double p);

struct SafeResult {
  std::string player_id;
  Position position = Position::CenterField;
  int year = 0;
  std::map<BipType, std::vector<double>> type_draws;
  std::vector<double> total_draws;
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  int n_bip = 0;
  bool interval_unreliable = false;  // fewer than 40 retained draws
};

// Draw-wise sum across the BIP types required for the position (fly + liner
// for outfielders, plus grounders for infielders), then summarized. Draws are
// paired by index.
SafeResult total_safe(const std::map<BipType, std::vector<double>>& per_type,
                      Position pos);

struct LeaderboardRow {
  std::string player_id;
  int year = 0;
  Position position = Position::CenterField;
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  int n_bip = 0;
};

struct Leaderboard {
  std::vector<LeaderboardRow> best;   // descending by posterior mean
  std::vector<LeaderboardRow> worst;  // ascending by posterior mean
  int min_bip = 500;
};

// Keeps player-years with strictly more than `min_bip` opportunities and
// ranks them by posterior mean.
Leaderboard rank_players(const std::vector<SafeResult>& results, int min_bip = 500,
                         int top_k = 10, int bottom_k = 10);

}  // namespace safe
