#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "safe/gibbs.hpp"
#include "safe/rng.hpp"
#include "safe/safe_eval.hpp"

namespace safe {

Eigen::MatrixXd posterior_mean_beta(const PosteriorDraws& draws);

// Per-observation residual S_ij - Phi(X_ij . beta_hat_i), with the paired
// predicted probability and the owning player, rows in model order.
struct ResidualSet {
  std::vector<double> predicted;
  std::vector<double> residual;
  std::vector<int> player_index;
};

ResidualSet compute_residuals(const HierModel& model,
                              const Eigen::MatrixXd& beta_hat);

struct ResidualBin {
  double mean_predicted = 0.0;
  double mean_residual = 0.0;
  int count = 0;
};

// Residuals ordered by predicted probability and cut into bins of roughly
// `bin_size` observations. Tied predictions always land in the same bin, even
// when that makes a bin larger.
std::vector<ResidualBin> binned_residuals(const std::vector<double>& residuals,
                                          const std::vector<double>& predicted,
                                          int bin_size = 150);

struct PpcBinnedReport {
  std::vector<ResidualBin> observed;
  std::vector<double> lo, hi;  // 2.5 / 97.5 percent envelope per bin
  double coverage = 0.0;       // fraction of observed bins inside their envelope
  int n_sims = 0;
};

// Simulates replicate outcome sets from randomly chosen retained draws
// (designs fixed, predictions from the posterior-mean coefficients), then
// recomputes the binned residuals per replicate to form per-bin envelopes.
PpcBinnedReport posterior_predictive_binned(const PosteriorDraws& draws,
                                            const HierModel& model, int n_sims,
                                            Rng& rng, int bin_size = 150);

struct GapPpcReport {
  double observed_gap = 0.0;
  std::vector<double> partial_gaps;
  std::vector<double> pooled_gaps;
  int top_n = 0;
};

// Best-minus-worst success percentage among the `top_n` players with the most
// opportunities, under replicate datasets from the partial-pooling posterior
// and from the complete-pooling fit.
GapPpcReport heterogeneity_gap_ppc(const PosteriorDraws& partial_draws,
                                   const ProbitFit& pooled_fit,
                                   const HierModel& model, int top_n, int n_sims,
                                   Rng& rng);

struct Rating {
  std::string player_id;
  Position position = Position::CenterField;
  double value = 0.0;
};

struct CorrelationCell {
  int n = 0;
  double r = 0.0;
  bool defined = false;  // requires at least 3 joined pairs
};

struct CorrelationReport {
  std::map<Position, CorrelationCell> per_position;
  CorrelationCell total;
};

// Pearson correlation of ratings joined on (player, position), per position
// and pooled. Symmetric in its arguments.
CorrelationReport between_year_correlation(const std::vector<Rating>& a,
                                           const std::vector<Rating>& b);

std::vector<Rating> to_ratings(const std::vector<SafeResult>& results);

// Residual-vs-covariate summaries (distance binned at 25 ft, velocity and
// direction grouped), emitted as plain data for external plotting. The
// covariate rows must be in model row order.
struct CovariateBin {
  std::string label;
  double mean_residual = 0.0;
  int count = 0;
};

std::vector<CovariateBin> residuals_by_distance(
    const std::vector<CovariateRow>& rows, const ResidualSet& residuals,
    double bin_width = 25.0);
std::vector<CovariateBin> residuals_by_velocity(
    const std::vector<CovariateRow>& rows, const ResidualSet& residuals);
std::vector<CovariateBin> residuals_by_direction(
    const std::vector<CovariateRow>& rows, const ResidualSet& residuals);

}  // namespace safe
