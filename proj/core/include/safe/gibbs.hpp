#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "safe/probit.hpp"
#include "safe/rng.hpp"

namespace safe {

// Hyperprior on the population parameters (mu_k, sigma_k).
//
// Flat is p(mu_k, sigma_k) proportional to 1 (Gelman 2006): the sigma_k^2
// conditional is then InvGamma((N-1)/2, SS/2), which the shape/rate offsets
// below express as the (a, b) = (-1/2, 0) corner of the general conjugate
// update InvGamma(a + N/2, b + SS/2). InverseGamma keeps mu flat but puts a
// proper InvGamma(a, b) on each sigma_k^2. NormalInverseGamma is fully proper
// (mu_k ~ Normal(mu0_k, mu_var)) and exists so that simulation-based
// calibration can draw the population parameters from the same prior the
// sampler targets.
struct HierPrior {
  enum class Kind { Flat, InverseGamma, NormalInverseGamma };

  Kind kind = Kind::Flat;
  double a = 0.0;
  double b = 0.0;
  Eigen::VectorXd mu0;
  double mu_var = 0.0;

  static HierPrior flat() { return {}; }
  static HierPrior inverse_gamma(double a, double b);
  static HierPrior normal_inverse_gamma(Eigen::VectorXd mu0, double mu_var,
                                        double a, double b);

  double shape_offset() const { return kind == Kind::Flat ? -0.5 : a; }
  double rate_offset() const { return kind == Kind::Flat ? 0.0 : b; }
  bool proper_mu() const { return kind == Kind::NormalInverseGamma; }
  std::string label() const;
};

struct PlayerDesign {
  std::string player_id;
  DesignMatrix design;
};

struct HierModel {
  std::vector<PlayerDesign> players;
  HierPrior prior;
  ModelForm form = ModelForm::Full;

  int n_players() const { return static_cast<int>(players.size()); }
  int n_coef() const { return coef_count(form); }
  int total_rows() const;
  void validate() const;
};

struct ChainConfig {
  int n_iter = 10000;
  int burn_in = 5000;
  int thin = 5;
  int n_chains = 3;
  std::uint64_t seed = 0;

  int retained_per_chain() const { return (n_iter - burn_in + thin - 1) / thin; }
  void validate() const;
};

// Retained draws across all chains, chain-major and immutable once filled.
class PosteriorDraws {
 public:
  PosteriorDraws(int n_players, int n_coef, std::vector<std::string> player_ids);

  int n_draws() const { return static_cast<int>(chain_.size()); }
  int n_players() const { return n_players_; }
  int n_coef() const { return n_coef_; }
  int n_chains() const;

  double beta(int draw, int player, int coef) const {
    return beta_[(static_cast<std::size_t>(draw) * n_players_ + player) * n_coef_ + coef];
  }
  double mu(int draw, int coef) const {
    return mu_[static_cast<std::size_t>(draw) * n_coef_ + coef];
  }
  double sigma2(int draw, int coef) const {
    return sigma2_[static_cast<std::size_t>(draw) * n_coef_ + coef];
  }
  int chain(int draw) const { return chain_[static_cast<std::size_t>(draw)]; }

  std::vector<double> beta_series(int player, int coef) const;
  std::vector<double> mu_series(int coef) const;
  std::vector<double> sigma2_series(int coef) const;

  const std::vector<std::string>& player_ids() const { return player_ids_; }

  void append(const Eigen::MatrixXd& beta, const Eigen::VectorXd& mu,
              const Eigen::VectorXd& sigma2, int chain_id);

  const std::vector<double>& raw_beta() const { return beta_; }
  const std::vector<double>& raw_mu() const { return mu_; }
  const std::vector<double>& raw_sigma2() const { return sigma2_; }
  const std::vector<int>& raw_chain() const { return chain_; }

 private:
  int n_players_;
  int n_coef_;
  std::vector<std::string> player_ids_;
  std::vector<double> beta_, mu_, sigma2_;
  std::vector<int> chain_;
};

struct GibbsState {
  std::vector<Eigen::VectorXd> z;  // latent utilities per player
  Eigen::MatrixXd beta;            // N x K
  Eigen::VectorXd mu;
  Eigen::VectorXd sigma2;
};

// Conditional moments of beta_i given (z_i, mu, sigma2): precision
// diag(1/sigma2) + X_i' X_i, mean solving precision * m = mu/sigma2 + X_i' z_i.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> beta_conditional_moments(
    const DesignMatrix& design, const Eigen::MatrixXd& xtx,
    const Eigen::VectorXd& z, const Eigen::VectorXd& mu,
    const Eigen::VectorXd& sigma2);

std::vector<Eigen::MatrixXd> precompute_xtx(const HierModel& model);

// One full scan of the Albert-Chib augmented conditionals, in this fixed
// draw order (the determinism contract):
//   1. z_ij for each player in model order, rows ascending: truncated normal
//      around X_ij . beta_i with unit sd, side given by the outcome;
//   2. beta_i for each player: K standard normals, consumed coefficient-major,
//      mapped through the Cholesky factor of the conditional precision;
//   3. mu_k for k ascending: one gaussian each;
//   4. sigma2_k for k ascending: one inverse-gamma draw each.
void gibbs_step(const HierModel& model, const std::vector<Eigen::MatrixXd>& xtx,
                GibbsState& state, Rng& rng);

// Deterministic initialization: per-player MLE where defined, otherwise the
// complete-pooling MLE; mu at the mean of the initial betas and sigma2 at
// their across-player variance floored at 1e-4.
GibbsState initial_state(const HierModel& model);

// Runs n_chains chains on independent RNG streams of the same seed and
// returns the post-burn-in, thinned draws in chain order.
PosteriorDraws run_gibbs(const HierModel& model, const ChainConfig& config);

struct ScalarDiagnostic {
  std::string name;
  double rhat = 0.0;
  double ess = 0.0;
  bool rhat_defined = false;
  bool flagged = false;     // rhat > 1.05
  bool degenerate = false;  // zero-variance series
};

struct ConvergenceReport {
  std::vector<ScalarDiagnostic> params;
  std::vector<std::string> warnings;
  bool any_flagged = false;
};

// Split R-hat and effective sample size per scalar parameter. With a single
// chain only the ESS is reported.
ConvergenceReport convergence_diagnostics(const PosteriorDraws& draws);

// Groups an eligible study slice into per-player designs (players ordered by
// opportunity count, then id). For the illustration form the predictors are
// rescaled with `standardizer` when given, else with one fitted to the pooled
// covariates; the standardizer used is returned.
struct GroupedDesigns {
  std::vector<PlayerDesign> players;
  std::vector<std::vector<CovariateRow>> covariates;  // parallel to players
  std::optional<Standardizer> standardizer;
};

GroupedDesigns group_designs(const std::vector<BipRecord>& eligible, Position pos,
                             const Centroid& centroid, ModelForm form,
                             const std::optional<Standardizer>& standardizer = {});

DesignMatrix stack_designs(const std::vector<PlayerDesign>& players);

}  // namespace safe
