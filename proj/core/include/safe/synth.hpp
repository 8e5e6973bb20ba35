#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "safe/bip_data.hpp"
#include "safe/probit.hpp"
#include "safe/rng.hpp"

namespace safe {

// Mixture component on the playing surface.
struct GaussComponent {
  double weight = 1.0;
  double mean_x = 0.0;
  double mean_y = 300.0;
  double sd_x = 60.0;
  double sd_y = 60.0;
  double rho = 0.0;
};

struct LocationModel {
  std::vector<GaussComponent> components;

  // Three-component default whose mass pattern loosely matches where each
  // BIP type tends to land.
  static LocationModel default_for(BipType type);
  void validate(const ParkGeometry& park) const;
};

// Independent draws beta_i ~ Normal(mu, diag(sigma^2)).
Eigen::MatrixXd simulate_players(int n_players, const Eigen::VectorXd& mu,
                                 const Eigen::VectorXd& sigma, Rng& rng);

// Bases-reached rule for unfielded balls: mostly singles in the interior,
// extra bases deep and down the lines.
struct HitResultRule {
  double deep_radius = 320.0;
  double line_margin_deg = 10.0;
  double deep_double = 0.55, deep_triple = 0.10;
  double line_double = 0.45, line_triple = 0.15;
  double interior_double = 0.05, interior_triple = 0.0;
};

struct BipSimOptions {
  std::array<double, 3> velocity_probs = {0.35, 0.40, 0.25};
  HitResultRule hits;
  ParkGeometry park;
  int year = 2005;
  std::vector<std::string> player_ids;  // defaults to p000, p001, ...
  // Optional designated player whose success probability is lifted by a flat
  // additive amount (capped below 1).
  int star_index = -1;
  double star_prob_bonus = 0.0;
};

// Study records for one (position, BIP type): locations and velocities from
// the mixture, outcomes Bernoulli(Phi(X . beta_i)) on raw covariates of the
// given form, failures attributed to the studied fielder with a hit result
// from the location rule.
std::vector<BipRecord> simulate_bips(const Eigen::MatrixXd& true_beta,
                                     const std::vector<int>& counts,
                                     const LocationModel& locations,
                                     const Centroid& centroid, BipType type,
                                     Position pos, ModelForm form,
                                     const BipSimOptions& opts, Rng& rng);

// Right-skewed opportunity counts (rounded log-normal, clipped to
// [1, max_count]).
std::vector<int> skewed_opportunities(int n_players, double log_mean,
                                      double log_sd, int max_count, Rng& rng);

std::vector<std::string> default_player_ids(int n_players, Position pos);

}  // namespace safe
