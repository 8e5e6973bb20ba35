#include "safe/synth.hpp"

#include <algorithm>
#include <cmath>

#include "safe/errors.hpp"
#include "safe/geometry.hpp"

namespace safe {

LocationModel LocationModel::default_for(BipType type) {
  LocationModel m;
  switch (type) {
    case BipType::Flyball:
      m.components = {{0.5, 0.0, 300.0, 70.0, 50.0, 0.0},
                      {0.25, -120.0, 250.0, 45.0, 45.0, 0.2},
                      {0.25, 120.0, 250.0, 45.0, 45.0, -0.2}};
      break;
    case BipType::Liner:
      m.components = {{0.5, 0.0, 220.0, 60.0, 50.0, 0.0},
                      {0.25, -90.0, 200.0, 45.0, 40.0, 0.2},
                      {0.25, 90.0, 200.0, 45.0, 40.0, -0.2}};
      break;
    case BipType::Grounder:
      m.components = {{0.4, 0.0, 110.0, 45.0, 30.0, 0.0},
                      {0.3, -55.0, 110.0, 35.0, 25.0, 0.1},
                      {0.3, 55.0, 110.0, 35.0, 25.0, -0.1}};
      break;
  }
  return m;
}

void LocationModel::validate(const ParkGeometry& park) const {
  if (components.empty()) throw validation_error("location model has no components");
  double total = 0.0;
  for (const auto& c : components) {
    if (!(c.weight > 0.0)) throw validation_error("component weight must be positive");
    if (!(c.sd_x > 0.0) || !(c.sd_y > 0.0))
      throw validation_error("component sds must be positive");
    if (!(c.rho > -1.0 && c.rho < 1.0))
      throw validation_error("component correlation must lie in (-1, 1)");
    if (!park.contains(c.mean_x, c.mean_y))
      throw validation_error("location model mass outside park polygon");
    total += c.weight;
  }
  if (!(total > 0.0)) throw validation_error("location model weights sum to zero");
}

Eigen::MatrixXd simulate_players(int n_players, const Eigen::VectorXd& mu,
                                 const Eigen::VectorXd& sigma, Rng& rng) {
  if (n_players < 1) throw validation_error("need at least one player");
  if (mu.size() != sigma.size()) throw validation_error("mu and sigma sizes differ");
  if ((sigma.array() < 0.0).any())
    throw validation_error("sigma must be nonnegative");
  Eigen::MatrixXd beta(n_players, mu.size());
  for (int i = 0; i < n_players; ++i)
    for (int k = 0; k < mu.size(); ++k)
      beta(i, k) = mu[k] + sigma[k] * rng.gaussian();
  return beta;
}

namespace {

std::pair<double, double> sample_location(const LocationModel& model,
                                          const ParkGeometry& park, Rng& rng) {
  double total = 0.0;
  for (const auto& c : model.components) total += c.weight;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    double u = rng.uniform() * total;
    const GaussComponent* comp = &model.components.back();
    for (const auto& c : model.components) {
      if (u < c.weight) {
        comp = &c;
        break;
      }
      u -= c.weight;
    }
    const double g1 = rng.gaussian();
    const double g2 = rng.gaussian();
    const double x = comp->mean_x + comp->sd_x * g1;
    const double y = comp->mean_y +
                     comp->sd_y * (comp->rho * g1 + std::sqrt(1.0 - comp->rho * comp->rho) * g2);
    if (park.contains(x, y) && !(x == 0.0 && y == 0.0)) return {x, y};
  }
  throw numerical_error("location model mass outside park polygon");
}

int sample_velocity(const std::array<double, 3>& probs, Rng& rng) {
  const double total = probs[0] + probs[1] + probs[2];
  double u = rng.uniform() * total;
  if (u < probs[0]) return 1;
  u -= probs[0];
  return u < probs[1] ? 2 : 3;
}

HitResult sample_hit_result(double x, double y, const HitResultRule& rule,
                            const ParkGeometry& park, Rng& rng) {
  const double r = radial_distance(x, y);
  const double phi = field_angle_deg(x, y);
  double p_double = rule.interior_double, p_triple = rule.interior_triple;
  const bool near_line = phi - park.foul_line_low_deg < rule.line_margin_deg ||
                         park.foul_line_high_deg - phi < rule.line_margin_deg;
  if (r > rule.deep_radius) {
    p_double = rule.deep_double;
    p_triple = rule.deep_triple;
  } else if (near_line) {
    p_double = rule.line_double;
    p_triple = rule.line_triple;
  }
  const double u = rng.uniform();
  if (u < p_triple) return HitResult::Triple;
  if (u < p_triple + p_double) return HitResult::Double;
  return HitResult::Single;
}

}  // namespace

std::vector<BipRecord> simulate_bips(const Eigen::MatrixXd& true_beta,
                                     const std::vector<int>& counts,
                                     const LocationModel& locations,
                                     const Centroid& centroid, BipType type,
                                     Position pos, ModelForm form,
                                     const BipSimOptions& opts, Rng& rng) {
  const int n_players = static_cast<int>(true_beta.rows());
  if (static_cast<int>(counts.size()) != n_players)
    throw validation_error("counts do not match the number of players");
  if (true_beta.cols() != coef_count(form))
    throw validation_error("true beta width does not match the model form");
  for (int c : counts)
    if (c < 0) throw validation_error("opportunity counts must be nonnegative");
  if (type == BipType::Grounder && !is_infield(pos))
    throw validation_error("grounders are modeled for infield positions only");
  locations.validate(opts.park);

  std::vector<std::string> ids = opts.player_ids;
  if (ids.empty()) ids = default_player_ids(n_players, pos);
  if (static_cast<int>(ids.size()) != n_players)
    throw validation_error("player id list does not match the number of players");

  std::vector<BipRecord> records;
  for (int i = 0; i < n_players; ++i) {
    for (int j = 0; j < counts[static_cast<std::size_t>(i)]; ++j) {
      BipRecord rec;
      rec.year = opts.year;
      rec.bip_type = type;
      rec.position = pos;
      rec.fielder_id = ids[static_cast<std::size_t>(i)];
      std::tie(rec.x, rec.y) = sample_location(locations, opts.park, rng);
      rec.velocity = sample_velocity(opts.velocity_probs, rng);

      const CovariateRow cov = build_covariates(rec, centroid);
      const Eigen::RowVectorXd row =
          design_row(form, std::nullopt, cov.distance, cov.velocity, cov.direction);
      double p = probit_cdf(row.dot(true_beta.row(i).transpose()));
      if (i == opts.star_index)
        p = std::min(p + opts.star_prob_bonus, 1.0 - 1e-9);

      if (rng.uniform() < p) {
        rec.outcome = Outcome::Success;
        rec.hit_result = HitResult::None;
      } else {
        rec.outcome = Outcome::Failure;
        rec.hit_result = sample_hit_result(rec.x, rec.y, opts.hits, opts.park, rng);
      }
      records.push_back(std::move(rec));
    }
  }
  return records;
}

std::vector<int> skewed_opportunities(int n_players, double log_mean,
                                      double log_sd, int max_count, Rng& rng) {
  if (n_players < 1) throw validation_error("need at least one player");
  if (max_count < 1) throw validation_error("max_count must be >= 1");
  std::vector<int> counts(static_cast<std::size_t>(n_players));
  for (auto& c : counts) {
    const double v = std::exp(log_mean + log_sd * rng.gaussian());
    c = std::clamp(static_cast<int>(std::lround(v)), 1, max_count);
  }
  return counts;
}

std::vector<std::string> default_player_ids(int n_players, Position pos) {
  std::vector<std::string> ids;
  ids.reserve(static_cast<std::size_t>(n_players));
  std::string prefix = to_string(pos);
  std::transform(prefix.begin(), prefix.end(), prefix.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  for (int i = 0; i < n_players; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "_%03d", i);
    ids.push_back(prefix + buf);
  }
  return ids;
}

}  // namespace safe
