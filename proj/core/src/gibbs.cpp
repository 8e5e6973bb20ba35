#include "safe/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <thread>

#include "safe/errors.hpp"

namespace safe {

HierPrior HierPrior::inverse_gamma(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw validation_error("inverse-gamma prior needs positive a and b");
  HierPrior p;
  p.kind = Kind::InverseGamma;
  p.a = a;
  p.b = b;
  return p;
}

HierPrior HierPrior::normal_inverse_gamma(Eigen::VectorXd mu0, double mu_var,
                                          double a, double b) {
  if (!(mu_var > 0.0)) throw validation_error("mu prior variance must be positive");
  if (!(a > 0.0) || !(b > 0.0))
    throw validation_error("inverse-gamma prior needs positive a and b");
  HierPrior p;
  p.kind = Kind::NormalInverseGamma;
  p.mu0 = std::move(mu0);
  p.mu_var = mu_var;
  p.a = a;
  p.b = b;
  return p;
}

std::string HierPrior::label() const {
  switch (kind) {
    case Kind::Flat: return "flat";
    case Kind::InverseGamma:
      return "invgamma(" + std::to_string(a) + "," + std::to_string(b) + ")";
    case Kind::NormalInverseGamma:
      return "normal-invgamma(" + std::to_string(mu_var) + "," +
             std::to_string(a) + "," + std::to_string(b) + ")";
  }
  return "?";
}

int HierModel::total_rows() const {
  int total = 0;
  for (const auto& p : players) total += p.design.n();
  return total;
}

void HierModel::validate() const {
  if (players.empty()) throw validation_error("hierarchical model has no players");
  const int k = n_coef();
  for (const auto& p : players) {
    p.design.validate();
    if (p.design.k() != k)
      throw validation_error("player design width does not match the model form");
  }
  if (prior.kind == HierPrior::Kind::Flat && n_players() < 2)
    throw numerical_error("improper posterior risk");
  if (prior.proper_mu() && prior.mu0.size() != k)
    throw validation_error("mu prior mean has the wrong dimension");
  if (total_rows() < 5 * n_players())
    std::cerr << "warning: fewer than 5 rows per player on average; "
                 "posterior may be weakly identified\n";
}

void ChainConfig::validate() const {
  if (burn_in < 0 || burn_in >= n_iter)
    throw validation_error("burn_in must be in [0, n_iter)");
  if (thin < 1) throw validation_error("thin must be >= 1");
  if (n_chains < 1) throw validation_error("n_chains must be >= 1");
}

PosteriorDraws::PosteriorDraws(int n_players, int n_coef,
                               std::vector<std::string> player_ids)
    : n_players_(n_players), n_coef_(n_coef), player_ids_(std::move(player_ids)) {
  if (static_cast<int>(player_ids_.size()) != n_players_)
    throw validation_error("player id list does not match player count");
}

int PosteriorDraws::n_chains() const {
  int max_chain = -1;
  for (int c : chain_) max_chain = std::max(max_chain, c);
  return max_chain + 1;
}

std::vector<double> PosteriorDraws::beta_series(int player, int coef) const {
  std::vector<double> out(static_cast<std::size_t>(n_draws()));
  for (int d = 0; d < n_draws(); ++d) out[static_cast<std::size_t>(d)] = beta(d, player, coef);
  return out;
}

std::vector<double> PosteriorDraws::mu_series(int coef) const {
  std::vector<double> out(static_cast<std::size_t>(n_draws()));
  for (int d = 0; d < n_draws(); ++d) out[static_cast<std::size_t>(d)] = mu(d, coef);
  return out;
}

std::vector<double> PosteriorDraws::sigma2_series(int coef) const {
  std::vector<double> out(static_cast<std::size_t>(n_draws()));
  for (int d = 0; d < n_draws(); ++d) out[static_cast<std::size_t>(d)] = sigma2(d, coef);
  return out;
}

void PosteriorDraws::append(const Eigen::MatrixXd& beta, const Eigen::VectorXd& mu,
                            const Eigen::VectorXd& sigma2, int chain_id) {
  if (beta.rows() != n_players_ || beta.cols() != n_coef_ ||
      mu.size() != n_coef_ || sigma2.size() != n_coef_)
    throw validation_error("draw dimensions do not match the container");
  if ((sigma2.array() <= 0.0).any())
    throw numerical_error("sigma2 draw must be positive");
  for (int i = 0; i < n_players_; ++i)
    for (int k = 0; k < n_coef_; ++k) beta_.push_back(beta(i, k));
  for (int k = 0; k < n_coef_; ++k) mu_.push_back(mu[k]);
  for (int k = 0; k < n_coef_; ++k) sigma2_.push_back(sigma2[k]);
  chain_.push_back(chain_id);
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> beta_conditional_moments(
    const DesignMatrix& design, const Eigen::MatrixXd& xtx,
    const Eigen::VectorXd& z, const Eigen::VectorXd& mu,
    const Eigen::VectorXd& sigma2) {
  const Eigen::VectorXd prior_prec = sigma2.cwiseInverse();
  Eigen::MatrixXd precision = xtx;
  precision.diagonal() += prior_prec;
  const Eigen::VectorXd rhs =
      prior_prec.cwiseProduct(mu) + design.X.transpose() * z;
  const Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success) throw numerical_error("degenerate conditional");
  return {llt.solve(rhs), precision};
}

std::vector<Eigen::MatrixXd> precompute_xtx(const HierModel& model) {
  std::vector<Eigen::MatrixXd> xtx;
  xtx.reserve(model.players.size());
  for (const auto& p : model.players)
    xtx.push_back(p.design.X.transpose() * p.design.X);
  return xtx;
}

void gibbs_step(const HierModel& model, const std::vector<Eigen::MatrixXd>& xtx,
                GibbsState& state, Rng& rng) {
  const int n = model.n_players();
  const int k = model.n_coef();

  // 1. latent utilities
  for (int i = 0; i < n; ++i) {
    const auto& d = model.players[static_cast<std::size_t>(i)].design;
    const Eigen::VectorXd eta = d.X * state.beta.row(i).transpose();
    auto& z = state.z[static_cast<std::size_t>(i)];
    for (int j = 0; j < d.n(); ++j) {
      const TruncationSide side =
          d.y[j] > 0.5 ? TruncationSide::Positive : TruncationSide::Negative;
      z[j] = sample_truncated_normal(eta[j], 1.0, side, rng);
    }
  }

  // 2. player coefficients
  for (int i = 0; i < n; ++i) {
    const auto& d = model.players[static_cast<std::size_t>(i)].design;
    const auto [mean, precision] = beta_conditional_moments(
        d, xtx[static_cast<std::size_t>(i)], state.z[static_cast<std::size_t>(i)],
        state.mu, state.sigma2);
    const Eigen::LLT<Eigen::MatrixXd> llt(precision);
    if (llt.info() != Eigen::Success) throw numerical_error("degenerate conditional");
    Eigen::VectorXd noise(k);
    for (int c = 0; c < k; ++c) noise[c] = rng.gaussian();
    state.beta.row(i) =
        (mean + llt.matrixU().solve(noise)).transpose();
  }

  // 3. population means
  for (int c = 0; c < k; ++c) {
    const double bbar = state.beta.col(c).mean();
    double mean, var;
    if (model.prior.proper_mu()) {
      const double prec = n / state.sigma2[c] + 1.0 / model.prior.mu_var;
      mean = (n * bbar / state.sigma2[c] + model.prior.mu0[c] / model.prior.mu_var) / prec;
      var = 1.0 / prec;
    } else {
      mean = bbar;
      var = state.sigma2[c] / n;
    }
    state.mu[c] = mean + std::sqrt(var) * rng.gaussian();
  }

  // 4. population variances
  for (int c = 0; c < k; ++c) {
    const double ss = (state.beta.col(c).array() - state.mu[c]).square().sum();
    const double shape = model.prior.shape_offset() + 0.5 * n;
    const double rate = model.prior.rate_offset() + 0.5 * ss;
    if (!(shape > 0.0) || !(rate > 0.0))
      throw numerical_error("degenerate conditional");
    state.sigma2[c] = std::max(rate / gamma_draw(shape, rng), 1e-300);
  }
}

GibbsState initial_state(const HierModel& model) {
  const int n = model.n_players();
  const int k = model.n_coef();

  const DesignMatrix pooled = stack_designs(model.players);
  const ProbitFit pooled_fit = fit_probit_mle(pooled);
  const Eigen::VectorXd fallback =
      pooled_fit.converged ? pooled_fit.beta : Eigen::VectorXd::Zero(k);

  GibbsState state;
  state.beta.resize(n, k);
  state.z.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto& d = model.players[static_cast<std::size_t>(i)].design;
    state.z.emplace_back(Eigen::VectorXd::Zero(d.n()));
    Eigen::VectorXd init = fallback;
    if (d.n() >= k) {
      const ProbitFit fit = fit_probit_mle(d);
      if (fit.converged) init = fit.beta;
    }
    state.beta.row(i) = init.transpose();
  }
  state.mu = state.beta.colwise().mean().transpose();
  state.sigma2.resize(k);
  for (int c = 0; c < k; ++c) {
    const double var =
        (state.beta.col(c).array() - state.mu[c]).square().sum() / std::max(n - 1, 1);
    state.sigma2[c] = std::max(var, 1e-4);
  }
  return state;
}

PosteriorDraws run_gibbs(const HierModel& model, const ChainConfig& config) {
  config.validate();
  model.validate();

  const auto xtx = precompute_xtx(model);
  const GibbsState init = initial_state(model);

  std::vector<std::string> ids;
  ids.reserve(model.players.size());
  for (const auto& p : model.players) ids.push_back(p.player_id);

  std::vector<PosteriorDraws> per_chain(
      static_cast<std::size_t>(config.n_chains),
      PosteriorDraws(model.n_players(), model.n_coef(), ids));

  const auto run_chain = [&](int c) {
    Rng rng(config.seed, static_cast<std::uint64_t>(c));
    GibbsState state = init;
    auto& out = per_chain[static_cast<std::size_t>(c)];
    for (int iter = 0; iter < config.n_iter; ++iter) {
      gibbs_step(model, xtx, state, rng);
      if (iter >= config.burn_in && (iter - config.burn_in) % config.thin == 0)
        out.append(state.beta, state.mu, state.sigma2, c);
    }
  };

  if (config.n_chains == 1) {
    run_chain(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(config.n_chains));
    for (int c = 0; c < config.n_chains; ++c) threads.emplace_back(run_chain, c);
    for (auto& t : threads) t.join();
  }

  // merge in chain order so output is independent of scheduling
  PosteriorDraws draws(model.n_players(), model.n_coef(), ids);
  for (int c = 0; c < config.n_chains; ++c) {
    const auto& src = per_chain[static_cast<std::size_t>(c)];
    for (int d = 0; d < src.n_draws(); ++d) {
      Eigen::MatrixXd beta(model.n_players(), model.n_coef());
      Eigen::VectorXd mu(model.n_coef()), sigma2(model.n_coef());
      for (int i = 0; i < model.n_players(); ++i)
        for (int k = 0; k < model.n_coef(); ++k) beta(i, k) = src.beta(d, i, k);
      for (int k = 0; k < model.n_coef(); ++k) {
        mu[k] = src.mu(d, k);
        sigma2[k] = src.sigma2(d, k);
      }
      draws.append(beta, mu, sigma2, c);
    }
  }
  return draws;
}

namespace {

struct SeriesStats {
  double rhat = 0.0;
  double ess = 0.0;
  bool rhat_defined = false;
  bool degenerate = false;
};

// Split R-hat and ESS following the combined-chain recipe in Gelman et al.,
// Bayesian Data Analysis (3rd ed., ch. 11), with Geyer's initial positive
// sequence truncation for the autocorrelation sum.
SeriesStats series_stats(const std::vector<std::vector<double>>& chains) {
  SeriesStats st;

  std::vector<std::vector<double>> halves;
  for (const auto& c : chains) {
    const std::size_t half = c.size() / 2;
    if (half < 2) continue;
    halves.emplace_back(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(half));
    halves.emplace_back(c.begin() + static_cast<std::ptrdiff_t>(half),
                        c.begin() + static_cast<std::ptrdiff_t>(2 * half));
  }
  if (halves.size() < 2) {
    st.degenerate = true;
    return st;
  }
  std::size_t n = halves.front().size();
  for (const auto& h : halves) n = std::min(n, h.size());
  const std::size_t m = halves.size();

  std::vector<double> means(m), vars(m);
  double grand = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    double s = 0.0;
    for (std::size_t t = 0; t < n; ++t) s += halves[j][t];
    means[j] = s / static_cast<double>(n);
    grand += means[j];
    double ss = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double d = halves[j][t] - means[j];
      ss += d * d;
    }
    vars[j] = ss / static_cast<double>(n - 1);
  }
  grand /= static_cast<double>(m);

  double w = 0.0;
  for (double v : vars) w += v;
  w /= static_cast<double>(m);
  double b = 0.0;
  for (double mean : means) {
    const double d = mean - grand;
    b += d * d;
  }
  b *= static_cast<double>(n) / static_cast<double>(m - 1);

  if (w <= 0.0) {
    st.degenerate = true;
    return st;
  }

  const double var_plus =
      (static_cast<double>(n - 1) / static_cast<double>(n)) * w + b / static_cast<double>(n);
  st.rhat = std::sqrt(var_plus / w);
  st.rhat_defined = true;

  // autocorrelation averaged over half-chains
  const std::size_t max_lag = std::min<std::size_t>(n - 1, 1000);
  double rho_sum = 0.0;
  double prev_pair = 0.0;
  bool have_prev = false;
  for (std::size_t lag = 1; lag + 1 <= max_lag; lag += 2) {
    double rho_a = 0.0, rho_b = 0.0;
    for (std::size_t which = 0; which < 2; ++which) {
      const std::size_t l = lag + which;
      double acov = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        double s = 0.0;
        for (std::size_t t = 0; t + l < n; ++t)
          s += (halves[j][t] - means[j]) * (halves[j][t + l] - means[j]);
        acov += s / static_cast<double>(n);
      }
      acov /= static_cast<double>(m);
      const double rho = 1.0 - (w - acov) / var_plus;
      if (which == 0) rho_a = rho; else rho_b = rho;
    }
    const double pair = rho_a + rho_b;
    if (pair < 0.0) break;
    if (have_prev && pair > prev_pair) break;  // enforce monotone decrease
    rho_sum += pair;
    prev_pair = pair;
    have_prev = true;
  }
  const double denom = 1.0 + 2.0 * rho_sum;
  st.ess = static_cast<double>(m) * static_cast<double>(n) / std::max(denom, 1e-12);
  return st;
}

void diagnose_series(const std::string& name,
                     const std::vector<std::vector<double>>& chains,
                     bool multi_chain, ConvergenceReport& report) {
  ScalarDiagnostic d;
  d.name = name;

  bool constant = true;
  double first = chains.front().front();
  for (const auto& c : chains)
    for (double v : c)
      if (v != first) { constant = false; break; }
  if (constant) {
    d.degenerate = true;
    report.params.push_back(d);
    return;
  }

  const SeriesStats st = series_stats(chains);
  d.degenerate = st.degenerate;
  d.ess = st.ess;
  if (multi_chain && st.rhat_defined) {
    d.rhat = st.rhat;
    d.rhat_defined = true;
    d.flagged = st.rhat > 1.05;
    if (d.flagged) report.any_flagged = true;
  }
  report.params.push_back(d);
}

}  // namespace

ConvergenceReport convergence_diagnostics(const PosteriorDraws& draws) {
  if (draws.n_draws() < 4)
    throw validation_error("too few draws for convergence diagnostics");

  const int n_chains = draws.n_chains();
  ConvergenceReport report;
  if (n_chains < 2)
    report.warnings.push_back("single chain: R-hat omitted, ESS only");

  std::map<int, int> per_chain_counts;
  for (int d = 0; d < draws.n_draws(); ++d) per_chain_counts[draws.chain(d)]++;
  for (const auto& [c, cnt] : per_chain_counts)
    if (cnt < 100)
      report.warnings.push_back("chain " + std::to_string(c) +
                                " has fewer than 100 retained draws");

  const auto split_by_chain = [&](const std::vector<double>& series) {
    std::vector<std::vector<double>> chains(static_cast<std::size_t>(n_chains));
    for (int d = 0; d < draws.n_draws(); ++d)
      chains[static_cast<std::size_t>(draws.chain(d))].push_back(series[static_cast<std::size_t>(d)]);
    return chains;
  };

  const bool multi = n_chains >= 2;
  for (int k = 0; k < draws.n_coef(); ++k)
    diagnose_series("mu[" + std::to_string(k) + "]", split_by_chain(draws.mu_series(k)),
                    multi, report);
  for (int k = 0; k < draws.n_coef(); ++k)
    diagnose_series("sigma2[" + std::to_string(k) + "]",
                    split_by_chain(draws.sigma2_series(k)), multi, report);
  for (int i = 0; i < draws.n_players(); ++i)
    for (int k = 0; k < draws.n_coef(); ++k)
      diagnose_series("beta[" + draws.player_ids()[static_cast<std::size_t>(i)] + "][" +
                          std::to_string(k) + "]",
                      split_by_chain(draws.beta_series(i, k)), multi, report);
  return report;
}

GroupedDesigns group_designs(const std::vector<BipRecord>& eligible, Position pos,
                             const Centroid& centroid, ModelForm form,
                             const std::optional<Standardizer>& standardizer) {
  std::map<std::string, std::vector<CovariateRow>> by_player;
  std::vector<CovariateRow> pooled;
  for (const auto& rec : eligible) {
    if (rec.position != pos)
      throw validation_error(
          "eligible record not attributed to the studied position; "
          "use a per-position study file");
    const CovariateRow row = build_covariates(rec, centroid);
    by_player[rec.fielder_id].push_back(row);
    pooled.push_back(row);
  }
  if (by_player.empty()) throw validation_error("no eligible records to group");

  GroupedDesigns out;
  if (form == ModelForm::Illustration)
    out.standardizer = standardizer ? *standardizer : Standardizer::fit(pooled);

  std::vector<std::pair<std::string, std::size_t>> order;
  order.reserve(by_player.size());
  for (const auto& [id, rows] : by_player) order.emplace_back(id, rows.size());
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  for (const auto& [id, cnt] : order) {
    PlayerDesign pd;
    pd.player_id = id;
    pd.design = build_design(by_player[id], form, out.standardizer);
    out.players.push_back(std::move(pd));
    out.covariates.push_back(by_player[id]);
  }
  return out;
}

DesignMatrix stack_designs(const std::vector<PlayerDesign>& players) {
  if (players.empty()) throw validation_error("no designs to stack");
  int rows = 0;
  const int k = players.front().design.k();
  for (const auto& p : players) rows += p.design.n();
  DesignMatrix out;
  out.X.resize(rows, k);
  out.y.resize(rows);
  int at = 0;
  for (const auto& p : players) {
    out.X.middleRows(at, p.design.n()) = p.design.X;
    out.y.segment(at, p.design.n()) = p.design.y;
    at += p.design.n();
  }
  return out;
}

}  // namespace safe
