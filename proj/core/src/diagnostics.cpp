#include "safe/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "safe/errors.hpp"
#include "safe/probit.hpp"

namespace safe {

Eigen::MatrixXd posterior_mean_beta(const PosteriorDraws& draws) {
  if (draws.n_draws() == 0) throw validation_error("no draws to average");
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(draws.n_players(), draws.n_coef());
  for (int d = 0; d < draws.n_draws(); ++d)
    for (int i = 0; i < draws.n_players(); ++i)
      for (int k = 0; k < draws.n_coef(); ++k) mean(i, k) += draws.beta(d, i, k);
  mean /= static_cast<double>(draws.n_draws());
  return mean;
}

ResidualSet compute_residuals(const HierModel& model,
                              const Eigen::MatrixXd& beta_hat) {
  if (beta_hat.rows() != model.n_players() || beta_hat.cols() != model.n_coef())
    throw validation_error("beta_hat does not match the model dimensions");
  ResidualSet out;
  for (int i = 0; i < model.n_players(); ++i) {
    const auto& d = model.players[static_cast<std::size_t>(i)].design;
    const Eigen::VectorXd eta = d.X * beta_hat.row(i).transpose();
    for (int j = 0; j < d.n(); ++j) {
      const double p = probit_cdf(eta[j]);
      out.predicted.push_back(p);
      out.residual.push_back(d.y[j] - p);
      out.player_index.push_back(i);
    }
  }
  return out;
}

std::vector<ResidualBin> binned_residuals(const std::vector<double>& residuals,
                                          const std::vector<double>& predicted,
                                          int bin_size) {
  if (residuals.size() != predicted.size())
    throw validation_error("residuals and predictions differ in length");
  if (residuals.empty()) throw validation_error("no residuals to bin");
  if (bin_size < 1) throw validation_error("bin_size must be >= 1");

  const std::size_t n = residuals.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return predicted[a] < predicted[b];
  });

  const std::size_t n_bins = std::max<std::size_t>(1, n / static_cast<std::size_t>(bin_size));
  std::vector<ResidualBin> bins;
  std::size_t start = 0;
  for (std::size_t b = 0; b < n_bins && start < n; ++b) {
    std::size_t stop = (b + 1 == n_bins) ? n : ((b + 1) * n) / n_bins;
    if (stop <= start) stop = start + 1;
    // tied predictions stay together even if the bin grows
    while (stop < n && predicted[order[stop]] == predicted[order[stop - 1]]) ++stop;
    ResidualBin bin;
    for (std::size_t t = start; t < stop; ++t) {
      bin.mean_predicted += predicted[order[t]];
      bin.mean_residual += residuals[order[t]];
      ++bin.count;
    }
    bin.mean_predicted /= bin.count;
    bin.mean_residual /= bin.count;
    bins.push_back(bin);
    start = stop;
  }
  return bins;
}

PpcBinnedReport posterior_predictive_binned(const PosteriorDraws& draws,
                                            const HierModel& model, int n_sims,
                                            Rng& rng, int bin_size) {
  if (n_sims <= 0) throw validation_error("n_sims must be positive");
  if (draws.n_draws() == 0) throw validation_error("no posterior draws");

  const Eigen::MatrixXd beta_hat = posterior_mean_beta(draws);
  const ResidualSet observed = compute_residuals(model, beta_hat);
  const std::size_t n = observed.predicted.size();

  // Bin membership is fixed by the predicted ordering; replicates only swap
  // outcomes.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return observed.predicted[a] < observed.predicted[b];
  });
  const std::vector<ResidualBin> obs_bins =
      binned_residuals(observed.residual, observed.predicted, bin_size);

  // per-draw success probabilities for replicate outcome simulation
  std::vector<std::size_t> row_offset;
  row_offset.reserve(model.players.size());
  {
    std::size_t at = 0;
    for (const auto& p : model.players) {
      row_offset.push_back(at);
      at += static_cast<std::size_t>(p.design.n());
    }
  }

  PpcBinnedReport report;
  report.observed = obs_bins;
  report.n_sims = n_sims;
  const std::size_t n_bins = obs_bins.size();
  std::vector<std::vector<double>> sims(n_bins);

  Eigen::VectorXd beta(draws.n_coef());
  std::vector<double> rep_resid(n);
  for (int s = 0; s < n_sims; ++s) {
    const int d = static_cast<int>(rng.uniform() * draws.n_draws());
    for (int i = 0; i < model.n_players(); ++i) {
      for (int k = 0; k < draws.n_coef(); ++k) beta[k] = draws.beta(d, i, k);
      const auto& design = model.players[static_cast<std::size_t>(i)].design;
      const Eigen::VectorXd eta = design.X * beta;
      for (int j = 0; j < design.n(); ++j) {
        const double p_sim = probit_cdf(eta[j]);
        const double y_rep = rng.uniform() < p_sim ? 1.0 : 0.0;
        const std::size_t row = row_offset[static_cast<std::size_t>(i)] +
                                static_cast<std::size_t>(j);
        rep_resid[row] = y_rep - observed.predicted[row];
      }
    }
    // same bins as the observed data
    std::size_t start = 0;
    for (std::size_t b = 0; b < n_bins; ++b) {
      const std::size_t cnt = static_cast<std::size_t>(obs_bins[b].count);
      double sum = 0.0;
      for (std::size_t t = start; t < start + cnt; ++t) sum += rep_resid[order[t]];
      sims[b].push_back(sum / static_cast<double>(cnt));
      start += cnt;
    }
  }

  int inside = 0;
  for (std::size_t b = 0; b < n_bins; ++b) {
    report.lo.push_back(percentile(sims[b], 0.025));
    report.hi.push_back(percentile(sims[b], 0.975));
    if (obs_bins[b].mean_residual >= report.lo[b] &&
        obs_bins[b].mean_residual <= report.hi[b])
      ++inside;
  }
  report.coverage = static_cast<double>(inside) / static_cast<double>(n_bins);
  return report;
}

namespace {

double best_worst_gap(const std::vector<double>& rates,
                      const std::vector<std::size_t>& top_players) {
  double best = -1.0, worst = 2.0;
  for (std::size_t i : top_players) {
    best = std::max(best, rates[i]);
    worst = std::min(worst, rates[i]);
  }
  return best - worst;
}

}  // namespace

GapPpcReport heterogeneity_gap_ppc(const PosteriorDraws& partial_draws,
                                   const ProbitFit& pooled_fit,
                                   const HierModel& model, int top_n, int n_sims,
                                   Rng& rng) {
  const int n_players = model.n_players();
  if (top_n < 2 || top_n > n_players)
    throw validation_error("top_n must be in [2, n_players]");
  if (n_sims <= 0) throw validation_error("n_sims must be positive");

  // players with the most opportunities
  std::vector<std::size_t> idx(static_cast<std::size_t>(n_players));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return model.players[a].design.n() > model.players[b].design.n();
  });
  const std::vector<std::size_t> top(idx.begin(), idx.begin() + top_n);

  const auto observed_rate = [&](std::size_t i) {
    const auto& d = model.players[i].design;
    return d.y.mean();
  };
  std::vector<double> obs_rates(static_cast<std::size_t>(n_players), 0.0);
  for (std::size_t i = 0; i < obs_rates.size(); ++i) obs_rates[i] = observed_rate(i);

  GapPpcReport report;
  report.top_n = top_n;
  report.observed_gap = best_worst_gap(obs_rates, top);

  std::vector<Eigen::VectorXd> pooled_probs(static_cast<std::size_t>(n_players));
  for (int i = 0; i < n_players; ++i) {
    const auto& d = model.players[static_cast<std::size_t>(i)].design;
    Eigen::VectorXd eta = d.X * pooled_fit.beta;
    for (Eigen::Index j = 0; j < eta.size(); ++j) eta[j] = probit_cdf(eta[j]);
    pooled_probs[static_cast<std::size_t>(i)] = eta;
  }

  std::vector<double> rates(static_cast<std::size_t>(n_players));
  Eigen::VectorXd beta(partial_draws.n_coef());
  for (int s = 0; s < n_sims; ++s) {
    // partial pooling replicate
    const int d = static_cast<int>(rng.uniform() * partial_draws.n_draws());
    for (std::size_t i : top) {
      for (int k = 0; k < partial_draws.n_coef(); ++k)
        beta[k] = partial_draws.beta(d, static_cast<int>(i), k);
      const auto& design = model.players[i].design;
      const Eigen::VectorXd eta = design.X * beta;
      int caught = 0;
      for (Eigen::Index j = 0; j < eta.size(); ++j)
        if (rng.uniform() < probit_cdf(eta[j])) ++caught;
      rates[i] = static_cast<double>(caught) / static_cast<double>(design.n());
    }
    report.partial_gaps.push_back(best_worst_gap(rates, top));

    // complete pooling replicate
    for (std::size_t i : top) {
      const auto& probs = pooled_probs[i];
      int caught = 0;
      for (Eigen::Index j = 0; j < probs.size(); ++j)
        if (rng.uniform() < probs[j]) ++caught;
      rates[i] = static_cast<double>(caught) / static_cast<double>(probs.size());
    }
    report.pooled_gaps.push_back(best_worst_gap(rates, top));
  }
  return report;
}

CorrelationReport between_year_correlation(const std::vector<Rating>& a,
                                           const std::vector<Rating>& b) {
  std::map<std::pair<std::string, Position>, double> lookup;
  for (const auto& r : b) lookup[{r.player_id, r.position}] = r.value;

  std::map<Position, std::vector<std::pair<double, double>>> joined;
  std::vector<std::pair<double, double>> all;
  for (const auto& r : a) {
    const auto it = lookup.find({r.player_id, r.position});
    if (it == lookup.end()) continue;
    joined[r.position].emplace_back(r.value, it->second);
    all.emplace_back(r.value, it->second);
  }

  const auto pearson = [](const std::vector<std::pair<double, double>>& pairs) {
    CorrelationCell cell;
    cell.n = static_cast<int>(pairs.size());
    if (cell.n < 3) return cell;
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : pairs) {
      mx += x;
      my += y;
    }
    mx /= cell.n;
    my /= cell.n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (const auto& [x, y] : pairs) {
      sxy += (x - mx) * (y - my);
      sxx += (x - mx) * (x - mx);
      syy += (y - my) * (y - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) return cell;
    cell.r = sxy / std::sqrt(sxx * syy);
    cell.defined = true;
    return cell;
  };

  CorrelationReport report;
  for (const auto& [pos, pairs] : joined) report.per_position[pos] = pearson(pairs);
  report.total = pearson(all);
  return report;
}

std::vector<Rating> to_ratings(const std::vector<SafeResult>& results) {
  std::vector<Rating> out;
  out.reserve(results.size());
  for (const auto& r : results) out.push_back({r.player_id, r.position, r.mean});
  return out;
}

namespace {

std::vector<CovariateBin> grouped_bins(
    const std::vector<std::pair<std::string, double>>& labeled) {
  std::map<std::string, std::pair<double, int>> acc;
  std::vector<std::string> order;
  for (const auto& [label, r] : labeled) {
    if (!acc.count(label)) order.push_back(label);
    auto& [sum, cnt] = acc[label];
    sum += r;
    ++cnt;
  }
  std::vector<CovariateBin> out;
  for (const auto& label : order) {
    const auto& [sum, cnt] = acc[label];
    out.push_back({label, sum / cnt, cnt});
  }
  return out;
}

void check_row_count(const std::vector<CovariateRow>& rows,
                     const ResidualSet& residuals) {
  if (rows.size() != residuals.residual.size())
    throw validation_error("covariate rows do not match the residual set");
}

}  // namespace

std::vector<CovariateBin> residuals_by_distance(
    const std::vector<CovariateRow>& rows, const ResidualSet& residuals,
    double bin_width) {
  check_row_count(rows, residuals);
  std::map<long, std::pair<double, int>> acc;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const long bin = static_cast<long>(std::floor(rows[i].distance / bin_width));
    auto& [sum, cnt] = acc[bin];
    sum += residuals.residual[i];
    ++cnt;
  }
  std::vector<CovariateBin> out;
  for (const auto& [bin, sc] : acc) {
    const double lo = static_cast<double>(bin) * bin_width;
    out.push_back({std::to_string(static_cast<long>(lo)) + "-" +
                       std::to_string(static_cast<long>(lo + bin_width)),
                   sc.first / sc.second, sc.second});
  }
  return out;
}

std::vector<CovariateBin> residuals_by_velocity(
    const std::vector<CovariateRow>& rows, const ResidualSet& residuals) {
  check_row_count(rows, residuals);
  std::vector<std::pair<std::string, double>> labeled;
  labeled.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    labeled.emplace_back("v" + std::to_string(static_cast<int>(rows[i].velocity)),
                         residuals.residual[i]);
  std::sort(labeled.begin(), labeled.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return grouped_bins(labeled);
}

std::vector<CovariateBin> residuals_by_direction(
    const std::vector<CovariateRow>& rows, const ResidualSet& residuals) {
  check_row_count(rows, residuals);
  std::vector<std::pair<std::string, double>> labeled;
  labeled.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    labeled.emplace_back(rows[i].direction ? "dir1" : "dir0", residuals.residual[i]);
  std::sort(labeled.begin(), labeled.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return grouped_bins(labeled);
}

}  // namespace safe
