#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "safe/bip_data.hpp"
#include "safe/diagnostics.hpp"
#include "safe/gibbs.hpp"
#include "safe/safe_eval.hpp"
#include "safe/weights.hpp"

namespace safe {

// CSV schema v1, one header line then one row per BIP:
//   year,bip_type,x,y,velocity,fielder_id,position,outcome,hit_result
// hit_result is empty (or "None") exactly when outcome is Success.
inline constexpr const char* kBipCsvHeader =
    "year,bip_type,x,y,velocity,fielder_id,position,outcome,hit_result";
inline constexpr const char* kBipSchemaVersion = "v1";

struct LoadError {
  int line = 0;
  std::string message;  // formatted "<reason>, line <n>"
};

struct LoadResult {
  std::vector<BipRecord> records;
  std::vector<LoadError> errors;
};

// Parses and validates every row; malformed or invariant-breaking rows land
// in `errors` with their line number. Missing file or a bad header throws.
LoadResult load_bip_records(const std::string& path,
                            const std::string& schema_version = kBipSchemaVersion,
                            const ParkGeometry& park = {});

void write_bip_csv(const std::string& path, const std::vector<BipRecord>& records);

void write_centroids_json(const std::string& path,
                          const std::vector<Centroid>& centroids);
std::vector<Centroid> read_centroids_json(const std::string& path);

// Sidecar metadata stored alongside the binary draws (see docs/formats.md).
struct DrawsMetadata {
  Position position = Position::CenterField;
  BipType bip_type = BipType::Flyball;
  int year = 0;
  ModelForm form = ModelForm::Full;
  std::optional<Standardizer> standardizer;
  Centroid centroid;
  ChainConfig config;
  std::string prior_label;
  std::string data_hash;
  std::vector<std::string> player_ids;
  std::vector<int> player_rows;  // eligible opportunities per player
};

void write_draws(const std::string& base_path, const PosteriorDraws& draws,
                 const DrawsMetadata& meta);
std::pair<PosteriorDraws, DrawsMetadata> read_draws(const std::string& base_path);

// Gzipped CSV of the weight field, one row per (grid point, velocity).
void write_weight_field(const std::string& path, const WeightField& field);
WeightField read_weight_field(const std::string& path);

void write_safe_results_csv(const std::string& path,
                            const std::vector<SafeResult>& results);
std::vector<SafeResult> read_safe_results_csv(const std::string& path);

void write_leaderboard_csv(const std::string& path, const Leaderboard& board);
std::string leaderboard_text(const Leaderboard& board, const std::string& title);

// External ratings: player_id,position,year,value
std::vector<Rating> read_ratings_csv(const std::string& path,
                                     std::optional<int> year = {});

void write_binned_residuals_csv(const std::string& path,
                                const std::vector<ResidualBin>& bins);
void write_covariate_bins_csv(const std::string& path,
                              const std::vector<CovariateBin>& bins);
void write_ppc_report(const std::string& csv_path, const PpcBinnedReport& report);
void write_gap_ppc_json(const std::string& path, const GapPpcReport& report);
void write_correlation_csv(const std::string& path, const CorrelationReport& report);
void write_convergence_csv(const std::string& path, const ConvergenceReport& report);

// FNV-1a over bytes; used to content-address fit artifacts.
std::uint64_t fnv1a64(const void* data, std::size_t size,
                      std::uint64_t seed = 14695981039346656037ull);
std::uint64_t hash_file(const std::string& path);
std::string hash_hex(std::uint64_t h);

std::string format_double(double v);  // shortest round-trip decimal

}  // namespace safe
