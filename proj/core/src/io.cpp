#include "safe/io.hpp"

#include <zlib.h>

#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "safe/errors.hpp"

namespace safe {

namespace {

using nlohmann::json;

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<long> parse_long(const std::string& s) {
  if (s.empty()) return std::nullopt;
  long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

json standardizer_to_json(const std::optional<Standardizer>& s) {
  if (!s) return nullptr;
  json j;
  j["mean"] = {s->mean[0], s->mean[1], s->mean[2]};
  j["scale"] = {s->scale[0], s->scale[1], s->scale[2]};
  return j;
}

std::optional<Standardizer> standardizer_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  Standardizer s;
  for (int i = 0; i < 3; ++i) {
    s.mean[i] = j.at("mean").at(i).get<double>();
    s.scale[i] = j.at("scale").at(i).get<double>();
  }
  return s;
}

json centroid_to_json(const Centroid& c) {
  json j;
  j["position"] = to_string(c.position);
  j["bip_type"] = to_string(c.bip_type);
  j["x0"] = c.x0;
  j["y0"] = c.y0;
  j["phi0"] = c.phi0_deg;
  return j;
}

Centroid centroid_from_json(const json& j) {
  Centroid c;
  const auto pos = parse_position(j.at("position").get<std::string>());
  const auto type = parse_bip_type(j.at("bip_type").get<std::string>());
  if (!pos || !type) throw validation_error("bad centroid entry in JSON");
  c.position = *pos;
  c.bip_type = *type;
  c.x0 = j.at("x0").get<double>();
  c.y0 = j.at("y0").get<double>();
  c.phi0_deg = j.at("phi0").get<double>();
  return c;
}

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw validation_error("draws file truncated");
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw numerical_error("failed to format double");
  return std::string(buf, ptr);
}

LoadResult load_bip_records(const std::string& path,
                            const std::string& schema_version,
                            const ParkGeometry& park) {
  if (schema_version != kBipSchemaVersion)
    throw validation_error("unsupported schema version: " + schema_version);
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw validation_error(path + " is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kBipCsvHeader)
    throw validation_error("header does not match schema " + schema_version);

  LoadResult result;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv(line);
    const auto reject = [&](const std::string& why) {
      result.errors.push_back({line_no, why + ", line " + std::to_string(line_no)});
    };
    if (fields.size() != 9) {
      reject("malformed row: expected 9 fields, got " + std::to_string(fields.size()));
      continue;
    }
    const auto year = parse_long(fields[0]);
    const auto type = parse_bip_type(fields[1]);
    const auto x = parse_double(fields[2]);
    const auto y = parse_double(fields[3]);
    const auto vel = parse_long(fields[4]);
    const auto pos = parse_position(fields[6]);
    const auto outcome = parse_outcome(fields[7]);
    const auto hit = parse_hit_result(fields[8]);
    if (!year) { reject("malformed year"); continue; }
    if (!type) { reject("unknown bip_type '" + fields[1] + "'"); continue; }
    if (!x || !y) { reject("malformed coordinates"); continue; }
    if (!vel) { reject("malformed velocity"); continue; }
    if (fields[5].empty()) { reject("empty fielder_id"); continue; }
    if (!pos) { reject("unknown position '" + fields[6] + "'"); continue; }
    if (!outcome) { reject("unknown outcome '" + fields[7] + "'"); continue; }
    if (!hit) { reject("unknown hit_result '" + fields[8] + "'"); continue; }

    BipRecord rec;
    rec.year = static_cast<int>(*year);
    rec.bip_type = *type;
    rec.x = *x;
    rec.y = *y;
    rec.velocity = static_cast<int>(*vel);
    rec.fielder_id = fields[5];
    rec.position = *pos;
    rec.outcome = *outcome;
    rec.hit_result = *hit;
    if (const auto problem = validate_record(rec, park)) {
      reject(*problem);
      continue;
    }
    result.records.push_back(std::move(rec));
  }
  return result;
}

void write_bip_csv(const std::string& path, const std::vector<BipRecord>& records) {
  std::ofstream out(path);
  if (!out) throw validation_error("cannot write " + path);
  out << kBipCsvHeader << "\n";
  for (const auto& r : records) {
    if (r.fielder_id.find(',') != std::string::npos)
      throw validation_error("fielder_id may not contain commas");
    out << r.year << ',' << to_string(r.bip_type) << ',' << format_double(r.x)
        << ',' << format_double(r.y) << ',' << r.velocity << ',' << r.fielder_id
        << ',' << to_string(r.position) << ',' << to_string(r.outcome) << ','
        << to_string(r.hit_result) << "\n";
  }
  if (!out) throw validation_error("failed writing " + path);
}

void write_centroids_json(const std::string& path,
                          const std::vector<Centroid>& centroids) {
  json j;
  j["centroids"] = json::array();
  for (const auto& c : centroids) j["centroids"].push_back(centroid_to_json(c));
  std::ofstream out(path);
  if (!out) throw validation_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

std::vector<Centroid> read_centroids_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open " + path);
  json j;
  in >> j;
  std::vector<Centroid> out;
  for (const auto& e : j.at("centroids")) out.push_back(centroid_from_json(e));
  return out;
}

void write_draws(const std::string& base_path, const PosteriorDraws& draws,
                 const DrawsMetadata& meta) {
  {
    std::ofstream out(base_path + ".draws", std::ios::binary);
    if (!out) throw validation_error("cannot write " + base_path + ".draws");
    out.write("SAFEDRWS", 8);
    write_pod<std::uint32_t>(out, 1);  // format version
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(draws.n_draws()));
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(draws.n_players()));
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(draws.n_coef()));
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(draws.n_chains()));
    const auto write_doubles = [&](const std::vector<double>& v) {
      out.write(reinterpret_cast<const char*>(v.data()),
                static_cast<std::streamsize>(v.size() * sizeof(double)));
    };
    write_doubles(draws.raw_beta());
    write_doubles(draws.raw_mu());
    write_doubles(draws.raw_sigma2());
    for (int c : draws.raw_chain()) write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(c));
    if (!out) throw validation_error("failed writing " + base_path + ".draws");
  }

  json j;
  j["position"] = to_string(meta.position);
  j["bip_type"] = to_string(meta.bip_type);
  j["year"] = meta.year;
  j["model_form"] = to_string(meta.form);
  j["standardizer"] = standardizer_to_json(meta.standardizer);
  j["centroid"] = centroid_to_json(meta.centroid);
  j["config"] = {{"n_iter", meta.config.n_iter},
                 {"burn_in", meta.config.burn_in},
                 {"thin", meta.config.thin},
                 {"n_chains", meta.config.n_chains},
                 {"seed", meta.config.seed}};
  j["prior"] = meta.prior_label;
  j["data_hash"] = meta.data_hash;
  j["player_ids"] = meta.player_ids;
  j["player_rows"] = meta.player_rows;
  std::ofstream out(base_path + ".json");
  if (!out) throw validation_error("cannot write " + base_path + ".json");
  out << j.dump(2) << "\n";
}

std::pair<PosteriorDraws, DrawsMetadata> read_draws(const std::string& base_path) {
  DrawsMetadata meta;
  {
    std::ifstream in(base_path + ".json");
    if (!in) throw validation_error("cannot open " + base_path + ".json");
    json j;
    in >> j;
    const auto pos = parse_position(j.at("position").get<std::string>());
    const auto type = parse_bip_type(j.at("bip_type").get<std::string>());
    const auto form = parse_model_form(j.at("model_form").get<std::string>());
    if (!pos || !type || !form) throw validation_error("bad draws sidecar");
    meta.position = *pos;
    meta.bip_type = *type;
    meta.form = *form;
    meta.year = j.at("year").get<int>();
    meta.standardizer = standardizer_from_json(j.at("standardizer"));
    meta.centroid = centroid_from_json(j.at("centroid"));
    meta.config.n_iter = j.at("config").at("n_iter").get<int>();
    meta.config.burn_in = j.at("config").at("burn_in").get<int>();
    meta.config.thin = j.at("config").at("thin").get<int>();
    meta.config.n_chains = j.at("config").at("n_chains").get<int>();
    meta.config.seed = j.at("config").at("seed").get<std::uint64_t>();
    meta.prior_label = j.at("prior").get<std::string>();
    meta.data_hash = j.at("data_hash").get<std::string>();
    meta.player_ids = j.at("player_ids").get<std::vector<std::string>>();
    meta.player_rows = j.at("player_rows").get<std::vector<int>>();
  }

  std::ifstream in(base_path + ".draws", std::ios::binary);
  if (!in) throw validation_error("cannot open " + base_path + ".draws");
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, "SAFEDRWS", 8) != 0)
    throw validation_error("not a draws file: " + base_path + ".draws");
  const auto version = read_pod<std::uint32_t>(in);
  if (version != 1) throw validation_error("unsupported draws format version");
  const auto n_draws = read_pod<std::uint32_t>(in);
  const auto n_players = read_pod<std::uint32_t>(in);
  const auto n_coef = read_pod<std::uint32_t>(in);
  (void)read_pod<std::uint32_t>(in);  // chain count, derivable from tags

  PosteriorDraws draws(static_cast<int>(n_players), static_cast<int>(n_coef),
                       meta.player_ids);
  std::vector<double> beta(static_cast<std::size_t>(n_draws) * n_players * n_coef);
  std::vector<double> mu(static_cast<std::size_t>(n_draws) * n_coef);
  std::vector<double> sigma2(static_cast<std::size_t>(n_draws) * n_coef);
  const auto read_doubles = [&](std::vector<double>& v) {
    in.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
    if (!in) throw validation_error("draws file truncated");
  };
  read_doubles(beta);
  read_doubles(mu);
  read_doubles(sigma2);

  Eigen::MatrixXd b(n_players, n_coef);
  Eigen::VectorXd m(n_coef), s2(n_coef);
  std::vector<std::uint32_t> chains(n_draws);
  for (auto& c : chains) c = read_pod<std::uint32_t>(in);
  for (std::uint32_t d = 0; d < n_draws; ++d) {
    for (std::uint32_t i = 0; i < n_players; ++i)
      for (std::uint32_t k = 0; k < n_coef; ++k)
        b(i, k) = beta[(static_cast<std::size_t>(d) * n_players + i) * n_coef + k];
    for (std::uint32_t k = 0; k < n_coef; ++k) {
      m[k] = mu[static_cast<std::size_t>(d) * n_coef + k];
      s2[k] = sigma2[static_cast<std::size_t>(d) * n_coef + k];
    }
    draws.append(b, m, s2, static_cast<int>(chains[d]));
  }
  return {std::move(draws), std::move(meta)};
}

void write_weight_field(const std::string& path, const WeightField& field) {
  gzFile gz = gzopen(path.c_str(), "wb");
  if (!gz) throw validation_error("cannot write " + path);
  std::ostringstream out;
  const bool planar = field.grid.kind == Grid::Kind::Planar;
  out << "#bip_type=" << to_string(field.bip_type) << "\n";
  out << "#kind=" << (planar ? "planar" : "angular") << "\n";
  out << "#spacing=" << format_double(field.grid.spacing) << "\n";
  out << "#fence_radius=" << format_double(field.grid.park.fence_radius) << "\n";
  out << "#positions=";
  for (std::size_t p = 0; p < field.positions.size(); ++p)
    out << (p ? "," : "") << to_string(field.positions[p]);
  out << "\n";
  out << (planar ? "x,y" : "angle") << ",velocity,freq,run_value";
  for (const auto& pos : field.positions) out << ",s_" << to_string(pos);
  out << "\n";
  for (int v : kVelocities) {
    for (std::size_t g = 0; g < field.grid.size(); ++g) {
      if (planar)
        out << format_double(field.grid.xs[g]) << ',' << format_double(field.grid.ys[g]);
      else
        out << format_double(field.grid.angles[g]);
      out << ',' << v << ',' << format_double(field.freq[static_cast<std::size_t>(v - 1)][g])
          << ',' << format_double(field.run_value[static_cast<std::size_t>(v - 1)][g]);
      for (std::size_t p = 0; p < field.positions.size(); ++p)
        out << ',' << format_double(field.responsibility[p][static_cast<std::size_t>(v - 1)][g]);
      out << "\n";
    }
  }
  const std::string payload = out.str();
  if (gzwrite(gz, payload.data(), static_cast<unsigned>(payload.size())) !=
      static_cast<int>(payload.size())) {
    gzclose(gz);
    throw validation_error("failed writing " + path);
  }
  gzclose(gz);
}

WeightField read_weight_field(const std::string& path) {
  gzFile gz = gzopen(path.c_str(), "rb");
  if (!gz) throw validation_error("cannot open " + path);
  std::string content;
  char buf[1 << 16];
  int got;
  while ((got = gzread(gz, buf, sizeof(buf))) > 0) content.append(buf, static_cast<std::size_t>(got));
  gzclose(gz);

  std::istringstream in(content);
  std::string line;
  WeightField field;
  bool planar = true;
  double spacing = 0.0, radius = 420.0;
  std::string bip_type_token;
  std::vector<std::string> position_tokens;
  // metadata comments
  while (std::getline(in, line) && !line.empty() && line[0] == '#') {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(1, eq - 1);
    const std::string value = line.substr(eq + 1);
    if (key == "bip_type") bip_type_token = value;
    else if (key == "kind") planar = value == "planar";
    else if (key == "spacing") spacing = parse_double(value).value_or(0.0);
    else if (key == "fence_radius") radius = parse_double(value).value_or(420.0);
    else if (key == "positions") {
      for (const auto& tok : split_csv(value)) position_tokens.push_back(tok);
    }
  }
  const auto type = parse_bip_type(bip_type_token);
  if (!type || !(spacing > 0.0) || position_tokens.empty())
    throw validation_error("bad weight field metadata in " + path);
  field.bip_type = *type;
  field.grid.kind = planar ? Grid::Kind::Planar : Grid::Kind::Angular;
  field.grid.spacing = spacing;
  field.grid.park.fence_radius = radius;
  for (const auto& tok : position_tokens) {
    const auto pos = parse_position(tok);
    if (!pos) throw validation_error("bad position token in " + path);
    field.positions.push_back(*pos);
  }
  field.responsibility.assign(field.positions.size(), {});

  // `line` currently holds the column header; data rows follow,
  // velocity-major in grid order.
  const std::size_t base_cols = planar ? 4u : 3u;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != base_cols + field.positions.size())
      throw validation_error("bad weight field row in " + path);
    std::size_t at = 0;
    double x = 0.0, y = 0.0, angle = 0.0;
    if (planar) {
      x = parse_double(fields[at++]).value();
      y = parse_double(fields[at++]).value();
    } else {
      angle = parse_double(fields[at++]).value();
    }
    const int v = static_cast<int>(parse_long(fields[at++]).value());
    const double freq = parse_double(fields[at++]).value();
    const double run = parse_double(fields[at++]).value();
    if (v == 1) {
      if (planar) {
        field.grid.xs.push_back(x);
        field.grid.ys.push_back(y);
      } else {
        field.grid.angles.push_back(angle);
      }
    }
    field.freq[static_cast<std::size_t>(v - 1)].push_back(freq);
    field.run_value[static_cast<std::size_t>(v - 1)].push_back(run);
    for (std::size_t p = 0; p < field.positions.size(); ++p)
      field.responsibility[p][static_cast<std::size_t>(v - 1)].push_back(
          parse_double(fields[at + p]).value());
  }
  if (field.grid.size() == 0) throw validation_error("empty weight field in " + path);
  return field;
}

void write_safe_results_csv(const std::string& path,
                            const std::vector<SafeResult>& results) {
  std::ofstream out(path);
  if (!out) throw validation_error("cannot write " + path);
  out << "player_id,position,year,mean,lo95,hi95,n_bip,n_draws\n";
  for (const auto& r : results)
    out << r.player_id << ',' << to_string(r.position) << ',' << r.year << ','
        << format_double(r.mean) << ',' << format_double(r.lo) << ','
        << format_double(r.hi) << ',' << r.n_bip << ',' << r.total_draws.size()
        << "\n";
}

std::vector<SafeResult> read_safe_results_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw validation_error(path + " is empty");
  std::vector<SafeResult> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() < 7) throw validation_error("bad SAFE results row in " + path);
    SafeResult r;
    r.player_id = fields[0];
    const auto pos = parse_position(fields[1]);
    if (!pos) throw validation_error("bad position in " + path);
    r.position = *pos;
    r.year = static_cast<int>(parse_long(fields[2]).value_or(0));
    r.mean = parse_double(fields[3]).value_or(0.0);
    r.lo = parse_double(fields[4]).value_or(0.0);
    r.hi = parse_double(fields[5]).value_or(0.0);
    r.n_bip = static_cast<int>(parse_long(fields[6]).value_or(0));
    out.push_back(std::move(r));
  }
  return out;
}

void write_leaderboard_csv(const std::string& path, const Leaderboard& board) {
  std::ofstream out(path);
  if (!out) throw validation_error("cannot write " + path);
  out << "group,rank,player_id,year,position,mean,lo95,hi95,n_bip\n";
  int rank = 1;
  for (const auto& r : board.best) {
    out << "best," << rank++ << ',' << r.player_id << ',' << r.year << ','
        << to_string(r.position) << ',' << format_double(r.mean) << ','
        << format_double(r.lo) << ',' << format_double(r.hi) << ',' << r.n_bip << "\n";
  }
  rank = 1;
  for (const auto& r : board.worst) {
    out << "worst," << rank++ << ',' << r.player_id << ',' << r.year << ','
        << to_string(r.position) << ',' << format_double(r.mean) << ','
        << format_double(r.lo) << ',' << format_double(r.hi) << ',' << r.n_bip << "\n";
  }
}

namespace {

void append_rows(std::ostringstream& out, const std::vector<LeaderboardRow>& rows) {
  char buf[160];
  for (const auto& r : rows) {
    const std::string name = r.player_id + ", " + std::to_string(r.year);
    std::snprintf(buf, sizeof(buf), "%-28s %9.1f    (%.1f, %.1f)\n", name.c_str(),
                  r.mean, r.lo, r.hi);
    out << buf;
  }
}

}  // namespace

std::string leaderboard_text(const Leaderboard& board, const std::string& title) {
  std::ostringstream out;
  out << "Best " << title << "\n";
  out << "Name and year                Post. mean   95% post. interval\n";
  append_rows(out, board.best);
  out << "\nWorst " << title << "\n";
  out << "Name and year                Post. mean   95% post. interval\n";
  append_rows(out, board.worst);
  return out.str();
}

std::vector<Rating> read_ratings_csv(const std::string& path,
                                     std::optional<int> year) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw validation_error(path + " is empty");
  std::vector<Rating> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 4)
      throw validation_error("bad ratings row, line " + std::to_string(line_no));
    const auto pos = parse_position(fields[1]);
    const auto y = parse_long(fields[2]);
    const auto value = parse_double(fields[3]);
    if (!pos || !y || !value)
      throw validation_error("bad ratings row, line " + std::to_string(line_no));
    if (year && static_cast<int>(*y) != *year) continue;
    out.push_back({fields[0], *pos, *value});
  }
  return out;
}

void write_binned_residuals_csv(const std::string& path,
                                const std::vector<ResidualBin>& bins) {
  std::ofstream out(path);
  if (!out) throw validation_error("cannot write " + path);
  out << "mean_predicted,mean_residual,count\n";
  for (const auto& b : bins)
    out << format_double(b.mean_predicted) << ',' << format_double(b.mean_residual)
        << ',' << b.count << "\n";
}

void write_covariate_bins_csv(const std::string& path,
                              const std::vector<CovariateBin>& bins) {
  std::ofstream out(path);
  if (!out) throw validation_error("cannot write " + path);
  out << "bin,mean_residual,count\n";
  for (const auto& b : bins)
    out << b.label << ',' << format_double(b.mean_residual) << ',' << b.count << "\n";
}

void write_ppc_report(const std::string& csv_path, const PpcBinnedReport& report) {
  std::ofstream out(csv_path);
  if (!out) throw validation_error("cannot write " + csv_path);
  out << "mean_predicted,mean_residual,count,envelope_lo,envelope_hi,inside\n";
  for (std::size_t b = 0; b < report.observed.size(); ++b) {
    const auto& bin = report.observed[b];
    const bool inside =
        bin.mean_residual >= report.lo[b] && bin.mean_residual <= report.hi[b];
    out << format_double(bin.mean_predicted) << ',' << format_double(bin.mean_residual)
        << ',' << bin.count << ',' << format_double(report.lo[b]) << ','
        << format_double(report.hi[b]) << ',' << (inside ? 1 : 0) << "\n";
  }
}

namespace {

json quantiles_json(std::vector<double> values) {
  json j;
  j["q025"] = percentile(values, 0.025);
  j["q25"] = percentile(values, 0.25);
  j["q50"] = percentile(values, 0.5);
  j["q75"] = percentile(values, 0.75);
  j["q975"] = percentile(values, 0.975);
  return j;
}

}  // namespace

void write_gap_ppc_json(const std::string& path, const GapPpcReport& report) {
  json j;
  j["observed_gap"] = report.observed_gap;
  j["top_n"] = report.top_n;
  j["n_sims"] = report.partial_gaps.size();
  j["pooled_quantiles"] = quantiles_json(report.pooled_gaps);
  j["partial_quantiles"] = quantiles_json(report.partial_gaps);
  std::ofstream out(path);
  if (!out) throw validation_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

void write_correlation_csv(const std::string& path, const CorrelationReport& report) {
  std::ofstream out(path);
  if (!out) throw validation_error("cannot write " + path);
  out << "position,n,r\n";
  for (const auto& [pos, cell] : report.per_position) {
    out << to_string(pos) << ',' << cell.n << ',';
    out << (cell.defined ? format_double(cell.r) : std::string("NA")) << "\n";
  }
  out << "Total," << report.total.n << ','
      << (report.total.defined ? format_double(report.total.r) : std::string("NA"))
      << "\n";
}

void write_convergence_csv(const std::string& path, const ConvergenceReport& report) {
  std::ofstream out(path);
  if (!out) throw validation_error("cannot write " + path);
  out << "param,rhat,ess,flagged,degenerate\n";
  for (const auto& p : report.params) {
    out << p.name << ',';
    out << (p.rhat_defined ? format_double(p.rhat) : std::string("NA")) << ',';
    out << (p.degenerate ? std::string("NA") : format_double(p.ess)) << ','
        << (p.flagged ? 1 : 0) << ',' << (p.degenerate ? 1 : 0) << "\n";
  }
  for (const auto& w : report.warnings) out << "#warning: " << w << "\n";
}

std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t seed) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error("cannot open " + path);
  std::uint64_t h = 14695981039346656037ull;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    const std::streamsize got = in.gcount();
    if (got > 0) h = fnv1a64(buf, static_cast<std::size_t>(got), h);
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace safe
