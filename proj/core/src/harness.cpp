#include "glmsim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <nlohmann/json.hpp>
#include <sstream>
#include <thread>

#include "glmsim/diagnostics.hpp"
#include "glmsim/error.hpp"
#include "glmsim/format.hpp"
#include "glmsim/rng.hpp"

namespace glmsim {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kTransformedNormal = "transformed_normal";

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string sanitize(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ';';
  }
  return s;
}

bool in_domain(Link link, Support domain) {
  return link_domain(link) == domain || link == Link::identity;
}

}  // namespace

std::string to_string(const FamilyLevel& level) {
  return level.family ? std::string(to_string(*level.family)) : std::string(kTransformedNormal);
}

FamilyLevel parse_family_level(std::string_view token) {
  if (token == kTransformedNormal) return FamilyLevel::transformed_normal();
  return FamilyLevel{parse_family(token)};
}

std::optional<Family> resolve(const FamilyLevel& level, Link link) {
  if (!level.family) {
    auto f = transformed_normal_for(link);
    if (f && compatible(*f, link)) return f;
    return std::nullopt;
  }
  if (!compatible(*level.family, link)) return std::nullopt;
  return level.family;
}

SimConfig default_config(Support domain) {
  SimConfig c;
  c.domain = domain;
  const auto tn = FamilyLevel::transformed_normal();
  if (domain == Support::unit_interval) {
    c.dgp_families = {{Family::beta}, {Family::kumaraswamy}, {Family::simplex}, tn};
    c.dgp_links = {Link::logit, Link::cauchit, Link::cloglog};
    c.shapes = {kUnitShapes.begin(), kUnitShapes.end()};
  } else if (domain == Support::positive) {
    c.dgp_families = {{Family::gamma}, {Family::weibull},    tn,
                      {Family::frechet}, {Family::beta_prime}, {Family::gompertz}};
    c.dgp_links = {Link::log, Link::softplus};
    c.shapes = {kPositiveShapes.begin(), kPositiveShapes.end()};
  } else {
    throw ConfigError("domain must be unit or positive");
  }
  c.effects = {Effect::zero, Effect::positive};
  c.fit_families = c.dgp_families;
  c.fit_families.push_back({Family::normal});
  c.fit_links = c.dgp_links;
  c.fit_links.push_back(Link::identity);
  c.formulas = {kAllFormulas.begin(), kAllFormulas.end()};
  return c;
}

void validate(const SimConfig& c) {
  if (c.domain == Support::real) throw ConfigError("domain must be unit or positive");
  if (c.dgp_families.empty() || c.dgp_links.empty() || c.shapes.empty() || c.effects.empty() ||
      c.fit_families.empty() || c.fit_links.empty() || c.formulas.empty()) {
    throw ConfigError("every factor needs at least one level");
  }
  if (c.replicates < 1) throw ConfigError("replicates must be positive");
  if (c.n_obs < 10) throw ConfigError("n_obs must be at least 10");
  for (Link l : c.dgp_links) {
    if (link_domain(l) != c.domain) {
      throw ConfigError("data link '" + std::string(to_string(l)) + "' is outside the domain");
    }
  }
  for (Link l : c.fit_links) {
    if (!in_domain(l, c.domain)) {
      throw ConfigError("fit link '" + std::string(to_string(l)) + "' is outside the domain");
    }
  }
  for (ShapeKind s : c.shapes) {
    if (shape_support(s) != c.domain) {
      throw ConfigError("shape '" + std::string(to_string(s)) + "' is outside the domain");
    }
  }
  for (const auto& f : c.dgp_families) {
    if (f.family && (*f.family == Family::normal || family_support(*f.family) != c.domain)) {
      throw ConfigError("data family '" + to_string(f) + "' is outside the domain");
    }
  }
  for (const auto& f : c.fit_families) {
    if (f.family && *f.family != Family::normal && family_support(*f.family) != c.domain) {
      throw ConfigError("fit family '" + to_string(f) + "' is outside the domain");
    }
  }
  if (c.fit_mode == FitMode::mcmc && (c.mcmc.chains < 1 || c.mcmc.draws < 1)) {
    throw ConfigError("mcmc needs at least one chain and one draw");
  }
}

std::uint64_t cell_seed(std::uint64_t master_seed, const DgpConfig& dgp, int replicate) {
  return stable_hash(master_seed, dgp.descriptor() + "#" + std::to_string(replicate));
}

std::vector<ModelSpec> fit_specs(const SimConfig& c) {
  std::vector<ModelSpec> specs;
  for (const auto& level : c.fit_families) {
    for (Link link : c.fit_links) {
      const auto family = resolve(level, link);
      if (!family) continue;
      // identity is reserved for the normal baseline
      if (link == Link::identity && *family != Family::normal) continue;
      for (Formula f : c.formulas) {
        const ModelSpec s{*family, link, f};
        if (std::find(specs.begin(), specs.end(), s) == specs.end()) specs.push_back(s);
      }
    }
  }
  for (Formula f : c.formulas) {
    const ModelSpec baseline{Family::normal, Link::identity, f};
    if (std::find(specs.begin(), specs.end(), baseline) == specs.end()) specs.push_back(baseline);
  }
  return specs;
}

namespace {

std::vector<std::pair<Family, Link>> dgp_pairs(const SimConfig& c) {
  std::vector<std::pair<Family, Link>> out;
  for (const auto& level : c.dgp_families) {
    for (Link link : c.dgp_links) {
      if (auto f = resolve(level, link)) out.emplace_back(*f, link);
    }
  }
  return out;
}

}  // namespace

std::vector<Cell> cells(const SimConfig& c) {
  std::vector<Cell> out;
  for (const auto& [family, link] : dgp_pairs(c)) {
    for (ShapeKind shape : c.shapes) {
      for (Effect effect : c.effects) {
        DgpConfig dgp = make_dgp_config(family, shape, link, effect);
        dgp.n_obs = c.n_obs;
        for (int r = 0; r < c.replicates; ++r) {
          out.push_back({dgp, r, cell_seed(c.master_seed, dgp, r)});
        }
      }
    }
  }
  return out;
}

std::uint64_t count_cells(const SimConfig& c) {
  return static_cast<std::uint64_t>(dgp_pairs(c).size()) * c.shapes.size() * c.effects.size() *
         static_cast<std::uint64_t>(c.replicates);
}

std::uint64_t count_jobs(const SimConfig& c) { return count_cells(c) * fit_specs(c).size(); }

std::vector<Job> expand_grid(const SimConfig& c) {
  validate(c);
  const auto specs = fit_specs(c);
  std::vector<Job> jobs;
  for (const auto& cell : cells(c)) {
    for (const auto& s : specs) jobs.push_back({cell.dgp, s, cell.replicate, cell.seed});
  }
  if (jobs.empty()) throw ConfigError("the configured grid is empty");
  return jobs;
}

int effective_workers(int requested) {
  if (const char* env = std::getenv("GLMSIM_WORKERS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
  }
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

fs::path journal_path(const fs::path& out) { return fs::path(out.string() + ".journal"); }
fs::path manifest_path(const fs::path& out) { return fs::path(out.string() + ".manifest.json"); }

// ---- results rows ---------------------------------------------------------------

std::string to_csv_row(const CellRecord& r) {
  std::string s;
  auto add = [&s](std::string_view v) {
    if (!s.empty()) s += ',';
    s += v;
  };
  add(to_string(r.domain));
  add(to_string(r.dgp_family));
  add(to_string(r.dgp_shape));
  add(to_string(r.dgp_link));
  add(to_string(r.effect));
  add(to_string(r.model.family));
  add(to_string(r.model.link));
  add(to_string(r.model.formula));
  add(std::to_string(r.replicate));
  add(std::to_string(r.seed));
  add(to_string(r.mode));
  add(r.converged ? "1" : "0");
  add(format_double(r.bias));
  add(format_double(r.abs_bias));
  add(format_double(r.rmse));
  for (bool b : r.significant) add(b ? "1" : "0");
  s += ',';
  s += sanitize(r.error);
  return s;
}

CellRecord parse_csv_row(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const auto f = split(line, ',');
  if (f.size() != 20) {
    throw InputError("results row has " + std::to_string(f.size()) + " fields, expected 20");
  }
  auto flag = [](std::string_view v) {
    if (v == "1") return true;
    if (v == "0") return false;
    throw InputError("expected 0/1, got '" + std::string(v) + "'");
  };
  CellRecord r;
  const std::string domain(f[0]);
  if (domain == "unit") r.domain = Support::unit_interval;
  else if (domain == "positive") r.domain = Support::positive;
  else throw InputError("unknown domain '" + domain + "'");
  r.dgp_family = parse_family(f[1]);
  r.dgp_shape = parse_shape(f[2]);
  r.dgp_link = parse_link(f[3]);
  r.effect = parse_effect(f[4]);
  r.model = {parse_family(f[5]), parse_link(f[6]), parse_formula(f[7])};
  r.replicate = std::stoi(std::string(f[8]));
  r.seed = std::stoull(std::string(f[9]));
  r.mode = parse_fit_mode(f[10]);
  r.converged = flag(f[11]);
  r.bias = parse_double(f[12]);
  r.abs_bias = parse_double(f[13]);
  r.rmse = parse_double(f[14]);
  for (std::size_t l = 0; l < 4; ++l) r.significant[l] = flag(f[15 + l]);
  r.error = std::string(f[19]);
  return r;
}

void write_results(std::ostream& os, const std::vector<CellRecord>& records) {
  os << kResultsHeader << '\n';
  for (const auto& r : records) os << to_csv_row(r) << '\n';
}

std::vector<CellRecord> read_results(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InputError("results table is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kResultsHeader) throw InputError("unexpected results header");
  std::vector<CellRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    out.push_back(parse_csv_row(line));
  }
  return out;
}

std::vector<CellRecord> read_results(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_results(in);
}

// ---- config serialization ------------------------------------------------------

nlohmann::json to_json(const SimConfig& c) {
  using nlohmann::json;
  auto names = [](const auto& xs) {
    json a = json::array();
    for (const auto& x : xs) a.push_back(std::string(to_string(x)));
    return a;
  };
  return json{{"domain", to_string(c.domain)},
              {"dgp_families", names(c.dgp_families)},
              {"dgp_links", names(c.dgp_links)},
              {"shapes", names(c.shapes)},
              {"effects", names(c.effects)},
              {"fit_families", names(c.fit_families)},
              {"fit_links", names(c.fit_links)},
              {"formulas", names(c.formulas)},
              {"replicates", c.replicates},
              {"n_obs", c.n_obs},
              {"fit_mode", to_string(c.fit_mode)},
              {"mcmc", {{"chains", c.mcmc.chains}, {"warmup", c.mcmc.warmup}, {"draws", c.mcmc.draws}}},
              {"master_seed", c.master_seed},
              {"positive_effect", kPositiveEffect}};
}

// ---- run -----------------------------------------------------------------------

namespace {

std::vector<CellRecord> run_cell(const SimConfig& config, const std::vector<ModelSpec>& specs,
                                 const Cell& cell, std::uint64_t index) {
  std::vector<CellRecord> out;
  out.reserve(specs.size());
  Dataset data;
  try {
    data = generate(cell.dgp, cell.seed);
  } catch (const std::exception& e) {
    for (const auto& s : specs) {
      out.push_back(make_error_record(cell.dgp, s, cell.replicate, cell.seed, config.fit_mode,
                                      std::string("generation: ") + e.what()));
    }
    return out;
  }
  if (config.keep_datasets) {
    const fs::path dir(config.output_path.string() + ".datasets");
    fs::create_directories(dir);
    const std::string stem = "cell" + std::to_string(index);
    std::ofstream csv(dir / (stem + ".csv"));
    write_csv(csv, data);
    std::ofstream meta(dir / (stem + ".json"));
    meta << dataset_metadata(data).dump(2) << '\n';
  }
  for (const auto& s : specs) {
    try {
      FitResult fit;
      if (config.fit_mode == FitMode::wald) {
        fit = fit_mle(s, data);
      } else {
        McmcControls mc = config.mcmc;
        mc.seed = stable_hash(cell.seed, describe(s));
        fit = fit_mcmc(s, data, mc);
      }
      out.push_back(make_cell_record(cell.dgp, cell.replicate, cell.seed, fit));
    } catch (const std::exception& e) {
      out.push_back(
          make_error_record(cell.dgp, s, cell.replicate, cell.seed, config.fit_mode, e.what()));
    }
  }
  return out;
}

std::string journal_header(const SimConfig& c) {
  return "H," + std::to_string(stable_hash(0, to_json(c).dump()));
}

// Complete journal blocks keyed by cell index. A trailing partial block is dropped.
std::map<std::uint64_t, std::vector<CellRecord>> load_journal(const fs::path& path,
                                                              const std::string& header) {
  std::map<std::uint64_t, std::vector<CellRecord>> done;
  std::ifstream in(path);
  if (!in) return done;
  std::string line;
  if (!std::getline(in, line)) return done;
  if (line != header) {
    throw ConfigError("journal " + path.string() +
                      " belongs to a different configuration; remove it to start over");
  }
  while (std::getline(in, line)) {
    const auto f = split(line, ',');
    if (f.size() != 3 || f[0] != "J") break;
    const std::uint64_t cell = std::stoull(std::string(f[1]));
    const std::size_t n = std::stoull(std::string(f[2]));
    std::vector<CellRecord> recs;
    bool ok = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::getline(in, line)) {
        ok = false;
        break;
      }
      try {
        recs.push_back(parse_csv_row(line));
      } catch (const std::exception&) {
        ok = false;
        break;
      }
    }
    if (!ok || !std::getline(in, line) || line != "E," + std::to_string(cell)) break;
    done[cell] = std::move(recs);
  }
  return done;
}

void write_block(std::ostream& os, std::uint64_t cell, const std::vector<CellRecord>& recs) {
  os << "J," << cell << ',' << recs.size() << '\n';
  for (const auto& r : recs) os << to_csv_row(r) << '\n';
  os << "E," << cell << '\n';
}

void write_atomically(const fs::path& path, const std::string& content) {
  const fs::path tmp(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace

RunSummary run(const SimConfig& config, const RunOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  validate(config);
  const auto specs = fit_specs(config);
  const auto all_cells = cells(config);
  if (all_cells.empty() || specs.empty()) throw ConfigError("the configured grid is empty");
  if (config.output_path.has_parent_path()) fs::create_directories(config.output_path.parent_path());

  const std::string header = journal_header(config);
  const fs::path jpath = journal_path(config.output_path);
  auto done = load_journal(jpath, header);

  std::vector<std::vector<CellRecord>> results(all_cells.size());
  std::vector<char> have(all_cells.size(), 0);
  {
    // Rewrite the journal with complete blocks only, so appends stay well formed.
    std::ostringstream clean;
    clean << header << '\n';
    for (auto& [cell, recs] : done) {
      if (cell >= all_cells.size()) continue;
      write_block(clean, cell, recs);
      results[cell] = std::move(recs);
      have[cell] = 1;
    }
    write_atomically(jpath, clean.str());
  }

  RunSummary summary;
  summary.n_cells = all_cells.size();
  summary.n_jobs = all_cells.size() * specs.size();
  std::uint64_t journaled = 0;
  for (char h : have) journaled += h ? 1 : 0;
  summary.resumed_cells = journaled;

  std::ofstream journal(jpath, std::ios::app);
  if (!journal) throw std::runtime_error("cannot open journal " + jpath.string());

  std::mutex sink;
  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> stop{options.stop_after_cells && journaled >= *options.stop_after_cells};
  std::atomic<bool> io_failed{false};

  auto worker = [&] {
    while (!stop.load()) {
      const std::uint64_t i = next.fetch_add(1);
      if (i >= all_cells.size()) return;
      if (have[i]) continue;
      auto recs = run_cell(config, specs, all_cells[i], i);
      std::lock_guard<std::mutex> lock(sink);
      if (stop.load()) return;
      write_block(journal, i, recs);
      journal.flush();
      if (!journal) {
        io_failed = true;
        stop = true;
        return;
      }
      results[i] = std::move(recs);
      have[i] = 1;
      ++journaled;
      if (options.progress) options.progress(journaled, all_cells.size());
      if (options.stop_after_cells && journaled >= *options.stop_after_cells) stop = true;
    }
  };

  const int n_workers = std::min<int>(effective_workers(config.workers),
                                      static_cast<int>(all_cells.size()));
  std::vector<std::thread> pool;
  for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  journal.close();
  if (io_failed) throw std::runtime_error("write to journal " + jpath.string() + " failed");

  for (const auto& recs : results) {
    for (const auto& r : recs) {
      if (!r.error.empty()) ++summary.n_errors;
      const bool ok = r.error.empty() && r.converged;
      if (!ok) ++summary.n_nonconverged;
      auto& slot = summary.nonconvergence[{std::string(to_string(r.model.family)),
                                           std::string(to_string(r.model.link))}];
      slot.first += ok ? 0 : 1;
      slot.second += 1;
    }
  }
  summary.completed = std::all_of(have.begin(), have.end(), [](char h) { return h != 0; });
  if (summary.completed) {
    std::ostringstream table;
    table << kResultsHeader << '\n';
    for (const auto& recs : results) {
      for (const auto& r : recs) table << to_csv_row(r) << '\n';
    }
    write_atomically(config.output_path, table.str());
    nlohmann::json manifest{{"version", kVersion},
                            {"config", to_json(config)},
                            {"workers", config.workers},
                            {"keep_datasets", config.keep_datasets},
                            {"n_cells", summary.n_cells},
                            {"n_specs", specs.size()},
                            {"n_jobs", summary.n_jobs},
                            {"n_errors", summary.n_errors},
                            {"n_nonconverged", summary.n_nonconverged},
                            {"columns", kResultsHeader}};
    write_atomically(manifest_path(config.output_path), manifest.dump(2) + "\n");
    fs::remove(jpath);
  }
  summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return summary;
}

std::string summary_text(const RunSummary& s) {
  std::ostringstream os;
  os << "cells " << s.n_cells << ", jobs " << s.n_jobs << ", errors " << s.n_errors
     << ", non-converged " << s.n_nonconverged;
  if (s.resumed_cells) os << ", resumed cells " << s.resumed_cells;
  char secs[32];
  std::snprintf(secs, sizeof secs, "%.1f", s.wall_seconds);
  os << ", " << secs << " s\n";
  os << "non-convergence by fit family/link:\n";
  for (const auto& [key, counts] : s.nonconvergence) {
    if (counts.first == 0) continue;
    char share[32];
    std::snprintf(share, sizeof share, "%.3f", static_cast<double>(counts.first) / counts.second);
    os << "  " << key.first << '+' << key.second << ": " << counts.first << '/' << counts.second
       << " (" << share << ")\n";
  }
  return os.str();
}

// ---- aggregation ----------------------------------------------------------------

void write_csv(std::ostream& os, const Table& t) {
  auto line = [&os](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
}

namespace {

const std::vector<std::string> kGroupKeys = {"domain",   "dgp_family", "dgp_shape",
                                             "dgp_link", "effect",     "fit_family",
                                             "fit_link", "formula",    "mode"};

std::string key_value(const CellRecord& r, const std::string& key) {
  if (key == "domain") return std::string(to_string(r.domain));
  if (key == "dgp_family") return std::string(to_string(r.dgp_family));
  if (key == "dgp_shape") return std::string(to_string(r.dgp_shape));
  if (key == "dgp_link") return std::string(to_string(r.dgp_link));
  if (key == "effect") return std::string(to_string(r.effect));
  if (key == "fit_family") return std::string(to_string(r.model.family));
  if (key == "fit_link") return std::string(to_string(r.model.link));
  if (key == "formula") return std::string(to_string(r.model.formula));
  if (key == "mode") return std::string(to_string(r.mode));
  throw InputError("unknown grouping key '" + key + "'");
}

using Groups = std::map<std::vector<std::string>, std::vector<CellRecord>>;

Groups group_by(const std::vector<CellRecord>& records, const std::vector<std::string>& keys) {
  for (const auto& k : keys) {
    if (std::find(kGroupKeys.begin(), kGroupKeys.end(), k) == kGroupKeys.end()) {
      throw InputError("unknown grouping key '" + k + "'");
    }
  }
  Groups g;
  for (const auto& r : records) {
    std::vector<std::string> v;
    for (const auto& k : keys) v.push_back(key_value(r, k));
    g[v].push_back(r);
  }
  return g;
}

std::string level_tag(double level) {
  return std::to_string(static_cast<int>(std::lround(level * 100)));
}

// median, 2.5% and 97.5% quantiles, or NA when empty.
std::array<std::string, 3> central95(const std::vector<double>& v) {
  if (v.empty()) return {"NA", "NA", "NA"};
  return {format_double(quantile_type7(v, 0.5)), format_double(quantile_type7(v, 0.025)),
          format_double(quantile_type7(v, 0.975))};
}

}  // namespace

Table aggregate(const std::vector<CellRecord>& records, const std::vector<std::string>& keys) {
  if (records.empty()) throw InputError("aggregate: empty results table");
  Table t;
  t.header = keys;
  for (const char* c : {"n", "n_converged", "n_error", "n_same_link", "rmse_median", "rmse_lo",
                        "rmse_hi", "abs_bias_median", "abs_bias_lo", "abs_bias_hi"}) {
    t.header.emplace_back(c);
  }
  for (double l : kIntervalLevels) {
    t.header.push_back("fpr" + level_tag(l));
    t.header.push_back("tpr" + level_tag(l));
  }
  t.header.emplace_back("auc");

  for (const auto& [key, recs] : group_by(records, keys)) {
    std::vector<std::string> row = key;
    std::size_t n_conv = 0, n_err = 0;
    std::vector<double> rm, ab;
    for (const auto& r : recs) {
      if (!r.error.empty()) ++n_err;
      if (!r.converged || !r.error.empty()) continue;
      ++n_conv;
      // Only same-link fits carry bias/rmse; cross-link values are never pooled.
      if (r.model.link == r.dgp_link && std::isfinite(r.rmse)) {
        rm.push_back(r.rmse);
        ab.push_back(r.abs_bias);
      }
    }
    row.push_back(std::to_string(recs.size()));
    row.push_back(std::to_string(n_conv));
    row.push_back(std::to_string(n_err));
    row.push_back(std::to_string(rm.size()));
    for (const auto& s : central95(rm)) row.push_back(s);
    for (const auto& s : central95(ab)) row.push_back(s);
    for (double l : kIntervalLevels) {
      const ErrorRates er = error_rates(recs, l);
      row.push_back(format_double(er.fpr));
      row.push_back(format_double(er.tpr));
    }
    row.push_back(format_double(roc_and_auc(recs).auc));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table conditional_auc(const std::vector<CellRecord>& records,
                      const std::vector<std::string>& keys) {
  if (records.empty()) throw InputError("conditional_auc: empty results table");
  const std::vector<std::string> fine = {"domain",     "dgp_family", "dgp_shape", "dgp_link",
                                         "fit_family", "fit_link",   "formula",   "mode"};
  std::map<std::vector<std::string>, std::vector<double>> marg;
  for (const auto& [cell, recs] : group_by(records, fine)) {
    std::vector<std::string> k;
    for (const auto& key : keys) k.push_back(key_value(recs.front(), key));
    auto& v = marg[k];
    const double auc = roc_and_auc(recs).auc;
    if (std::isfinite(auc)) v.push_back(auc);
  }
  Table t;
  t.header = keys;
  for (const char* c : {"n_cells", "auc_mean", "auc_median"}) t.header.emplace_back(c);
  for (const auto& [k, v] : marg) {
    std::vector<std::string> row = k;
    row.push_back(std::to_string(v.size()));
    if (v.empty()) {
      row.insert(row.end(), {"NA", "NA"});
    } else {
      double s = 0.0;
      for (double a : v) s += a;
      row.push_back(format_double(s / static_cast<double>(v.size())));
      row.push_back(format_double(quantile_type7(v, 0.5)));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table roc_table(const std::vector<CellRecord>& records) {
  const std::vector<std::string> keys = {"domain", "dgp_family", "dgp_link", "fit_family",
                                         "fit_link"};
  Table t;
  t.header = keys;
  for (const char* c : {"level", "fpr", "tpr", "auc"}) t.header.emplace_back(c);
  for (const auto& [key, recs] : group_by(records, keys)) {
    const Roc roc = roc_and_auc(recs);
    for (const auto& p : roc.points) {
      std::vector<std::string> row = key;
      row.push_back(level_tag(p.level));
      row.push_back(format_double(p.fpr));
      row.push_back(format_double(p.tpr));
      row.push_back(format_double(roc.auc));
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

Table convergence_table(const std::vector<CellRecord>& records) {
  const std::vector<std::string> keys = {"fit_family", "fit_link"};
  Table t;
  t.header = keys;
  for (const char* c : {"n", "n_nonconverged", "n_error", "share_nonconverged"}) {
    t.header.emplace_back(c);
  }
  for (const auto& [key, recs] : group_by(records, keys)) {
    std::size_t bad = 0, err = 0;
    for (const auto& r : recs) {
      if (!r.error.empty()) ++err;
      if (!r.converged || !r.error.empty()) ++bad;
    }
    std::vector<std::string> row = key;
    row.push_back(std::to_string(recs.size()));
    row.push_back(std::to_string(bad));
    row.push_back(std::to_string(err));
    row.push_back(format_double(static_cast<double>(bad) / static_cast<double>(recs.size())));
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<std::string> report(const std::vector<CellRecord>& records, const fs::path& dir) {
  if (records.empty()) throw InputError("report: empty results table");
  fs::create_directories(dir);
  const std::vector<std::pair<std::string, Table>> tables = {
      {"rmse_by_family_shape.csv",
       aggregate(records, {"domain", "dgp_family", "dgp_shape", "fit_family", "fit_link"})},
      {"error_rates_by_fit.csv", aggregate(records, {"domain", "fit_family", "fit_link"})},
      {"roc_points.csv", roc_table(records)},
      {"auc_data_family_x_fit_family.csv", conditional_auc(records, {"dgp_family", "fit_family"})},
      {"auc_data_link_x_fit_link.csv", conditional_auc(records, {"dgp_link", "fit_link"})},
      {"convergence.csv", convergence_table(records)},
  };
  std::vector<std::string> names;
  for (const auto& [name, table] : tables) {
    std::ofstream out(dir / name);
    write_csv(out, table);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    names.push_back(name);
  }
  return names;
}

}  // namespace glmsim
