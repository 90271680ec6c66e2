#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "glmsim/dgp.hpp"
#include "glmsim/fit.hpp"
#include "glmsim/metrics.hpp"
#include "glmsim/model.hpp"

namespace glmsim {

inline constexpr std::string_view kVersion = "1.0.0";

// A likelihood level of the design. `transformed_normal` (family unset) stands for
// the transformed-normal family whose response transform matches the link it is
// crossed with.
struct FamilyLevel {
  std::optional<Family> family;

  static FamilyLevel transformed_normal() { return {}; }
  friend bool operator==(const FamilyLevel&, const FamilyLevel&) = default;
};

std::string to_string(const FamilyLevel& level);
FamilyLevel parse_family_level(std::string_view token);
// Concrete family for this level under `link`, or nullopt if the pair is not allowed.
std::optional<Family> resolve(const FamilyLevel& level, Link link);

struct SimConfig {
  Support domain = Support::unit_interval;
  std::vector<FamilyLevel> dgp_families;
  std::vector<Link> dgp_links;
  std::vector<ShapeKind> shapes;
  std::vector<Effect> effects;
  std::vector<FamilyLevel> fit_families;
  std::vector<Link> fit_links;
  std::vector<Formula> formulas;
  int replicates = 50;
  int n_obs = 100;
  FitMode fit_mode = FitMode::wald;
  McmcControls mcmc;  // seed is derived per fit
  std::uint64_t master_seed = 20240101;
  int workers = 0;  // 0: hardware concurrency
  std::filesystem::path output_path = "results.csv";
  bool keep_datasets = false;
};

// All factor levels of the design for the domain; 50 replicates, wald mode.
SimConfig default_config(Support domain);

// Throws ConfigError for an empty factor, a factor level outside the domain, or
// non-positive replicates / n_obs.
void validate(const SimConfig& config);

struct Cell {
  DgpConfig dgp;
  int replicate = 0;
  std::uint64_t seed = 0;
};

struct Job {
  DgpConfig dgp;
  ModelSpec spec;
  int replicate = 0;
  std::uint64_t seed = 0;
};

// seed = stable_hash(master_seed, "<descriptor>#<replicate>").
std::uint64_t cell_seed(std::uint64_t master_seed, const DgpConfig& dgp, int replicate);

// Fit configurations crossed with every dataset, in deterministic order; the
// normal+identity baseline is appended for each formula if not already present.
std::vector<ModelSpec> fit_specs(const SimConfig& config);
// (DgpConfig, replicate) cells in deterministic order.
std::vector<Cell> cells(const SimConfig& config);
std::uint64_t count_cells(const SimConfig& config);
std::uint64_t count_jobs(const SimConfig& config);
// Materialized cells x specs; throws ConfigError when empty.
std::vector<Job> expand_grid(const SimConfig& config);

// Worker count after applying the GLMSIM_WORKERS override.
int effective_workers(int requested);

struct RunOptions {
  // Stop (as if killed) after this many cells have been journaled; the results
  // table is not written. For interruption tests.
  std::optional<std::uint64_t> stop_after_cells;
  std::function<void(std::uint64_t done, std::uint64_t total)> progress;
};

struct RunSummary {
  std::uint64_t n_cells = 0;
  std::uint64_t n_jobs = 0;
  std::uint64_t n_errors = 0;
  std::uint64_t n_nonconverged = 0;
  std::uint64_t resumed_cells = 0;
  bool completed = false;
  // (fit family, fit link) -> {non-converged, total}
  std::map<std::pair<std::string, std::string>, std::pair<std::uint64_t, std::uint64_t>>
      nonconvergence;
  double wall_seconds = 0.0;
};

// Runs every job, journaling completed cells to "<out>.journal" and resuming from it.
// On completion writes the results CSV (cell order) and "<out>.manifest.json", then
// removes the journal. Throws std::runtime_error on I/O failure.
RunSummary run(const SimConfig& config, const RunOptions& options = {});

std::filesystem::path journal_path(const std::filesystem::path& out);
std::filesystem::path manifest_path(const std::filesystem::path& out);

// Results table I/O.
inline constexpr std::string_view kResultsHeader =
    "domain,dgp_family,dgp_shape,dgp_link,effect,fit_family,fit_link,formula,replicate,seed,"
    "mode,converged,bias,abs_bias,rmse,sig50,sig80,sig90,sig95,error";
std::string to_csv_row(const CellRecord& record);
CellRecord parse_csv_row(std::string_view line);
void write_results(std::ostream& os, const std::vector<CellRecord>& records);
std::vector<CellRecord> read_results(std::istream& is);
std::vector<CellRecord> read_results(const std::filesystem::path& path);

nlohmann::json to_json(const SimConfig& config);
std::string summary_text(const RunSummary& summary);

// Plain string table used by aggregation output.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
void write_csv(std::ostream& os, const Table& table);

// Grouping keys are results-table column names among domain, dgp_family, dgp_shape,
// dgp_link, effect, fit_family, fit_link, formula, mode. Per group: counts, median and
// central 95% range of rmse and abs_bias (same-link converged fits only), fpr/tpr per
// level, auc. Throws InputError for an empty table or unknown key.
Table aggregate(const std::vector<CellRecord>& records, const std::vector<std::string>& keys);

// Marginal ("conditional effect") table: auc per fine cell (all design factors),
// then mean and median over the cells sharing the given keys.
Table conditional_auc(const std::vector<CellRecord>& records, const std::vector<std::string>& keys);

// ROC points per (domain, dgp_family, dgp_link, fit_family, fit_link).
Table roc_table(const std::vector<CellRecord>& records);

// Non-convergence share per (fit_family, fit_link).
Table convergence_table(const std::vector<CellRecord>& records);

// Writes the report tables into `dir` (created if missing); returns the file names.
std::vector<std::string> report(const std::vector<CellRecord>& records,
                                const std::filesystem::path& dir);

}  // namespace glmsim
