// glmsim: simulate / aggregate / report front end.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "glmsim/error.hpp"
#include "glmsim/harness.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 1, kPartial = 2 };

std::vector<std::string> split_keys(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T, class Parse>
std::vector<T> parse_all(const std::vector<std::string>& tokens, Parse parse) {
  std::vector<T> out;
  for (const auto& tok : tokens) {
    for (const auto& t : split_keys(tok)) out.push_back(parse(t));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace glmsim;
  CLI::App app{"GLM likelihood/link misspecification simulation lab"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "run the crossed simulation grid");
  std::string domain = "unit", mode = "wald", out = "results.csv";
  std::vector<std::string> dgp_families, dgp_links, shapes, effects, fit_families, fit_links,
      formulas;
  int replicates = 50, workers = 0, n_obs = 100;
  std::uint64_t seed = 20240101;
  bool keep = false, quiet = false;
  sim->add_option("--domain", domain, "unit | positive")->check(CLI::IsMember({"unit", "positive"}));
  sim->add_option("--dgp-families", dgp_families, "data likelihoods (transformed_normal allowed)");
  sim->add_option("--dgp-links", dgp_links);
  sim->add_option("--shapes", shapes);
  sim->add_option("--effects", effects, "zero, positive");
  sim->add_option("--fit-families", fit_families);
  sim->add_option("--fit-links", fit_links);
  sim->add_option("--formulas", formulas, "ideal, omit_z2, include_z3");
  sim->add_option("--fit-mode", mode)->check(CLI::IsMember({"wald", "mcmc"}));
  sim->add_option("--replicates", replicates);
  sim->add_option("--n-obs", n_obs);
  sim->add_option("--seed", seed, "master seed");
  sim->add_option("--workers", workers, "0 = all cores; GLMSIM_WORKERS overrides");
  sim->add_option("--out", out, "results CSV path");
  sim->add_flag("--keep-datasets", keep, "write each simulated dataset next to the results");
  sim->add_flag("--quiet", quiet);

  // aggregate
  auto* agg = app.add_subcommand("aggregate", "summary table grouped by result columns");
  std::string agg_in, agg_by = "dgp_family,fit_family,fit_link", agg_out;
  agg->add_option("--in", agg_in)->required();
  agg->add_option("--by", agg_by, "comma-separated grouping columns");
  agg->add_option("--out", agg_out)->required();

  // report
  auto* rep = app.add_subcommand("report", "ROC points and summary tables");
  std::string rep_in, rep_out;
  rep->add_option("--in", rep_in)->required();
  rep->add_option("--out", rep_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*sim) {
      SimConfig c = default_config(domain == "unit" ? Support::unit_interval : Support::positive);
      if (!dgp_families.empty()) c.dgp_families = parse_all<FamilyLevel>(dgp_families, parse_family_level);
      if (!dgp_links.empty()) c.dgp_links = parse_all<Link>(dgp_links, parse_link);
      if (!shapes.empty()) c.shapes = parse_all<ShapeKind>(shapes, parse_shape);
      if (!effects.empty()) c.effects = parse_all<Effect>(effects, parse_effect);
      if (!fit_families.empty()) c.fit_families = parse_all<FamilyLevel>(fit_families, parse_family_level);
      if (!fit_links.empty()) c.fit_links = parse_all<Link>(fit_links, parse_link);
      if (!formulas.empty()) c.formulas = parse_all<Formula>(formulas, parse_formula);
      c.fit_mode = parse_fit_mode(mode);
      c.replicates = replicates;
      c.n_obs = n_obs;
      c.master_seed = seed;
      c.workers = workers;
      c.output_path = out;
      c.keep_datasets = keep;
      validate(c);

      RunOptions opts;
      if (!quiet) {
        opts.progress = [](std::uint64_t done, std::uint64_t total) {
          if (done == total || done % 50 == 0) std::cerr << "\r" << done << "/" << total << " cells" << std::flush;
        };
      }
      std::cerr << count_jobs(c) << " jobs on " << effective_workers(c.workers) << " workers\n";
      const RunSummary s = run(c, opts);
      if (!quiet) std::cerr << '\n';
      std::cout << summary_text(s);
      return s.n_errors > 0 ? kPartial : kOk;
    }
    if (*agg) {
      const auto records = read_results(agg_in);
      const Table t = aggregate(records, split_keys(agg_by));
      std::ofstream os(agg_out);
      write_csv(os, t);
      if (!os) throw std::runtime_error("cannot write " + agg_out);
      return kOk;
    }
    if (*rep) {
      const auto records = read_results(rep_in);
      for (const auto& name : report(records, rep_out)) std::cout << rep_out << "/" << name << '\n';
      return kOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfig;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kPartial;
  }
  return kOk;
}
