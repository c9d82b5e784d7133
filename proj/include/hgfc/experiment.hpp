#ifndef HGFC_EXPERIMENT_HPP
#define HGFC_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hgfc/model.hpp"

namespace hgfc {

// Deterministic generator independent of the standard library's
// distribution implementations, so outputs are bit-identical everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);  // inclusive
  double uniform_real(double lo, double hi);
  // Geometric inter-arrival count with the given mean (Poisson-like arrivals).
  std::int64_t geometric(double mean);

 private:
  std::uint64_t state_;
};

struct FamilyConfig {
  std::string kind = "linear";  // linear | power | poly2 | log
  double k = 2.0;               // power exponent
  double rho_lo = 0.5, rho_hi = 5.0;
  double coeff_lo = 0.1, coeff_hi = 2.0;  // poly2 coefficient range (unscaled)
  bool shifted = false;                   // g(r_j) = 0 via a release shift
};

struct ExperimentConfig {
  std::string algorithm = "hdf";  // hdf | alg2 | alg3 | hrdf
  std::string benchmark = "oracle";  // oracle | lp | brute
  FamilyConfig family;
  int n_jobs = 4;
  int n_machines = 1;
  double delta = 1.0;
  double epsilon = 1.0;
  std::uint64_t seed = 1;
  int trials = 1;
  int threads = 1;
  std::int64_t length_lo = 1, length_hi = 4;
  double release_mean_gap = 1.0;
  std::optional<std::string> explicit_instance;  // JSON passthrough

  std::string to_json() const;
  static ExperimentConfig from_json(const std::string& text);
  static ExperimentConfig load(const std::string& path);
};

Instance gen_instance(const ExperimentConfig& config, int trial);

struct TrialOutcome {
  int trial = 0;
  bool pass = true;
  std::vector<std::string> failures;
  std::string summary_row;   // CSV line
  std::string report_json;
  std::vector<std::string> ledger_lines;  // JSONL
};

struct ExperimentResult {
  std::vector<TrialOutcome> trials;
  int failures = 0;
};

// Runs all trials (worker pool, merged by trial index), writes the bundle
// (instances, ledger.jsonl, report.json, summary.csv, plot CSVs) under
// out_dir and returns the outcomes. out_dir empty = no files.
ExperimentResult run_experiment(const ExperimentConfig& config, const std::string& out_dir);

// Re-derives the checks of an existing bundle from its files alone.
// Returns the number of failed trials.
int verify_bundle(const std::string& out_dir);

}  // namespace hgfc

#endif
