#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hup/geometry.hpp"

// Experiment configs, suites and report files behind the hup-lab tool.
namespace hup::lab {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// key -> value text, one section of a config file.
class Params {
 public:
  Params() = default;
  explicit Params(std::map<std::string, std::string> values) : values_(std::move(values)) {}

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::string& text(const std::string& key) const;
  int get_int(const std::string& key) const;
  double get_double(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key) const;  // comma separated
  std::vector<int> get_ints(const std::string& key) const;
  std::vector<std::string> get_words(const std::string& key) const;
  /// "disk cx cy r", "rectangle x0 y0 x1 y1", "half_annulus cx cy r_in r_out", "empty"
  geometry::RegionSpec get_region(const std::string& key) const;

  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

/// Parsed config file:
///   [run]        kind, seed, out, jobs, csv
///   [params]     experiment parameters
///   [tolerances] positive numbers
struct RunConfig {
  std::string kind;
  std::uint64_t seed = 20240917;
  std::optional<std::filesystem::path> out;
  int jobs = 1;
  bool csv = false;  // CSV sidecars next to the report
  Params params;
  std::map<std::string, double> tolerances;
};

/// Parses and validates against the kind's declared keys; ConfigError carries "line N: ..." text.
RunConfig parse_config(std::istream& in, const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path);

struct Outcome {
  json results = json::object();
  std::string verdict;  // PASS, FAIL or EXPLORATORY
  std::vector<std::string> warnings;
  std::vector<int> calibration_n{2};  // dimensions whose calibrations go into the report
};

struct Kind {
  std::string name;
  std::map<std::string, std::string> defaults;
  std::map<std::string, double> tolerances;
  std::function<Outcome(const Params&, const std::map<std::string, double>&, std::uint64_t seed, int jobs)> run;
};

const std::vector<Kind>& kinds();
const Kind& find_kind(const std::string& name);  // ConfigError when unknown

/// Report object for one experiment: schema_version, experiment, inputs, results,
/// calibration, verdict, timing, warnings.
json run_experiment(const std::string& kind, const Params& overrides, const std::map<std::string, double>& tolerances,
                    std::uint64_t seed, int jobs = 1);

/// Bessel and Hecke–Bochner calibrations for the given dimensions.
json calibration_block(const std::vector<int>& dims);

/// temp file + rename
void write_report_atomic(const std::filesystem::path& path, const json& report);

/// Plot data of a report as <stem>.<what>.csv files in dir; returns the files written.
std::vector<std::filesystem::path> write_csv_sidecars(const json& report, const std::filesystem::path& dir,
                                                      const std::string& stem);

struct SuiteOptions {
  std::uint64_t seed = 20240917;
  int jobs = 1;
  std::optional<int> M;  // overrides the truncation of the Weyl members
};

const std::vector<std::string>& suite_names();
std::vector<std::string> suite_members(const std::string& suite);  // ConfigError when unknown

/// Aggregate report; verdict PASS iff no member FAILs.
json run_suite(const std::string& suite, const SuiteOptions& opt);

/// Exit status 0 (PASS / EXPLORATORY), 1 (FAIL) or 2 (config error). Messages go to `log`.
int run_command(const std::filesystem::path& config, const std::optional<std::filesystem::path>& out, std::ostream& log);
int suite_command(const std::string& suite, const SuiteOptions& opt, const std::filesystem::path& out, std::ostream& log);

}  // namespace hup::lab
