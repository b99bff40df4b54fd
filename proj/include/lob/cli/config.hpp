#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lob/models.hpp"
#include "lob/oracle.hpp"
#include "lob/statistics.hpp"

namespace lob::cli {

inline constexpr const char* kToolName = "lobsim";
inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

/// Malformed or inconsistent configuration. `violations` holds parameter
/// constraint failures when that is the cause.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, ConstraintReport violations = {})
      : std::runtime_error(what), violations_(std::move(violations)) {}
  const ConstraintReport& violations() const noexcept { return violations_; }

 private:
  ConstraintReport violations_;
};

struct RunConfig {
  /// The document as read, before defaults; hashed for run identity.
  nlohmann::json document;
  std::string hash;

  // model
  std::string model_name;
  nlohmann::json model_params = nlohmann::json::object();
  std::string price_rates = "model";  // model | frozen | constant | mid_chasing
  double price_a = 0.0;
  double price_b = 0.0;

  // book
  BookParams book;
  std::optional<std::vector<QueueSize>> initial_q;
  double initial_p_ref = 0.5;

  // simulation
  std::uint64_t max_events = 100'000;
  std::optional<double> max_time;
  std::uint64_t seed = 1;
  std::uint64_t n_paths = 1;
  std::uint64_t burn_in = 0;
  std::uint64_t log_every = 1;
  unsigned threads = 0;

  // analysis
  std::vector<double> z_grid = {1.05, 1.1, 1.2};
  std::vector<double> U_grid = {2.0, 5.0};
  std::optional<QueueSize> scan_cap;
  std::uint64_t scan_samples = 10'000;
  std::uint64_t mc_draws = 100'000;
  LagPolicy lag;
  QueueSize truncation_cap = 3;
  PriceMode oracle_price_mode = PriceMode::Frozen;
  std::size_t max_states = 2'000'000;
  std::uint64_t oracle_events = 1'000'000;
  bool symmetric = false;
  std::optional<std::uint64_t> scaling_burn_in;
  std::optional<std::uint64_t> calendar_paths;
  std::vector<double> scales = {1e3, 1e4, 1e5};
  std::vector<double> times = {0.5, 1.0, 2.0};

  // output
  std::filesystem::path out_dir = "out";
  std::vector<std::string> formats = {"csv", "json"};

  bool wants(const std::string& format) const;
};

/// 64-bit FNV-1a of the compact dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& document);

/// Throws ConfigError on unknown keys, wrong types or bad values.
RunConfig parse_config(const nlohmann::json& document);
RunConfig load_config(const std::filesystem::path& path);

struct BuiltModel {
  std::shared_ptr<const RateModel> model;
  /// Every parameter constraint that failed (structural or not).
  ConstraintReport report;
  LobState initial;
};

/// Validates the parameters and builds the model. Throws ConfigError (with
/// the report) for structural violations; others are returned in `report`.
BuiltModel build_model(const RunConfig& config);

}  // namespace lob::cli
