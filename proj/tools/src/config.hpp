#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "erasurelab/channel.hpp"
#include "erasurelab/montecarlo.hpp"

namespace erasurelab::cli {

struct ChannelSpec {
  std::size_t d = 0;
  std::vector<double> noise;                  // additive channel
  std::optional<std::filesystem::path> matrix;  // or a transition matrix file
};

// Estimator ids accepted in "estimators".
//   e1, e2_exchange, e2_reweight, e2 (method chosen per n), exact
inline const std::vector<std::string> kEstimatorIds = {"e1", "e2_exchange", "e2_reweight", "e2",
                                                       "exact"};

struct ExperimentConfig {
  ChannelSpec channel;
  double t = 0.5;
  double a = 0.0;
  double b = 0.0;
  std::vector<std::size_t> n_grid;
  std::uint64_t trials = 10000;
  std::uint64_t seed = 0;
  std::vector<std::string> estimators = {"e1", "e2"};
  std::string sampler = "auto";
  std::filesystem::path output = "erasurelab-out";
  unsigned workers = 1;
  bool timing = false;  // adds wall_time_ms; outputs are then not reproducible

  // All module preconditions that can be checked without running anything.
  void validate() const;
};

// Throws ConfigError (an InvalidArgument) on unknown fields, wrong types or
// failed validation.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

// Additive channel for the spec: the noise vector, or a matrix file whose rows
// are cyclic shifts.
AdditiveChannel make_additive(const ChannelSpec& spec);

}  // namespace erasurelab::cli
