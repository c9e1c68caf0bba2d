#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "erasurelab/error.hpp"
#include "erasurelab/ldp.hpp"

namespace erasurelab::cli {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw InvalidArgument(where + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw InvalidArgument("unknown field '" + key + "' in " + where);
  }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidArgument("field '" + std::string(key) + "' in " + where + ": " + e.what());
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  if (channel.matrix && !channel.noise.empty()) {
    throw InvalidArgument("channel: give either noise or matrix, not both");
  }
  if (!channel.matrix && channel.noise.empty()) {
    throw InvalidArgument("channel: noise or matrix is required");
  }
  if (!channel.noise.empty() && channel.d != 0 && channel.d != channel.noise.size()) {
    throw InvalidArgument("channel: d does not match the length of noise");
  }
  make_additive(channel);
  if (n_grid.empty()) throw InvalidArgument("n_grid must not be empty");
  for (auto n : n_grid) {
    if (n == 0) throw InvalidArgument("n_grid entries must be positive");
    RegimeParams{n, t, a, b, 0.0}.validate();
  }
  if (trials == 0) throw InvalidArgument("trials must be positive");
  if (workers == 0) throw InvalidArgument("workers must be positive");
  if (estimators.empty()) throw InvalidArgument("estimators must not be empty");
  for (const auto& e : estimators) {
    if (std::find(kEstimatorIds.begin(), kEstimatorIds.end(), e) == kEstimatorIds.end()) {
      throw InvalidArgument("unknown estimator '" + e + "'");
    }
  }
  sampler_from_string(sampler);
}

ExperimentConfig parse_config(const json& j) {
  reject_unknown(j, {"channel", "t", "a", "b", "n_grid", "trials", "seed", "estimators", "sampler",
                     "output", "workers", "timing"},
                 "config");
  ExperimentConfig c;
  if (!j.contains("channel")) throw InvalidArgument("config: channel is required");
  const auto& ch = j.at("channel");
  reject_unknown(ch, {"d", "noise", "matrix"}, "channel");
  read(ch, "d", c.channel.d, "channel");
  read(ch, "noise", c.channel.noise, "channel");
  if (ch.contains("matrix")) {
    std::string path;
    read(ch, "matrix", path, "channel");
    c.channel.matrix = path;
  }
  for (const char* key : {"t", "a", "b", "n_grid"}) {
    if (!j.contains(key)) throw InvalidArgument(std::string("config: ") + key + " is required");
  }
  read(j, "t", c.t, "config");
  read(j, "a", c.a, "config");
  read(j, "b", c.b, "config");
  read(j, "n_grid", c.n_grid, "config");
  read(j, "trials", c.trials, "config");
  read(j, "seed", c.seed, "config");
  read(j, "estimators", c.estimators, "config");
  read(j, "sampler", c.sampler, "config");
  std::string out = c.output.string();
  read(j, "output", out, "config");
  c.output = out;
  read(j, "workers", c.workers, "config");
  read(j, "timing", c.timing, "config");
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidArgument("config " + path.string() + ": " + e.what());
  }
  return parse_config(j);
}

AdditiveChannel make_additive(const ChannelSpec& spec) {
  if (spec.matrix) {
    const auto w = load_dmc_matrix(*spec.matrix);
    auto p = as_additive(w);
    if (!p) throw InvalidArgument("matrix " + spec.matrix->string() + " is not an additive channel");
    if (spec.d != 0 && spec.d != p->size()) throw InvalidArgument("channel: d does not match matrix");
    return AdditiveChannel(*p);
  }
  return AdditiveChannel(NoiseDistribution(spec.noise));
}

}  // namespace erasurelab::cli
