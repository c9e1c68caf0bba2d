#include "run.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>

#include "erasurelab/csv.hpp"
#include "erasurelab/error.hpp"
#include "erasurelab/ldp.hpp"
#include "erasurelab/oracle.hpp"
#include "erasurelab/probmodel.hpp"

namespace erasurelab::cli {

namespace {

using nlohmann::json;

struct Measurement {
  std::string estimator;
  std::string quantity;  // e1 or e2
  ErrorEstimate est;
  double wall_ms = 0.0;
};

std::vector<std::string> measurement_header(bool timing) {
  std::vector<std::string> h = {"n",        "t",        "a",         "b",        "d",
                                "seed",     "estimator", "quantity", "M",        "log_threshold",
                                "sampler",  "trials",   "hits",      "estimate", "std_error",
                                "ci_low",   "ci_high",  "interval",  "zero_hits", "upper_bound"};
  if (timing) h.push_back("wall_time_ms");
  return h;
}

json estimate_json(const ErrorEstimate& e) {
  return json{{"estimate", e.estimate},   {"std_error", e.std_error}, {"ci_low", e.ci_low},
              {"ci_high", e.ci_high},     {"hits", e.hits},           {"trials", e.trials},
              {"zero_hits", e.zero_hits}, {"upper_bound", e.upper_bound}};
}

ErrorEstimate exact_estimate(const std::string& id, double p) {
  ErrorEstimate e;
  e.estimator_id = id;
  e.estimate = p;
  e.ci_low = p;
  e.ci_high = p;
  e.upper_bound = p;
  e.interval = "exact";
  return e;
}

}  // namespace

int run(const ExperimentConfig& config, std::ostream& log) {
  config.validate();
  const auto ch = make_additive(config.channel);
  const double capacity = ch.capacity();
  const double V = varentropy(ch.noise());
  const auto sampler = sampler_from_string(config.sampler);
  const auto d = ch.d();

  std::filesystem::create_directories(config.output);
  std::ofstream meas_file(config.output / "measurements.csv", std::ios::binary);
  std::ofstream pred_file(config.output / "predictions.csv", std::ios::binary);
  if (!meas_file || !pred_file) {
    throw InvalidArgument("cannot write into " + config.output.string());
  }
  CsvWriter meas(meas_file, measurement_header(config.timing));

  std::optional<RegimePrediction> prediction;
  if (config.t == 0.5) {
    prediction = predict_mixed(config.a, config.b, V);
  } else {
    prediction = predict_md(config.a, config.b, config.t, V);
  }
  std::vector<PredictionRow> pred_rows;

  json summary;
  summary["channel"] = {{"d", d},
                        {"noise", std::vector<double>(ch.noise().probs().begin(),
                                                      ch.noise().probs().end())},
                        {"capacity", capacity},
                        {"varentropy", V}};
  summary["regime"] = {{"t", config.t}, {"a", config.a}, {"b", config.b}};
  summary["seed"] = config.seed;
  summary["trials"] = config.trials;
  summary["per_n"] = json::array();

  int exit_code = kOk;
  for (std::size_t gi = 0; gi < config.n_grid.size(); ++gi) {
    const auto n = config.n_grid[gi];
    const RegimeParams params{n, config.t, config.a, config.b, capacity};
    json entry = {{"n", n}, {"log_code_size", params.log_code_size()},
                  {"log_threshold", params.log_threshold()}};
    std::uint64_t M = 0;
    try {
      M = code_size(params);
    } catch (const InfeasibleSchedule& e) {
      entry["status"] = "infeasible";
      entry["reason"] = e.what();
      summary["per_n"].push_back(entry);
      log << "n=" << n << ": infeasible schedule: " << e.what() << '\n';
      if (exit_code == kOk) exit_code = kInfeasible;
      continue;
    }
    entry["M"] = M;

    McConfig mc = McConfig::from_regime(ch, params);
    mc.sampler = sampler;
    mc.workers = config.workers;
    const auto kind = FnSampler(mc).kind();
    const std::string sampler_used = to_string(kind);
    if (M > 1000000 && kind == SamplerKind::explicit_codebook) {
      log << "warning: n=" << n << ": M=" << M
          << " codewords per explicit sample; choose a lower-capacity channel or the types sampler\n";
    }

    std::vector<Measurement> results;
    std::string status = "ok";
    const std::uint64_t n_seed = split(config.seed, n);
    for (std::size_t k = 0; k < config.estimators.size(); ++k) {
      const auto& id = config.estimators[k];
      const std::uint64_t est_seed = split(n_seed, k);
      const auto start = std::chrono::steady_clock::now();
      const auto elapsed = [&] {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
      };
      try {
        if (id == "e1") {
          auto e = estimate_E1(mc, config.trials, est_seed);
          results.push_back({id, "e1", e, elapsed()});
        } else if (id == "exact") {
          const auto ex = exact_ensemble(n, d, M, ch, ForneyRule{params.log_threshold() / n},
                                         EnsembleMethod::first_codeword_fixed,
                                         EnumerationBudget::from_environment(), config.workers);
          const double ms = elapsed();
          results.push_back({id, "e1", exact_estimate(id, ex.p_total()), ms});
          results.push_back({id, "e2", exact_estimate(id, ex.p_undetected), ms});
        } else {
          E2Method method = E2Method::reweight;
          if (id == "e2_exchange") method = E2Method::exchange;
          if (id == "e2") method = preferred_E2_method(mc, config.trials);
          auto e = estimate_E2(mc, config.trials, est_seed, method);
          results.push_back({e.estimator_id, "e2", e, elapsed()});
        }
      } catch (const BudgetExceeded& e) {
        status = "budget_exceeded";
        log << "n=" << n << ": " << id << ": " << e.what() << '\n';
        if (exit_code == kOk) exit_code = kBudgetExceeded;
      }
    }

    json measured = json::object();
    for (const auto& r : results) {
      meas.cell(static_cast<std::uint64_t>(n)).cell(config.t).cell(config.a).cell(config.b);
      meas.cell(static_cast<std::uint64_t>(d)).cell(config.seed).cell(r.est.estimator_id);
      meas.cell(r.quantity).cell(M).cell(params.log_threshold());
      meas.cell(r.estimator == "exact" ? std::string("exact") : sampler_used);
      meas.cell(r.est.trials).cell(r.est.hits).cell(r.est.estimate).cell(r.est.std_error);
      meas.cell(r.est.ci_low).cell(r.est.ci_high).cell(r.est.interval).cell(r.est.zero_hits);
      meas.cell(r.est.upper_bound);
      if (config.timing) meas.cell(r.wall_ms);
      meas.end_row();
      measured[r.est.estimator_id + ":" + r.quantity] = estimate_json(r.est);
    }
    entry["status"] = status;
    entry["measurements"] = measured;

    const double nn = static_cast<double>(n);
    const double pred_e1 = prediction->e1_at(nn);
    const double pred_e2 = prediction->e2_log_lower(nn);
    entry["prediction"] = {{"e1", pred_e1}, {"e2_neg_log_lower", pred_e2}};
    json gaps = json::object();
    for (const auto& r : results) {
      if (r.quantity == "e1") {
        gaps[r.est.estimator_id + ":e1_abs"] = std::abs(r.est.estimate - pred_e1);
      } else if (r.est.estimate > 0.0) {
        // -log E2 / n^(1-t) against b.
        const double rate = -std::log(r.est.estimate) / std::pow(nn, 1.0 - config.t);
        gaps[r.est.estimator_id + ":e2_rate"] = rate;
        gaps[r.est.estimator_id + ":e2_rate_rel_gap"] = std::abs(rate - config.b) / config.b;
        gaps[r.est.estimator_id + ":e2_below_lower_side"] = -std::log(r.est.estimate) - pred_e2;
      }
    }
    entry["gaps"] = gaps;
    summary["per_n"].push_back(entry);
    pred_rows.push_back({n, d, config.seed, *prediction});
  }

  write_predictions_csv(pred_file, pred_rows);
  std::ofstream summary_file(config.output / "summary.json", std::ios::binary);
  summary_file << summary.dump(2) << '\n';
  return exit_code;
}

}  // namespace erasurelab::cli
