#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "erasurelab/csv.hpp"
#include "erasurelab/error.hpp"
#include "erasurelab/ldp.hpp"
#include "erasurelab/oracle.hpp"
#include "erasurelab/probmodel.hpp"
#include "erasurelab/typesys.hpp"
#include "run.hpp"

namespace erasurelab::cli {

namespace {

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::string out;
};

struct ChannelOpts {
  std::size_t d = 0;
  std::vector<double> noise;
  std::string matrix;

  void add(CLI::App* sub) {
    sub->add_option("--d", d, "alphabet size");
    sub->add_option("--noise", noise, "noise distribution P, comma separated")->delimiter(',');
    sub->add_option("--matrix", matrix, "transition matrix file (rows are inputs)");
  }
  ChannelSpec spec() const {
    ChannelSpec s;
    s.d = d;
    s.noise = noise;
    if (!matrix.empty()) s.matrix = matrix;
    if (s.noise.empty() && !s.matrix) throw InvalidArgument("--noise or --matrix is required");
    if (!s.noise.empty() && d != 0 && d != s.noise.size()) {
      throw InvalidArgument("--d does not match the length of --noise");
    }
    return s;
  }
};

// Writes to stdout, or to <out>/<name> when --out is given.
void emit(const Globals& g, std::ostream& out, const std::string& name, const std::string& body) {
  if (g.out.empty()) {
    out << body;
    return;
  }
  std::filesystem::create_directories(g.out);
  std::ofstream f(std::filesystem::path(g.out) / name, std::ios::binary);
  if (!f) throw InvalidArgument("cannot write " + name + " into " + g.out);
  f << body;
}

std::vector<std::string> prob_columns(const char* prefix, std::size_t d) {
  std::vector<std::string> h;
  for (std::size_t i = 0; i < d; ++i) h.push_back(prefix + std::to_string(i));
  return h;
}

int cmd_capacity(const Globals& g, const ChannelOpts& co, double tol, std::ostream& out) {
  const auto spec = co.spec();
  std::optional<AdditiveChannel> additive;
  std::optional<GeneralDmc> general;
  if (spec.matrix) {
    general = load_dmc_matrix(*spec.matrix);
    if (auto p = as_additive(*general)) additive = AdditiveChannel(*p);
  } else {
    additive = make_additive(spec);
    general = additive->to_general();
  }
  const auto ba = blahut_arimoto(*general, tol);
  std::vector<std::string> header = {"inputs", "outputs", "capacity", "closed_form_capacity",
                                     "dispersion", "dispersion_exact", "iterations", "gap"};
  const auto px = prob_columns("px", general->inputs());
  header.insert(header.end(), px.begin(), px.end());
  std::ostringstream s;
  CsvWriter csv(s, header);
  csv.cell(general->inputs()).cell(general->outputs()).cell(ba.capacity);
  if (additive) {
    csv.cell(additive->capacity()).cell(varentropy(additive->noise())).cell(true);
  } else {
    csv.cell("").cell(cond_info_variance(*general, ba.input_dist)).cell(false);
  }
  csv.cell(static_cast<std::uint64_t>(ba.iterations)).cell(ba.gap);
  for (double p : ba.input_dist) csv.cell(p);
  csv.end_row();
  emit(g, out, "capacity.csv", s.str());
  return kOk;
}

int cmd_predict(const Globals& g, const ChannelOpts& co, double t, double a, double b,
                const std::vector<std::size_t>& ns, const std::vector<double>& pareto,
                bool unique_caid, std::ostream& out) {
  const auto spec = co.spec();
  double V = 0.0;
  std::size_t d = 0;
  std::optional<RegimePrediction> pred;
  if (spec.matrix) {
    const auto w = load_dmc_matrix(*spec.matrix);
    d = w.inputs();
    if (pareto.empty()) pred = predict_direct(w, a, b, t, DirectOptions{unique_caid});
    V = pred ? pred->V : dispersion(w).dispersion;
  } else {
    const auto ch = make_additive(spec);
    d = ch.d();
    if (pareto.empty()) pred = predict_direct(ch, a, b, t);
    V = varentropy(ch.noise());
  }
  std::ostringstream s;
  if (!pareto.empty()) {
    CsvWriter csv(s, {"t", "a", "d", "V", "b", "e1", "e2"});
    for (const auto& p : pareto_curve(a, t, V, pareto)) {
      csv.cell(t).cell(a).cell(d).cell(V).cell(p.b).cell(p.e1).cell(p.e2);
      csv.end_row();
    }
    emit(g, out, "pareto.csv", s.str());
    return kOk;
  }
  std::vector<PredictionRow> rows;
  for (auto n : ns) rows.push_back({n, d, g.seed.value_or(0), *pred});
  write_predictions_csv(s, rows);
  emit(g, out, "predictions.csv", s.str());
  return kOk;
}

int cmd_oracle(const Globals& g, const ChannelOpts& co, std::size_t n, std::uint64_t m,
               const std::string& decoder, double T, double margin,
               std::optional<double> log_m, const std::string& scope, std::ostream& out) {
  const auto ch = make_additive(co.spec());
  const auto d = ch.d();
  DecoderSpec spec;
  double threshold = 0.0;
  if (decoder == "forney") {
    spec = ForneyRule{T};
    threshold = T;
  } else if (decoder == "infospec") {
    spec = InfoSpecRule{log_m.value_or(std::log(static_cast<double>(m))), margin};
    threshold = margin;
  } else {
    throw InvalidArgument("--decoder must be forney or infospec");
  }
  const auto budget = EnumerationBudget::from_environment();
  const unsigned workers = g.workers.value_or(1);
  const std::uint64_t seed = g.seed.value_or(0);
  OracleRow row{n, d, m, decoder_id(spec), threshold, scope, seed, {}};
  if (scope == "codebook") {
    const auto cb = sample_codebook(n, d, m, seed);
    row.errors = exact_error_probs(cb, ch, spec, budget, workers);
  } else if (scope == "ensemble") {
    row.errors = exact_ensemble(n, d, m, ch, spec, EnsembleMethod::first_codeword_fixed, budget,
                                workers);
  } else {
    throw InvalidArgument("--scope must be codebook or ensemble");
  }
  std::ostringstream s;
  write_oracle_csv(s, {row});
  emit(g, out, "oracle.csv", s.str());
  return kOk;
}

int cmd_cgf(const Globals& g, const ChannelOpts& co, double t, double a, double b, std::size_t n,
            std::uint64_t trials, const std::vector<double>& us, const std::string& measure,
            const std::string& sampler, std::ostream& out) {
  const auto ch = make_additive(co.spec());
  const RegimeParams params{n, t, a, b, ch.capacity()};
  params.validate();
  McConfig mc = McConfig::from_regime(ch, params);
  mc.workers = g.workers.value_or(1);
  mc.sampler = sampler_from_string(sampler);
  const Measure meas = measure == "P" ? Measure::P : Measure::QPrime;
  if (measure != "P" && measure != "Q") throw InvalidArgument("--measure must be P or Q");
  const std::uint64_t seed = g.seed.value_or(0);
  const auto samples = sample_Fn_batch(mc, meas, trials, seed);
  const double nn = static_cast<double>(n);
  std::vector<double> thetas;
  for (double u : us) thetas.push_back(u * std::pow(nn, -t));
  const auto cgf = empirical_cgf(samples, thetas);
  const double V = varentropy(ch.noise());
  std::ostringstream s;
  CsvWriter csv(s, {"n", "t", "a", "b", "d", "seed", "measure", "M", "trials", "u", "theta",
                    "phi_n", "scaled", "predicted"});
  for (std::size_t i = 0; i < us.size(); ++i) {
    csv.cell(n).cell(t).cell(a).cell(b).cell(ch.d()).cell(seed).cell(measure).cell(mc.M);
    csv.cell(trials).cell(us[i]).cell(thetas[i]).cell(cgf.values[i]);
    csv.cell(cgf.values[i] / std::pow(nn, 1.0 - 2.0 * t));
    csv.cell(-a * us[i] + us[i] * us[i] * V / 2.0);
    csv.end_row();
  }
  emit(g, out, "cgf.csv", s.str());
  return kOk;
}

int cmd_ge(const Globals& g, const std::string& nu2, double a, double V, double x, double theta0,
           double nu1, const std::string& scales, std::ostream& out) {
  GeProblem p;
  p.theta0 = theta0;
  p.nu1 = nu1;
  p.x = x;
  if (nu2 == "quadratic") {
    if (!(V > 0.0)) throw InvalidArgument("--V must be positive");
    p.nu2 = [a, V](double y) { return y * a + y * y * V / 2.0; };
    p.nu2_prime = [a, V](double y) { return a + y * V; };
  } else if (nu2 == "exp") {
    p.nu2 = [](double y) { return std::expm1(y) - y; };
    p.nu2_prime = [](double y) { return std::expm1(y); };
  } else {
    throw InvalidArgument("--nu2 must be quadratic or exp");
  }
  if (scales == "diverging") {
    p.scales = ScaleRelation::diverging;
  } else if (scales == "reciprocal") {
    p.scales = ScaleRelation::reciprocal;
  } else if (scales == "other") {
    p.scales = ScaleRelation::other;
  } else {
    throw InvalidArgument("--scales must be diverging, reciprocal or other");
  }
  p.alpha_vanishes = true;
  const auto sol = ge_rate(p);
  std::ostringstream s;
  CsvWriter csv(s, {"nu2", "a", "V", "x", "theta0", "nu1", "y0", "rate", "leading_term", "case",
                    "status"});
  csv.cell(nu2).cell(a).cell(V).cell(x).cell(theta0).cell(nu1).cell(sol.y0).cell(sol.rate);
  csv.cell(sol.leading_term).cell(to_string(sol.theorem_case));
  csv.cell(sol.status == GeStatus::ok ? "ok" : "unverified");
  csv.end_row();
  emit(g, out, "ge.csv", s.str());
  return kOk;
}

int cmd_concentration(const Globals& g, std::uint64_t L, std::uint64_t M1, std::uint64_t M2,
                      const std::vector<double>& ss, const std::vector<double>& epss,
                      std::ostream& out) {
  std::ostringstream s;
  CsvWriter csv(s, {"L", "M1", "M2", "s", "eps", "exact", "bound", "holds"});
  for (double sv : ss) {
    for (double eps : epss) {
      const double exact = exact_EN_s(L, M1, M2, sv);
      const double bound = concentration_bound(L, M1, M2, sv, eps);
      csv.cell(L).cell(M1).cell(M2).cell(sv).cell(eps).cell(exact).cell(bound);
      csv.cell(bound <= exact);
      csv.end_row();
    }
  }
  emit(g, out, "concentration.csv", s.str());
  return kOk;
}

int cmd_types(const Globals& g, const ChannelOpts& co, std::size_t n, std::optional<double> sel_a,
              std::optional<double> sel_t, std::ostream& out) {
  std::optional<NoiseDistribution> p;
  std::size_t d = co.d;
  if (!co.noise.empty() || !co.matrix.empty()) {
    p = make_additive(co.spec()).noise();
    d = p->size();
  }
  if (d < 2) throw InvalidArgument("--d (or --noise) is required");
  std::vector<TypeVector> types;
  std::string name = "types.csv";
  if (sel_a || sel_t) {
    if (!p || !sel_a || !sel_t) {
      throw InvalidArgument("--select-a and --select-t need each other and --noise");
    }
    types.push_back(select_Pn(*p, n, *sel_a, *sel_t));
    name = "selected_type.csv";
  } else {
    types = enumerate_types(n, d);
  }
  std::ostringstream s;
  write_types_csv(s, types, p ? &*p : nullptr);
  emit(g, out, name, s.str());
  return kOk;
}

}  // namespace

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"erasurelab: erasure decoding over additive DMCs"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "experiment config (JSON)");
  app.add_option("--seed", g.seed, "master seed");
  app.add_option("--workers", g.workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "output directory");

  ChannelOpts cap_ch;
  double cap_tol = 1e-12;
  auto* capacity = app.add_subcommand("capacity", "capacity and dispersion of a channel");
  cap_ch.add(capacity);
  capacity->add_option("--tol", cap_tol, "Blahut-Arimoto stopping gap");

  ChannelOpts pred_ch;
  double pt = 0.5, pa = 0.0, pb = 0.0;
  std::vector<std::size_t> pns = {100, 400, 900};
  std::vector<double> pareto;
  bool unique_caid = false;
  auto* predict = app.add_subcommand("predict", "asymptotic error predictions");
  pred_ch.add(predict);
  predict->add_option("--t", pt)->required();
  predict->add_option("--a", pa)->required();
  predict->add_option("--b", pb);
  predict->add_option("--n", pns, "blocklengths")->delimiter(',');
  predict->add_option("--pareto", pareto, "b grid for the tradeoff curve")->delimiter(',');
  predict->add_flag("--unique-caid", unique_caid, "assert a unique capacity-achieving input");

  auto* simulate = app.add_subcommand("simulate", "run an experiment config");
  bool timing = false;
  simulate->add_flag("--timing", timing, "add wall_time_ms (breaks byte-identical output)");

  ChannelOpts or_ch;
  std::size_t on = 0;
  std::uint64_t om = 2;
  std::string odec = "forney", oscope = "codebook";
  double oT = 0.0, omargin = 0.0;
  std::optional<double> olog_m;
  auto* oracle = app.add_subcommand("oracle", "exact error probabilities by enumeration");
  or_ch.add(oracle);
  oracle->add_option("--n", on)->required();
  oracle->add_option("--M", om)->required();
  oracle->add_option("--decoder", odec)->check(CLI::IsMember({"forney", "infospec"}));
  oracle->add_option("--T", oT, "Forney threshold T");
  oracle->add_option("--margin", omargin, "infospec margin b n^(1-t)");
  oracle->add_option("--log-M", olog_m, "infospec log M_n (default log M)");
  oracle->add_option("--scope", oscope)->check(CLI::IsMember({"codebook", "ensemble"}));

  ChannelOpts cgf_ch;
  double ct = 0.5, ca = 0.0, cb = 0.1;
  std::size_t cn = 0;
  std::uint64_t ctrials = 10000;
  std::vector<double> cus = {1.0};
  std::string cmeasure = "P", csampler = "auto";
  auto* cgf = app.add_subcommand("cgf", "empirical scaled CGF of F_n");
  cgf_ch.add(cgf);
  cgf->add_option("--t", ct);
  cgf->add_option("--a", ca)->required();
  cgf->add_option("--b", cb);
  cgf->add_option("--n", cn)->required();
  cgf->add_option("--trials", ctrials);
  cgf->add_option("--u", cus)->delimiter(',');
  cgf->add_option("--measure", cmeasure)->check(CLI::IsMember({"P", "Q"}));
  cgf->add_option("--sampler", csampler)->check(CLI::IsMember({"auto", "explicit", "types"}));

  std::string gnu2 = "quadratic", gscales = "diverging";
  double ga = 0.0, gV = 1.0, gx = 0.0, gtheta0 = 0.0, gnu1 = 0.0;
  auto* ge = app.add_subcommand("ge", "shifted Gartner-Ellis rate");
  ge->add_option("--nu2", gnu2)->check(CLI::IsMember({"quadratic", "exp"}));
  ge->add_option("--a", ga, "slope at 0 of the quadratic");
  ge->add_option("--V", gV, "curvature of the quadratic");
  ge->add_option("--x", gx)->required();
  ge->add_option("--theta0", gtheta0);
  ge->add_option("--nu1", gnu1);
  ge->add_option("--scales", gscales)->check(CLI::IsMember({"diverging", "reciprocal", "other"}));

  std::uint64_t cL = 1, cM1 = 1, cM2 = 1;
  std::vector<double> css = {1.0}, ceps = {0.5};
  auto* conc = app.add_subcommand("concentration", "binomial moment vs concentration bound");
  conc->add_option("--L", cL)->required();
  conc->add_option("--M1", cM1)->required();
  conc->add_option("--M2", cM2)->required();
  conc->add_option("--s", css)->delimiter(',');
  conc->add_option("--eps", ceps)->delimiter(',');

  ChannelOpts ty_ch;
  std::size_t tn = 0;
  std::optional<double> tsel_a, tsel_t;
  auto* types = app.add_subcommand("types", "n-types, or the selected type P_n");
  ty_ch.add(types);
  types->add_option("--n", tn)->required();
  types->add_option("--select-a", tsel_a);
  types->add_option("--select-t", tsel_t);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*capacity) return cmd_capacity(g, cap_ch, cap_tol, out);
    if (*predict) return cmd_predict(g, pred_ch, pt, pa, pb, pns, pareto, unique_caid, out);
    if (*simulate) {
      if (g.config.empty()) throw InvalidArgument("simulate needs --config");
      auto config = load_config(g.config);
      if (g.seed) config.seed = *g.seed;
      if (g.workers) config.workers = *g.workers;
      if (!g.out.empty()) config.output = g.out;
      if (timing) config.timing = true;
      return run(config, err);
    }
    if (*oracle) return cmd_oracle(g, or_ch, on, om, odec, oT, omargin, olog_m, oscope, out);
    if (*cgf) return cmd_cgf(g, cgf_ch, ct, ca, cb, cn, ctrials, cus, cmeasure, csampler, out);
    if (*ge) return cmd_ge(g, gnu2, ga, gV, gx, gtheta0, gnu1, gscales, out);
    if (*conc) return cmd_concentration(g, cL, cM1, cM2, css, ceps, out);
    if (*types) return cmd_types(g, ty_ch, tn, tsel_a, tsel_t, out);
  } catch (const InfeasibleSchedule& e) {
    err << "infeasible schedule: " << e.what() << '\n';
    return kInfeasible;
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded: " << e.what() << '\n';
    return kBudgetExceeded;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}

}  // namespace erasurelab::cli
