#include "commands.hpp"

#include <cstdio>
#include <memory>

#include "bdinf/cost_model.hpp"
#include "bdinf/design.hpp"
#include "bdinf/diagnostics.hpp"
#include "bdinf/error.hpp"
#include "bdinf/gp_dense.hpp"
#include "bdinf/gp_sparse.hpp"
#include "bdinf/io.hpp"
#include "bdinf/mcmc.hpp"
#include "bdinf/observation.hpp"
#include "bdinf/parallel.hpp"
#include "bdinf/summary.hpp"

namespace bdinf::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Substream indices under the master seed, one per stage.
enum Stage : std::uint64_t { kData = 0, kMcmc = 1, kDesign = 2, kDesignSim = 3, kHyper = 4, kValidation = 5 };

mcmc::Priors to_priors(const PriorOptions& p) {
  auto one = [](const std::vector<double>& v, const char* what) {
    require(v.size() == 2, std::string("prior for ") + what + " needs LOCATION VARIANCE");
    mcmc::LogNormalPrior q{v[0], v[1]};
    q.validate();
    return q;
  };
  return {one(p.lambda, "lambda"), one(p.mu, "mu"), one(p.sigma, "sigma")};
}

std::string indexed(const char* prefix, std::size_t k, const char* ext = "") {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_t%02zu%s", prefix, k + 1, ext);
  return buf;
}

void print_summary(const std::vector<summary::ParameterSummary>& s) {
  std::printf("%-12s %10s %10s %10s %10s\n", "parameter", "mean", "sd", "q2.5", "q97.5");
  for (const auto& p : s) {
    std::printf("%-12s %10.4f %10.4f %10.4f %10.4f\n", p.name.c_str(), p.mean, p.sd, p.q025, p.q975);
  }
}

bool cheap_scenario(mcmc::Scenario s) {
  return s == mcmc::Scenario::exact_times || s == mcmc::Scenario::census || s == mcmc::Scenario::proportions_exact;
}

}  // namespace

int cmd_generate(const Globals& g, const GenerateOptions& o) {
  const model::BirthDeathParams params{o.lambda, o.mu, o.x0};
  params.validate();
  Rng rng = make_stream(g.seed, kData);
  json meta{{"scenario", o.scenario}, {"params", io::to_json(params)}, {"seed", g.seed}};
  obs::ObservedDataset data;
  if (o.scenario == "a" || o.scenario == "b") {
    require(o.m >= 1, "m must be positive");
    auto exact = obs::generate_exact_times(params, o.m, o.horizon, rng);
    meta["m"] = o.m;
    meta["horizon"] = o.horizon;
    if (o.scenario == "a") {
      data = std::move(exact);
    } else {
      const auto grid = obs::TimeGrid::uniform(o.bins);
      data = obs::bin_death_times(exact, grid);
      meta["bins"] = o.bins;
    }
  } else if (o.scenario == "c") {
    data = obs::generate_proportion_data(params, obs::TimeGrid::uniform(o.bins), o.sigma, rng);
    meta["bins"] = o.bins;
    meta["sigma"] = o.sigma;
  } else {
    fail(ErrorKind::invalid_input, "generate: scenario must be a, b or c");
  }
  io::write_dataset(g.out / o.name, data, meta);
  std::printf("wrote %s (scenario %s, seed %llu)\n", (g.out / (o.name + ".csv")).c_str(), o.scenario.c_str(),
              static_cast<unsigned long long>(g.seed));
  return 0;
}

int cmd_fit(const Globals& g, const FitOptions& o) {
  mcmc::PosteriorRequest req;
  req.scenario = mcmc::scenario_from_string(o.scenario);
  req.data = io::read_dataset(o.data);
  req.priors = to_priors(o.priors);
  req.x0 = o.x0;
  req.simulation.replicates = o.replicates;
  req.simulation.workers = g.workers;
  if (req.scenario == mcmc::Scenario::proportions_emulated) {
    if (o.emulators.empty()) fail(ErrorKind::invalid_input, "c-emulated needs --emulators <dir>");
    req.emulators = [&] {
      auto v = io::read_emulator_dir(o.emulators);
      return std::vector<gp::EmulatorPtr>(v.begin(), v.end());
    }();
  } else if (!o.emulators.empty()) {
    fail(ErrorKind::invalid_input, "--emulators only applies to scenario c-emulated");
  }

  // Scenario comparison runs use 10^6 post-burn-in iterations with --paper-scale; emulator
  // comparison runs use the same short chains at both scales.
  if (cheap_scenario(req.scenario)) {
    req.config.iterations = g.paper_scale ? 1'000'100 : 200'000;
    req.config.burnin = g.paper_scale ? 100 : 1'000;
    req.config.thin = g.paper_scale ? 1'000 : 200;
  } else {
    req.config.iterations = 11'000;
    req.config.burnin = 1'000;
    req.config.thin = 10;
  }
  if (o.iterations > 0) req.config.iterations = o.iterations;
  if (o.burnin >= 0) req.config.burnin = o.burnin;
  if (o.thin > 0) req.config.thin = o.thin;
  const std::size_t dim = mcmc::has_sigma(req.scenario) ? 3 : 2;
  req.config.step_sd.assign(dim, o.step);
  req.config.seed = derive_seed(g.seed, kMcmc);

  Rng rng(req.config.seed);
  const auto trace = mcmc::run_posterior(req, rng);
  const json meta{{"scenario", o.scenario},
                  {"data", o.data.string()},
                  {"emulators", o.emulators.string()},
                  {"seed", g.seed},
                  {"x0", o.x0},
                  {"replicates", o.replicates},
                  {"priors", io::to_json(req.priors)}};
  io::write_trace(g.out / o.name, trace, meta);
  const auto s = summary::summarize(trace);
  io::write_text(g.out / (o.name + "_summary.csv"), io::summary_csv(s));
  io::write_json(g.out / (o.name + "_summary.json"),
                 {{"scenario", o.scenario}, {"acceptance_rate", trace.acceptance_rate}, {"rows", trace.rows()},
                  {"parameters", io::to_json(s)}});
  std::printf("scenario %s: %lld kept rows, acceptance %.3f\n", o.scenario.c_str(),
              static_cast<long long>(trace.rows()), trace.acceptance_rate);
  print_summary(s);
  return 0;
}

int cmd_train_emulators(const Globals& g, const TrainOptions& o) {
  const auto grid = obs::TimeGrid::uniform(o.bins);
  const auto priors = to_priors(o.priors);
  const auto bounds = design::prior_central_bounds(priors, o.mass);
  Rng design_rng = make_stream(g.seed, kDesign);
  const auto des = design::maximin_lhd(o.design_size, bounds, design_rng, {o.random_starts, o.swap_attempts});

  const design::SimulatorConfig sim{o.x0, o.n, derive_seed(g.seed, kDesignSim), g.workers, {}};
  const auto responses = design::simulate_design(des, grid.census_times, sim);
  io::write_design(g.out / "design", des,
                   {{"seed", g.seed}, {"x0", o.x0}, {"n", o.n}, {"mass", o.mass}, {"min_distance",
                    design::min_pairwise_distance(des)}, {"times", grid.census_times},
                    {"filter", o.filter}});

  const auto scope = o.filter == "global" ? design::FilterScope::global : design::FilterScope::per_time;
  std::vector<design::TrainingSet> training;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    training.push_back(design::select_training_set(des, responses, k, scope));
    io::write_training_set(g.out / indexed("training", k), training.back());
  }

  const gp::EmulatorOptions options{!o.no_prediction_nugget};
  const auto budget = gp::SparsityBudget::from_sparsity(o.sparsity);
  const gp::InputScaling scaling{bounds};
  const std::uint64_t hyper_seed = derive_seed(g.seed, kHyper);
  std::vector<std::shared_ptr<const gp::Emulator>> emulators(grid.size());
  parallel_for(grid.size(), g.workers, [&](std::size_t k) {
    Rng rng = make_stream(hyper_seed, k);
    auto config = o.sparse ? gp::default_sparse_hyper_config(budget, derive_seed(hyper_seed, k))
                           : gp::default_hyper_config(derive_seed(hyper_seed, k));
    config.iterations = o.hyper_iterations;
    config.burnin = o.hyper_burnin;
    config.thin = o.hyper_thin;
    if (o.sparse) {
      emulators[k] = gp::fit_sparse_emulator(training[k], budget, scaling, config, rng, options);
    } else {
      emulators[k] = gp::fit_dense_emulator(training[k], config, rng, options);
    }
  });

  std::printf("%6s %8s %12s  %s\n", "t", "n_d", "a", o.sparse ? "tau / zero fraction" : "r1 r2");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    io::write_emulator(g.out / indexed("emulator", k, ".json"), *emulators[k]);
    if (const auto* s = dynamic_cast<const gp::SparseEmulator*>(emulators[k].get())) {
      std::printf("%6.2f %8zu %12.5g  %.4f %.4f / %.3f\n", s->time(), training[k].size(), s->hyper().a,
                  s->hyper().tau[0], s->hyper().tau[1], s->off_diagonal_zero_fraction());
    } else if (const auto* d = dynamic_cast<const gp::DenseEmulator*>(emulators[k].get())) {
      std::printf("%6.2f %8zu %12.5g  %.4f %.4f\n", d->time(), training[k].size(), d->hyper().a, d->hyper().r1,
                  d->hyper().r2);
    }
  }
  if (o.sparse) std::printf("sparsity %.2f: 2c = %.4f\n", budget.s, 2.0 * budget.c);
  return 0;
}

int cmd_diagnose(const Globals& g, const DiagnoseOptions& o) {
  const auto emulators = io::read_emulator_dir(o.emulators);
  const auto mode = diag::mode_from_string(o.mode);
  design::Bounds bounds = design::prior_central_bounds(to_priors(o.priors));
  int x0 = o.x0;
  auto scope = design::FilterScope::per_time;
  if (const auto design_meta = o.emulators / "design.json"; fs::exists(design_meta)) {
    const auto j = io::read_json(design_meta);
    bounds = io::bounds_from_json(j.at("bounds"));
    x0 = j.value("x0", x0);
    if (j.value("filter", std::string("per-time")) == "global") scope = design::FilterScope::global;
  }
  std::vector<double> times;
  for (const auto& e : emulators) times.push_back(e->time());
  const int n = o.n > 0 ? o.n : emulators.front()->replicates();

  Rng rng = make_stream(g.seed, kValidation);
  const design::SimulatorConfig sim{x0, n, 0, g.workers, {}};  // seed drawn from rng
  const auto validation = diag::build_validation_sets(bounds, times, sim, {o.points, o.candidates, {}, scope}, rng);

  std::vector<diag::DiagnosticsReport> reports(emulators.size());
  parallel_for(emulators.size(), g.workers,
               [&](std::size_t k) { reports[k] = diag::diagnose(*emulators[k], validation[k], mode); });

  std::string table = "t,mode,n_validation,md2,df,chi2_lo,chi2_hi,md2_pass,ipe_within_1_96\n";
  std::printf("%6s %10s %18s %6s %10s\n", "t", "md2", "chi2 95% interval", "pass", "|ipe|<1.96");
  int passes = 0;
  for (std::size_t k = 0; k < reports.size(); ++k) {
    const auto& r = reports[k];
    io::write_diagnostics(g.out / indexed("diagnostics", k), r);
    table += io::format_double(r.t) + "," + diag::to_string(r.mode) + "," + std::to_string(r.ipe.size()) + "," +
             io::format_double(r.md2) + "," + std::to_string(r.df) + "," + io::format_double(r.chi2_interval.first) +
             "," + io::format_double(r.chi2_interval.second) + "," + (r.md2_pass ? "true" : "false") + "," +
             io::format_double(r.ipe_within_fraction) + "\n";
    passes += r.md2_pass;
    std::printf("%6.2f %10.2f  [%6.2f, %6.2f] %6s %10.3f\n", r.t, r.md2, r.chi2_interval.first,
                r.chi2_interval.second, r.md2_pass ? "yes" : "no", r.ipe_within_fraction);
  }
  io::write_text(g.out / "diagnostics_summary.csv", table);
  io::write_text(g.out / "pit_histogram.csv", io::pit_histogram_csv(reports, o.histogram_bins));
  std::printf("%d of %zu emulators have MD2 inside the central 95%% interval (%s mode)\n", passes, reports.size(),
              o.mode.c_str());
  return 0;
}

int cmd_cost_model(const Globals& g, const CostOptions& o) {
  const cost::CostModelInputs in{o.n_d, o.n, o.tau, o.T, o.n_iter, o.n_iter_gp, o.n_iter_gp_fit};
  const auto r = cost::evaluate(in);
  io::write_json(g.out / "cost_model.json", {{"inputs", io::to_json(in)}, {"report", io::to_json(r)}});
  std::printf("simulator-based inference: %.6g cpu units\n", r.simulator_units);
  std::printf("GP-based inference:        %.6g cpu units\n", r.gp_units);
  std::printf("n_d^3 (N_GP + N_iter) = %.6g  vs  n tau (N_iter - n_d) = %.6g\n", r.lhs, r.rhs);
  std::printf("GP more efficient: %s; breakeven tau = %.6g\n", r.gp_more_efficient ? "yes" : "no", r.breakeven_tau);
  return 0;
}

int cmd_compare(const Globals& g, const CompareOptions& o) {
  require(o.traces.size() >= 2, "compare needs at least two --trace files");
  require(o.labels.empty() || o.labels.size() == o.traces.size(), "give one --label per --trace");
  std::vector<mcmc::Trace> traces;
  std::vector<std::string> labels;
  std::string table = "run,parameter,mean,sd,q025,q975\n";
  for (std::size_t i = 0; i < o.traces.size(); ++i) {
    traces.push_back(io::read_trace(o.traces[i]));
    labels.push_back(o.labels.empty() ? o.traces[i].stem().string() : o.labels[i]);
    for (const auto& p : summary::summarize(traces.back())) {
      table += labels.back() + "," + p.name + "," + io::format_double(p.mean) + "," + io::format_double(p.sd) + "," +
               io::format_double(p.q025) + "," + io::format_double(p.q975) + "\n";
    }
  }
  const auto cmp = summary::compare(traces, labels);
  io::write_text(g.out / "comparison_summary.csv", table);
  io::write_text(g.out / "comparison.csv", io::comparison_csv(cmp));
  std::printf("%-12s %-12s %-12s %10s %10s\n", "parameter", "run a", "run b", "|d|/sd", "W1");
  for (const auto& c : cmp) {
    std::printf("%-12s %-12s %-12s %10.4f %10.4f\n", c.parameter.c_str(), c.label_a.c_str(), c.label_b.c_str(),
                c.standardized_difference, c.wasserstein1);
  }
  return 0;
}

int cmd_summarize(const Globals& g, const SummarizeOptions& o) {
  const auto trace = io::read_trace(o.trace);
  const auto s = summary::summarize(trace);
  const std::string stem = o.trace.stem().string();
  io::write_text(g.out / (stem + "_summary.csv"), io::summary_csv(s));
  io::write_json(g.out / (stem + "_summary.json"),
                 {{"trace", o.trace.string()}, {"rows", trace.rows()}, {"acceptance_rate", trace.acceptance_rate},
                  {"parameters", io::to_json(s)}});
  print_summary(s);
  return 0;
}

}  // namespace bdinf::cli
