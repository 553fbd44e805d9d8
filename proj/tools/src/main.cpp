#include <cstdio>
#include <fstream>
#include <functional>

#include <CLI11.hpp>

#include "bdinf/error.hpp"
#include "bdinf/io.hpp"
#include "commands.hpp"
#include "run_spec.hpp"

namespace {

using namespace bdinf::cli;

// Held while a command writes into the output directory.
class OutputLock {
 public:
  explicit OutputLock(const std::filesystem::path& dir) : path_(dir / ".bdinf.lock") {
    std::filesystem::create_directories(dir);
    file_ = std::fopen(path_.c_str(), "wx");
    if (file_ == nullptr) {
      bdinf::fail(bdinf::ErrorKind::io_failure, "output directory " + dir.string() + " is locked by another run");
    }
  }
  ~OutputLock() {
    std::fclose(file_);
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  OutputLock(const OutputLock&) = delete;
  OutputLock& operator=(const OutputLock&) = delete;

 private:
  std::filesystem::path path_;
  std::FILE* file_ = nullptr;
};

std::string vector_default(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + bdinf::io::format_double(v[i]);
  return s + "]";
}

void add_priors(CLI::App* cmd, PriorOptions& p) {
  cmd->add_option("--prior-lambda", p.lambda, "LN prior on lambda: LOCATION VARIANCE")
      ->expected(2)
      ->default_str(vector_default(p.lambda));
  cmd->add_option("--prior-mu", p.mu, "LN prior on mu: LOCATION VARIANCE")->expected(2)->default_str(vector_default(p.mu));
  cmd->add_option("--prior-sigma", p.sigma, "LN prior on sigma: LOCATION VARIANCE")
      ->expected(2)
      ->default_str(vector_default(p.sigma));
}

int exit_code(bdinf::ErrorKind kind) { return 10 + static_cast<int>(kind); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian inference for a birth-death cell-death model"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);

  Globals g;
  std::string spec_path;
  app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option(kSpecOption, spec_path, "JSON run spec; command-line flags override its fields");
  app.add_option("--workers", g.workers, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_flag("--paper-scale", g.paper_scale, "Long chains: 10^6 post-burn-in iterations for scenario comparisons");

  GenerateOptions gen;
  auto* generate = app.add_subcommand("generate", "Simulate a dataset for scenario a, b or c");
  generate->add_option("--scenario", gen.scenario)->check(CLI::IsMember({"a", "b", "c"}))->capture_default_str();
  generate->add_option("--lambda", gen.lambda)->capture_default_str();
  generate->add_option("--mu", gen.mu)->capture_default_str();
  generate->add_option("--x0", gen.x0)->capture_default_str();
  generate->add_option("--m", gen.m, "Number of observed death times (a, b)")->capture_default_str();
  generate->add_option("--bins", gen.bins, "Census times on (1, 11] (b, c)")->capture_default_str();
  generate->add_option("--sigma", gen.sigma, "Logit noise sd (c)")->capture_default_str();
  generate->add_option("--horizon", gen.horizon, "Censoring horizon for death times")->capture_default_str();
  generate->add_option("--name", gen.name, "Output file stem")->capture_default_str();

  FitOptions fit;
  auto* fitc = app.add_subcommand("fit", "Run the posterior sampler");
  fitc->add_option("--scenario", fit.scenario, "a, b, c-exact, c-sim, c-inflated or c-emulated")->required();
  fitc->add_option("--data", fit.data, "Dataset CSV")->required();
  fitc->add_option("--emulators", fit.emulators, "Directory of fitted emulators (c-emulated)");
  add_priors(fitc, fit.priors);
  fitc->add_option("--x0", fit.x0)->capture_default_str();
  fitc->add_option("--iterations", fit.iterations, "Total iterations (default per scenario)")->capture_default_str();
  fitc->add_option("--burnin", fit.burnin)->capture_default_str();
  fitc->add_option("--thin", fit.thin)->capture_default_str();
  fitc->add_option("--step", fit.step, "Random-walk sd on the log scale")->capture_default_str();
  fitc->add_option("--replicates", fit.replicates, "Cells per simulated likelihood (c-sim, c-inflated)")
      ->capture_default_str();
  fitc->add_option("--name", fit.name, "Output file stem")->capture_default_str();

  TrainOptions tr;
  auto* train = app.add_subcommand("train-emulators", "Build the design and fit one emulator per census time");
  add_priors(train, tr.priors);
  train->add_option("--bins", tr.bins)->capture_default_str();
  train->add_option("--x0", tr.x0)->capture_default_str();
  train->add_option("--n", tr.n, "Cells simulated per design point")->capture_default_str();
  train->add_option("--design-size", tr.design_size)->capture_default_str();
  train->add_option("--random-starts", tr.random_starts)->capture_default_str();
  train->add_option("--swap-attempts", tr.swap_attempts)->capture_default_str();
  train->add_option("--mass", tr.mass, "Prior mass covered by the design box")->capture_default_str();
  train->add_flag("--sparse", tr.sparse, "Bohman covariance with the sparsity prior");
  train->add_option("--sparsity", tr.sparsity)->capture_default_str();
  train->add_option("--filter", tr.filter, "global: drop a point if extreme at any census time; per-time: per emulator")
      ->check(CLI::IsMember({"global", "per-time"}))
      ->capture_default_str();
  train->add_flag("--no-prediction-nugget", tr.no_prediction_nugget);
  train->add_option("--hyper-iterations", tr.hyper_iterations)->capture_default_str();
  train->add_option("--hyper-burnin", tr.hyper_burnin)->capture_default_str();
  train->add_option("--hyper-thin", tr.hyper_thin)->capture_default_str();

  DiagnoseOptions dg;
  auto* diagnose = app.add_subcommand("diagnose", "Validate emulators on a fresh design");
  diagnose->add_option("--emulators", dg.emulators)->required();
  add_priors(diagnose, dg.priors);
  diagnose->add_option("--mode", dg.mode)->check(CLI::IsMember({"literal", "predictive"}))->capture_default_str();
  diagnose->add_option("--validation-points", dg.points)->capture_default_str();
  diagnose->add_option("--candidates", dg.candidates)->capture_default_str();
  diagnose->add_option("--x0", dg.x0)->capture_default_str();
  diagnose->add_option("--n", dg.n, "Cells per validation point (0: as trained)")->capture_default_str();
  diagnose->add_option("--histogram-bins", dg.histogram_bins)->capture_default_str();

  CostOptions co;
  auto* costc = app.add_subcommand("cost-model", "Compare simulator and GP cpu-unit costs");
  costc->add_option("--n-d", co.n_d)->capture_default_str();
  costc->add_option("--n", co.n)->capture_default_str();
  costc->add_option("--tau", co.tau)->capture_default_str();
  costc->add_option("--T", co.T)->capture_default_str();
  costc->add_option("--n-iter", co.n_iter)->capture_default_str();
  costc->add_option("--n-iter-gp", co.n_iter_gp)->capture_default_str();
  costc->add_option("--n-iter-gp-fit", co.n_iter_gp_fit)->capture_default_str();

  CompareOptions cmp;
  auto* compare = app.add_subcommand("compare", "Compare posterior traces");
  compare->add_option("--trace", cmp.traces)->required()->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  compare->add_option("--label", cmp.labels)->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);

  SummarizeOptions sm;
  auto* summarize = app.add_subcommand("summarize", "Posterior summaries of one trace");
  summarize->add_option("--trace", sm.trace)->required();

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  std::vector<std::string> args(argv, argv + argc);
  try {
    std::vector<std::string> names;
    for (const auto* sub : app.get_subcommands({})) names.push_back(sub->get_name());
    args = expand_spec(args, names);
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  const std::vector<std::pair<CLI::App*, std::function<int()>>> dispatch{
      {generate, [&] { return cmd_generate(g, gen); }},
      {fitc, [&] { return cmd_fit(g, fit); }},
      {train, [&] { return cmd_train_emulators(g, tr); }},
      {diagnose, [&] { return cmd_diagnose(g, dg); }},
      {costc, [&] { return cmd_cost_model(g, co); }},
      {compare, [&] { return cmd_compare(g, cmp); }},
      {summarize, [&] { return cmd_summarize(g, sm); }},
  };
  try {
    for (const auto& [sub, run] : dispatch) {
      if (!sub->parsed()) continue;
      OutputLock lock(g.out);
      bdinf::io::write_json(g.out / "run_spec.json", resolved_spec(app, *sub));
      return run();
    }
  } catch (const bdinf::Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", bdinf::to_string(e.kind()), e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
