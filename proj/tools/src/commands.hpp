#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace bdinf::cli {

struct Globals {
  std::uint64_t seed = 1;
  std::filesystem::path out = "out";
  int workers = 1;
  bool paper_scale = false;
};

struct PriorOptions {
  std::vector<double> lambda{-0.5108256237659907, 2.0};
  std::vector<double> mu{0.0, 2.0};
  std::vector<double> sigma{-0.6931471805599453, 0.5};
};

struct GenerateOptions {
  std::string scenario = "a";
  double lambda = 0.6;
  double mu = 1.0;
  int x0 = 10;
  int m = 1000;
  int bins = 10;
  double sigma = 0.5;
  double horizon = 100.0;
  std::string name = "dataset";
};

struct FitOptions {
  std::string scenario;
  std::filesystem::path data;
  std::filesystem::path emulators;
  PriorOptions priors;
  int x0 = 10;
  int iterations = -1;  // negative: scenario default
  int burnin = -1;
  int thin = -1;
  double step = 0.08;
  int replicates = 1000;
  std::string name = "trace";
};

struct TrainOptions {
  PriorOptions priors;
  int bins = 10;
  int x0 = 10;
  int n = 1000;
  int design_size = 2000;
  int random_starts = 50;
  int swap_attempts = 2000;
  double mass = 0.95;
  bool sparse = false;
  double sparsity = 0.9;
  std::string filter = "global";
  bool no_prediction_nugget = false;
  int hyper_iterations = 5000;
  int hyper_burnin = 1000;
  int hyper_thin = 4;
};

struct DiagnoseOptions {
  std::filesystem::path emulators;
  PriorOptions priors;
  std::string mode = "predictive";
  int points = 75;
  int candidates = 2000;
  int x0 = 10;
  int n = 0;  // 0: replicate count of the emulators
  int histogram_bins = 10;
};

struct CostOptions {
  double n_d = 150;
  double n = 1000;
  double tau = 1.0;
  double T = 11.0;
  double n_iter = 1e4;
  double n_iter_gp = 5000;
  double n_iter_gp_fit = 1e4;
};

struct CompareOptions {
  std::vector<std::filesystem::path> traces;
  std::vector<std::string> labels;
};

struct SummarizeOptions {
  std::filesystem::path trace;
};

int cmd_generate(const Globals& g, const GenerateOptions& o);
int cmd_fit(const Globals& g, const FitOptions& o);
int cmd_train_emulators(const Globals& g, const TrainOptions& o);
int cmd_diagnose(const Globals& g, const DiagnoseOptions& o);
int cmd_cost_model(const Globals& g, const CostOptions& o);
int cmd_compare(const Globals& g, const CompareOptions& o);
int cmd_summarize(const Globals& g, const SummarizeOptions& o);

}  // namespace bdinf::cli
