#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "bdinf/cost_model.hpp"
#include "bdinf/design.hpp"
#include "bdinf/diagnostics.hpp"
#include "bdinf/emulator.hpp"
#include "bdinf/mcmc.hpp"
#include "bdinf/observation.hpp"
#include "bdinf/summary.hpp"

namespace bdinf::io {

namespace fs = std::filesystem;
using nlohmann::json;

/// Shortest round-trip decimal form; "inf"/"-inf"/"nan" for non-finite values.
std::string format_double(double x);
double parse_double(const std::string& s);

void write_text(const fs::path& path, const std::string& content);
std::string read_text(const fs::path& path);
void write_json(const fs::path& path, const json& j);
json read_json(const fs::path& path);

/// Minimal CSV: a header row plus rows of comma-separated fields, no quoting.
struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
};
Csv read_csv(const fs::path& path);

json to_json(const model::BirthDeathParams& p);
json to_json(const mcmc::Priors& p);
json to_json(const mcmc::McmcConfig& c);
json to_json(const design::Bounds& b);
mcmc::Priors priors_from_json(const json& j, mcmc::Priors defaults = {});
design::Bounds bounds_from_json(const json& j);

// Datasets: <stem>.csv plus <stem>.json sidecar.
void write_dataset(const fs::path& stem, const obs::ObservedDataset& data, const json& meta);
obs::ObservedDataset read_dataset(const fs::path& csv_path);

// Traces: <stem>.csv (iter,log_lambda,log_mu[,log_sigma]) plus <stem>.json metadata.
void write_trace(const fs::path& stem, const mcmc::Trace& trace, const json& meta);
mcmc::Trace read_trace(const fs::path& csv_path);

void write_design(const fs::path& stem, const design::Design& design, const json& meta);
void write_training_set(const fs::path& stem, const design::TrainingSet& training);

void write_emulator(const fs::path& path, const gp::Emulator& emulator);
gp::EmulatorPtr read_emulator(const fs::path& path);
/// Every *.json emulator file in `dir`, sorted by census time.
std::vector<gp::EmulatorPtr> read_emulator_dir(const fs::path& dir);

json to_json(const diag::DiagnosticsReport& r);
/// Per-point ipe and pit (<stem>.csv) and the JSON summary (<stem>.json).
void write_diagnostics(const fs::path& stem, const diag::DiagnosticsReport& r);
/// Equal-width PIT histogram over [0, 1]: columns t,bin_lo,bin_hi,count.
std::string pit_histogram_csv(const std::vector<diag::DiagnosticsReport>& reports, int bins = 10);

std::string summary_csv(const std::vector<summary::ParameterSummary>& s);
json to_json(const std::vector<summary::ParameterSummary>& s);
std::string comparison_csv(const std::vector<summary::PairComparison>& c);

json to_json(const cost::CostModelInputs& in);
json to_json(const cost::CostReport& r);

}  // namespace bdinf::io
