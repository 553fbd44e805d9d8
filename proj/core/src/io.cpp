#include "bdinf/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "bdinf/error.hpp"
#include "bdinf/gp_dense.hpp"
#include "bdinf/gp_sparse.hpp"

namespace bdinf {
namespace io {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return {buf, res.ptr};
}

double parse_double(const std::string& s) {
  if (s == "inf" || s == "Inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf" || s == "-Inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    fail(ErrorKind::io_failure, "cannot parse number '" + s + "'");
  }
  return v;
}

void write_text(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io_failure, "cannot open " + path.string() + " for writing");
  out << content;
  if (!out) fail(ErrorKind::io_failure, "failed writing " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io_failure, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const fs::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::exception& e) {
    fail(ErrorKind::io_failure, path.string() + ": " + e.what());
  }
}

std::size_t Csv::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) fail(ErrorKind::io_failure, "CSV column '" + name + "' missing");
  return static_cast<std::size_t>(it - header.begin());
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

fs::path with_ext(fs::path stem, const char* ext) { return stem.replace_extension(ext); }

std::string join(const std::vector<std::string>& fields) {
  std::string s;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) s += ',';
    s += fields[i];
  }
  return s;
}

}  // namespace

Csv read_csv(const fs::path& path) {
  std::istringstream in(read_text(path));
  Csv csv;
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::io_failure, path.string() + " is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  csv.header = split(line);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto row = split(line);
    if (row.size() != csv.header.size()) {
      fail(ErrorKind::io_failure, path.string() + ": row width differs from header");
    }
    csv.rows.push_back(std::move(row));
  }
  return csv;
}

json to_json(const model::BirthDeathParams& p) { return {{"lambda", p.lambda}, {"mu", p.mu}, {"x0", p.x0}}; }

json to_json(const mcmc::Priors& p) {
  auto one = [](const mcmc::LogNormalPrior& q) { return json{{"location", q.location}, {"scale_var", q.scale_var}}; };
  return {{"lambda", one(p.lambda)}, {"mu", one(p.mu)}, {"sigma", one(p.sigma)}};
}

json to_json(const mcmc::McmcConfig& c) {
  return {{"iterations", c.iterations}, {"burnin", c.burnin}, {"thin", c.thin}, {"step_sd", c.step_sd},
          {"seed", c.seed}};
}

json to_json(const design::Bounds& b) {
  return {{"log_lambda", {b[0].lo, b[0].hi}}, {"log_mu", {b[1].lo, b[1].hi}}};
}

mcmc::Priors priors_from_json(const json& j, mcmc::Priors p) {
  auto one = [&](const char* key, mcmc::LogNormalPrior& q) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    q.location = v.value("location", q.location);
    q.scale_var = v.value("scale_var", q.scale_var);
    q.validate();
  };
  one("lambda", p.lambda);
  one("mu", p.mu);
  one("sigma", p.sigma);
  return p;
}

design::Bounds bounds_from_json(const json& j) {
  design::Bounds b;
  b[0] = {j.at("log_lambda").at(0).get<double>(), j.at("log_lambda").at(1).get<double>()};
  b[1] = {j.at("log_mu").at(0).get<double>(), j.at("log_mu").at(1).get<double>()};
  return b;
}

void write_dataset(const fs::path& stem, const obs::ObservedDataset& data, const json& meta) {
  std::ostringstream csv;
  json side = meta;
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, obs::ExactDeathTimes>) {
          side["kind"] = "exact_times";
          csv << "death_time\n";
          for (double t : d.times) csv << format_double(t) << '\n';
        } else if constexpr (std::is_same_v<T, obs::CensusCounts>) {
          side["kind"] = "census";
          csv << "t_lo,t_hi,count\n";
          const auto& ts = d.grid.census_times;
          for (std::size_t i = 0; i < d.counts.size(); ++i) {
            const double lo = i == 0 ? 0.0 : ts[i - 1];
            const double hi = i < ts.size() ? ts[i] : std::numeric_limits<double>::infinity();
            csv << format_double(lo) << ',' << format_double(hi) << ',' << d.counts[i] << '\n';
          }
        } else {
          side["kind"] = "proportions";
          if (d.sigma_true) side["sigma_true"] = *d.sigma_true;
          csv << "t,y\n";
          for (std::size_t i = 0; i < d.y.size(); ++i) {
            csv << format_double(d.grid.census_times[i]) << ',' << format_double(d.y[i]) << '\n';
          }
        }
      },
      data);
  write_text(with_ext(stem, ".csv"), csv.str());
  write_json(with_ext(stem, ".json"), side);
}

obs::ObservedDataset read_dataset(const fs::path& csv_path) {
  const Csv csv = read_csv(csv_path);
  const auto sidecar = with_ext(csv_path, ".json");
  if (csv.header == std::vector<std::string>{"death_time"}) {
    obs::ExactDeathTimes d;
    for (const auto& r : csv.rows) d.times.push_back(parse_double(r[0]));
    d.validate();
    return d;
  }
  if (csv.header == std::vector<std::string>{"t_lo", "t_hi", "count"}) {
    obs::CensusCounts d;
    for (const auto& r : csv.rows) {
      const double hi = parse_double(r[1]);
      if (std::isfinite(hi)) d.grid.census_times.push_back(hi);
      d.counts.push_back(std::stoi(r[2]));
    }
    d.validate();
    return d;
  }
  if (csv.header == std::vector<std::string>{"t", "y"}) {
    obs::ProportionObservations d;
    for (const auto& r : csv.rows) {
      d.grid.census_times.push_back(parse_double(r[0]));
      d.y.push_back(parse_double(r[1]));
    }
    if (fs::exists(sidecar)) {
      const auto side = read_json(sidecar);
      if (side.contains("sigma_true")) d.sigma_true = side.at("sigma_true").get<double>();
    }
    d.validate();
    return d;
  }
  fail(ErrorKind::io_failure, csv_path.string() + ": unrecognized dataset header");
}

void write_trace(const fs::path& stem, const mcmc::Trace& trace, const json& meta) {
  std::ostringstream csv;
  std::vector<std::string> header{"iter"};
  header.insert(header.end(), trace.names.begin(), trace.names.end());
  csv << join(header) << '\n';
  for (Eigen::Index r = 0; r < trace.rows(); ++r) {
    csv << trace.iteration[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < trace.samples.cols(); ++c) csv << ',' << format_double(trace.samples(r, c));
    csv << '\n';
  }
  write_text(with_ext(stem, ".csv"), csv.str());
  json side = meta;
  side["parameters"] = trace.names;
  side["rows"] = trace.rows();
  side["acceptance_rate"] = trace.acceptance_rate;
  side["config"] = to_json(trace.config);
  write_json(with_ext(stem, ".json"), side);
}

mcmc::Trace read_trace(const fs::path& csv_path) {
  const Csv csv = read_csv(csv_path);
  if (csv.header.empty() || csv.header.front() != "iter") {
    fail(ErrorKind::io_failure, csv_path.string() + ": trace CSV must start with an iter column");
  }
  mcmc::Trace t;
  t.names.assign(csv.header.begin() + 1, csv.header.end());
  t.samples.resize(static_cast<Eigen::Index>(csv.rows.size()), static_cast<Eigen::Index>(t.names.size()));
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    t.iteration.push_back(std::stoi(csv.rows[r][0]));
    for (std::size_t c = 0; c < t.names.size(); ++c) {
      t.samples(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = parse_double(csv.rows[r][c + 1]);
    }
  }
  const auto sidecar = with_ext(csv_path, ".json");
  if (fs::exists(sidecar)) {
    const auto side = read_json(sidecar);
    t.acceptance_rate = side.value("acceptance_rate", 0.0);
    if (side.contains("config")) {
      const auto& c = side.at("config");
      t.config.iterations = c.value("iterations", t.config.iterations);
      t.config.burnin = c.value("burnin", t.config.burnin);
      t.config.thin = c.value("thin", t.config.thin);
      t.config.seed = c.value("seed", t.config.seed);
      t.config.step_sd = c.value("step_sd", t.config.step_sd);
    }
  }
  return t;
}

void write_design(const fs::path& stem, const design::Design& design, const json& meta) {
  std::ostringstream csv;
  csv << "log_lambda,log_mu\n";
  for (const auto& p : design.points) csv << format_double(p.log_lambda) << ',' << format_double(p.log_mu) << '\n';
  write_text(with_ext(stem, ".csv"), csv.str());
  json side = meta;
  side["bounds"] = to_json(design.bounds);
  side["n_d"] = design.size();
  write_json(with_ext(stem, ".json"), side);
}

void write_training_set(const fs::path& stem, const design::TrainingSet& training) {
  std::ostringstream csv;
  csv << "design_index,log_lambda,log_mu,p_hat,x\n";
  for (std::size_t i = 0; i < training.size(); ++i) {
    csv << training.retained_idx[i] << ',' << format_double(training.points[i].log_lambda) << ','
        << format_double(training.points[i].log_mu) << ',' << format_double(training.p_hat[i]) << ','
        << format_double(training.targets[i]) << '\n';
  }
  write_text(with_ext(stem, ".csv"), csv.str());
  write_json(with_ext(stem, ".json"),
             {{"t", training.t}, {"n", training.n}, {"retained", training.size()},
              {"retained_idx", training.retained_idx}});
}

void write_emulator(const fs::path& path, const gp::Emulator& emulator) { write_json(path, emulator.to_json()); }

gp::EmulatorPtr read_emulator(const fs::path& path) {
  try {
    return gp::emulator_from_json(read_json(path));
  } catch (const json::exception& e) {
    fail(ErrorKind::io_failure, path.string() + ": malformed emulator file: " + e.what());
  }
}

std::vector<gp::EmulatorPtr> read_emulator_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) fail(ErrorKind::io_failure, dir.string() + " is not a directory");
  std::vector<gp::EmulatorPtr> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    const auto j = read_json(entry.path());
    if (!j.is_object() || !j.contains("kind") || !j.contains("hyper")) continue;
    out.push_back(read_emulator(entry.path()));
  }
  if (out.empty()) fail(ErrorKind::io_failure, "no emulator files found in " + dir.string());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a->time() < b->time(); });
  return out;
}

json to_json(const diag::DiagnosticsReport& r) {
  return {{"t", r.t},
          {"mode", diag::to_string(r.mode)},
          {"n_validation", r.ipe.size()},
          {"md2", r.md2},
          {"df", r.df},
          {"chi2_interval", {r.chi2_interval.first, r.chi2_interval.second}},
          {"md2_pass", r.md2_pass},
          {"ipe_within_1_96", r.ipe_within_fraction}};
}

void write_diagnostics(const fs::path& stem, const diag::DiagnosticsReport& r) {
  std::ostringstream csv;
  csv << "index,log_lambda,log_mu,target,pred_mean,pred_var,ipe,pit\n";
  for (std::size_t i = 0; i < r.ipe.size(); ++i) {
    csv << i << ',' << format_double(r.points[i].log_lambda) << ',' << format_double(r.points[i].log_mu) << ','
        << format_double(r.targets[i]) << ',' << format_double(r.predictions[i].mean) << ','
        << format_double(r.predictions[i].variance) << ',' << format_double(r.ipe[i]) << ','
        << format_double(r.pit[i]) << '\n';
  }
  write_text(with_ext(stem, ".csv"), csv.str());
  write_json(with_ext(stem, ".json"), to_json(r));
}

std::string pit_histogram_csv(const std::vector<diag::DiagnosticsReport>& reports, int bins) {
  require(bins >= 1, "histogram needs at least one bin");
  std::ostringstream csv;
  csv << "t,bin_lo,bin_hi,count\n";
  for (const auto& r : reports) {
    std::vector<int> counts(static_cast<std::size_t>(bins), 0);
    for (double p : r.pit) {
      const int b = std::min(bins - 1, static_cast<int>(p * bins));
      ++counts[static_cast<std::size_t>(b)];
    }
    for (int b = 0; b < bins; ++b) {
      csv << format_double(r.t) << ',' << format_double(static_cast<double>(b) / bins) << ','
          << format_double(static_cast<double>(b + 1) / bins) << ',' << counts[static_cast<std::size_t>(b)] << '\n';
    }
  }
  return csv.str();
}

std::string summary_csv(const std::vector<summary::ParameterSummary>& s) {
  std::ostringstream csv;
  csv << "parameter,mean,sd,q025,q975\n";
  for (const auto& p : s) {
    csv << p.name << ',' << format_double(p.mean) << ',' << format_double(p.sd) << ',' << format_double(p.q025)
        << ',' << format_double(p.q975) << '\n';
  }
  return csv.str();
}

json to_json(const std::vector<summary::ParameterSummary>& s) {
  json j = json::object();
  for (const auto& p : s) {
    j[p.name] = {{"mean", p.mean}, {"sd", p.sd}, {"q025", p.q025}, {"q975", p.q975}};
  }
  return j;
}

std::string comparison_csv(const std::vector<summary::PairComparison>& c) {
  std::ostringstream csv;
  csv << "parameter,run_a,run_b,mean_a,mean_b,pooled_sd,std_mean_diff,w1\n";
  for (const auto& p : c) {
    csv << p.parameter << ',' << p.label_a << ',' << p.label_b << ',' << format_double(p.mean_a) << ','
        << format_double(p.mean_b) << ',' << format_double(p.pooled_sd) << ','
        << format_double(p.standardized_difference) << ',' << format_double(p.wasserstein1) << '\n';
  }
  return csv.str();
}

json to_json(const cost::CostModelInputs& in) {
  return {{"n_d", in.n_d},       {"n", in.n},           {"tau", in.tau},
          {"T", in.T},           {"n_iter", in.n_iter}, {"n_iter_gp", in.n_iter_gp},
          {"n_iter_gp_fit", in.n_iter_gp_fit}};
}

json to_json(const cost::CostReport& r) {
  json j{{"simulator_cpu_units", r.simulator_units},
         {"gp_cpu_units", r.gp_units},
         {"lhs_nd3_gp_plus_iter", r.lhs},
         {"rhs_n_tau_iter_minus_nd", r.rhs},
         {"gp_more_efficient", r.gp_more_efficient}};
  if (std::isfinite(r.breakeven_tau)) {
    j["breakeven_tau"] = r.breakeven_tau;
  } else {
    j["breakeven_tau"] = nullptr;
  }
  return j;
}

}  // namespace io

namespace gp {

EmulatorPtr emulator_from_json(const nlohmann::json& j) {
  design::TrainingSet ts;
  ts.t = j.at("t").get<double>();
  ts.n = j.at("n").get<int>();
  for (const auto& p : j.at("points")) ts.points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  ts.p_hat = j.at("p_hat").get<std::vector<double>>();
  ts.targets = j.at("targets").get<std::vector<double>>();
  ts.retained_idx = j.at("retained_idx").get<std::vector<int>>();
  MeanCoefficients mean;
  mean.b = j.at("mean").get<std::array<double, 6>>();
  EmulatorOptions options;
  options.prediction_nugget = j.value("prediction_nugget", true);

  const auto kind = j.at("kind").get<std::string>();
  const auto& h = j.at("hyper");
  if (kind == "dense") {
    const DenseHyper hyper{h.at("a").get<double>(), h.at("r1").get<double>(), h.at("r2").get<double>()};
    return std::make_shared<DenseEmulator>(std::move(ts), mean, hyper, options);
  }
  if (kind == "sparse") {
    const SparseHyper hyper{h.at("a").get<double>(), h.at("tau").get<std::array<double, kInputDim>>()};
    const auto& sc = j.at("scaling");
    InputScaling scaling;
    scaling.reference[0] = {sc.at(0).at(0).get<double>(), sc.at(0).at(1).get<double>()};
    scaling.reference[1] = {sc.at(1).at(0).get<double>(), sc.at(1).at(1).get<double>()};
    const auto& b = j.at("budget");
    const SparsityBudget budget{b.at("s").get<double>(), b.at("n_p").get<int>(), b.at("c").get<double>()};
    return std::make_shared<SparseEmulator>(std::move(ts), mean, hyper, scaling, budget, options);
  }
  fail(ErrorKind::io_failure, "unknown emulator kind '" + kind + "'");
}

}  // namespace gp
}  // namespace bdinf
