#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <bdinf/design.hpp>
#include <bdinf/random.hpp>

namespace bdinf::testing {

namespace fs = std::filesystem;

// ---- goodness of fit -------------------------------------------------------

/// Two-sided one-sample Kolmogorov-Smirnov statistic against a continuous CDF.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);
/// Asymptotic p-value with Stephens' small-sample correction.
double ks_pvalue(double d, std::size_t n);

/// Anderson-Darling A^2 for a fully specified continuous CDF.
double anderson_darling(std::vector<double> sample, const std::function<double(double)>& cdf);
/// Upper 1% point of A^2 when no parameters are estimated.
inline constexpr double kAndersonDarlingCritical01 = 3.857;

// ---- fixtures --------------------------------------------------------------

/// Training set whose dead counts are Binomial(n, P0(t)) draws at each point,
/// the same law as the simulator's dead fraction. Points outside the retention
/// band are dropped.
design::TrainingSet binomial_training_set(std::span<const Theta> points, double t, int n, int x0, Rng& rng);

/// Design box covering 95% of the default prior mass.
design::Bounds default_bounds();

// ---- filesystem and CLI ----------------------------------------------------

/// Fresh empty directory under the system temp path.
fs::path scratch_dir(const std::string& tag);

std::string read_bytes(const fs::path& path);

/// Relative path -> file bytes for every regular file under dir.
std::map<std::string, std::string> snapshot(const fs::path& dir);

/// Runs the bdinf binary with the given arguments; returns its exit status.
/// Output is redirected to <log>.
int run_cli(const std::string& cli, const std::vector<std::string>& args, const fs::path& log);

}  // namespace bdinf::testing
