#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace edgeshare {

enum class Family { normal, exponential, uniform, lognormal };

/// Fixed candidate order; also the tie-break order.
inline constexpr std::array<Family, 4> kFamilies = {Family::normal, Family::exponential,
                                                    Family::uniform, Family::lognormal};

std::string_view to_string(Family family) noexcept;

inline constexpr std::size_t kMinFitSamples = 8;

struct Sample {
  std::vector<double> values;
  std::string device_label;
};

struct FitReport {
  std::string device_label;
  Family best_family = Family::normal;
  /// normal: {mean, stddev}; exponential: {rate}; uniform: {a, b};
  /// lognormal: {mu, sigma} of the log-values.
  std::vector<double> params;
  double rss = 0.0;
  /// Indexed like kFamilies; +inf for a family whose support excludes the data.
  std::array<double, 4> per_family_rss{};
  std::array<std::vector<double>, 4> per_family_params;
};

/// Density histogram with ceil(sqrt(N)) equal-width bins, method-of-moments
/// fits for the four families, and the family minimizing
///   RSS = sum_i (density_i - pdf(center_i))^2.
/// Throws Error(too_few_samples), Error(non_finite) or
/// Error(too_few_distinct_values).
FitReport fit_distribution(const Sample& sample);

double family_pdf(Family family, const std::vector<double>& params, double x);

/// Indices with |x - mean| > threshold_sigmas * population stddev.
/// Throws Error(too_few_samples) below two values, Error(zero_variance).
std::vector<std::size_t> detect_outliers(const std::vector<double>& values,
                                         double threshold_sigmas = 3.0);

inline constexpr double kRegroupDistance = 0.25;

/// ||p - q|| / max(||p||, ||q||) over parameter vectors; 0 when both are 0.
double relative_parameter_distance(const std::vector<double>& p, const std::vector<double>& q);

/// Partitions reports by best family, then links devices whose fitted
/// parameters are within kRegroupDistance; groups are the connected
/// components. Each group lists report indices in ascending order; groups
/// are ordered by their first index.
std::vector<std::vector<std::size_t>> regroup_devices(const std::vector<FitReport>& reports);

/// One value per line; a non-numeric first line is taken as a header.
std::vector<double> parse_csv_values(std::string_view text);

}  // namespace edgeshare
