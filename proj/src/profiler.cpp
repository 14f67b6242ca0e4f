#include "edgeshare/profiler.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "edgeshare/error.hpp"

namespace edgeshare {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Moments {
  double mean;
  double stddev;  // population
};

Moments moments(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / n)};
}

std::size_t family_index(Family f) {
  return static_cast<std::size_t>(std::find(kFamilies.begin(), kFamilies.end(), f) - kFamilies.begin());
}

}  // namespace

std::string_view to_string(Family family) noexcept {
  switch (family) {
    case Family::normal: return "normal";
    case Family::exponential: return "exponential";
    case Family::uniform: return "uniform";
    case Family::lognormal: return "lognormal";
  }
  return "unknown";
}

double family_pdf(Family family, const std::vector<double>& params, double x) {
  switch (family) {
    case Family::normal: {
      const double z = (x - params[0]) / params[1];
      return std::exp(-0.5 * z * z) / (params[1] * std::sqrt(2.0 * std::numbers::pi));
    }
    case Family::exponential:
      return x < 0 ? 0.0 : params[0] * std::exp(-params[0] * x);
    case Family::uniform:
      return (x < params[0] || x > params[1]) ? 0.0 : 1.0 / (params[1] - params[0]);
    case Family::lognormal: {
      if (x <= 0) return 0.0;
      const double z = (std::log(x) - params[0]) / params[1];
      return std::exp(-0.5 * z * z) / (x * params[1] * std::sqrt(2.0 * std::numbers::pi));
    }
  }
  return 0.0;
}

FitReport fit_distribution(const Sample& sample) {
  const auto& v = sample.values;
  if (v.size() < kMinFitSamples) {
    throw Error(ErrorCode::too_few_samples, "need at least " + std::to_string(kMinFitSamples) +
                                                " values, got " + std::to_string(v.size()));
  }
  if (std::any_of(v.begin(), v.end(), [](double x) { return !std::isfinite(x); })) {
    throw Error(ErrorCode::non_finite, "sample contains non-finite values");
  }
  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(hi > lo)) {
    throw Error(ErrorCode::too_few_distinct_values, "sample has zero variance; no family can be fitted");
  }

  const std::size_t n = v.size();
  const auto bins = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<double> density(bins, 0.0);
  for (double x : v) {
    auto b = static_cast<std::size_t>((x - lo) / width);
    density[std::min(b, bins - 1)] += 1.0;
  }
  for (auto& d : density) d /= static_cast<double>(n) * width;

  const Moments m = moments(v);
  const bool positive = lo > 0;

  FitReport report;
  report.device_label = sample.device_label;
  report.per_family_params[family_index(Family::normal)] = {m.mean, m.stddev};
  report.per_family_params[family_index(Family::uniform)] = {lo, hi};
  if (positive) {
    report.per_family_params[family_index(Family::exponential)] = {1.0 / m.mean};
    std::vector<double> logs(v.size());
    std::transform(v.begin(), v.end(), logs.begin(), [](double x) { return std::log(x); });
    const Moments lm = moments(logs);
    if (lm.stddev > 0) report.per_family_params[family_index(Family::lognormal)] = {lm.mean, lm.stddev};
  }

  for (std::size_t f = 0; f < kFamilies.size(); ++f) {
    const auto& params = report.per_family_params[f];
    if (params.empty()) {
      report.per_family_rss[f] = kInf;
      continue;
    }
    double rss = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
      const double center = lo + (static_cast<double>(b) + 0.5) * width;
      const double diff = density[b] - family_pdf(kFamilies[f], params, center);
      rss += diff * diff;
    }
    report.per_family_rss[f] = rss;
  }

  std::size_t best = 0;
  for (std::size_t f = 1; f < kFamilies.size(); ++f) {
    if (report.per_family_rss[f] < report.per_family_rss[best]) best = f;
  }
  report.best_family = kFamilies[best];
  report.params = report.per_family_params[best];
  report.rss = report.per_family_rss[best];
  return report;
}

std::vector<std::size_t> detect_outliers(const std::vector<double>& values, double threshold_sigmas) {
  if (values.size() < 2) throw Error(ErrorCode::too_few_samples, "need at least two values");
  if (std::any_of(values.begin(), values.end(), [](double x) { return !std::isfinite(x); })) {
    throw Error(ErrorCode::non_finite, "sample contains non-finite values");
  }
  const Moments m = moments(values);
  if (!(m.stddev > 0)) throw Error(ErrorCode::zero_variance, "sample has zero variance");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (std::abs(values[i] - m.mean) > threshold_sigmas * m.stddev) out.push_back(i);
  }
  return out;
}

double relative_parameter_distance(const std::vector<double>& p, const std::vector<double>& q) {
  const std::size_t n = std::max(p.size(), q.size());
  double diff = 0.0, np = 0.0, nq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = i < p.size() ? p[i] : 0.0;
    const double b = i < q.size() ? q[i] : 0.0;
    diff += (a - b) * (a - b);
    np += a * a;
    nq += b * b;
  }
  const double scale = std::sqrt(std::max(np, nq));
  return scale == 0.0 ? 0.0 : std::sqrt(diff) / scale;
}

std::vector<std::vector<std::size_t>> regroup_devices(const std::vector<FitReport>& reports) {
  std::vector<std::size_t> parent(reports.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < reports.size(); ++i) {
    for (std::size_t j = i + 1; j < reports.size(); ++j) {
      if (reports[i].best_family != reports[j].best_family) continue;
      if (relative_parameter_distance(reports[i].params, reports[j].params) <= kRegroupDistance) {
        parent[find(j)] = find(i);
      }
    }
  }
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> slot(reports.size(), SIZE_MAX);
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const std::size_t root = find(i);
    if (slot[root] == SIZE_MAX) {
      slot[root] = groups.size();
      groups.emplace_back();
    }
    groups[slot[root]].push_back(i);
  }
  return groups;
}

std::vector<double> parse_csv_values(std::string_view text) {
  std::vector<double> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const std::string field = line.substr(first, line.find(',', first) - first);
    double value = 0.0;
    std::size_t consumed = 0;
    bool ok = true;
    try {
      value = std::stod(field, &consumed);
    } catch (const std::exception&) {
      ok = false;
    }
    if (!ok || consumed != field.size()) {
      if (line_no == 1 && out.empty()) continue;  // header
      throw Error(ErrorCode::parse_error, "line " + std::to_string(line_no) + ": not a number");
    }
    out.push_back(value);
  }
  return out;
}

}  // namespace edgeshare
