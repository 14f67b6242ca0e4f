#include <gtest/gtest.h>

#include "edgeshare/error.hpp"
#include "edgeshare/profiler.hpp"
#include "oracles.hpp"

using namespace edgeshare;

namespace {

std::vector<double> draw(Family family, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) {
    switch (family) {
      case Family::normal: x = oracle::normal(rng, 0, 1); break;
      case Family::exponential: x = oracle::exponential(rng, 2); break;
      case Family::uniform: x = oracle::uniform(rng, 0, 1); break;
      case Family::lognormal: x = oracle::lognormal(rng, 0, 0.5); break;
    }
  }
  return v;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::io_error;
}

FitReport report(Family f, std::vector<double> params) {
  FitReport r;
  r.best_family = f;
  r.params = std::move(params);
  return r;
}

}  // namespace

TEST(Profiler, NormalRecovery) {
  const FitReport r = fit_distribution({draw(Family::normal, 10000, 1), "n"});
  EXPECT_EQ(r.best_family, Family::normal);
  ASSERT_EQ(r.params.size(), 2u);
  EXPECT_LT(std::abs(r.params[0]), 0.05);
  EXPECT_LT(std::abs(r.params[1] - 1.0), 0.05);
  EXPECT_EQ(r.device_label, "n");
}

TEST(Profiler, ExponentialRecovery) {
  const FitReport r = fit_distribution({draw(Family::exponential, 10000, 2), "e"});
  EXPECT_EQ(r.best_family, Family::exponential);
  ASSERT_EQ(r.params.size(), 1u);
  EXPECT_GE(r.params[0], 1.9);
  EXPECT_LE(r.params[0], 2.1);
}

TEST(Profiler, UniformAndLognormalRecovery) {
  EXPECT_EQ(fit_distribution({draw(Family::uniform, 10000, 3), ""}).best_family, Family::uniform);
  EXPECT_EQ(fit_distribution({draw(Family::lognormal, 10000, 4), ""}).best_family, Family::lognormal);
}

TEST(Profiler, BestFamilyMinimisesRss) {
  for (Family f : kFamilies) {
    const FitReport r = fit_distribution({draw(f, 1000, 9), ""});
    const double min_rss = *std::min_element(r.per_family_rss.begin(), r.per_family_rss.end());
    EXPECT_EQ(r.rss, min_rss);
    EXPECT_GE(r.rss, 0.0);
  }
}

TEST(Profiler, RssMatchesDirectComputation) {
  const std::vector<double> v = draw(Family::normal, 400, 5);
  const FitReport r = fit_distribution({v, ""});
  const double lo = *std::min_element(v.begin(), v.end()), hi = *std::max_element(v.begin(), v.end());
  const std::size_t k = 20;  // ceil(sqrt(400))
  const double width = (hi - lo) / k;
  std::vector<double> counts(k);
  for (double x : v) counts[std::min(k - 1, static_cast<std::size_t>((x - lo) / width))] += 1;
  double mean = 0, var = 0;
  for (double x : v) mean += x;
  mean /= v.size();
  for (double x : v) var += (x - mean) * (x - mean);
  const double sd = std::sqrt(var / v.size());
  double rss = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double c = lo + (i + 0.5) * width;
    const double pdf = std::exp(-0.5 * (c - mean) * (c - mean) / (sd * sd)) / (sd * std::sqrt(2 * std::numbers::pi));
    const double d = counts[i] / (v.size() * width) - pdf;
    rss += d * d;
  }
  EXPECT_NEAR(r.per_family_rss[0], rss, 1e-9 * std::max(1.0, rss));
}

TEST(Profiler, SupportViolationsGetInfiniteRss) {
  const FitReport r = fit_distribution({draw(Family::normal, 500, 6), ""});
  EXPECT_TRUE(std::isinf(r.per_family_rss[1]));
  EXPECT_TRUE(std::isinf(r.per_family_rss[3]));
}

TEST(Profiler, FitErrors) {
  EXPECT_EQ(code_of([] { fit_distribution({{1, 2, 3}, ""}); }), ErrorCode::too_few_samples);
  EXPECT_EQ(code_of([] { fit_distribution({std::vector<double>(20, 5.0), ""}); }),
            ErrorCode::too_few_distinct_values);
  std::vector<double> bad = draw(Family::uniform, 20, 1);
  bad[3] = std::nan("");
  EXPECT_EQ(code_of([&] { fit_distribution({bad, ""}); }), ErrorCode::non_finite);
}

TEST(Outliers, HandComputedExample) {
  const std::vector<double> v{0, 0, 0, 0, 100};
  EXPECT_TRUE(detect_outliers(v, 3.0).empty());
  EXPECT_EQ(detect_outliers(v, 1.5), (std::vector<std::size_t>{4}));
  EXPECT_TRUE(detect_outliers(v, 2.0).empty());  // strictly greater than
}

TEST(Outliers, NormalTailFraction) {
  const auto v = draw(Family::normal, 10000, 12);
  const double fraction = static_cast<double>(detect_outliers(v).size()) / v.size();
  EXPECT_NEAR(fraction, 0.0027, 0.002);
}

TEST(Outliers, AffineInvariance) {
  const auto v = draw(Family::exponential, 2000, 13);
  const auto base = detect_outliers(v);
  ASSERT_FALSE(base.empty());
  for (auto [a, b] : {std::pair{2.0, 5.0}, {-3.0, 1.0}, {0.001, -7.0}, {1000.0, 1e6}}) {
    std::vector<double> w(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) w[i] = a * v[i] + b;
    EXPECT_EQ(detect_outliers(w), base) << a << "," << b;
  }
}

TEST(Outliers, Errors) {
  EXPECT_EQ(code_of([] { detect_outliers({4, 4, 4}); }), ErrorCode::zero_variance);
  EXPECT_EQ(code_of([] { detect_outliers({1}); }), ErrorCode::too_few_samples);
}

TEST(Regroup, Examples) {
  const auto same = regroup_devices({report(Family::normal, {0, 1}), report(Family::normal, {0, 1})});
  EXPECT_EQ(same.size(), 1u);
  const auto families = regroup_devices({report(Family::normal, {0, 1}), report(Family::exponential, {1})});
  EXPECT_EQ(families.size(), 2u);
  EXPECT_GT(relative_parameter_distance({0, 1}, {10, 1}), kRegroupDistance);
  const auto far = regroup_devices({report(Family::normal, {0, 1}), report(Family::normal, {10, 1})});
  EXPECT_EQ(far.size(), 2u);
}

TEST(Regroup, TransitiveLinking) {
  // a-b and b-c are within 0.25, a-c is not: one connected component.
  const auto groups = regroup_devices({report(Family::exponential, {1.0}), report(Family::exponential, {1.2}),
                                       report(Family::exponential, {1.45})});
  EXPECT_GT(relative_parameter_distance({1.0}, {1.45}), kRegroupDistance);
  ASSERT_EQ(groups.size(), 1u);
  EXPECT_EQ(groups[0].size(), 3u);
}

TEST(Csv, HeaderOptional) {
  EXPECT_EQ(parse_csv_values("value\n1\n2.5\n-3e2\n"), (std::vector<double>{1, 2.5, -300}));
  EXPECT_EQ(parse_csv_values("1\n\n2\n"), (std::vector<double>{1, 2}));
  EXPECT_THROW(parse_csv_values("1\nabc\n"), Error);
}
