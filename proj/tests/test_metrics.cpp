// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "trendvar/errors.hpp"
#include "trendvar/metrics.hpp"

using namespace trendvar;

namespace {

const std::vector<double> kHistory{1, 2, 3, 4, 2, 3, 4, 5};

EvalConfig quarterly() {
  EvalConfig c;
  c.alpha = 0.05;
  c.seasonality = 4;
  return c;
}

}  // namespace

TEST_CASE("absolute percentage error") {
  CHECK(ape(2.0, 1.5) == 25.0);
  CHECK(ape(3.0, 3.0) == 0.0);
  CHECK(ape(0.5, 2.0) == 300.0);
  CHECK(ape(-4.0, -3.0) == 25.0);
  CHECK(ape(7.0, 5.0) == doctest::Approx(ape(70.0, 50.0)).epsilon(1e-15));
  try {
    ape(0.0, 1.0);
    FAIL("expected ZeroActual");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ZeroActual);
  }
}

TEST_CASE("scaled interval score hand cases") {
  CHECK(seasonal_scale(kHistory, 4) == 1.0);
  CHECK(sis(1.0, 0.0, 2.0, kHistory, quarterly()) == 2.0);
  CHECK(sis(2.0, 0.0, 2.0, kHistory, quarterly()) == 2.0);
  CHECK(sis(0.0, 0.0, 2.0, kHistory, quarterly()) == 2.0);
  CHECK(sis(3.0, 0.0, 2.0, kHistory, quarterly()) == 42.0);
  CHECK(sis(-1.0, 0.0, 2.0, kHistory, quarterly()) == 42.0);
}

TEST_CASE("SIS is smallest when the interval covers the actual") {
  const double width = 2.0;
  double inside = sis(1.0, 0.0, width, kHistory, quarterly());
  for (double shift : {-3.0, -1.5, -0.5, 0.5, 1.5, 3.0}) {
    const double lo = shift, hi = shift + width;
    const double s = sis(1.0, lo, hi, kHistory, quarterly());
    if (1.0 >= lo && 1.0 <= hi) CHECK(s == inside);
    else CHECK(s > inside);
  }
}

TEST_CASE("SIS is scale equivariant") {
  std::vector<double> scaled;
  const double lambda = 3.7;
  for (double v : kHistory) scaled.push_back(lambda * v);
  const double base = sis(2.6, 0.4, 2.1, kHistory, quarterly());
  CHECK(sis(lambda * 2.6, lambda * 0.4, lambda * 2.1, scaled, quarterly()) ==
        doctest::Approx(base).epsilon(1e-14));
}

TEST_CASE("degenerate seasonal scale") {
  try {
    seasonal_scale({1, 2, 3, 4, 1, 2, 3, 4}, 4);
    FAIL("expected DegenerateScale");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateScale);
  }
  CHECK_THROWS_AS(seasonal_scale({1, 2, 3}, 4), Error);
}

TEST_CASE("aggregation") {
  std::vector<Score> one{{1, 1, 1, 0, 0, 0, 0, 12.5, 3.0}};
  CHECK(aggregate(one, {1}).ape == 12.5);
  CHECK(aggregate(one, {1}).sis == 3.0);

  std::vector<Score> two;
  for (int origin = 1; origin <= 2; ++origin) {
    Score a;
    a.origin = origin;
    a.horizon = 1;
    a.ape = origin == 1 ? 5.0 : 15.0;  // mean 10
    a.sis = 1.0;
    two.push_back(a);
    Score b = a;
    b.horizon = 2;
    b.ape = 20.0;
    b.sis = 3.0;
    two.push_back(b);
  }
  const Summary s = aggregate(two, {1, 2});
  CHECK(s.ape == 15.0);
  CHECK(s.sis == 2.0);
  CHECK(s.scores_used == 4);

  std::vector<Score> same;
  for (int origin = 1; origin <= 20; ++origin) {
    for (int h = 1; h <= 8; ++h) same.push_back({origin, 1, h, 0, 0, 0, 0, 4.25, 1.5});
  }
  for (const std::vector<int>& sel : {std::vector<int>{1}, {1, 2, 3, 4}, {1, 2, 3, 4, 5, 6, 7, 8}}) {
    CHECK(aggregate(same, sel).ape == 4.25);
    CHECK(aggregate(same, sel).sis == 1.5);
  }
}

TEST_CASE("aggregation excludes zero actuals and rejects empty selections") {
  std::vector<Score> scores{{1, 1, 1, 0, 0, 0, 0, 10.0, 1.0}, {2, 1, 1, 0, 0, 0, 0, NAN, 3.0}};
  const Summary s = aggregate(scores, {1});
  CHECK(s.ape == 10.0);
  CHECK(s.sis == 2.0);
  CHECK(s.zero_actual_excluded == 1);
  CHECK_THROWS_AS(aggregate(scores, {}), Error);
  try {
    aggregate(scores, {2});
    FAIL("expected EmptySelection");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptySelection);
  }
}

TEST_CASE("biased residual autocorrelation") {
  Matrix x(1, 4);
  x << 1, -1, 1, -1;
  const Matrix acf = residual_acf(x, 2);
  CHECK(acf(0, 0) == 1.0);
  CHECK(acf(1, 0) == doctest::Approx(-0.75).epsilon(1e-15));
  CHECK(acf(2, 0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("normal QQ pairs") {
  const auto qq = normal_qq({3.0, 1.0, 2.0});
  REQUIRE(qq.size() == 3);
  CHECK(qq[1].first == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(qq[0].first == doctest::Approx(-qq[2].first).epsilon(1e-12));
  CHECK(qq[0].second == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(qq[2].second == doctest::Approx(1.0).epsilon(1e-15));
}
