#include <doctest.h>

#include <filesystem>
#include <random>

#include "tsph/error.hpp"
#include "tsph/series.hpp"

using namespace tsph;

TEST_SUITE("series") {
  TEST_CASE("csv parsing") {
    const auto s = parse_csv("0,1.0\n1,3.0\n2,2.0");
    CHECK(s.size() == 3);
    CHECK(s.values() == std::vector<double>{1.0, 3.0, 2.0});

    const auto h = parse_csv("\xEF\xBB\xBFtime,value\n0,1\n1,2\n2,1.5\n3,4\n");
    CHECK(h.size() == 4);
    const auto cp = critical_points(h).interior();
    REQUIRE(cp.size() == 2);
    CHECK(cp[0].kind == ExtremumKind::kMax);
    CHECK(cp[0].index == 1);
    CHECK(cp[1].kind == ExtremumKind::kMin);
    CHECK(cp[1].index == 2);

    CHECK_THROWS_AS(parse_csv("0,1\n0,2\n"), ValidationError);
    CHECK_THROWS_AS(parse_csv("0,1\n1,abc\n"), ParseError);
    CHECK_THROWS_AS(parse_csv("0,1\n1,nan\n"), Error);
    CHECK_THROWS_AS(parse_csv("0,1\n"), ValidationError);
  }

  TEST_CASE("csv round trip is bit exact") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g(0.0, 1e3);
    std::vector<double> t, v;
    for (int i = 0; i < 200; ++i) {
      t.push_back(i * 0.1 + 1e-7 * i * i);
      v.push_back(g(rng));
    }
    const TimeSeries s(t, v);
    CHECK(parse_csv(to_csv(s)) == s);
    const auto path = std::filesystem::temp_directory_path() / "tsph_series_roundtrip.csv";
    save_csv(s, path);
    CHECK(load_csv(path) == s);
    std::filesystem::remove(path);
  }

  TEST_CASE("critical points") {
    const auto a = critical_points(TimeSeries::from_values({1, 3, 2, 4})).interior();
    REQUIRE(a.size() == 2);
    CHECK(a[0].value == 3);
    CHECK(a[1].value == 2);
    CHECK(critical_points(TimeSeries::from_values({0, 1, 2, 3})).interior().empty());

    const auto b = critical_points(TimeSeries::from_values({0, 5, 1, 4, 2, 6})).interior();
    REQUIRE(b.size() == 4);
    const double expect[] = {5, 1, 4, 2};
    for (int i = 0; i < 4; ++i) {
      CHECK(b[i].value == expect[i]);
      CHECK(b[i].kind == (i % 2 == 0 ? ExtremumKind::kMax : ExtremumKind::kMin));
    }

    // Plateaus collapse to their leftmost sample.
    const auto p = critical_points(TimeSeries::from_values({0, 2, 2, 2, 1, 3})).interior();
    REQUIRE(p.size() == 2);
    CHECK(p[0].index == 1);

    CHECK_THROWS_AS(critical_points(TimeSeries::from_values({0, 2, 1, 2, 0})), NonGenericError);
    CHECK_THROWS_AS(critical_points(TimeSeries::from_values({1, 1, 1})), ConstantSeriesError);
  }

  TEST_CASE("critical points alternate on random series") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> len(2, 40);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 500; ++trial) {
      std::vector<double> v(static_cast<std::size_t>(len(rng)));
      for (auto& x : v) x = u(rng);
      const auto cp = critical_points(TimeSeries::from_values(v)).points;
      REQUIRE(cp.size() >= 2);
      CHECK(cp.front().boundary);
      CHECK(cp.back().boundary);
      for (std::size_t i = 1; i < cp.size(); ++i) {
        CHECK(cp[i].kind != cp[i - 1].kind);
        CHECK(cp[i].value != cp[i - 1].value);
        CHECK((cp[i].kind == ExtremumKind::kMax) == (cp[i].value > cp[i - 1].value));
      }
    }
  }

  TEST_CASE("make_generic") {
    const double eps = 1e-3;
    const auto g = make_generic(TimeSeries::from_values({0, 2, 1, 2, 0.5}), eps);
    CHECK(g.values()[1] == 2.0);
    CHECK(g.values()[3] == doctest::Approx(2.0 - eps / 2).epsilon(1e-12));
    CHECK(is_generic(g));

    const auto s = TimeSeries::from_values({0, 3, 1, 4, 2});
    CHECK(make_generic(s, eps) == s);
    CHECK_THROWS_AS(make_generic(TimeSeries::from_values({1, 1, 1}), eps), ConstantSeriesError);
    CHECK_THROWS_AS(make_generic(TimeSeries::from_values({0, 2, 1, 2, 0.5}), 0.5), ValidationError);
  }

  TEST_CASE("make_generic preserves order of separated values") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> level(0, 4);
    for (int trial = 0; trial < 300; ++trial) {
      std::vector<double> v(12);
      for (auto& x : v) x = level(rng);
      if (std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; })) continue;
      const double eps = 1e-3;
      const auto g = make_generic(TimeSeries::from_values(v), eps);
      CHECK(is_generic(g));
      for (std::size_t i = 0; i < v.size(); ++i) {
        CHECK(std::abs(g.values()[i] - v[i]) <= eps);
        for (std::size_t j = 0; j < v.size(); ++j) {
          if (v[i] - v[j] > eps) CHECK(g.values()[i] > g.values()[j]);
        }
      }
    }
  }

  TEST_CASE("augment") {
    const auto a = augment(TimeSeries::from_values({1, 3, 2}));
    REQUIRE(a.size() == 5);
    CHECK(a.values().front() == doctest::Approx(0.98));
    CHECK(a.values().back() == doctest::Approx(3.02));
    CHECK(is_augmented(a));
    CHECK_FALSE(is_augmented(TimeSeries::from_values({1, 3, 2})));

    const auto one = augment(TimeSeries::from_values({5}));
    REQUIRE(one.size() == 3);
    CHECK(one.values()[0] < 5.0);
    CHECK(one.values()[0] == doctest::Approx(5.0 - 1e-9).epsilon(1e-15));
    CHECK(one.values()[2] > 5.0);
  }

  TEST_CASE("time reversal") {
    const auto s = TimeSeries({0, 1, 3}, {1, 2, 0});
    const auto r = reversed(s);
    CHECK(r.times() == std::vector<double>{-3, -1, 0});
    CHECK(r.values() == std::vector<double>{0, 2, 1});
    CHECK(reversed(r) == s);
  }
}
