#include <doctest.h>

#include <cmath>
#include <random>

#include "wcur/format.hpp"
#include "wcur/grid.hpp"

using namespace wcur;

TEST_SUITE("grid_format") {
  TEST_CASE("number formatting round-trips at 17 digits") {
    CHECK(format_number(0.0) == "0");
    CHECK(format_number(-0.0) == "0");
    CHECK(format_number(1.0) == "1");
    CHECK(format_number(0.25) == "0.25");
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(-30.0, 30.0);
    for (int t = 0; t < 2000; ++t) {
      const double x = std::ldexp(U(rng), static_cast<int>(rng() % 200) - 100);
      const auto back = parse_number(format_number(x));
      REQUIRE(back.has_value());
      CHECK(*back == x);
    }
  }

  TEST_CASE("parsing rejects trailing garbage") {
    CHECK_FALSE(parse_number("1.5x").has_value());
    CHECK_FALSE(parse_number("").has_value());
    CHECK(parse_number("+2.5").value() == 2.5);
    CHECK(parse_integer("17").value() == 17);
    CHECK_FALSE(parse_integer("1.0").has_value());
    CHECK(parse_number_list("0.3,0.5,0.7") == std::vector<double>{0.3, 0.5, 0.7});
    CHECK_THROWS_AS(parse_number_list("0.3,,0.7"), ValidationError);
    CHECK(split_ws("  a  bb\tc ").size() == 3);
  }

  TEST_CASE("grid validation") {
    CHECK_THROWS_AS(Grid(Axis{1, 0, 1, false}, Axis{5, 0, 1, false}), ValidationError);
    CHECK_THROWS_AS(Grid(Axis{5, 1, 1, false}, Axis{5, 0, 1, false}), ValidationError);
    const Grid g(Axis{5, 0, 1, true}, Axis{5, 0, 1, false});
    CHECK(g.u.h() == doctest::Approx(0.2));
    CHECK(g.v.h() == doctest::Approx(0.25));
    CHECK(g.shift(0, 0, -1) == 4);
    CHECK(g.shift(1, 0, -1) == -1);
  }

  TEST_CASE("field margins") {
    const Grid g(Axis{9, 0, 1, false}, Axis{8, 0, 1, true});
    Field f(g, 2, 2);
    int count = 0;
    f.for_each_valid([&](int, int) { ++count; });
    CHECK(count == 5 * 8);
    CHECK_FALSE(f.valid(1, 0));
    CHECK(f.valid(2, 0));
    CHECK_THROWS_AS(Field(g, 1, 5), ValidationError);
    CHECK_THROWS(f + Field(g, 3, 2));
  }

  TEST_CASE("residual norms") {
    const Grid g(Axis{5, 0, 4, false}, Axis{5, 0, 4, false});
    Field f(g, 2);
    f.for_each_valid([&](int i, int j) {
      f(i, j, 0) = 3.0;
      f(i, j, 1) = (i == 2 && j == 2) ? 4.0 : 0.0;
    });
    const ResidualNorm n = residual_norm(f);
    CHECK(n.sup == 5.0);
    CHECK(n.l2 == doctest::Approx(std::sqrt(24 * 9.0 + 25.0)));
    CHECK(residual_norm(f, 2).sup == 5.0);
    CHECK(residual_norm(f, 2).l2 == doctest::Approx(5.0));
  }
}
