#include <doctest.h>

#include "ancestral/errors.hpp"
#include "ancestral/stats.hpp"

#include <cmath>

using namespace ancestral;
using namespace ancestral::stats;

TEST_CASE("chi-square upper tail") {
    CHECK(chi_square_sf(0.0, 3) == 1.0);
    CHECK(chi_square_sf(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-10));
    CHECK(chi_square_sf(2.0, 2) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(chi_square_sf(11.344866730144373, 3) == doctest::Approx(0.01).epsilon(1e-9));
}

TEST_CASE("wald standard error and slope") {
    CHECK(wald_std_err(0.5, 100) == doctest::Approx(0.05));
    CHECK(wald_std_err(0.5, 0) == 0.0);
    const std::vector<double> x{1, 2, 3, 4};
    const std::vector<double> y{3, 1, -1, -3};
    CHECK(ols_slope(x, y) == doctest::Approx(-2.0));
}

TEST_CASE("uniform goodness of fit") {
    const std::vector<std::uint64_t> flat{100, 100, 100, 100};
    const auto g = uniform_goodness_of_fit(flat);
    CHECK(g.chi2 == 0.0);
    CHECK(g.dof == 3);
    CHECK(g.p_value == 1.0);
    const std::vector<std::uint64_t> skew{10, 30};
    CHECK(uniform_goodness_of_fit(skew).chi2 == doctest::Approx(10.0));
}

TEST_CASE("independence test on an exact product table") {
    ContingencyTable t{{"r1", "r2"}, {"c1", "c2", "c3"}, {{20, 40, 60}, {10, 20, 30}}};
    const auto r = chi_square_independence(t);
    CHECK(r.chi2 == doctest::Approx(0.0));
    CHECK(r.dof == 2);
    CHECK(r.p_value == doctest::Approx(1.0));
}

TEST_CASE("independence test detects dependence") {
    ContingencyTable t{{"r1", "r2"}, {"c1", "c2"}, {{90, 10}, {10, 90}}};
    const auto r = chi_square_independence(t);
    CHECK(r.chi2 == doctest::Approx(128.0));
    CHECK(r.dof == 1);
    CHECK(r.p_value < 1e-20);
}

TEST_CASE("sparse categories are dropped or merged") {
    ContingencyTable t{{"a:0", "a:1", "b:0", "b:1"},
                       {"x", "y", "z"},
                       {{200, 150, 0}, {180, 170, 0}, {3, 1, 0}, {120, 110, 0}}};
    const auto r = chi_square_independence(t);
    CHECK(r.merged.col_labels.size() == 2);
    CHECK(r.merged.counts.size() == 3);
    CHECK(r.merged.total() == t.total());
    CHECK(r.dof == 2);
    const auto e_min = [&] {
        double m = 1e300;
        const auto rt = r.merged.row_totals();
        const auto ct = r.merged.col_totals();
        for (auto a : rt)
            for (auto b : ct) m = std::min(m, static_cast<double>(a) * b / r.merged.total());
        return m;
    }();
    CHECK(e_min >= 5.0);
}

TEST_CASE("degenerate tables are diagnostic errors") {
    ContingencyTable one_row{{"a"}, {"x", "y"}, {{10, 20}}};
    CHECK_THROWS_AS(chi_square_independence(one_row), DiagnosticError);
    ContingencyTable one_col{{"a", "b"}, {"x", "y"}, {{10, 0}, {20, 0}}};
    CHECK_THROWS_AS(chi_square_independence(one_col), DiagnosticError);
    ContingencyTable empty{{"a", "b"}, {"x", "y"}, {{0, 0}, {0, 0}}};
    CHECK_THROWS_AS(chi_square_independence(empty), DiagnosticError);
}
