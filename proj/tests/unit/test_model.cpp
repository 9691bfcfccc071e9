#include <doctest.h>

#include "ancestral/errors.hpp"
#include "ancestral/io.hpp"
#include "ancestral/model.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace ancestral;
using namespace ancestral::model;

namespace {

// Poisson(x) mass at k = 2 through the generic pmf formula.
double poisson_pmf_2(double x) { return std::exp(-x + 2.0 * std::log(x) - std::lgamma(3.0)); }

}  // namespace

TEST_CASE("f_weight basic values") {
    CHECK(f_weight(0.0) == 0.0);
    CHECK(f_weight(1.0) == doctest::Approx(std::exp(-1.0) / 2).epsilon(1e-15));
    // mpmath, 30 digits
    CHECK(f_weight(1.8604651) == doctest::Approx(0.26929192625530886).epsilon(1e-12));
    CHECK_THROWS_AS(f_weight(-0.1), ParameterError);
}

TEST_CASE("f_weight is the Poisson mass at 2 on a grid") {
    for (double x = 0.01; x < 20.0; x += 0.037)
        CHECK(std::abs(f_weight(x) - poisson_pmf_2(x)) <= 1e-12);
}

TEST_CASE("analytic report at the published parameters") {
    const auto r = analytic_report({0.5, 1.0, 0.075});
    CHECK(std::abs(r.R - 1.04104942) <= 1e-6);
    // mpmath reference values
    CHECK(r.q_a == doctest::Approx(1.8604651162790698).epsilon(1e-13));
    CHECK(r.q_b == doctest::Approx(0.13953488372093023).epsilon(1e-13));
    CHECK(r.q_a_prime == doctest::Approx(1.0689869484151647).epsilon(1e-13));
    CHECK(r.q_b_prime == doctest::Approx(0.080174021131137352).epsilon(1e-13));
    CHECK(r.t1 == doctest::Approx(1.075).epsilon(1e-14));
    CHECK(r.t2 == doctest::Approx(0.96951626824459990).epsilon(1e-13));
    CHECK(r.t3 == doctest::Approx(0.99886726695680819).epsilon(1e-13));
    CHECK(r.R == doctest::Approx(1.0410494200165208).epsilon(1e-13));
}

TEST_CASE("equal potentials collapse every q to one and R to alpha") {
    for (double alpha : {0.1, 0.5, 0.77})
        for (double p : {0.01, 1.0, 42.0}) {
            const auto r = analytic_report({alpha, p, p});
            CHECK(std::abs(r.q_a - 1) < 1e-12);
            CHECK(std::abs(r.q_b - 1) < 1e-12);
            CHECK(std::abs(r.q_a_prime - 1) < 1e-12);
            CHECK(std::abs(r.q_b_prime - 1) < 1e-12);
            CHECK(std::abs(r.t1 - 1 / alpha) < 1e-12);
            CHECK(std::abs(r.t2 - alpha) < 1e-12);
            CHECK(std::abs(r.t3 - alpha) < 1e-12);
            CHECK(std::abs(r.R - alpha) < 1e-12);
        }
}

TEST_CASE("report identities hold for random parameters") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> unit(0.01, 0.99), pot(0.01, 10.0);
    for (int k = 0; k < 500; ++k) {
        const CounterexampleParams p{unit(gen), pot(gen), pot(gen)};
        const auto r = analytic_report(p);
        CHECK(std::abs(p.alpha * r.q_a + (1 - p.alpha) * r.q_b - 1) <= 1e-12);
        const double m1 = p.alpha * p.p_a * r.q_a + (1 - p.alpha) * p.p_b * r.q_b;
        CHECK(std::abs(r.q_a_prime * m1 - p.p_a) <= 1e-12 * p.p_a);
        CHECK(std::abs(r.q_a_prime / r.q_b_prime - p.p_a / p.p_b) <= 1e-12 * (p.p_a / p.p_b));
        CHECK(std::abs(r.R - r.t1 * r.t2 * r.t3) <= 1e-12 * r.R);
        CHECK(r.t2 > 0);
        CHECK(r.t2 < 1);
        CHECK(r.t3 > 0);
        CHECK(r.t3 < 1);
    }
}

TEST_CASE("invalid parameters are rejected") {
    CHECK_THROWS_AS(analytic_report({0.0, 1, 0.5}), ParameterError);
    CHECK_THROWS_AS(analytic_report({1.0, 1, 0.5}), ParameterError);
    CHECK_THROWS_AS(analytic_report({0.5, 0, 0.5}), ParameterError);
    CHECK_THROWS_AS(analytic_report({0.5, 1, -1}), ParameterError);
    CHECK_NOTHROW((CounterexampleParams{0.5, 1, 1}.validate()));
    CHECK_THROWS_AS((CounterexampleParams{0.5, 1, 1}.validate_strict()), ParameterError);
}

TEST_CASE("r_curve over (0, 0.2]") {
    const auto rows = r_curve(0.5, 1.0, 0.0, 0.2, 500);
    REQUIRE(rows.size() == 500);
    CHECK(rows.front().p_b > 0.0);
    CHECK(rows.back().p_b == 0.2);
    bool above = false;
    const RCurvePoint* nearest = &rows.front();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        above = above || rows[i].R > 1.0;
        if (i) CHECK(rows[i].p_b > rows[i - 1].p_b);
        if (std::abs(rows[i].p_b - 0.075) < std::abs(nearest->p_b - 0.075)) nearest = &rows[i];
        CHECK(std::isfinite(rows[i].R));
    }
    CHECK(above);
    CHECK(std::abs(nearest->R - 1.04104942) <= 2e-3);
    CHECK(rows == r_curve(0.5, 1.0, 0.0, 0.2, 500));
}

TEST_CASE("r_curve narrow and invalid grids") {
    const auto rows = r_curve(0.5, 1.0, 0.1, 0.1 + 1e-9, 2);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].p_b == 0.1);
    for (const auto& r : rows) {
        CHECK(std::isfinite(r.R));
        CHECK(r.R > 0);
    }
    CHECK_THROWS_AS(r_curve(0.5, 1.0, 0.0, 0.2, 1), ParameterError);
    CHECK_THROWS_AS(r_curve(0.5, 1.0, 0.2, 0.1, 10), ParameterError);
    CHECK_THROWS_AS(r_curve(0.5, 1.0, -0.1, 0.1, 10), ParameterError);
}

TEST_CASE("r_curve csv re-parses") {
    const auto rows = r_curve(0.5, 1.0, 0.0, 0.2, 25);
    std::stringstream s;
    write_r_curve_csv(s, rows);
    const auto table = io::read_csv(s);
    CHECK(table.schema == "ancestral.r_curve/1");
    REQUIRE(table.columns == std::vector<std::string>{"p_b", "R"});
    REQUIRE(table.rows.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(std::stod(table.rows[i][0]) == rows[i].p_b);
        CHECK(std::stod(table.rows[i][1]) == rows[i].R);
    }
}
