#include <doctest.h>

#include "ancestral/errors.hpp"
#include "ancestral/rng.hpp"
#include "ancestral/simulator.hpp"
#include "ancestral/stats.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

using namespace ancestral;
using namespace ancestral::sim;

namespace {

DiscreteModel three_state() {
    return DiscreteModel{{"x", "y", "z"},
                         {0.2, 0.5, 0.3},
                         {0.6, 0.3, 0.1, 0.2, 0.2, 0.6, 0.25, 0.25, 0.5},
                         {1.0, 2.5, 0.4}};
}

}  // namespace

TEST_CASE("xoshiro256** reference output") {
    // independent Python implementation, seed 0 expanded by SplitMix64
    rng::Xoshiro256ss gen(0);
    CHECK(gen() == 0x99ec5f36cb75f2b4ULL);
    CHECK(gen() == 0xbf6e1f784956452aULL);
    CHECK(gen() == 0x1a5f849d4933e6e0ULL);
    rng::Xoshiro256ss same(0);
    for (int i = 0; i < 3; ++i) same();
    for (int i = 0; i < 100; ++i) CHECK(gen() == same());
    for (int i = 0; i < 1000; ++i) {
        const double u = gen.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    CHECK(rng::stream_seed(1, 0) != rng::stream_seed(1, 1));
    CHECK(rng::stream_seed(1, 5) != rng::stream_seed(2, 5));
}

TEST_CASE("categorical ancestors: point mass and interval convention") {
    const std::vector<double> point{1.0, 0.0, 0.0, 0.0};
    const std::vector<double> u{0.0, 0.3, 0.999999, 0.5};
    for (int a : categorical_ancestors(point, u)) CHECK(a == 0);

    const std::vector<double> w{0.25, 0.5, 0.25};  // cumulative .25, .75, 1
    CHECK(categorical_ancestors(w, std::vector<double>{0.3}) == std::vector<int>{1});
    CHECK(categorical_ancestors(w, std::vector<double>{0.25}) == std::vector<int>{1});
    CHECK(categorical_ancestors(w, std::vector<double>{0.2499999}) == std::vector<int>{0});
    CHECK(categorical_ancestors(w, std::vector<double>{0.75}) == std::vector<int>{2});
    CHECK(categorical_ancestors(w, std::vector<double>{0.0}) == std::vector<int>{0});
}

TEST_CASE("categorical ancestors reject unnormalised weights") {
    CHECK_THROWS_AS(categorical_ancestors(std::vector<double>{0.5, 0.4}, std::vector<double>{0.1}),
                    ContractViolation);
    CHECK_THROWS_AS(categorical_ancestors(std::vector<double>{1.2, -0.2}, std::vector<double>{0.1}),
                    ContractViolation);
}

TEST_CASE("inverse transform past a rounded total falls on the last massive index") {
    const std::vector<double> cum{0.3, 0.9999999999999999, 0.9999999999999999};
    CHECK(inverse_transform(cum, 0.99999999999999995) == 1);
}

TEST_CASE("uniform categorical frequency") {
    rng::Xoshiro256ss gen(2024);
    const std::vector<double> w{0.5, 0.5};
    const int draws = 100000;
    const auto a = categorical_ancestors(w, draws, gen);
    const double freq = static_cast<double>(std::count(a.begin(), a.end(), 0)) / draws;
    CHECK(std::abs(freq - 0.5) <= 3 * std::sqrt(0.25 / draws));
}

TEST_CASE("model validation") {
    CHECK_NOTHROW(three_state().validate());
    auto bad = three_state();
    bad.initial_law[0] = 0.3;
    CHECK_THROWS_AS(bad.validate(), ParameterError);
    bad = three_state();
    bad.kernel[4] = 0.3;
    CHECK_THROWS_AS(bad.validate(), ParameterError);
    bad = three_state();
    bad.potential[2] = 0.0;
    CHECK_THROWS_AS(bad.validate(), ParameterError);
    bad = three_state();
    bad.kernel.pop_back();
    CHECK_THROWS_AS(bad.validate(), ParameterError);
    CHECK_THROWS_AS(DiscreteModel::two_state(1.5, 1, 1), ParameterError);
    CHECK_NOTHROW(DiscreteModel::two_state(1.0, 1, 1));
}

TEST_CASE("model json round trip") {
    const auto m = three_state();
    const auto back = DiscreteModel::from_json(nlohmann::json::parse(m.to_json().dump()));
    CHECK(back.labels == m.labels);
    CHECK(back.initial_law == m.initial_law);
    CHECK(back.kernel == m.kernel);
    CHECK(back.potential == m.potential);
    CHECK_THROWS_AS(DiscreteModel::from_json(nlohmann::json{{"labels", {"a"}}}), ParameterError);
}

TEST_CASE("degenerate law and identity kernel") {
    DiscreteModel m{{"a", "b"}, {1.0, 0.0}, {1.0, 0.0, 0.0, 1.0}, {2.0, 1.0}};
    const auto t = simulate(m, 7, 4, 99);
    for (const auto& gen : t.positions)
        for (int x : gen) CHECK(x == 0);
    for (const auto& gen : t.weights)
        for (double w : gen) CHECK(w == doctest::Approx(1.0 / 7).epsilon(1e-15));
}

TEST_CASE("simulate: shape, normalisation, weight correctness, determinism") {
    const auto m = three_state();
    for (std::uint64_t seed : {1ull, 2ull, 77ull}) {
        const auto t = simulate(m, 25, 6, seed);
        CHECK(t.N == 25);
        CHECK(t.T == 6);
        REQUIRE(t.positions.size() == 7);
        REQUIRE(t.ancestors.size() == 6);
        for (std::size_t g = 0; g < t.positions.size(); ++g) {
            const double total = std::accumulate(t.weights[g].begin(), t.weights[g].end(), 0.0);
            CHECK(std::abs(total - 1.0) <= 1e-9);
            double potential = 0;
            for (int x : t.positions[g]) potential += m.potential[x];
            for (int i = 0; i < t.N; ++i)
                CHECK(std::abs(t.weights[g][i] * potential - m.potential[t.positions[g][i]]) <= 1e-9);
        }
        for (int g = 1; g <= t.T; ++g) {
            const auto nu = offspring_counts(t.ancestors_of_generation(g), t.N);
            CHECK(std::accumulate(nu.counts.begin(), nu.counts.end(), 0) == t.N);
        }
        CHECK(t == simulate(m, 25, 6, seed));
    }
    CHECK(!(simulate(m, 25, 6, 1) == simulate(m, 25, 6, 2)));
    CHECK_THROWS_AS(simulate(m, 0, 3, 1), ParameterError);
}

TEST_CASE("T = 0 keeps only the initial generation") {
    const auto t = simulate(three_state(), 5, 0, 3);
    CHECK(t.positions.size() == 1);
    CHECK(t.ancestors.empty());
}

TEST_CASE("trajectory json round trip uses 1-based ancestors") {
    const auto t = simulate(three_state(), 6, 3, 11);
    const auto j = t.to_json();
    CHECK(j.at("schema") == "ancestral.trajectory/1");
    for (const auto& gen : j.at("ancestors"))
        for (int a : gen) {
            CHECK(a >= 1);
            CHECK(a <= 6);
        }
    CHECK(Trajectory::from_json(nlohmann::json::parse(j.dump())) == t);
}

TEST_CASE("offspring counts") {
    CHECK(offspring_counts(std::vector<int>{0, 0, 2}, 3).counts == std::vector<int>{2, 0, 1});
    CHECK(offspring_counts(std::vector<int>{1, 1, 1}, 3).counts == std::vector<int>{0, 3, 0});
    CHECK_THROWS_AS(offspring_counts(std::vector<int>{0, 3, 1}, 3), ContractViolation);
    CHECK_THROWS_AS(offspring_counts(std::vector<int>{0, -1, 1}, 3), ContractViolation);
}

TEST_CASE("ancestor vectors are uniform given offspring counts (N = 3)") {
    // Uniform potential, three states, so parents are exchangeable.
    DiscreteModel m{{"x", "y", "z"},
                    {0.3, 0.3, 0.4},
                    {0.5, 0.25, 0.25, 0.25, 0.5, 0.25, 0.25, 0.25, 0.5},
                    {1.0, 1.0, 1.0}};
    const int N = 3;
    std::map<std::vector<int>, std::map<std::vector<int>, std::uint64_t>> by_counts;
    for (std::uint64_t r = 0; r < 120000; ++r) {
        const auto t = simulate(m, N, 1, rng::stream_seed(31337, r));
        const auto& a = t.ancestors_of_generation(1);
        ++by_counts[offspring_counts(a, N).counts][a];
    }
    double chi2 = 0;
    int dof = 0;
    for (const auto& [nu, vectors] : by_counts) {
        // number of vectors consistent with nu: 3! / prod nu_i!
        int consistent = 6;
        for (int c : nu) consistent /= static_cast<int>(std::tgamma(c + 1.0));
        CHECK(static_cast<int>(vectors.size()) <= consistent);
        if (consistent < 2) continue;
        std::vector<std::uint64_t> observed;
        for (const auto& [vec, count] : vectors) observed.push_back(count);
        observed.resize(static_cast<std::size_t>(consistent), 0);
        const auto g = stats::uniform_goodness_of_fit(observed);
        chi2 += g.chi2;
        dof += g.dof;
    }
    CHECK(dof == 6 * 2 + 5);
    CHECK(stats::chi_square_sf(chi2, dof) > 0.01);
}
