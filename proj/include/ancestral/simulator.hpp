#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace ancestral::sim {

/// Finite-state interacting particle system: initial law mu, Markov kernel K
/// and potential g. States are indexed 0..state_count()-1.
struct DiscreteModel {
    std::vector<std::string> labels;
    std::vector<double> initial_law;
    /// Row-major, state_count() x state_count(). Row s is K(s, .).
    std::vector<double> kernel;
    std::vector<double> potential;

    int state_count() const noexcept { return static_cast<int>(potential.size()); }
    double kernel_at(int from, int to) const {
        return kernel[static_cast<std::size_t>(from) * potential.size() + to];
    }

    /// Throws ParameterError when the laws are not normalised (1e-12),
    /// have negative entries, or a potential entry is not strictly positive.
    void validate() const;

    /// The two-state model {a, b} with law (alpha, 1 - alpha), identity kernel
    /// and potentials (p_a, p_b).
    static DiscreteModel two_state(double alpha, double p_a, double p_b);

    static DiscreteModel from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

/// Forward record of one run. Generation g = 0..T; particle indices are 0-based.
struct Trajectory {
    int N = 0;
    int T = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> labels;
    /// positions[g][i]
    std::vector<std::vector<int>> positions;
    /// weights[g][i], normalised per generation
    std::vector<std::vector<double>> weights;
    /// ancestors[g - 1][i] is the parent in generation g - 1 of particle i of
    /// generation g, for g = 1..T.
    std::vector<std::vector<int>> ancestors;

    const std::vector<int>& ancestors_of_generation(int g) const { return ancestors.at(g - 1); }

    friend bool operator==(const Trajectory&, const Trajectory&) = default;

    /// Ancestor vectors are written 1-based, matching the usual [N] labelling.
    nlohmann::json to_json() const;
    static Trajectory from_json(const nlohmann::json& j);
};

struct OffspringCounts {
    std::vector<int> counts;

    int size() const noexcept { return static_cast<int>(counts.size()); }
    int operator[](std::size_t i) const { return counts[i]; }
    friend bool operator==(const OffspringCounts&, const OffspringCounts&) = default;
};

/// Index k (0-based) with cumulative[k-1] <= u < cumulative[k]. A u at or above
/// the last cumulative value (rounding) maps to the last index with positive mass.
int inverse_transform(std::span<const double> cumulative, double u);

/// Running sums of `probabilities` in index order.
std::vector<double> cumulative_sum(std::span<const double> probabilities);

/// One parent index per uniform, by inverse transform on the weights.
/// Weights must be nonnegative and sum to 1 within 1e-9 (ContractViolation otherwise).
std::vector<int> categorical_ancestors(std::span<const double> weights,
                                       std::span<const double> uniforms);

/// Same, drawing `count` uniforms from a seeded stream.
template <class Rng>
std::vector<int> categorical_ancestors(std::span<const double> weights, int count, Rng& rng) {
    std::vector<double> u(static_cast<std::size_t>(count));
    for (auto& x : u) x = rng.uniform();
    return categorical_ancestors(weights, u);
}

/// Potential-normalised weights of one generation.
std::vector<double> normalized_weights(const DiscreteModel& model,
                                       std::span<const int> positions);

/// Runs the particle system for T resampling steps.
///
/// Uniform consumption order (one uniform per draw, xoshiro256** seeded with
/// `seed`): N draws for generation 0 from the initial law; then for each step
/// N draws for the ancestor vector followed by N kernel draws, particle order.
Trajectory simulate(const DiscreteModel& model, int N, int T, std::uint64_t seed);

/// nu[i] = #{j : ancestors[j] = i}. Indices must lie in [0, N).
OffspringCounts offspring_counts(std::span<const int> ancestors, int N);

}  // namespace ancestral::sim
