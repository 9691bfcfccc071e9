#include "ancestral/simulator.hpp"

#include "ancestral/errors.hpp"
#include "ancestral/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ancestral::sim {

namespace {

constexpr double kLawTolerance = 1e-12;
constexpr double kWeightTolerance = 1e-9;

void check_law(std::span<const double> law, const std::string& what) {
    double total = 0.0;
    for (double p : law) {
        if (!(p >= 0.0) || !std::isfinite(p)) throw ParameterError(what + " has a negative entry");
        total += p;
    }
    if (std::abs(total - 1.0) > kLawTolerance)
        throw ParameterError(what + " does not sum to 1");
}

}  // namespace

void DiscreteModel::validate() const {
    const std::size_t n = potential.size();
    if (n == 0) throw ParameterError("model has no states");
    if (initial_law.size() != n) throw ParameterError("initial_law size differs from state count");
    if (kernel.size() != n * n) throw ParameterError("kernel is not state_count x state_count");
    if (!labels.empty() && labels.size() != n)
        throw ParameterError("labels size differs from state count");
    check_law(initial_law, "initial_law");
    for (std::size_t s = 0; s < n; ++s)
        check_law(std::span(kernel).subspan(s * n, n), "kernel row " + std::to_string(s));
    for (double g : potential)
        if (!(g > 0.0) || !std::isfinite(g)) throw ParameterError("potential must be positive");
}

DiscreteModel DiscreteModel::two_state(double alpha, double p_a, double p_b) {
    DiscreteModel m{{"a", "b"}, {alpha, 1.0 - alpha}, {1.0, 0.0, 0.0, 1.0}, {p_a, p_b}};
    m.validate();
    return m;
}

DiscreteModel DiscreteModel::from_json(const nlohmann::json& j) {
    DiscreteModel m;
    try {
        m.initial_law = j.at("initial_law").get<std::vector<double>>();
        m.potential = j.at("potential").get<std::vector<double>>();
        if (j.contains("labels")) m.labels = j.at("labels").get<std::vector<std::string>>();
        for (const auto& row : j.at("kernel")) {
            auto r = row.get<std::vector<double>>();
            if (r.size() != m.potential.size()) throw ParameterError("kernel row has wrong length");
            m.kernel.insert(m.kernel.end(), r.begin(), r.end());
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParameterError(std::string("malformed model json: ") + e.what());
    }
    if (m.labels.empty())
        for (int s = 0; s < m.state_count(); ++s) m.labels.push_back(std::to_string(s));
    m.validate();
    return m;
}

nlohmann::json DiscreteModel::to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    const auto n = potential.size();
    for (std::size_t s = 0; s < n; ++s)
        rows.push_back(std::vector<double>(kernel.begin() + s * n, kernel.begin() + (s + 1) * n));
    return {{"labels", labels}, {"initial_law", initial_law}, {"kernel", rows},
            {"potential", potential}};
}

nlohmann::json Trajectory::to_json() const {
    nlohmann::json anc = nlohmann::json::array();
    for (const auto& gen : ancestors) {
        std::vector<int> one_based(gen.size());
        std::transform(gen.begin(), gen.end(), one_based.begin(), [](int a) { return a + 1; });
        anc.push_back(std::move(one_based));
    }
    return {{"schema", "ancestral.trajectory/1"},
            {"N", N},
            {"T", T},
            {"seed", seed},
            {"labels", labels},
            {"positions", positions},
            {"weights", weights},
            {"ancestors", std::move(anc)}};
}

Trajectory Trajectory::from_json(const nlohmann::json& j) {
    Trajectory t;
    try {
        t.N = j.at("N").get<int>();
        t.T = j.at("T").get<int>();
        t.seed = j.at("seed").get<std::uint64_t>();
        t.labels = j.at("labels").get<std::vector<std::string>>();
        t.positions = j.at("positions").get<std::vector<std::vector<int>>>();
        t.weights = j.at("weights").get<std::vector<std::vector<double>>>();
        t.ancestors = j.at("ancestors").get<std::vector<std::vector<int>>>();
    } catch (const nlohmann::json::exception& e) {
        throw ParameterError(std::string("malformed trajectory json: ") + e.what());
    }
    if (t.positions.size() != static_cast<std::size_t>(t.T) + 1 ||
        t.weights.size() != t.positions.size() || t.ancestors.size() != static_cast<std::size_t>(t.T))
        throw ParameterError("trajectory generation counts disagree with T");
    for (auto& gen : t.ancestors) {
        if (gen.size() != static_cast<std::size_t>(t.N))
            throw ParameterError("ancestor vector length differs from N");
        for (auto& a : gen) {
            if (a < 1 || a > t.N) throw ParameterError("ancestor index out of range");
            --a;
        }
    }
    return t;
}

std::vector<double> cumulative_sum(std::span<const double> probabilities) {
    std::vector<double> cum(probabilities.size());
    std::partial_sum(probabilities.begin(), probabilities.end(), cum.begin());
    return cum;
}

int inverse_transform(std::span<const double> cumulative, double u) {
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it != cumulative.end()) return static_cast<int>(it - cumulative.begin());
    // u fell past the rounded total: take the last index carrying mass.
    int k = static_cast<int>(cumulative.size()) - 1;
    while (k > 0 && cumulative[k] == cumulative[k - 1]) --k;
    return k;
}

std::vector<int> categorical_ancestors(std::span<const double> weights,
                                       std::span<const double> uniforms) {
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw ContractViolation("categorical weights must be nonnegative");
        total += w;
    }
    if (weights.empty() || std::abs(total - 1.0) > kWeightTolerance)
        throw ContractViolation("categorical weights must sum to 1");

    const auto cum = cumulative_sum(weights);
    std::vector<int> out(uniforms.size());
    std::transform(uniforms.begin(), uniforms.end(), out.begin(),
                   [&](double u) { return inverse_transform(cum, u); });
    return out;
}

std::vector<double> normalized_weights(const DiscreteModel& model,
                                       std::span<const int> positions) {
    std::vector<double> w(positions.size());
    double total = 0.0;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        w[i] = model.potential[static_cast<std::size_t>(positions[i])];
        total += w[i];
    }
    for (double& x : w) x /= total;
    return w;
}

Trajectory simulate(const DiscreteModel& model, int N, int T, std::uint64_t seed) {
    model.validate();
    if (N < 1) throw ParameterError("simulate needs N >= 1");
    if (T < 0) throw ParameterError("simulate needs T >= 0");

    rng::Xoshiro256ss gen(seed);
    const int S = model.state_count();
    const auto law_cum = cumulative_sum(model.initial_law);
    std::vector<std::vector<double>> kernel_cum;
    kernel_cum.reserve(static_cast<std::size_t>(S));
    for (int s = 0; s < S; ++s)
        kernel_cum.push_back(
            cumulative_sum(std::span(model.kernel).subspan(static_cast<std::size_t>(s) * S, S)));

    Trajectory traj;
    traj.N = N;
    traj.T = T;
    traj.seed = seed;
    traj.labels = model.labels;
    traj.positions.reserve(static_cast<std::size_t>(T) + 1);
    traj.weights.reserve(static_cast<std::size_t>(T) + 1);
    traj.ancestors.reserve(static_cast<std::size_t>(T));

    std::vector<int> x(static_cast<std::size_t>(N));
    for (auto& xi : x) xi = inverse_transform(law_cum, gen.uniform());
    traj.weights.push_back(normalized_weights(model, x));
    traj.positions.push_back(x);

    for (int t = 0; t < T; ++t) {
        auto parents = categorical_ancestors(traj.weights.back(), N, gen);
        const auto& prev = traj.positions.back();
        for (int i = 0; i < N; ++i)
            x[i] = inverse_transform(kernel_cum[prev[parents[i]]], gen.uniform());
        traj.ancestors.push_back(std::move(parents));
        traj.weights.push_back(normalized_weights(model, x));
        traj.positions.push_back(x);
    }
    return traj;
}

OffspringCounts offspring_counts(std::span<const int> ancestors, int N) {
    if (N < 1) throw ContractViolation("offspring_counts needs N >= 1");
    OffspringCounts nu{std::vector<int>(static_cast<std::size_t>(N), 0)};
    for (int a : ancestors) {
        if (a < 0 || a >= N) throw ContractViolation("ancestor index outside [0, N)");
        ++nu.counts[static_cast<std::size_t>(a)];
    }
    return nu;
}

}  // namespace ancestral::sim
