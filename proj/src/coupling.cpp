#include "ancestral/coupling.hpp"

#include "ancestral/errors.hpp"
#include "ancestral/io.hpp"
#include "ancestral/rng.hpp"
#include "ancestral/simulator.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <ostream>

namespace ancestral::coupling {

namespace {

constexpr int kBins = 4;

struct Scratch {
    std::vector<int> x2, x1, in_set;  // in_set: X_1 states of the indices i_1..i_N
    std::vector<double> w, cum, u;

    void resize(int N) {
        const auto n = static_cast<std::size_t>(N);
        x2.resize(n);
        x1.resize(n);
        w.resize(n);
        cum.resize(n);
        u.resize(n);
        in_set.clear();
        in_set.reserve(n);
    }
};

/// w_k = g(x_k) / sum g, returned as running sums.
void cumulative_weights(std::span<const int> x, const std::array<double, 2>& g,
                        std::vector<double>& w, std::vector<double>& cum) {
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        w[i] = g[static_cast<std::size_t>(x[i])];
        total += w[i];
    }
    for (std::size_t i = 0; i < x.size(); ++i) w[i] /= total;
    std::partial_sum(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(x.size()), cum.begin());
}

std::uint64_t size_seed(std::uint64_t seed, int N) {
    return rng::stream_seed(seed, static_cast<std::uint64_t>(N));
}

struct MismatchTally {
    std::uint64_t tilde = 0, hat = 0;
    MismatchTally& operator+=(const MismatchTally& o) {
        tilde += o.tilde;
        hat += o.hat;
        return *this;
    }
};

struct TableTally {
    std::array<std::uint64_t, 2 * kBins * 2 * kBins> cells{};
    TableTally& operator+=(const TableTally& o) {
        for (std::size_t i = 0; i < cells.size(); ++i) cells[i] += o.cells[i];
        return *this;
    }
};

std::vector<std::string> bin_labels() {
    std::vector<std::string> labels;
    for (const char* state : {"a", "b"})
        for (const char* bin : {"0", "1", "2", ">=3"})
            labels.push_back(std::string(state) + ":" + bin);
    return labels;
}

}  // namespace

int count_bin(int nu) { return nu >= kBins - 1 ? kBins - 1 : nu; }

CoupledDraw coupled_draw(const CounterexampleParams& params, int N, std::uint64_t seed) {
    params.validate();
    if (N < 2) throw ParameterError("coupled_draw needs N >= 2");

    thread_local Scratch sc;
    sc.resize(N);
    rng::Xoshiro256ss gen(seed);
    const auto n = static_cast<std::size_t>(N);
    const std::array<double, 2> law_cum{params.alpha, params.alpha + (1.0 - params.alpha)};
    const std::array<double, 2> g{params.p_a, params.p_b};

    CoupledDraw d;
    d.seed = seed;

    for (std::size_t i = 0; i < n; ++i) sc.x2[i] = sim::inverse_transform(law_cum, gen.uniform());
    d.x2_1 = sc.x2[0];
    cumulative_weights(std::span(sc.x2).first(n), g, sc.w, sc.cum);
    const std::span<const double> cum2(sc.cum.data(), n);

    const double w_hat = g[static_cast<std::size_t>(d.x2_1)] / (N * params.mean_potential());
    std::size_t first = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = 0; i < n; ++i) {
        const double u = gen.uniform();
        const int parent = sim::inverse_transform(cum2, u);
        sc.x1[i] = sc.x2[static_cast<std::size_t>(parent)];
        d.nu2_1 += parent == 0;
        d.nu2_hat += u <= w_hat;
        if (parent != 0) {
            if (first == std::numeric_limits<std::size_t>::max()) first = i;
            sc.in_set.push_back(sc.x1[i]);
        }
    }
    // Extend the sequence of time-1 particles until N of them avoid parent 1.
    for (std::size_t i = n; sc.in_set.size() < n; ++i) {
        const int parent = sim::inverse_transform(cum2, gen.uniform());
        if (parent == 0) continue;
        if (first == std::numeric_limits<std::size_t>::max()) first = i;
        sc.in_set.push_back(sc.x2[static_cast<std::size_t>(parent)]);
    }
    d.first_index = static_cast<int>(first) + 1;
    d.parent_is_1 = first != 0;
    d.x1_1 = sc.x1[0];
    d.x1_tilde = sc.in_set[0];

    // True and reweighted time-1 assignments share U_1; particle 1 and I own
    // the first interval of their respective cumulative sums.
    cumulative_weights(std::span(sc.x1).first(n), g, sc.w, sc.cum);
    const double w1 = sc.cum[0];
    double tilde_total = 0.0;
    for (int s : sc.in_set) tilde_total += g[static_cast<std::size_t>(s)];
    const double w1_tilde = g[static_cast<std::size_t>(d.x1_tilde)] / tilde_total;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = gen.uniform();
        d.nu1_1 += u < w1;
        d.nu1_tilde += u < w1_tilde;
    }
    return d;
}

MismatchRates mismatch_rates(const CounterexampleParams& params, const std::vector<int>& N_list,
                             std::uint64_t reps, std::uint64_t seed, const Exec& exec) {
    params.validate();
    if (reps < 1) throw ParameterError("mismatch_rates needs reps >= 1");
    if (N_list.empty()) throw ParameterError("mismatch_rates needs at least one N");
    if (!std::is_sorted(N_list.begin(), N_list.end(), std::less_equal<>{}))
        throw ParameterError("mismatch_rates needs strictly increasing N");

    MismatchRates out;
    std::vector<double> log_n_tilde, log_tilde, log_n_hat, log_hat;
    for (int N : N_list) {
        if (N < 2) throw ParameterError("mismatch_rates needs every N >= 2");
        const auto base = size_seed(seed, N);
        const auto t = replicate_reduce<MismatchTally>(
            reps, exec, [&](std::uint64_t r, MismatchTally& m) {
                const auto d = coupled_draw(params, N, rng::stream_seed(base, r));
                m.tilde += d.tilde_mismatch();
                m.hat += d.hat_mismatch();
            });
        MismatchPoint p;
        p.N = N;
        p.tilde_rate = static_cast<double>(t.tilde) / static_cast<double>(reps);
        p.hat_rate = static_cast<double>(t.hat) / static_cast<double>(reps);
        p.tilde_se = stats::wald_std_err(p.tilde_rate, reps);
        p.hat_se = stats::wald_std_err(p.hat_rate, reps);
        if (t.tilde > 0) {
            log_n_tilde.push_back(std::log(N));
            log_tilde.push_back(std::log(p.tilde_rate));
        }
        if (t.hat > 0) {
            log_n_hat.push_back(std::log(N));
            log_hat.push_back(std::log(p.hat_rate));
        }
        out.points.push_back(p);
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.tilde_slope = log_tilde.size() >= 2 ? stats::ols_slope(log_n_tilde, log_tilde) : nan;
    out.hat_slope = log_hat.size() >= 2 ? stats::ols_slope(log_n_hat, log_hat) : nan;
    return out;
}

void write_mismatch_csv(std::ostream& out, const MismatchRates& rates) {
    io::write_csv_preamble(out, "ancestral.coupling_mismatch/1",
                           {"N", "tilde_mismatch", "tilde_se", "hat_mismatch", "hat_se"});
    for (const auto& p : rates.points)
        out << p.N << ',' << io::format_real(p.tilde_rate) << ',' << io::format_real(p.tilde_se)
            << ',' << io::format_real(p.hat_rate) << ',' << io::format_real(p.hat_se) << '\n';
}

stats::ContingencyTable coupled_table(const CounterexampleParams& params, int N,
                                      std::uint64_t reps, std::uint64_t seed, const Exec& exec) {
    params.validate();
    if (N < 2) throw ParameterError("coupled_table needs N >= 2");
    const auto base = size_seed(seed, N);
    const auto t = replicate_reduce<TableTally>(reps, exec, [&](std::uint64_t r, TableTally& tab) {
        const auto d = coupled_draw(params, N, rng::stream_seed(base, r));
        const int row = d.x2_1 * kBins + count_bin(d.nu2_hat);
        const int col = d.x1_tilde * kBins + count_bin(d.nu1_tilde);
        ++tab.cells[static_cast<std::size_t>(row * 2 * kBins + col)];
    });

    stats::ContingencyTable table{bin_labels(), bin_labels(), {}};
    for (int row = 0; row < 2 * kBins; ++row)
        table.counts.emplace_back(t.cells.begin() + row * 2 * kBins,
                                  t.cells.begin() + (row + 1) * 2 * kBins);
    return table;
}

stats::IndependenceResult independence_test(const CounterexampleParams& params, int N,
                                            std::uint64_t reps, std::uint64_t seed,
                                            const Exec& exec) {
    if (reps < 10000) throw ParameterError("independence_test needs reps >= 10^4");
    return stats::chi_square_independence(coupled_table(params, N, reps, seed, exec));
}

nlohmann::json to_json(const stats::IndependenceResult& result) {
    return {{"schema", "ancestral.independence/1"},
            {"table", result.merged.counts},
            {"row_labels", result.merged.row_labels},
            {"col_labels", result.merged.col_labels},
            {"raw_table", result.raw.counts},
            {"chi2", result.chi2},
            {"dof", result.dof},
            {"p_value", result.p_value}};
}

}  // namespace ancestral::coupling
