#include "ancestral/counterexample.hpp"

#include "ancestral/errors.hpp"
#include "ancestral/io.hpp"
#include "ancestral/rng.hpp"
#include "ancestral/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <ostream>

namespace ancestral::counterexample {

namespace {

double log_choose(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

/// Per-thread scratch for two_step_replicate.
struct Scratch {
    std::vector<int> x0, x1, parent;
    std::vector<double> w, cum, u;

    void resize(int N) {
        const auto n = static_cast<std::size_t>(N);
        x0.resize(n);
        x1.resize(n);
        parent.resize(n);
        w.resize(n);
        cum.resize(n);
        u.resize(n);
    }
};

/// Potential-normalised weights and their running sums, same arithmetic order
/// as sim::normalized_weights followed by sim::cumulative_sum.
void weights_and_cumulative(std::span<const int> x, const std::array<double, 2>& g,
                            std::vector<double>& w, std::vector<double>& cum) {
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        w[i] = g[static_cast<std::size_t>(x[i])];
        total += w[i];
    }
    for (std::size_t i = 0; i < x.size(); ++i) w[i] /= total;
    std::partial_sum(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(x.size()), cum.begin());
}

}  // namespace

TwoStepSummary summarize_two_step(const sim::Trajectory& trajectory) {
    if (trajectory.T != 2) throw ParameterError("two-step summary needs T = 2");
    const int N = trajectory.N;
    const auto& a2 = trajectory.ancestors_of_generation(1);
    const auto& a1 = trajectory.ancestors_of_generation(2);

    TwoStepSummary s;
    s.x2_1 = trajectory.positions[0][0];
    s.x1_1 = trajectory.positions[1][0];
    s.nu2_1 = static_cast<int>(std::count(a2.begin(), a2.end(), 0));
    s.nu1_1 = static_cast<int>(std::count(a1.begin(), a1.end(), 0));
    s.parent_is_1 = a2[0] == 0;
    const auto& p2 = trajectory.positions[0];
    const auto& p1 = trajectory.positions[1];
    s.time2.n_a = static_cast<int>(std::count(p2.begin(), p2.end(), kStateA));
    s.time2.n_b = N - s.time2.n_a;
    s.time1.n_a = static_cast<int>(std::count(p1.begin(), p1.end(), kStateA));
    s.time1.n_b = N - s.time1.n_a;
    return s;
}

std::optional<TwoStepSummary> two_step_replicate(const CounterexampleParams& params, int N,
                                                 std::uint64_t seed,
                                                 std::optional<int> stop_unless_nu2_is) {
    thread_local Scratch sc;
    sc.resize(N);
    rng::Xoshiro256ss gen(seed);

    const std::array<double, 2> law_cum{params.alpha, params.alpha + (1.0 - params.alpha)};
    const std::array<double, 2> g{params.p_a, params.p_b};
    const auto n = static_cast<std::size_t>(N);

    TwoStepSummary s;
    for (std::size_t i = 0; i < n; ++i) {
        sc.x0[i] = sim::inverse_transform(law_cum, gen.uniform());
        s.time2.n_a += sc.x0[i] == kStateA;
    }
    s.time2.n_b = N - s.time2.n_a;
    s.x2_1 = sc.x0[0];

    weights_and_cumulative(std::span(sc.x0).first(n), g, sc.w, sc.cum);
    for (std::size_t i = 0; i < n; ++i) sc.u[i] = gen.uniform();
    const std::span<const double> cum(sc.cum.data(), n);
    for (std::size_t i = 0; i < n; ++i) {
        sc.parent[i] = sim::inverse_transform(cum, sc.u[i]);
        s.nu2_1 += sc.parent[i] == 0;
    }
    if (stop_unless_nu2_is && s.nu2_1 != *stop_unless_nu2_is) return std::nullopt;
    s.parent_is_1 = sc.parent[0] == 0;

    // Identity kernel: the draw is consumed but the state is inherited.
    for (std::size_t i = 0; i < n; ++i) {
        (void)gen.uniform();
        sc.x1[i] = sc.x0[static_cast<std::size_t>(sc.parent[i])];
        s.time1.n_a += sc.x1[i] == kStateA;
    }
    s.time1.n_b = N - s.time1.n_a;
    s.x1_1 = sc.x1[0];

    weights_and_cumulative(std::span(sc.x1).first(n), g, sc.w, sc.cum);
    // Parent 1 owns [0, cum[0]); inverse_transform returns 0 exactly there.
    const double first = sc.cum[0];
    for (std::size_t i = 0; i < n; ++i) s.nu1_1 += gen.uniform() < first;
    return s;
}

double exact_conditional(const CounterexampleParams& params, int N) {
    params.validate();
    if (N < 2) throw ParameterError("exact_conditional needs N >= 2");

    const double alpha = params.alpha;
    const std::array<double, 2> prior{alpha, 1.0 - alpha};
    const std::array<double, 2> g{params.p_a, params.p_b};
    const double log_pairs = std::log(0.5 * N * (N - 1.0));
    const double log_fact_rest = std::lgamma(static_cast<double>(N));  // (N-1)!

    long double joint = 0.0L;
    long double target = 0.0L;
    for (int x1 : {kStateA, kStateB}) {
        for (int m = 0; m <= N - 1; ++m) {
            // m = #{i >= 2 : X_2^(i) = a}
            const double log_m = log_choose(N - 1, m) + m * std::log(alpha) +
                                 (N - 1 - m) * std::log1p(-alpha);
            const int others_b = N - 1 - m;
            const double total = (m + (x1 == kStateA)) * params.p_a +
                                 (others_b + (x1 == kStateB)) * params.p_b;
            // Parent classes of a child: particle 1, another a, another b.
            const std::array<double, 3> pi{g[x1] / total, m * params.p_a / total,
                                           others_b * params.p_b / total};
            std::array<double, 3> log_pi{};
            for (int c = 0; c < 3; ++c) log_pi[c] = pi[c] > 0 ? std::log(pi[c]) : 0.0;

            for (int c1 = 0; c1 < 3; ++c1) {
                if (pi[c1] == 0.0) continue;
                const int k1 = c1 == 0 ? 1 : 2;  // other children of particle 1
                if (k1 > N - 1) continue;
                const int x1_1 = c1 == 0 ? x1 : (c1 == 1 ? kStateA : kStateB);
                const int rest = N - 1 - k1;
                const double log_head = std::log(prior[x1]) + log_m + log_pi[c1];

                for (int ka = 0; ka <= rest; ++ka) {
                    const int kb = rest - ka;
                    if ((ka > 0 && pi[1] == 0.0) || (kb > 0 && pi[2] == 0.0)) continue;
                    const double log_multinomial =
                        log_fact_rest - std::lgamma(k1 + 1.0) - std::lgamma(ka + 1.0) -
                        std::lgamma(kb + 1.0) + k1 * log_pi[0] + ka * log_pi[1] + kb * log_pi[2];

                    const int n1a = (x1 == kStateA ? 2 : 0) + ka + (c1 == 1);
                    const double w = g[x1_1] / (n1a * params.p_a + (N - n1a) * params.p_b);
                    const double log_nu1 = log_pairs + 2.0 * std::log(w) + (N - 2) * std::log1p(-w);

                    const long double term = std::exp(log_head + log_multinomial + log_nu1);
                    joint += term;
                    if (c1 == 0) target += term;
                }
            }
        }
    }
    return static_cast<double>(target / joint);
}

double brute_force_conditional(const CounterexampleParams& params, int N) {
    params.validate();
    if (N > 6) throw ResourceError("brute_force_conditional enumerates only N <= 6");
    if (N < 2) throw ParameterError("brute_force_conditional needs N >= 2");

    const std::array<long double, 2> prior{params.alpha, 1.0L - params.alpha};
    const std::array<long double, 2> g{params.p_a, params.p_b};
    const auto n = static_cast<std::size_t>(N);

    long double joint = 0.0L;
    long double target = 0.0L;
    std::vector<int> x2(n), a(n);
    std::vector<long double> w2(n);
    for (unsigned mask = 0; mask < (1u << N); ++mask) {
        long double p_x = 1.0L;
        long double total = 0.0L;
        for (std::size_t i = 0; i < n; ++i) {
            x2[i] = (mask >> i) & 1u;
            p_x *= prior[x2[i]];
            total += g[x2[i]];
        }
        for (std::size_t i = 0; i < n; ++i) w2[i] = g[x2[i]] / total;

        std::fill(a.begin(), a.end(), 0);
        while (true) {
            const auto nu2 = std::count(a.begin(), a.end(), 0);
            if (nu2 == 2) {
                long double p_a2 = 1.0L;
                int n1a = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    p_a2 *= w2[static_cast<std::size_t>(a[i])];
                    n1a += x2[static_cast<std::size_t>(a[i])] == kStateA;
                }
                const int x1_1 = x2[static_cast<std::size_t>(a[0])];
                const long double w1 = g[x1_1] / (n1a * g[0] + (N - n1a) * g[1]);
                const long double p_nu1 = 0.5L * N * (N - 1) * w1 * w1 * std::pow(1.0L - w1, N - 2);
                const long double term = p_x * p_a2 * p_nu1;
                joint += term;
                if (a[0] == 0) target += term;
            }
            // odometer over [N]^N
            std::size_t k = 0;
            while (k < n && ++a[k] == N) a[k++] = 0;
            if (k == n) break;
        }
    }
    return static_cast<double>(target / joint);
}

namespace {

struct ConditionalTally {
    std::uint64_t raw = 0, conditioned = 0, target = 0;
    ConditionalTally& operator+=(const ConditionalTally& o) {
        raw += o.raw;
        conditioned += o.conditioned;
        target += o.target;
        return *this;
    }
};

struct DiagnosticTally {
    std::uint64_t reps = 0;
    std::uint64_t sum_n1a = 0, sum_n1a_sq = 0;
    std::uint64_t x1_a = 0, x1_a_nu2 = 0, x1_b_nu2 = 0;
    std::uint64_t x2_a = 0, x2_a_nu2 = 0, x2_b_nu2 = 0;
    DiagnosticTally& operator+=(const DiagnosticTally& o) {
        reps += o.reps;
        sum_n1a += o.sum_n1a;
        sum_n1a_sq += o.sum_n1a_sq;
        x1_a += o.x1_a;
        x1_a_nu2 += o.x1_a_nu2;
        x1_b_nu2 += o.x1_b_nu2;
        x2_a += o.x2_a;
        x2_a_nu2 += o.x2_a_nu2;
        x2_b_nu2 += o.x2_b_nu2;
        return *this;
    }
};

DiagnosticEntry proportion(std::string name, std::uint64_t hits, std::uint64_t support,
                           double analytic) {
    DiagnosticEntry e{std::move(name), 0.0, 0.0, analytic, support, support == 0};
    if (support > 0) {
        e.empirical = static_cast<double>(hits) / static_cast<double>(support);
        e.std_err = stats::wald_std_err(e.empirical, support);
    }
    return e;
}

}  // namespace

ConditionalEstimate mc_conditional(const CounterexampleParams& params, int N,
                                   std::uint64_t reps, std::uint64_t seed, const Exec& exec) {
    params.validate();
    if (N < 2) throw ParameterError("mc_conditional needs N >= 2");
    if (reps < 1) throw ParameterError("mc_conditional needs reps >= 1");

    const auto tally = replicate_reduce<ConditionalTally>(
        reps, exec, [&](std::uint64_t r, ConditionalTally& t) {
            ++t.raw;
            const auto s = two_step_replicate(params, N, rng::stream_seed(seed, r), 2);
            if (!s || s->nu1_1 != 2) return;
            ++t.conditioned;
            t.target += s->parent_is_1;
        });
    if (tally.conditioned == 0) throw ZeroSupportError(tally.raw);

    ConditionalEstimate est;
    est.raw_reps = tally.raw;
    est.conditioned_hits = tally.conditioned;
    est.target_hits = tally.target;
    est.p_hat = static_cast<double>(tally.target) / static_cast<double>(tally.conditioned);
    est.scaled = N * est.p_hat / 2.0;
    est.std_err = stats::wald_std_err(est.p_hat, tally.conditioned);
    est.seed = seed;
    return est;
}

DiagnosticsReport limit_diagnostics(const CounterexampleParams& params, int N,
                                    std::uint64_t reps, std::uint64_t seed, const Exec& exec) {
    params.validate();
    if (N < 2) throw ParameterError("limit_diagnostics needs N >= 2");
    if (reps < 2) throw ParameterError("limit_diagnostics needs reps >= 2");

    const auto t = replicate_reduce<DiagnosticTally>(
        reps, exec, [&](std::uint64_t r, DiagnosticTally& d) {
            const auto s = *two_step_replicate(params, N, rng::stream_seed(seed, r));
            ++d.reps;
            const auto n1a = static_cast<std::uint64_t>(s.time1.n_a);
            d.sum_n1a += n1a;
            d.sum_n1a_sq += n1a * n1a;
            if (s.x1_1 == kStateA) {
                ++d.x1_a;
                d.x1_a_nu2 += s.nu1_1 == 2;
            } else {
                d.x1_b_nu2 += s.nu1_1 == 2;
            }
            if (s.x2_1 == kStateA) {
                ++d.x2_a;
                d.x2_a_nu2 += s.nu2_1 == 2;
            } else {
                d.x2_b_nu2 += s.nu2_1 == 2;
            }
        });

    const auto a = model::analytic_report(params);
    const double alpha_qa = params.alpha * a.q_a;

    DiagnosticsReport rep;
    rep.N = N;
    rep.reps = reps;
    rep.seed = seed;

    {
        const long double count = static_cast<long double>(t.reps);
        const long double scale = static_cast<long double>(N);
        const long double mean = static_cast<long double>(t.sum_n1a) / (count * scale);
        const long double mean_sq =
            static_cast<long double>(t.sum_n1a_sq) / (count * scale * scale);
        const long double var = std::max(0.0L, (mean_sq - mean * mean) * count / (count - 1));
        rep.entries.push_back({"N_1^a/N", static_cast<double>(mean),
                               static_cast<double>(std::sqrt(var / count)), alpha_qa, t.reps,
                               false});
    }
    rep.entries.push_back(proportion("P(X_1^1=a)", t.x1_a, t.reps, alpha_qa));
    rep.entries.push_back(proportion("P(nu_1^1=2|X_1^1=a)", t.x1_a_nu2, t.x1_a,
                                     model::f_weight(a.q_a_prime)));
    rep.entries.push_back(proportion("P(nu_1^1=2|X_1^1=b)", t.x1_b_nu2, t.reps - t.x1_a,
                                     model::f_weight(a.q_b_prime)));
    rep.entries.push_back(
        proportion("P(nu_2^1=2|X_2^1=a)", t.x2_a_nu2, t.x2_a, model::f_weight(a.q_a)));
    rep.entries.push_back(proportion("P(nu_2^1=2|X_2^1=b)", t.x2_b_nu2, t.reps - t.x2_a,
                                     model::f_weight(a.q_b)));
    return rep;
}

std::vector<ReportRow> counterexample_report(const CounterexampleParams& params,
                                             const std::vector<int>& N_list, std::uint64_t reps,
                                             std::uint64_t seed, const Exec& exec) {
    params.validate();
    const double R = model::analytic_report(params).R;
    std::vector<ReportRow> rows;
    for (int N : N_list) {
        if (N < 2) throw ParameterError("report needs every N >= 2");
        ReportRow row;
        row.N = N;
        row.exact = exact_conditional(params, N);
        row.predicted = 2.0 / N;
        row.scaled = N * row.exact / 2.0;
        row.R = R;
        if (reps > 0) {
            try {
                const auto est = mc_conditional(params, N, reps, seed, exec);
                row.mc_p_hat = est.p_hat;
                row.mc_std_err = est.std_err;
            } catch (const ZeroSupportError&) {
            }
        }
        rows.push_back(row);
    }
    return rows;
}

void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
    io::write_csv_preamble(out, "ancestral.counterexample_report/1",
                           {"N", "exact", "pred_2_over_N", "scaled", "mc_p_hat", "mc_std_err", "R"});
    for (const auto& r : rows) {
        out << r.N << ',' << io::format_real(r.exact) << ',' << io::format_real(r.predicted) << ','
            << io::format_real(r.scaled) << ','
            << (r.mc_p_hat ? io::format_real(*r.mc_p_hat) : std::string{}) << ','
            << (r.mc_std_err ? io::format_real(*r.mc_std_err) : std::string{}) << ','
            << io::format_real(r.R) << '\n';
    }
}

}  // namespace ancestral::counterexample
