#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ancestral/model.hpp"
#include "ancestral/parallel.hpp"
#include "ancestral/simulator.hpp"

namespace ancestral::counterexample {

using model::CounterexampleParams;

/// States of the two-state model.
inline constexpr int kStateA = 0;
inline constexpr int kStateB = 1;

struct StateCounts {
    int n_a = 0;
    int n_b = 0;
};

/// Quantities of a T = 2 run in reverse-time labels (time 2 is the initial
/// generation, time 0 the leaves). Particle 1 is index 0.
struct TwoStepSummary {
    int x2_1 = 0;       ///< X_2^(1)
    int x1_1 = 0;       ///< X_1^(1)
    int nu2_1 = 0;      ///< nu_2^(1)
    int nu1_1 = 0;      ///< nu_1^(1)
    bool parent_is_1 = false;  ///< a_2^(1) = 1
    StateCounts time2;  ///< N_2^a, N_2^b
    StateCounts time1;  ///< N_1^a, N_1^b
};

/// Reads a TwoStepSummary off a forward trajectory with T = 2.
TwoStepSummary summarize_two_step(const sim::Trajectory& trajectory);

/// Runs one T = 2 replicate of the two-state model from `seed`, consuming
/// uniforms in exactly the order of sim::simulate, so the result equals
/// summarize_two_step(simulate(two_state model, N, 2, seed)). With
/// stop_unless_nu2_is set, stops (returning nullopt) once nu_2^(1) is known to
/// differ from it.
std::optional<TwoStepSummary> two_step_replicate(const CounterexampleParams& params, int N,
                                                 std::uint64_t seed,
                                                 std::optional<int> stop_unless_nu2_is = {});

/// P(a_2^(1) = 1 | nu_2^(1) = 2, nu_1^(1) = 2) at finite N, summed in O(N^2)
/// terms over (X_2^(1), #a among the other time-2 particles, the parent class
/// of child 1, the multinomial split of the remaining children). N >= 2.
double exact_conditional(const CounterexampleParams& params, int N);

/// Same probability by enumerating every X_2 in {a,b}^N and every ancestor
/// vector in [N]^N. ResourceError for N > 6.
double brute_force_conditional(const CounterexampleParams& params, int N);

struct ConditionalEstimate {
    std::uint64_t raw_reps = 0;
    std::uint64_t conditioned_hits = 0;
    std::uint64_t target_hits = 0;
    double p_hat = 0;
    /// N p_hat / 2
    double scaled = 0;
    double std_err = 0;
    std::uint64_t seed = 0;
};

/// Rejection estimate of the conditional probability. Replicate r uses the
/// substream rng::stream_seed(seed, r). ZeroSupportError when no replicate
/// lands in the conditioning event.
ConditionalEstimate mc_conditional(const CounterexampleParams& params, int N,
                                   std::uint64_t reps, std::uint64_t seed, const Exec& exec = {});

struct DiagnosticEntry {
    std::string name;
    double empirical = 0;
    double std_err = 0;
    double analytic = 0;
    /// Number of replicates the estimate is built from.
    std::uint64_t support = 0;
    /// No replicate fell in the conditioning cell; empirical is meaningless.
    bool empty = false;

    bool within(double sigmas) const {
        return !empty && std::abs(empirical - analytic) <= sigmas * std_err;
    }
};

struct DiagnosticsReport {
    int N = 0;
    std::uint64_t reps = 0;
    std::uint64_t seed = 0;
    /// In order: N_1^a/N, P(X_1^(1)=a), P(nu_1^(1)=2 | X_1^(1)=a),
    /// P(nu_1^(1)=2 | X_1^(1)=b), P(nu_2^(1)=2 | X_2^(1)=a), P(nu_2^(1)=2 | X_2^(1)=b).
    std::vector<DiagnosticEntry> entries;
};

/// Empirical versions of the large-N limits used in the lower bound, paired
/// with their analytic values.
DiagnosticsReport limit_diagnostics(const CounterexampleParams& params, int N,
                                    std::uint64_t reps, std::uint64_t seed, const Exec& exec = {});

struct ReportRow {
    int N = 0;
    double exact = 0;
    double predicted = 0;  ///< 2 / N
    double scaled = 0;     ///< N exact / 2
    std::optional<double> mc_p_hat;
    std::optional<double> mc_std_err;
    double R = 0;
};

/// One row per N. MC columns stay empty when reps = 0 or the estimate had no
/// support. Every N uses the same seed.
std::vector<ReportRow> counterexample_report(const CounterexampleParams& params,
                                             const std::vector<int>& N_list, std::uint64_t reps,
                                             std::uint64_t seed, const Exec& exec = {});

/// Header `N,exact,pred_2_over_N,scaled,mc_p_hat,mc_std_err,R`; empty cells for
/// missing MC values.
void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows);

}  // namespace ancestral::counterexample
