#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ancestral/model.hpp"
#include "ancestral/parallel.hpp"
#include "ancestral/stats.hpp"

namespace ancestral::coupling {

using model::CounterexampleParams;

/// One joint realisation of the true two-step system and its surrogates.
/// States use 0 = a, 1 = b; counts are offspring numbers of particle 1.
struct CoupledDraw {
    int x2_1 = 0;       ///< X_2^(1)
    int nu2_1 = 0;      ///< nu_2^(1)
    int nu2_hat = 0;    ///< #{i <= N : U_2^(i) <= g(X_2^(1)) / (N E_mu g)}
    int x1_1 = 0;       ///< X_1^(1)
    int nu1_1 = 0;      ///< nu_1^(1)
    int x1_tilde = 0;   ///< X_1 at the first index whose parent is not particle 1
    int nu1_tilde = 0;  ///< children of that index under the reweighted assignment
    int first_index = 1;  ///< I, 1-based; 1 whenever a_2^(1) != 1
    bool parent_is_1 = false;  ///< a_2^(1) = 1
    std::uint64_t seed = 0;

    bool tilde_mismatch() const { return x1_tilde != x1_1 || nu1_tilde != nu1_1; }
    bool hat_mismatch() const { return nu2_hat != nu2_1; }

    friend bool operator==(const CoupledDraw&, const CoupledDraw&) = default;
};

/// Builds one coupled draw.
///
/// Uniform order from xoshiro256**(seed): N draws for X_2 from the initial law;
/// U_2^(1..N); extra U_2^(N+1), ... until N indices with parent other than
/// particle 1 have been collected; then U_1^(1..N), shared by the true and the
/// reweighted time-1 assignments. N >= 2.
CoupledDraw coupled_draw(const CounterexampleParams& params, int N, std::uint64_t seed);

struct MismatchPoint {
    int N = 0;
    double tilde_rate = 0, tilde_se = 0;
    double hat_rate = 0, hat_se = 0;
};

struct MismatchRates {
    std::vector<MismatchPoint> points;
    /// Fitted slope of log rate against log N over points with a nonzero rate;
    /// NaN when fewer than two such points exist.
    double tilde_slope = 0;
    double hat_slope = 0;
};

/// Monte Carlo estimates of P((X~_1, nu~_1) != (X_1, nu_1)) and
/// P(nu^_2 != nu_2) per N. Replicate r at size N uses
/// rng::stream_seed(rng::stream_seed(seed, N), r).
MismatchRates mismatch_rates(const CounterexampleParams& params, const std::vector<int>& N_list,
                             std::uint64_t reps, std::uint64_t seed, const Exec& exec = {});

/// CSV header `N,tilde_mismatch,tilde_se,hat_mismatch,hat_se`.
void write_mismatch_csv(std::ostream& out, const MismatchRates& rates);

/// Offspring-count bins 0, 1, 2, >= 3.
int count_bin(int nu);

/// Cross-tabulation of (X_2^(1), nu^_2 bin) rows against (X~_1, nu~_1 bin)
/// columns over `reps` coupled draws (stream as in mismatch_rates with index N).
stats::ContingencyTable coupled_table(const CounterexampleParams& params, int N,
                                      std::uint64_t reps, std::uint64_t seed,
                                      const Exec& exec = {});

/// Chi-square test of independence on coupled_table. Needs reps >= 10^4.
stats::IndependenceResult independence_test(const CounterexampleParams& params, int N,
                                            std::uint64_t reps, std::uint64_t seed,
                                            const Exec& exec = {});

/// {table, row_labels, col_labels, raw_table, chi2, dof, p_value}
nlohmann::json to_json(const stats::IndependenceResult& result);

}  // namespace ancestral::coupling
