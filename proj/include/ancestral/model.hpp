#pragma once

#include <iosfwd>
#include <vector>

namespace ancestral::model {

/// Two-state model with initial law (alpha, 1 - alpha) on {a, b},
/// identity kernel and potentials g(a) = p_a, g(b) = p_b.
struct CounterexampleParams {
    double alpha = 0.5;
    double p_a = 1.0;
    double p_b = 0.075;

    /// Throws ParameterError unless 0 < alpha < 1, p_a > 0, p_b > 0.
    void validate() const;
    /// validate() plus the strict ordering p_b < p_a.
    void validate_strict() const;

    /// Mean potential under the initial law: alpha p_a + (1 - alpha) p_b.
    double mean_potential() const noexcept { return alpha * p_a + (1.0 - alpha) * p_b; }
};

struct AnalyticReport {
    double q_a = 0, q_b = 0;
    double q_a_prime = 0, q_b_prime = 0;
    /// 1 / (alpha q_a)
    double t1 = 0;
    /// Limit of P(X_2^1 = a | X_1^1 = a, nu_2^1 = 2, nu_1^1 = 2).
    double t2 = 0;
    /// Limit of P(X_1^1 = a | nu_2^1 = 2, nu_1^1 = 2).
    double t3 = 0;
    double R = 0;
};

/// x^2 e^{-x} / 2, the Poisson(x) mass at 2. Requires x >= 0.
double f_weight(double x);

AnalyticReport analytic_report(const CounterexampleParams& params);

struct RCurvePoint {
    double p_b;
    double R;
    friend bool operator==(const RCurvePoint&, const RCurvePoint&) = default;
};

/// R(alpha, p_a, p_b) on `points` evenly spaced p_b values from pb_min to pb_max.
/// With pb_min = 0 the grid is the left-open (0, pb_max]: pb_max k / points, k = 1..points.
std::vector<RCurvePoint> r_curve(double alpha, double p_a, double pb_min, double pb_max,
                                 int points);

/// CSV with header `p_b,R`, 17 significant digits.
void write_r_curve_csv(std::ostream& out, const std::vector<RCurvePoint>& rows);

}  // namespace ancestral::model
