#include "ancestral/model.hpp"

#include "ancestral/errors.hpp"
#include "ancestral/io.hpp"

#include <cmath>
#include <ostream>

namespace ancestral::model {

void CounterexampleParams::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ParameterError("alpha must lie in (0, 1)");
    if (!(p_a > 0.0) || !std::isfinite(p_a)) throw ParameterError("p_a must be positive");
    if (!(p_b > 0.0) || !std::isfinite(p_b)) throw ParameterError("p_b must be positive");
}

void CounterexampleParams::validate_strict() const {
    validate();
    if (!(p_b < p_a)) throw ParameterError("counterexample requires p_b < p_a");
}

double f_weight(double x) {
    if (!(x >= 0.0)) throw ParameterError("f_weight is defined for x >= 0");
    return 0.5 * x * x * std::exp(-x);
}

AnalyticReport analytic_report(const CounterexampleParams& params) {
    params.validate();
    const double alpha = params.alpha;
    const double beta = 1.0 - alpha;

    AnalyticReport r;
    const double m = params.mean_potential();
    r.q_a = params.p_a / m;
    r.q_b = params.p_b / m;
    const double m1 = alpha * params.p_a * r.q_a + beta * params.p_b * r.q_b;
    r.q_a_prime = params.p_a / m1;
    r.q_b_prime = params.p_b / m1;

    r.t1 = 1.0 / (alpha * r.q_a);

    const double fa = f_weight(r.q_a);
    const double fb = f_weight(r.q_b);
    r.t2 = alpha * fa / (alpha * fa + beta * fb);

    const double ga = alpha * r.q_a * f_weight(r.q_a_prime);
    const double gb = beta * r.q_b * f_weight(r.q_b_prime);
    r.t3 = ga / (ga + gb);

    r.R = r.t1 * r.t2 * r.t3;
    return r;
}

std::vector<RCurvePoint> r_curve(double alpha, double p_a, double pb_min, double pb_max,
                                 int points) {
    if (points < 2) throw ParameterError("r_curve needs at least 2 points");
    if (!(pb_min >= 0.0) || !(pb_max > pb_min) || !std::isfinite(pb_max))
        throw ParameterError("r_curve needs 0 <= pb_min < pb_max");

    // Left-open grid (0, pb_max] when the lower end is 0, closed grid otherwise.
    const bool open_left = pb_min == 0.0;
    const double step = open_left ? pb_max / points : (pb_max - pb_min) / (points - 1);

    std::vector<RCurvePoint> rows;
    rows.reserve(static_cast<std::size_t>(points));
    for (int k = 0; k < points; ++k) {
        double p_b = open_left ? step * (k + 1) : pb_min + step * k;
        if (k == points - 1) p_b = pb_max;
        const auto report = analytic_report({alpha, p_a, p_b});
        rows.push_back({p_b, report.R});
    }
    return rows;
}

void write_r_curve_csv(std::ostream& out, const std::vector<RCurvePoint>& rows) {
    io::write_csv_preamble(out, "ancestral.r_curve/1", {"p_b", "R"});
    for (const auto& row : rows)
        out << io::format_real(row.p_b) << ',' << io::format_real(row.R) << '\n';
}

}  // namespace ancestral::model
