#include "ancestral/stats.hpp"

#include "ancestral/errors.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ancestral::stats {

double chi_square_sf(double x, int dof) {
    if (dof < 1) throw ParameterError("chi-square needs dof >= 1");
    if (x <= 0.0) return 1.0;
    const boost::math::chi_squared_distribution<double> dist(dof);
    return boost::math::cdf(boost::math::complement(dist, x));
}

double wald_std_err(double p, std::uint64_t n) {
    if (n == 0) return 0.0;
    return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n));
}

double ols_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw ParameterError("slope fit needs at least two paired points");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (sxx == 0.0) throw ParameterError("slope fit needs distinct x values");
    return sxy / sxx;
}

GoodnessOfFit uniform_goodness_of_fit(std::span<const std::uint64_t> observed) {
    if (observed.size() < 2) throw ParameterError("goodness of fit needs two or more cells");
    const double total = static_cast<double>(
        std::accumulate(observed.begin(), observed.end(), std::uint64_t{0}));
    if (total == 0.0) throw DiagnosticError("goodness of fit on an empty sample");
    const double expected = total / static_cast<double>(observed.size());
    GoodnessOfFit g;
    for (auto o : observed) {
        const double d = static_cast<double>(o) - expected;
        g.chi2 += d * d / expected;
    }
    g.dof = static_cast<int>(observed.size()) - 1;
    g.p_value = chi_square_sf(g.chi2, g.dof);
    return g;
}

std::uint64_t ContingencyTable::total() const {
    std::uint64_t t = 0;
    for (const auto& row : counts) t = std::accumulate(row.begin(), row.end(), t);
    return t;
}

std::vector<std::uint64_t> ContingencyTable::row_totals() const {
    std::vector<std::uint64_t> r;
    for (const auto& row : counts) r.push_back(std::accumulate(row.begin(), row.end(), std::uint64_t{0}));
    return r;
}

std::vector<std::uint64_t> ContingencyTable::col_totals() const {
    std::vector<std::uint64_t> c(col_labels.size(), 0);
    for (const auto& row : counts)
        for (std::size_t j = 0; j < row.size(); ++j) c[j] += row[j];
    return c;
}

namespace {

std::string prefix(const std::string& label) { return label.substr(0, label.find(':')); }

ContingencyTable transpose(const ContingencyTable& t) {
    ContingencyTable out{t.col_labels, t.row_labels, {}};
    out.counts.assign(t.col_labels.size(), std::vector<std::uint64_t>(t.row_labels.size(), 0));
    for (std::size_t i = 0; i < t.counts.size(); ++i)
        for (std::size_t j = 0; j < t.counts[i].size(); ++j) out.counts[j][i] = t.counts[i][j];
    return out;
}

void drop_empty_rows(ContingencyTable& t) {
    const auto totals = t.row_totals();
    ContingencyTable kept{{}, t.col_labels, {}};
    for (std::size_t i = 0; i < totals.size(); ++i)
        if (totals[i] > 0) {
            kept.row_labels.push_back(t.row_labels[i]);
            kept.counts.push_back(t.counts[i]);
        }
    t = std::move(kept);
}

/// Merges row i into an adjacent row.
void merge_row(ContingencyTable& t, std::size_t i) {
    const auto totals = t.row_totals();
    const bool has_prev = i > 0;
    const bool has_next = i + 1 < t.counts.size();
    std::size_t into;
    const bool prev_same = has_prev && prefix(t.row_labels[i - 1]) == prefix(t.row_labels[i]);
    const bool next_same = has_next && prefix(t.row_labels[i + 1]) == prefix(t.row_labels[i]);
    if (prev_same != next_same)
        into = prev_same ? i - 1 : i + 1;
    else if (has_prev && has_next)
        into = totals[i - 1] <= totals[i + 1] ? i - 1 : i + 1;
    else
        into = has_prev ? i - 1 : i + 1;

    const std::size_t lo = std::min(i, into), hi = std::max(i, into);
    for (std::size_t j = 0; j < t.counts[lo].size(); ++j) t.counts[lo][j] += t.counts[hi][j];
    t.row_labels[lo] += "+" + t.row_labels[hi];
    t.counts.erase(t.counts.begin() + static_cast<std::ptrdiff_t>(hi));
    t.row_labels.erase(t.row_labels.begin() + static_cast<std::ptrdiff_t>(hi));
}

}  // namespace

IndependenceResult chi_square_independence(const ContingencyTable& table, double min_expected) {
    IndependenceResult res;
    res.raw = table;
    if (table.total() == 0) throw DiagnosticError("contingency table is empty");

    ContingencyTable t = table;
    drop_empty_rows(t);
    t = transpose(t);
    drop_empty_rows(t);
    t = transpose(t);
    if (t.counts.size() < 2 || t.col_labels.size() < 2)
        throw DiagnosticError("contingency table is degenerate: a margin sits in one category");

    const double n = static_cast<double>(t.total());
    while (true) {
        const auto rt = t.row_totals();
        const auto ct = t.col_totals();
        double smallest = std::numeric_limits<double>::infinity();
        std::size_t si = 0, sj = 0;
        for (std::size_t i = 0; i < rt.size(); ++i)
            for (std::size_t j = 0; j < ct.size(); ++j) {
                const double e = static_cast<double>(rt[i]) * static_cast<double>(ct[j]) / n;
                if (e < smallest) {
                    smallest = e;
                    si = i;
                    sj = j;
                }
            }
        if (smallest >= min_expected) break;
        const bool can_row = rt.size() > 2;
        const bool can_col = ct.size() > 2;
        if (!can_row && !can_col)
            throw DiagnosticError("contingency table too sparse for a chi-square test");
        if (can_row && (!can_col || rt[si] <= ct[sj])) {
            merge_row(t, si);
        } else {
            t = transpose(t);
            merge_row(t, sj);
            t = transpose(t);
        }
    }

    const auto rt = t.row_totals();
    const auto ct = t.col_totals();
    for (std::size_t i = 0; i < rt.size(); ++i)
        for (std::size_t j = 0; j < ct.size(); ++j) {
            const double e = static_cast<double>(rt[i]) * static_cast<double>(ct[j]) / n;
            const double d = static_cast<double>(t.counts[i][j]) - e;
            res.chi2 += d * d / e;
        }
    res.dof = static_cast<int>((rt.size() - 1) * (ct.size() - 1));
    res.p_value = chi_square_sf(res.chi2, res.dof);
    res.merged = std::move(t);
    return res;
}

}  // namespace ancestral::stats
