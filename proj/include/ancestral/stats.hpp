#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ancestral::stats {

/// Upper tail P(X > x) of a chi-square variable with `dof` degrees of freedom.
double chi_square_sf(double x, int dof);

/// Wald standard error sqrt(p (1 - p) / n) of a proportion; 0 when n = 0.
double wald_std_err(double p, std::uint64_t n);

/// Least-squares slope of y against x.
double ols_slope(std::span<const double> x, std::span<const double> y);

struct GoodnessOfFit {
    double chi2 = 0;
    int dof = 0;
    double p_value = 1;
};

/// Pearson statistic of observed counts against equal cell probabilities.
GoodnessOfFit uniform_goodness_of_fit(std::span<const std::uint64_t> observed);

/// Counts indexed [row][col] with category labels.
struct ContingencyTable {
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    std::vector<std::vector<std::uint64_t>> counts;

    std::uint64_t total() const;
    std::vector<std::uint64_t> row_totals() const;
    std::vector<std::uint64_t> col_totals() const;
};

struct IndependenceResult {
    ContingencyTable raw;
    /// After dropping empty categories and merging sparse ones.
    ContingencyTable merged;
    double chi2 = 0;
    int dof = 0;
    double p_value = 1;
};

/// Pearson chi-square test of independence. Empty rows/columns are dropped;
/// then, while some expected count is below `min_expected`, the row or column
/// through the smallest expected cell (whichever has the smaller total) is
/// merged into an adjacent category, preferring a neighbour whose label shares
/// the same prefix before ':'. DiagnosticError if fewer than two rows or
/// columns remain.
IndependenceResult chi_square_independence(const ContingencyTable& table,
                                           double min_expected = 5.0);

}  // namespace ancestral::stats
