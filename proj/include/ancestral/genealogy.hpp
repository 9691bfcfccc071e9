#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ancestral/simulator.hpp"

namespace ancestral::genealogy {

/// Partition of the leaf set {1, ..., n}. Always canonical: blocks ordered by
/// their least element, elements ascending within a block.
class Partition {
public:
    Partition() = default;
    /// Canonicalises; throws ParameterError unless the blocks are nonempty,
    /// pairwise disjoint and cover exactly {1, ..., n}.
    explicit Partition(std::vector<std::vector<int>> blocks);

    /// {{1}, ..., {n}}
    static Partition singletons(int n);
    /// Parses `1,2|3`: blocks separated by `|`, elements by `,`.
    static Partition parse(std::string_view text);

    int n() const noexcept { return n_; }
    int size() const noexcept { return static_cast<int>(blocks_.size()); }
    const std::vector<std::vector<int>>& blocks() const noexcept { return blocks_; }
    /// 0-based index of the block holding `element`.
    int block_of(int element) const;

    std::string to_string() const;

    friend bool operator==(const Partition&, const Partition&) = default;

private:
    std::vector<std::vector<int>> blocks_;
    int n_ = 0;
};

/// b[k] = number of blocks of xi merged into block k of eta.
struct MergeSpec {
    std::vector<int> b;
    friend bool operator==(const MergeSpec&, const MergeSpec&) = default;
};

/// All partitions of {1, ..., n}, in restricted-growth order.
std::vector<Partition> set_partitions(int n);

/// All partitions obtained from xi by merging whole blocks (xi itself included).
std::vector<Partition> coarsenings(const Partition& xi);

/// Partition of leaves 1..n of the last generation by common ancestor after
/// s reverse steps. Throws RangeError for n > N, n < 1 or s outside [0, T].
Partition partition_at(const sim::Trajectory& trajectory, int n, int s);

/// b-vector when eta coarsens xi, nullopt otherwise. Different ground sets
/// are a ContractViolation.
std::optional<MergeSpec> merge_spec(const Partition& xi, const Partition& eta);

/// Falling-factorial transition formula:
///   (1 / (N)_{|xi|}) * sum over distinct i_1..i_{|eta|} of prod_k (nu_{i_k})_{b_k}.
/// The sum is exact over 128-bit integers when it fits.
/// DomainError if eta does not coarsen xi; ContractViolation if sum(nu) != N
/// or |xi| > N.
double mohle_transition(const Partition& xi, const Partition& eta,
                        const sim::OffspringCounts& nu, int N);

/// Enumeration oracle for mohle_transition. Walks every parental vector with
/// offspring counts nu (all equally likely), lets child k stand for block k of
/// xi and returns the fraction whose induced merge of xi equals eta.
/// ResourceError for N > 8.
double brute_force_transition(const Partition& xi, const Partition& eta,
                              const sim::OffspringCounts& nu, int N);

/// Smallest reverse time at which leaves 1..n share one ancestor; nullopt if
/// that does not happen by s = T. n = 1 gives 0.
std::optional<int> mrca_time(const sim::Trajectory& trajectory, int n);

/// Reverse-time index s = T - g of forward generation g.
inline int reverse_time(const sim::Trajectory& trajectory, int generation) {
    return trajectory.T - generation;
}

}  // namespace ancestral::genealogy
