#include "ancestral/genealogy.hpp"

#include "ancestral/errors.hpp"
#include "ancestral/io.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>

namespace ancestral::genealogy {

namespace {

using int128 = __int128;

/// (x)_b over integers.
int128 falling_factorial(int x, int b) {
    int128 r = 1;
    for (int k = 0; k < b; ++k) r *= (x - k);
    return r;
}

int parse_int(std::string_view s) {
    int value = 0;
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    while (first != last && *first == ' ') ++first;
    while (last != first && *(last - 1) == ' ') --last;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || first == last)
        throw ParameterError("not an integer: '" + std::string(s) + "'");
    return value;
}

/// Partition of {0..m-1} from a restricted-growth string.
std::vector<std::vector<int>> groups_from_rgs(const std::vector<int>& rgs) {
    const int k = rgs.empty() ? 0 : *std::max_element(rgs.begin(), rgs.end()) + 1;
    std::vector<std::vector<int>> groups(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < rgs.size(); ++i) groups[rgs[i]].push_back(static_cast<int>(i));
    return groups;
}

/// Calls visit(rgs) for every restricted-growth string of length m.
template <class Visit>
void for_each_rgs(int m, Visit&& visit) {
    if (m == 0) {
        visit(std::vector<int>{});
        return;
    }
    std::vector<int> rgs(static_cast<std::size_t>(m), 0);
    std::vector<int> maxima(static_cast<std::size_t>(m), 0);  // max of rgs[0..i-1]
    while (true) {
        visit(rgs);
        int i = m - 1;
        while (i > 0 && rgs[i] == maxima[i] + 1) --i;
        if (i == 0) return;
        ++rgs[i];
        for (int j = i + 1; j < m; ++j) {
            rgs[j] = 0;
            maxima[j] = std::max(maxima[j - 1], rgs[j - 1]);
        }
    }
}

/// sum over distinct (i_1..i_m) of prod_k (nu_{i_k})_{b_k}, by a subset DP over
/// parents: dp[mask] counts ways to give the eta-blocks in mask distinct parents.
template <class Num>
Num distinct_parent_sum(const std::vector<int>& nu, const std::vector<int>& b, bool& overflow) {
    const int m = static_cast<int>(b.size());
    const std::size_t full = std::size_t{1} << m;
    std::vector<Num> dp(full, Num{0});
    dp[0] = 1;
    std::vector<Num> weight(static_cast<std::size_t>(m));
    for (int count : nu) {
        bool any = false;
        for (int k = 0; k < m; ++k) {
            weight[k] = static_cast<Num>(falling_factorial(count, b[k]));
            any = any || weight[k] != Num{0};
        }
        if (!any) continue;
        // Descending masks so each parent is used at most once.
        for (std::size_t mask = full; mask-- > 1;) {
            for (int k = 0; k < m; ++k) {
                if (!(mask >> k & 1u) || weight[k] == Num{0}) continue;
                const Num prev = dp[mask ^ (std::size_t{1} << k)];
                if (prev == Num{0}) continue;
                if constexpr (std::is_same_v<Num, int128>) {
                    int128 term;
                    if (__builtin_mul_overflow(prev, weight[k], &term) ||
                        __builtin_add_overflow(dp[mask], term, &dp[mask])) {
                        overflow = true;
                        return 0;
                    }
                } else {
                    dp[mask] += prev * weight[k];
                }
            }
        }
    }
    return dp[full - 1];
}

void check_same_ground(const Partition& xi, const Partition& eta) {
    if (xi.n() != eta.n()) throw ContractViolation("partitions have different ground sets");
}

void check_counts(const sim::OffspringCounts& nu, int N) {
    if (N < 1 || nu.size() != N) throw ContractViolation("offspring vector length must equal N");
    long long total = 0;
    for (int c : nu.counts) {
        if (c < 0) throw ContractViolation("offspring counts must be nonnegative");
        total += c;
    }
    if (total != N) throw ContractViolation("offspring counts must sum to N");
}

}  // namespace

Partition::Partition(std::vector<std::vector<int>> blocks) : blocks_(std::move(blocks)) {
    int total = 0;
    int largest = 0;
    for (auto& block : blocks_) {
        if (block.empty()) throw ParameterError("partition has an empty block");
        std::sort(block.begin(), block.end());
        total += static_cast<int>(block.size());
        largest = std::max(largest, block.back());
        if (block.front() < 1) throw ParameterError("partition elements start at 1");
    }
    std::vector<char> seen(static_cast<std::size_t>(largest) + 1, 0);
    for (const auto& block : blocks_)
        for (int e : block) {
            if (seen[e]) throw ParameterError("element " + std::to_string(e) + " repeated");
            seen[e] = 1;
        }
    if (total != largest) throw ParameterError("partition elements must be exactly 1..n");
    n_ = largest;
    std::sort(blocks_.begin(), blocks_.end(),
              [](const auto& x, const auto& y) { return x.front() < y.front(); });
}

Partition Partition::singletons(int n) {
    if (n < 1) throw ParameterError("partition needs n >= 1");
    std::vector<std::vector<int>> blocks;
    for (int i = 1; i <= n; ++i) blocks.push_back({i});
    return Partition(std::move(blocks));
}

Partition Partition::parse(std::string_view text) {
    std::vector<std::vector<int>> blocks;
    for (const auto& part : io::split(text, '|')) {
        std::vector<int> block;
        for (const auto& item : io::split(part, ',')) block.push_back(parse_int(item));
        blocks.push_back(std::move(block));
    }
    return Partition(std::move(blocks));
}

int Partition::block_of(int element) const {
    for (std::size_t k = 0; k < blocks_.size(); ++k)
        if (std::binary_search(blocks_[k].begin(), blocks_[k].end(), element))
            return static_cast<int>(k);
    throw RangeError("element " + std::to_string(element) + " not in partition");
}

std::string Partition::to_string() const {
    std::string out;
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
        if (k) out += '|';
        for (std::size_t j = 0; j < blocks_[k].size(); ++j) {
            if (j) out += ',';
            out += std::to_string(blocks_[k][j]);
        }
    }
    return out;
}

std::vector<Partition> set_partitions(int n) {
    if (n < 1) throw ParameterError("set_partitions needs n >= 1");
    std::vector<Partition> out;
    for_each_rgs(n, [&](const std::vector<int>& rgs) {
        auto groups = groups_from_rgs(rgs);
        for (auto& g : groups)
            for (auto& e : g) ++e;
        out.emplace_back(std::move(groups));
    });
    return out;
}

std::vector<Partition> coarsenings(const Partition& xi) {
    std::vector<Partition> out;
    for_each_rgs(xi.size(), [&](const std::vector<int>& rgs) {
        std::vector<std::vector<int>> blocks;
        for (const auto& group : groups_from_rgs(rgs)) {
            std::vector<int> merged;
            for (int k : group)
                merged.insert(merged.end(), xi.blocks()[k].begin(), xi.blocks()[k].end());
            blocks.push_back(std::move(merged));
        }
        out.emplace_back(std::move(blocks));
    });
    return out;
}

Partition partition_at(const sim::Trajectory& trajectory, int n, int s) {
    if (n < 1 || n > trajectory.N) throw RangeError("need 1 <= n <= N");
    if (s < 0 || s > trajectory.T) throw RangeError("need 0 <= s <= T");

    std::vector<int> lineage(static_cast<std::size_t>(n));
    std::iota(lineage.begin(), lineage.end(), 0);
    for (int g = trajectory.T; g > trajectory.T - s; --g) {
        const auto& parents = trajectory.ancestors_of_generation(g);
        for (auto& idx : lineage) idx = parents[idx];
    }
    std::vector<std::vector<int>> blocks;
    std::vector<int> owner;  // ancestor index of blocks[k]
    for (int leaf = 0; leaf < n; ++leaf) {
        const auto it = std::find(owner.begin(), owner.end(), lineage[leaf]);
        if (it == owner.end()) {
            owner.push_back(lineage[leaf]);
            blocks.push_back({leaf + 1});
        } else {
            blocks[it - owner.begin()].push_back(leaf + 1);
        }
    }
    return Partition(std::move(blocks));
}

std::optional<MergeSpec> merge_spec(const Partition& xi, const Partition& eta) {
    check_same_ground(xi, eta);
    MergeSpec spec{std::vector<int>(static_cast<std::size_t>(eta.size()), 0)};
    for (const auto& block : xi.blocks()) {
        const int target = eta.block_of(block.front());
        const auto& host = eta.blocks()[target];
        for (int e : block)
            if (!std::binary_search(host.begin(), host.end(), e)) return std::nullopt;
        ++spec.b[target];
    }
    return spec;
}

double mohle_transition(const Partition& xi, const Partition& eta,
                        const sim::OffspringCounts& nu, int N) {
    check_counts(nu, N);
    if (xi.size() > N) throw ContractViolation("|xi| must not exceed N");
    const auto spec = merge_spec(xi, eta);
    if (!spec) throw DomainError("eta is not a coarsening of xi");

    bool overflow = false;
    const int128 numerator = distinct_parent_sum<int128>(nu.counts, spec->b, overflow);
    const int128 denominator = falling_factorial(N, xi.size());
    if (!overflow && denominator > 0)
        return static_cast<double>(static_cast<long double>(numerator) /
                                   static_cast<long double>(denominator));

    // Large N or |xi|: same recursion in extended floating point, scaled by
    // 1/(N)_{|xi|} through normalised falling factorials.
    overflow = false;
    const long double num = distinct_parent_sum<long double>(nu.counts, spec->b, overflow);
    long double den = 1.0L;
    for (int k = 0; k < xi.size(); ++k) den *= static_cast<long double>(N - k);
    return static_cast<double>(num / den);
}

double brute_force_transition(const Partition& xi, const Partition& eta,
                              const sim::OffspringCounts& nu, int N) {
    if (N > 8) throw ResourceError("brute_force_transition enumerates only N <= 8");
    check_counts(nu, N);
    if (xi.size() > N) throw ContractViolation("|xi| must not exceed N");
    const auto spec = merge_spec(xi, eta);
    if (!spec) throw DomainError("eta is not a coarsening of xi");

    // target[k]: eta-block receiving block k of xi
    std::vector<int> target;
    for (const auto& block : xi.blocks()) target.push_back(eta.block_of(block.front()));

    std::vector<int> parents;
    for (int i = 0; i < N; ++i) parents.insert(parents.end(), nu.counts[i], i);

    const int m = xi.size();
    long long total = 0;
    long long hits = 0;
    do {
        ++total;
        bool match = true;
        for (int j = 0; j < m && match; ++j)
            for (int k = j + 1; k < m; ++k)
                if ((parents[j] == parents[k]) != (target[j] == target[k])) {
                    match = false;
                    break;
                }
        hits += match;
    } while (std::next_permutation(parents.begin(), parents.end()));

    return static_cast<double>(hits) / static_cast<double>(total);
}

std::optional<int> mrca_time(const sim::Trajectory& trajectory, int n) {
    if (n < 1 || n > trajectory.N) throw RangeError("need 1 <= n <= N");
    if (n == 1) return 0;
    for (int s = 1; s <= trajectory.T; ++s)
        if (partition_at(trajectory, n, s).size() == 1) return s;
    return std::nullopt;
}

}  // namespace ancestral::genealogy
