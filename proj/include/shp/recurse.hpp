// recurse.hpp - direct k-way and recursive r-ary partitioning drivers
#ifndef SHP_RECURSE_HPP
#define SHP_RECURSE_HPP

#include "shp/graph.hpp"
#include "shp/partition.hpp"
#include "shp/refine.hpp"

#include <cstdint>
#include <vector>

namespace shp {

// Split tree of a recursive r-ary partitioning into k final buckets.
//
// Depth d (0..levels) holds the buckets after d splits. Node i at depth d
// covers final buckets [i * r^(levels-d), (i+1) * r^(levels-d)) clipped to
// [0, k); nodes covering nothing are pruned, so when k is not a power of r
// the rightmost subtrees are cut short.
class RecursionPlan {
public:
    RecursionPlan(std::uint32_t k, std::uint32_t r);

    std::uint32_t k() const { return k_; }
    std::uint32_t arity() const { return r_; }
    std::uint32_t levels() const { return levels_; }

    // Number of buckets at depth d.
    std::uint32_t buckets_at(std::uint32_t depth) const;
    // Final buckets node b at depth d will become.
    std::uint32_t final_share(std::uint32_t depth, BucketId b) const;
    // Children (at depth d + 1) of node b at depth d.
    TargetRange children(std::uint32_t depth, BucketId b) const;
    // Parent (at depth d - 1) of node b at depth d.
    BucketId parent(BucketId b) const { return b / r_; }

    // Per-bucket capacity at depth d >= 1 when epsilon_d is in effect:
    // max(floor((1+eps_d) n t_b / k), ceil(n t_b / k)), capped by what the
    // children can hold at the next depth under the full schedule. This keeps
    // every later split feasible.
    std::vector<std::uint32_t> capacities(std::uint32_t depth, std::uint32_t n, double epsilon) const;

private:
    std::uint32_t width(std::uint32_t depth) const; // r^(levels - depth)

    std::uint32_t k_;
    std::uint32_t r_;
    std::uint32_t levels_ = 0;
    std::vector<std::uint64_t> pow_; // pow_[i] = r^i
};

struct PartitionResult {
    PartitionState state;
    std::vector<TraceRow> trace;
};

// Random initial assignment, balance repair, then refine_loop over all k buckets.
PartitionResult direct_partition(const BipartiteGraph &g, std::uint32_t k, const RefineParams &params,
                                 const IterationObserver &observer = {});

// One refinement schedule per level; at each level the vertices of a bucket
// may only move among that bucket's children. Buckets that will still split
// t > 1 more ways are scored with the recursive approximation of their final
// p-fanout. With k = r = 2 this is exactly direct_partition.
PartitionResult recursive_partition(const BipartiteGraph &g, std::uint32_t k, std::uint32_t r,
                                    const RefineParams &params, const IterationObserver &observer = {});

// Score function used for a bucket that will become `share` final buckets.
ScoreFunction level_score(const ScoreFunction &base, std::uint32_t share);

} // namespace shp

#endif // SHP_RECURSE_HPP
