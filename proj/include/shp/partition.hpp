// partition.hpp - bucket assignment of data vertices and balance constraints
#ifndef SHP_PARTITION_HPP
#define SHP_PARTITION_HPP

#include "shp/graph.hpp"
#include "shp/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace shp {

// Contiguous set of buckets [lo, hi) a vertex may occupy.
struct TargetRange {
    BucketId lo = 0;
    BucketId hi = 0;

    bool contains(BucketId b) const { return b >= lo && b < hi; }
    std::uint32_t size() const { return hi - lo; }
    bool operator==(const TargetRange &) const = default;
};

struct Move {
    DataId vertex;
    BucketId target;
};

// Bucket per data vertex plus incrementally maintained bucket sizes.
//
// Vertices are grouped; every vertex of a group shares one allowed target
// range. Direct k-way partitioning uses a single group covering [0, k);
// recursive partitioning uses one group per parent bucket.
class PartitionState {
public:
    PartitionState() = default;

    // Single group with all k buckets allowed.
    PartitionState(std::uint32_t k, std::vector<BucketId> bucket_of);

    // Explicit groups; group_of[v] indexes groups.
    PartitionState(std::uint32_t k, std::vector<BucketId> bucket_of, std::vector<TargetRange> groups,
                   std::vector<std::uint32_t> group_of);

    std::uint32_t k() const { return k_; }
    std::uint32_t num_vertices() const { return static_cast<std::uint32_t>(bucket_of_.size()); }
    BucketId bucket_of(DataId v) const { return bucket_of_[v]; }
    std::uint32_t bucket_size(BucketId b) const { return bucket_size_[b]; }
    std::span<const BucketId> assignment() const { return bucket_of_; }
    std::span<const std::uint32_t> sizes() const { return bucket_size_; }

    TargetRange allowed(DataId v) const { return group_of_.empty() ? groups_[0] : groups_[group_of_[v]]; }
    std::uint32_t group_of(DataId v) const { return group_of_.empty() ? 0 : group_of_[v]; }
    std::span<const TargetRange> groups() const { return groups_; }

    // Applies all moves or none. Throws ValidationError if any target lies
    // outside the vertex's allowed range or a vertex id is out of range.
    void apply_moves(std::span<const Move> moves);

    // Recomputes sizes from the assignment and compares with stored sizes.
    bool consistent() const;

    bool operator==(const PartitionState &other) const {
        return k_ == other.k_ && bucket_of_ == other.bucket_of_;
    }

private:
    std::uint32_t k_ = 0;
    std::vector<BucketId> bucket_of_;
    std::vector<std::uint32_t> bucket_size_;
    std::vector<TargetRange> groups_;
    std::vector<std::uint32_t> group_of_;
};

// Allowed imbalance: |V_i| <= floor((1 + epsilon) * n / k).
struct BalanceSpec {
    double epsilon = 0.05;

    // Capacity of a bucket that will hold `share` of `k` final buckets.
    std::uint32_t capacity(std::uint32_t n, std::uint32_t k, std::uint32_t share = 1) const;
};

// floor((1 + epsilon) * n * share / k), with a 1e-9 guard against products
// such as 1.15 * 100 landing just below an integer.
std::uint32_t bucket_capacity(double epsilon, std::uint32_t n, std::uint32_t k, std::uint32_t share = 1);

// Each data vertex independently uniform in [0, k) from a seeded generator.
// Throws ValidationError when k < 2.
PartitionState init_random_partition(const BipartiteGraph &g, std::uint32_t k, std::uint64_t seed);

// Moves surplus vertices out of buckets above capacity into the bucket of the
// same group with the most spare room. Vertices are picked by seeded hash so
// the result is deterministic. Returns the number of moved vertices.
std::uint64_t repair_balance(PartitionState &state, std::span<const std::uint32_t> capacity, std::uint64_t seed);

} // namespace shp

#endif // SHP_PARTITION_HPP
