#include "shp/partition.hpp"

#include "shp/hash.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace shp {

PartitionState::PartitionState(std::uint32_t k, std::vector<BucketId> bucket_of)
    : PartitionState(k, std::move(bucket_of), {TargetRange{0, k}}, {}) {}

PartitionState::PartitionState(std::uint32_t k, std::vector<BucketId> bucket_of, std::vector<TargetRange> groups,
                               std::vector<std::uint32_t> group_of)
    : k_(k), bucket_of_(std::move(bucket_of)), bucket_size_(k, 0), groups_(std::move(groups)),
      group_of_(std::move(group_of)) {
    if (k_ == 0) {
        throw ValidationError("bucket count must be positive");
    }
    if (groups_.empty()) {
        groups_.push_back(TargetRange{0, k_});
    }
    for (const auto &range : groups_) {
        if (range.lo >= range.hi || range.hi > k_) {
            throw ValidationError("invalid allowed target range");
        }
    }
    if (!group_of_.empty() && group_of_.size() != bucket_of_.size()) {
        throw ValidationError("group assignment size does not match vertex count");
    }
    for (DataId v = 0; v < bucket_of_.size(); ++v) {
        if (!group_of_.empty() && group_of_[v] >= groups_.size()) {
            throw ValidationError("group id out of range for vertex " + std::to_string(v));
        }
        if (!allowed(v).contains(bucket_of_[v])) {
            throw ValidationError("vertex " + std::to_string(v) + " is outside its allowed buckets");
        }
        ++bucket_size_[bucket_of_[v]];
    }
}

void PartitionState::apply_moves(std::span<const Move> moves) {
    for (const Move &m : moves) {
        if (m.vertex >= bucket_of_.size()) {
            throw ValidationError("move references unknown vertex " + std::to_string(m.vertex));
        }
        if (!allowed(m.vertex).contains(m.target)) {
            throw ValidationError("move of vertex " + std::to_string(m.vertex) + " to disallowed bucket " +
                                  std::to_string(m.target));
        }
    }
    for (const Move &m : moves) {
        BucketId &b = bucket_of_[m.vertex];
        --bucket_size_[b];
        ++bucket_size_[m.target];
        b = m.target;
    }
}

bool PartitionState::consistent() const {
    std::vector<std::uint32_t> recount(k_, 0);
    for (DataId v = 0; v < bucket_of_.size(); ++v) {
        if (!allowed(v).contains(bucket_of_[v])) {
            return false;
        }
        ++recount[bucket_of_[v]];
    }
    return recount == bucket_size_;
}

std::uint32_t bucket_capacity(double epsilon, std::uint32_t n, std::uint32_t k, std::uint32_t share) {
    const double exact = (1.0 + epsilon) * static_cast<double>(n) * static_cast<double>(share) / static_cast<double>(k);
    return static_cast<std::uint32_t>(std::floor(exact + 1e-9));
}

std::uint32_t BalanceSpec::capacity(std::uint32_t n, std::uint32_t k, std::uint32_t share) const {
    return bucket_capacity(epsilon, n, k, share);
}

PartitionState init_random_partition(const BipartiteGraph &g, std::uint32_t k, std::uint64_t seed) {
    if (k < 2) {
        throw ValidationError("k must be at least 2");
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<BucketId> pick(0, k - 1);
    std::vector<BucketId> bucket_of(g.num_data());
    for (auto &b : bucket_of) {
        b = pick(rng);
    }
    return PartitionState(k, std::move(bucket_of));
}

std::uint64_t repair_balance(PartitionState &state, std::span<const std::uint32_t> capacity, std::uint64_t seed) {
    if (capacity.size() != state.k()) {
        throw ValidationError("capacity vector size does not match bucket count");
    }
    std::vector<std::vector<DataId>> surplus_members(state.k());
    bool any_over = false;
    for (BucketId b = 0; b < state.k(); ++b) {
        any_over = any_over || state.bucket_size(b) > capacity[b];
    }
    if (!any_over) {
        return 0;
    }
    for (DataId v = 0; v < state.num_vertices(); ++v) {
        const BucketId b = state.bucket_of(v);
        if (state.bucket_size(b) > capacity[b]) {
            surplus_members[b].push_back(v);
        }
    }

    std::vector<std::uint32_t> size(state.sizes().begin(), state.sizes().end());
    std::vector<Move> moves;
    for (BucketId b = 0; b < state.k(); ++b) {
        auto &members = surplus_members[b];
        if (members.empty()) {
            continue;
        }
        std::sort(members.begin(), members.end(), [seed](DataId x, DataId y) {
            const auto hx = vertex_hash(seed, x);
            const auto hy = vertex_hash(seed, y);
            return hx != hy ? hx < hy : x < y;
        });
        for (DataId v : members) {
            if (size[b] <= capacity[b]) {
                break;
            }
            const TargetRange range = state.allowed(v);
            BucketId best = kNoBucket;
            std::int64_t best_room = 0;
            for (BucketId c = range.lo; c < range.hi; ++c) {
                const std::int64_t room = static_cast<std::int64_t>(capacity[c]) - size[c];
                if (c != b && room > best_room) {
                    best = c;
                    best_room = room;
                }
            }
            if (best == kNoBucket) {
                break; // no room left anywhere in this group
            }
            --size[b];
            ++size[best];
            moves.push_back(Move{v, best});
        }
    }
    state.apply_moves(moves);
    return moves.size();
}

} // namespace shp
