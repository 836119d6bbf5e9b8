#include "shp/recurse.hpp"

#include "shp/hash.hpp"

#include <algorithm>
#include <random>
#include <string>

namespace shp {

RecursionPlan::RecursionPlan(std::uint32_t k, std::uint32_t r) : k_(k), r_(r) {
    if (k < 2) {
        throw ValidationError("k must be at least 2");
    }
    if (r < 2) {
        throw ValidationError("arity must be at least 2");
    }
    pow_.push_back(1);
    while (pow_.back() < k) {
        pow_.push_back(pow_.back() * r);
        ++levels_;
    }
}

std::uint32_t RecursionPlan::width(std::uint32_t depth) const {
    return static_cast<std::uint32_t>(pow_[levels_ - depth]);
}

std::uint32_t RecursionPlan::buckets_at(std::uint32_t depth) const {
    const std::uint32_t w = width(depth);
    return (k_ + w - 1) / w;
}

std::uint32_t RecursionPlan::final_share(std::uint32_t depth, BucketId b) const {
    const std::uint64_t w = width(depth);
    const std::uint64_t lo = b * w;
    const std::uint64_t hi = std::min<std::uint64_t>(k_, lo + w);
    return static_cast<std::uint32_t>(hi - lo);
}

TargetRange RecursionPlan::children(std::uint32_t depth, BucketId b) const {
    const std::uint32_t next = buckets_at(depth + 1);
    return TargetRange{b * r_, std::min(next, b * r_ + r_)};
}

std::vector<std::uint32_t> RecursionPlan::capacities(std::uint32_t depth, std::uint32_t n, double epsilon) const {
    if (depth < 1 || depth > levels_) {
        throw ValidationError("depth " + std::to_string(depth) + " outside the recursion plan");
    }
    auto own = [&](std::uint32_t d, BucketId b, double eps) {
        const std::uint32_t t = final_share(d, b);
        return feasible_capacity(eps, n, k_, t);
    };
    // Bottom-up: the deepest level bounds everything above it.
    std::vector<std::uint32_t> caps(k_);
    for (BucketId b = 0; b < k_; ++b) {
        caps[b] = own(levels_, b, epsilon_schedule(levels_, levels_, epsilon));
    }
    for (std::uint32_t d = levels_; d-- > depth;) {
        std::vector<std::uint32_t> up(buckets_at(d));
        for (BucketId b = 0; b < up.size(); ++b) {
            const TargetRange c = children(d, b);
            std::uint64_t room = 0;
            for (BucketId j = c.lo; j < c.hi; ++j) {
                room += caps[j];
            }
            const std::uint32_t eps_cap = own(d, b, epsilon_schedule(d, levels_, epsilon));
            up[b] = static_cast<std::uint32_t>(std::min<std::uint64_t>(eps_cap, room));
        }
        caps = std::move(up);
    }
    return caps;
}

ScoreFunction level_score(const ScoreFunction &base, std::uint32_t share) {
    if (base.kind == ScoreKind::kExactFanout) {
        return base;
    }
    if (share <= 1) {
        return ScoreFunction::p_fanout(base.p);
    }
    return ScoreFunction::recursive_approx(base.p, static_cast<double>(share));
}

namespace {

std::uint64_t repair_seed(std::uint64_t seed, std::uint32_t level) { return mix_seed(seed, 0x5245504100000000ULL | level); }

} // namespace

PartitionResult direct_partition(const BipartiteGraph &g, std::uint32_t k, const RefineParams &params,
                                 const IterationObserver &observer) {
    params.validate();
    if (k > g.num_data()) {
        throw ValidationError("k = " + std::to_string(k) + " exceeds the number of data vertices");
    }
    PartitionState state = init_random_partition(g, k, params.seed);
    const std::vector<std::uint32_t> caps(k, feasible_capacity(params.epsilon, g.num_data(), k));
    repair_balance(state, caps, repair_seed(params.seed, 1));
    PartitionResult out{std::move(state), {}};
    out.trace = refine_loop(g, out.state, params, observer);
    return out;
}

PartitionResult recursive_partition(const BipartiteGraph &g, std::uint32_t k, std::uint32_t r,
                                    const RefineParams &params, const IterationObserver &observer) {
    params.validate();
    const RecursionPlan plan(k, r);
    const std::uint32_t n = g.num_data();
    if (k > n) {
        throw ValidationError("k = " + std::to_string(k) + " exceeds the number of data vertices");
    }
    BspEngine engine(g, params.workers);
    std::vector<BucketId> assignment(n, 0);
    PartitionResult out;

    for (std::uint32_t level = 1; level <= plan.levels(); ++level) {
        const std::uint32_t parents = plan.buckets_at(level - 1);
        const std::uint32_t kd = plan.buckets_at(level);
        const std::uint64_t w = plan.final_share(level, 0); // full node width at this depth

        // Random child per vertex, weighted by how many final buckets each
        // child becomes: draw a final bucket under the parent, map it up.
        std::mt19937_64 rng(level == 1 ? params.seed : mix_seed(params.seed, level));
        std::vector<TargetRange> groups(parents);
        for (BucketId b = 0; b < parents; ++b) {
            groups[b] = plan.children(level - 1, b);
        }
        std::vector<std::uint32_t> group_of(assignment);
        for (DataId v = 0; v < n; ++v) {
            const TargetRange c = groups[group_of[v]];
            const std::uint64_t leaf_lo = c.lo * w;
            const std::uint64_t leaf_hi = std::min<std::uint64_t>(k, c.hi * w);
            std::uniform_int_distribution<BucketId> pick(static_cast<BucketId>(leaf_lo),
                                                          static_cast<BucketId>(leaf_hi - 1));
            assignment[v] = static_cast<BucketId>(pick(rng) / w);
        }
        PartitionState state(kd, assignment, groups, group_of);

        LevelSetup setup;
        setup.level = level;
        setup.capacity = plan.capacities(level, n, params.epsilon);
        std::vector<ScoreFunction> scores(kd);
        for (BucketId b = 0; b < kd; ++b) {
            scores[b] = level_score(params.score, plan.final_share(level, b));
        }
        setup.model = ScoreModel(scores, g.max_query_degree());
        repair_balance(state, setup.capacity, repair_seed(params.seed, level));

        RefineParams level_params = params;
        level_params.epsilon = epsilon_schedule(level, plan.levels(), params.epsilon);
        auto rows = refine_level(g, state, setup, level_params, engine, observer);
        out.trace.insert(out.trace.end(), rows.begin(), rows.end());
        assignment.assign(state.assignment().begin(), state.assignment().end());
    }
    out.state = PartitionState(k, std::move(assignment));
    return out;
}

} // namespace shp
