#include "shp/refine.hpp"

#include "shp/hash.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <string>

namespace shp {

void RefineParams::validate() const {
    score.validate();
    if (!(converged_move_fraction >= 0.0)) {
        throw ValidationError("converged move fraction must be non-negative");
    }
    if (!(epsilon >= 0.0)) {
        throw ValidationError("epsilon must be non-negative");
    }
    if (!(penalty >= 0.0)) {
        throw ValidationError("movement penalty must be non-negative");
    }
    if (workers == 0) {
        throw ValidationError("worker count must be positive");
    }
}

namespace {

// Highest slot at or below `from` with a positive remaining count, or -1.
int next_slot(const BinCounts &counts, int from) {
    for (int s = from; s >= 0; --s) {
        if (counts[static_cast<std::size_t>(s)] > 0) {
            return s;
        }
    }
    return -1;
}

std::uint64_t spend_slack(const BinCounts &counts, BinCounts &quota, std::uint64_t slack) {
    std::uint64_t used = 0;
    for (int index = GainBins::kMaxIndex; index >= 1 && used < slack; --index) {
        const std::size_t s = GainBins::slot(index);
        const std::uint64_t take = std::min(counts[s] - quota[s], slack - used);
        quota[s] += take;
        used += take;
    }
    return used;
}

} // namespace

MatchResult match_histograms(const GainHistogram &forward, const GainHistogram &backward,
                             std::uint64_t slack_forward, std::uint64_t slack_backward) {
    MatchResult out;
    const BinCounts &fc = forward.counts();
    const BinCounts &bc = backward.counts();
    int a = next_slot(fc, GainBins::kCount - 1);
    int b = next_slot(bc, GainBins::kCount - 1);
    std::uint64_t left_a = a >= 0 ? fc[static_cast<std::size_t>(a)] : 0;
    std::uint64_t left_b = b >= 0 ? bc[static_cast<std::size_t>(b)] : 0;
    while (a >= 0 && b >= 0) {
        const double pair_gain = GainBins::representative(GainBins::index_of_slot(static_cast<std::size_t>(a))) +
                                 GainBins::representative(GainBins::index_of_slot(static_cast<std::size_t>(b)));
        if (!(pair_gain > 0.0)) {
            break;
        }
        const std::uint64_t m = std::min(left_a, left_b);
        out.forward[static_cast<std::size_t>(a)] += m;
        out.backward[static_cast<std::size_t>(b)] += m;
        out.matched += m;
        left_a -= m;
        left_b -= m;
        if (left_a == 0) {
            a = next_slot(fc, a - 1);
            left_a = a >= 0 ? fc[static_cast<std::size_t>(a)] : 0;
        }
        if (left_b == 0) {
            b = next_slot(bc, b - 1);
            left_b = b >= 0 ? bc[static_cast<std::size_t>(b)] : 0;
        }
    }
    out.extra_forward = spend_slack(fc, out.forward, slack_forward);
    out.extra_backward = spend_slack(bc, out.backward, slack_backward);
    return out;
}

std::uint64_t MoveDirectives::entries() const {
    std::uint64_t n = 0;
    for (const auto &[pair, bins] : quota) {
        n += static_cast<std::uint64_t>(std::count_if(bins.begin(), bins.end(), [](auto x) { return x > 0; }));
    }
    return n;
}

MoveDirectives compute_directives(const std::map<BucketPair, GainHistogram> &histograms,
                                  std::span<const std::uint32_t> sizes, std::span<const std::uint32_t> capacity,
                                  PairOrder order) {
    std::set<BucketPair> pairs;
    for (const auto &[pair, hist] : histograms) {
        pairs.insert({std::min(pair.first, pair.second), std::max(pair.first, pair.second)});
    }
    std::vector<BucketPair> visit(pairs.begin(), pairs.end());
    if (order == PairOrder::kDescending) {
        std::reverse(visit.begin(), visit.end());
    }

    std::vector<std::int64_t> projected(sizes.begin(), sizes.end());
    auto slack = [&](BucketId b) -> std::uint64_t {
        const std::int64_t room = static_cast<std::int64_t>(capacity[b]) - projected[b];
        return room > 0 ? static_cast<std::uint64_t>(room) : 0;
    };
    static const GainHistogram kEmpty;
    MoveDirectives out;
    for (const auto &[i, j] : visit) {
        const auto fwd = histograms.find({i, j});
        const auto bwd = histograms.find({j, i});
        const GainHistogram &hf = fwd != histograms.end() ? fwd->second : kEmpty;
        const GainHistogram &hb = bwd != histograms.end() ? bwd->second : kEmpty;
        const MatchResult m = match_histograms(hf, hb, slack(j), slack(i));
        const auto net = static_cast<std::int64_t>(m.extra_forward) - static_cast<std::int64_t>(m.extra_backward);
        projected[j] += net;
        projected[i] -= net;
        out.matched += m.matched;
        out.extra += m.extra_forward + m.extra_backward;
        if (m.matched + m.extra_forward > 0) {
            out.quota[{i, j}] = m.forward;
        }
        if (m.matched + m.extra_backward > 0) {
            out.quota[{j, i}] = m.backward;
        }
    }
    return out;
}

std::vector<Move> select_moves(const PartitionState &state, std::span<const Proposal> proposals,
                               const std::map<BucketPair, GainHistogram> &histograms,
                               const MoveDirectives &directives, MoveMode mode, std::uint64_t seed) {
    using Candidate = std::pair<std::uint64_t, DataId>; // (hash, vertex)
    std::vector<Move> moves;
    std::map<std::pair<BucketPair, int>, std::vector<Candidate>> partial;
    for (DataId v = 0; v < proposals.size(); ++v) {
        const Proposal &p = proposals[v];
        if (!p.valid()) {
            continue;
        }
        const BucketPair pair{state.bucket_of(v), p.target};
        const auto it = directives.quota.find(pair);
        if (it == directives.quota.end()) {
            continue;
        }
        const int bin = GainBins::of(p.gain);
        const std::uint64_t quota = it->second[GainBins::slot(bin)];
        if (quota == 0) {
            continue;
        }
        const std::uint64_t count = histograms.at(pair).count(bin);
        if (quota >= count) {
            moves.push_back({v, p.target});
        } else if (mode == MoveMode::kExactQuota) {
            partial[{pair, bin}].emplace_back(vertex_hash(seed, v), v);
        } else if (unit_interval(vertex_hash(seed, v)) <
                   static_cast<double>(quota) / static_cast<double>(count)) {
            moves.push_back({v, p.target});
        }
    }
    for (auto &[key, candidates] : partial) {
        const std::uint64_t quota = directives.quota.at(key.first)[GainBins::slot(key.second)];
        const auto cut = candidates.begin() + static_cast<std::ptrdiff_t>(quota);
        std::nth_element(candidates.begin(), cut, candidates.end());
        for (auto it = candidates.begin(); it != cut; ++it) {
            moves.push_back({it->second, key.first.second});
        }
    }
    std::sort(moves.begin(), moves.end(), [](const Move &x, const Move &y) { return x.vertex < y.vertex; });
    return moves;
}

std::uint64_t apply_directives(PartitionState &state, std::span<const Proposal> proposals,
                               const std::map<BucketPair, GainHistogram> &histograms,
                               const MoveDirectives &directives, MoveMode mode, std::uint64_t seed,
                               std::vector<DataId> *moved) {
    const std::vector<Move> moves = select_moves(state, proposals, histograms, directives, mode, seed);
    state.apply_moves(moves);
    if (moved) {
        moved->clear();
        for (const Move &m : moves) {
            moved->push_back(m.vertex);
        }
    }
    return moves.size();
}

double epsilon_schedule(std::uint32_t level, std::uint32_t total_levels, double epsilon) {
    if (level < 1 || level > total_levels) {
        throw ValidationError("level " + std::to_string(level) + " outside [1, " + std::to_string(total_levels) + "]");
    }
    return epsilon * static_cast<double>(level) / static_cast<double>(total_levels);
}

std::uint32_t feasible_capacity(double epsilon, std::uint32_t n, std::uint32_t k, std::uint32_t share) {
    const std::uint64_t need = (static_cast<std::uint64_t>(n) * share + k - 1) / k;
    return std::max<std::uint32_t>(bucket_capacity(epsilon, n, k, share), static_cast<std::uint32_t>(need));
}

std::vector<TraceRow> refine_level(const BipartiteGraph &g, PartitionState &state, const LevelSetup &setup,
                                   const RefineParams &params, BspEngine &engine,
                                   const IterationObserver &observer) {
    params.validate();
    if (state.num_vertices() != g.num_data()) {
        throw ValidationError("partition does not cover the graph's data vertices");
    }
    if (setup.capacity.size() != state.k() || setup.model.k() != state.k()) {
        throw ValidationError("level setup does not match the partition's bucket count");
    }
    std::vector<BucketId> initial;
    if (params.penalty > 0.0) {
        initial.assign(state.assignment().begin(), state.assignment().end());
    }
    engine.reset(setup.model, MovePenalty{params.penalty, initial});

    std::vector<TraceRow> trace;
    std::vector<DataId> moved;
    const double n = static_cast<double>(state.num_vertices());
    for (std::uint32_t it = 1; it <= params.max_iterations; ++it) {
        const auto start = std::chrono::steady_clock::now();
        const IterationSnapshot &snap = engine.run_iteration(state, moved);
        const MoveDirectives directives =
            compute_directives(snap.histograms, state.sizes(), setup.capacity, params.pair_order);
        const std::uint64_t iter_seed =
            mix_seed(params.seed, (static_cast<std::uint64_t>(setup.level) << 32) | it);
        const std::uint64_t count =
            apply_directives(state, snap.proposals, snap.histograms, directives, params.move_mode, iter_seed, &moved);

        TraceRow row;
        row.level = setup.level;
        row.iteration = it;
        row.objective = snap.objective;
        row.exact_fanout = snap.exact_fanout;
        row.moved = count;
        row.moved_fraction = n > 0 ? static_cast<double>(count) / n : 0.0;
        row.counters = snap.counters;
        // Every proposing vertex learns the directive of its bin.
        row.counters.messages[3] = snap.counters.messages[2];
        row.counters.payload[3] = directives.entries();
        row.elapsed_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        trace.push_back(row);
        if (observer) {
            observer(row, state);
        }
        if (row.moved_fraction < params.converged_move_fraction) {
            break;
        }
    }
    return trace;
}

std::vector<TraceRow> refine_loop(const BipartiteGraph &g, PartitionState &state, const RefineParams &params,
                                  const IterationObserver &observer) {
    params.validate();
    if (state.num_vertices() != g.num_data()) {
        throw ValidationError("partition does not cover the graph's data vertices");
    }
    LevelSetup setup;
    setup.level = 1;
    setup.model = ScoreModel(params.score, state.k(), g.max_query_degree());
    setup.capacity.assign(state.k(), feasible_capacity(params.epsilon, state.num_vertices(), state.k()));
    BspEngine engine(g, params.workers);
    return refine_level(g, state, setup, params, engine, observer);
}

} // namespace shp
