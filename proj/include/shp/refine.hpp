// refine.hpp - local refinement: balanced matching of move proposals
#ifndef SHP_REFINE_HPP
#define SHP_REFINE_HPP

#include "shp/bsp_engine.hpp"
#include "shp/gain.hpp"
#include "shp/graph.hpp"
#include "shp/objective.hpp"
#include "shp/partition.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

namespace shp {

enum class MoveMode {
    kExactQuota,    // exactly the matched number of vertices per bin moves
    kProbabilistic, // each vertex moves independently with its bin's fraction
};

// Order in which the master visits bucket pairs when handing out slack.
enum class PairOrder { kAscending, kDescending };

struct RefineParams {
    ScoreFunction score = ScoreFunction::p_fanout(0.5);
    std::uint32_t max_iterations = 60;
    double converged_move_fraction = 1e-4;
    double epsilon = 0.05;
    MoveMode move_mode = MoveMode::kExactQuota;
    std::uint64_t seed = 1;
    double penalty = 0.0;
    std::size_t workers = 1;
    PairOrder pair_order = PairOrder::kAscending;

    void validate() const;
};

// Matched and extra move quotas for one unordered bucket pair.
struct MatchResult {
    BinCounts forward{};  // quota per bin, first -> second bucket
    BinCounts backward{}; // quota per bin, second -> first bucket
    std::uint64_t matched = 0;
    std::uint64_t extra_forward = 0;
    std::uint64_t extra_backward = 0;
};

// Pairs bins greedily from the highest gains down while the bin
// representatives sum to a positive value, so matched counts are equal in
// both directions. Afterwards up to `slack_*` unmatched positive-gain
// vertices may move one way.
MatchResult match_histograms(const GainHistogram &forward, const GainHistogram &backward,
                             std::uint64_t slack_forward, std::uint64_t slack_backward);

// Per directed pair, the number of vertices to move out of each gain bin.
struct MoveDirectives {
    std::map<BucketPair, BinCounts> quota;
    std::uint64_t matched = 0;
    std::uint64_t extra = 0;

    // Entries with a nonzero quota (what the master broadcasts).
    std::uint64_t entries() const;
};

// Master step: match every bucket pair, spending per-bucket slack
// capacity[b] - projected size of b on unmatched moves.
MoveDirectives compute_directives(const std::map<BucketPair, GainHistogram> &histograms,
                                  std::span<const std::uint32_t> sizes, std::span<const std::uint32_t> capacity,
                                  PairOrder order = PairOrder::kAscending);

// Superstep 4: turns directives into concrete moves. In exact-quota mode the
// vertices of a partially moved bin are ranked by a seeded hash of their id
// and exactly `quota` of them move; in probabilistic mode each moves with
// probability quota / count.
std::vector<Move> select_moves(const PartitionState &state, std::span<const Proposal> proposals,
                               const std::map<BucketPair, GainHistogram> &histograms,
                               const MoveDirectives &directives, MoveMode mode, std::uint64_t seed);

// select_moves followed by state.apply_moves. Returns the moved count.
std::uint64_t apply_directives(PartitionState &state, std::span<const Proposal> proposals,
                               const std::map<BucketPair, GainHistogram> &histograms,
                               const MoveDirectives &directives, MoveMode mode, std::uint64_t seed,
                               std::vector<DataId> *moved = nullptr);

// epsilon * level / total_levels, for 1 <= level <= total_levels.
double epsilon_schedule(std::uint32_t level, std::uint32_t total_levels, double epsilon);

struct TraceRow {
    std::uint32_t level = 1;
    std::uint32_t iteration = 0;
    double objective = 0.0;    // at the start of the iteration
    double exact_fanout = 0.0; // at the start of the iteration
    double moved_fraction = 0.0;
    std::uint64_t moved = 0;
    double elapsed_ms = 0.0;
    MessageCounters counters;
};

using IterationObserver = std::function<void(const TraceRow &, const PartitionState &)>;

// Inputs that change between recursion levels.
struct LevelSetup {
    std::uint32_t level = 1;
    ScoreModel model;
    std::vector<std::uint32_t> capacity; // per bucket
};

// Runs iterations of supersteps 1-4 until the moved fraction drops below
// params.converged_move_fraction or params.max_iterations is reached.
std::vector<TraceRow> refine_level(const BipartiteGraph &g, PartitionState &state, const LevelSetup &setup,
                                   const RefineParams &params, BspEngine &engine,
                                   const IterationObserver &observer = {});

// Direct k-way refinement of `state` with uniform capacity and score.
// With params.penalty > 0 the entry state is the reference for movement costs.
std::vector<TraceRow> refine_loop(const BipartiteGraph &g, PartitionState &state, const RefineParams &params,
                                  const IterationObserver &observer = {});

// max(floor((1+eps) n share / k), ceil(n share / k)): never infeasible.
std::uint32_t feasible_capacity(double epsilon, std::uint32_t n, std::uint32_t k, std::uint32_t share = 1);

} // namespace shp

#endif // SHP_REFINE_HPP
