// objective.hpp - bucket-score objectives, neighbor data and move gains
#ifndef SHP_OBJECTIVE_HPP
#define SHP_OBJECTIVE_HPP

#include "shp/graph.hpp"
#include "shp/partition.hpp"
#include "shp/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace shp {

enum class ScoreKind {
    kProbabilisticFanout, // f(n) = 1 - (1-p)^n
    kRecursiveApprox,     // f(n) = t * (1 - (1-p/t)^n), final p-fanout of a bucket split t ways
    kExactFanout,         // f(n) = [n > 0]
};

// Contribution f(n) of one (query, bucket) pair holding n neighbors of the query.
struct ScoreFunction {
    ScoreKind kind = ScoreKind::kProbabilisticFanout;
    double p = 0.5;
    double t = 1.0;

    static ScoreFunction p_fanout(double p) { return {ScoreKind::kProbabilisticFanout, p, 1.0}; }
    static ScoreFunction recursive_approx(double p, double t) { return {ScoreKind::kRecursiveApprox, p, t}; }
    static ScoreFunction exact_fanout() { return {ScoreKind::kExactFanout, 1.0, 1.0}; }

    // Throws ValidationError unless p in (0, 1] and t >= 1.
    void validate() const;

    // f(n) = scale * (1 - decay^n).
    double scale() const { return kind == ScoreKind::kRecursiveApprox ? t : 1.0; }
    double decay() const;

    double operator()(std::uint64_t n) const;
};

// f(n) and f(n+1) - f(n) tabulated for n in [0, max_count].
class ScoreTable {
public:
    ScoreTable() = default;
    ScoreTable(const ScoreFunction &f, std::uint32_t max_count);

    double value(std::uint32_t n) const { return value_[n]; }
    double step(std::uint32_t n) const { return step_[n]; }
    std::uint32_t max_count() const { return static_cast<std::uint32_t>(value_.size()) - 2; }
    const ScoreFunction &function() const { return f_; }

private:
    ScoreFunction f_;
    std::vector<double> value_;
    std::vector<double> step_;
};

// Score function per bucket. Recursive partitioning scores each bucket with
// the number of final buckets it will become; direct mode uses one function.
class ScoreModel {
public:
    ScoreModel() = default;
    ScoreModel(const ScoreFunction &f, std::uint32_t k, std::uint32_t max_count);
    ScoreModel(std::span<const ScoreFunction> per_bucket, std::uint32_t max_count);

    const ScoreTable &table(BucketId b) const { return tables_[table_of_[b]]; }
    const ScoreFunction &function(BucketId b) const { return table(b).function(); }
    std::uint32_t k() const { return static_cast<std::uint32_t>(table_of_.size()); }
    bool uniform() const { return tables_.size() == 1; }

private:
    std::vector<ScoreTable> tables_;
    std::vector<std::uint32_t> table_of_;
};

struct BucketCount {
    BucketId bucket;
    std::uint32_t count;

    bool operator==(const BucketCount &) const = default;
};

// Per query q, the nonzero counts n_i(q) sorted by bucket id. Query q owns a
// block of 1 + min(deg(q), k) entries: a header whose count is the fanout,
// then the entries. Callers that know a block's position reach fanout and
// entries with a single memory access.
class NeighborData {
public:
    NeighborData() = default;
    NeighborData(const BipartiteGraph &g, std::uint32_t k);

    static NeighborData compute(const BipartiteGraph &g, const PartitionState &state);

    EdgeIndex block(QueryId q) const { return block_[q]; }
    std::span<const BucketCount> at_block(EdgeIndex b) const {
        return {entries_.data() + b + 1, entries_[b].count};
    }
    std::span<const BucketCount> of(QueryId q) const { return at_block(block_[q]); }
    std::uint32_t fanout(QueryId q) const { return entries_[block_[q]].count; }
    std::uint32_t count(QueryId q, BucketId b) const;
    std::uint32_t num_queries() const { return static_cast<std::uint32_t>(block_.size()); }
    std::uint32_t k() const { return k_; }

    // Replaces the entries of q; `entries` must be sorted, positive and fit in min(deg(q), k).
    void assign(QueryId q, std::span<const BucketCount> entries);

private:
    std::uint32_t k_ = 0;
    std::vector<EdgeIndex> block_;
    std::vector<BucketCount> entries_;
};

// Sum of f over the nonzero buckets of one query.
double score_query(std::span<const BucketCount> counts, const ScoreFunction &f);

// (1/|Q|) * sum_q score_query(q); 0 when there are no queries.
double total_objective(const BipartiteGraph &g, const PartitionState &state, const ScoreFunction &f);

// Optional movement penalty for incremental repartitioning: lambda is charged
// for every vertex outside its initial bucket.
struct MovePenalty {
    double lambda = 0.0;
    std::span<const BucketId> initial;

    double charge(DataId v, BucketId from, BucketId to) const {
        if (lambda == 0.0 || initial.empty()) {
            return 0.0;
        }
        const double before = from != initial[v] ? 1.0 : 0.0;
        const double after = to != initial[v] ? 1.0 : 0.0;
        return lambda * (after - before);
    }
};

// Decrease of the unnormalized objective (|Q| * total_objective, plus the
// penalty) if v alone moved from `from` to `to`. Positive means improvement:
//   gain = sum_{q in N(v)} [f(n_from) - f(n_from - 1) + f(n_to) - f(n_to + 1)]
// which for p-fanout is p * sum_q ((1-p)^(n_from-1) - (1-p)^n_to).
double move_gain(const BipartiteGraph &g, const NeighborData &nd, DataId v, BucketId from, BucketId to,
                 const ScoreFunction &f, const MovePenalty &penalty = {});
double move_gain(const BipartiteGraph &g, const NeighborData &nd, DataId v, BucketId from, BucketId to,
                 const ScoreModel &model, const MovePenalty &penalty = {});

// Number of queries shared by data vertices u != v (clique-net edge weight).
std::uint32_t clique_weight(const BipartiteGraph &g, DataId u, DataId v);

// Sum of clique weights over pairs in different buckets, computed per query
// as sum_{i<j} n_i(q) n_j(q) without building the clique graph.
std::uint64_t weighted_edge_cut(const BipartiteGraph &g, const PartitionState &state);

// Unnormalized fanout plus the number of queries with fanout > 1.
std::uint64_t soed(const BipartiteGraph &g, const PartitionState &state);

// Unnormalized fanout, sum_q fanout(q).
std::uint64_t fanout_sum(const BipartiteGraph &g, const PartitionState &state);

} // namespace shp

#endif // SHP_OBJECTIVE_HPP
