#include "shp/objective.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace shp {

void ScoreFunction::validate() const {
    if (!(p > 0.0 && p <= 1.0)) {
        throw ValidationError("fanout probability p must lie in (0, 1], got " + std::to_string(p));
    }
    if (!(t >= 1.0)) {
        throw ValidationError("split factor t must be >= 1, got " + std::to_string(t));
    }
}

double ScoreFunction::decay() const {
    switch (kind) {
    case ScoreKind::kExactFanout:
        return 0.0;
    case ScoreKind::kRecursiveApprox:
        return 1.0 - p / t;
    case ScoreKind::kProbabilisticFanout:
        break;
    }
    return 1.0 - p;
}

namespace {

// log of the per-neighbor survival probability; -inf when it is zero.
double log_decay(const ScoreFunction &f) {
    if (f.kind == ScoreKind::kExactFanout) {
        return -HUGE_VAL;
    }
    const double ratio = f.kind == ScoreKind::kRecursiveApprox ? f.p / f.t : f.p;
    return ratio >= 1.0 ? -HUGE_VAL : std::log1p(-ratio);
}

// f(n+1) - f(n) = p * decay^n (1 * [n == 0] for exact fanout).
double step_coefficient(const ScoreFunction &f) {
    return f.kind == ScoreKind::kExactFanout ? 1.0 : f.p;
}

double power_of_decay(double log_base, std::uint64_t n) {
    if (n == 0) {
        return 1.0;
    }
    const double x = std::exp(static_cast<double>(n) * log_base);
    return x < 1e-300 ? 0.0 : x;
}

} // namespace

double ScoreFunction::operator()(std::uint64_t n) const {
    if (n == 0) {
        return 0.0;
    }
    const double lg = log_decay(*this);
    if (std::isinf(lg)) {
        return scale();
    }
    return -scale() * std::expm1(static_cast<double>(n) * lg);
}

ScoreTable::ScoreTable(const ScoreFunction &f, std::uint32_t max_count) : f_(f) {
    f.validate();
    const double lg = log_decay(f);
    const double coeff = step_coefficient(f);
    value_.resize(static_cast<std::size_t>(max_count) + 2);
    step_.resize(static_cast<std::size_t>(max_count) + 2);
    for (std::size_t n = 0; n < value_.size(); ++n) {
        value_[n] = f(n);
        step_[n] = coeff * power_of_decay(lg, n);
    }
}

ScoreModel::ScoreModel(const ScoreFunction &f, std::uint32_t k, std::uint32_t max_count)
    : tables_{ScoreTable(f, max_count)}, table_of_(k, 0) {}

ScoreModel::ScoreModel(std::span<const ScoreFunction> per_bucket, std::uint32_t max_count) {
    table_of_.reserve(per_bucket.size());
    for (const ScoreFunction &f : per_bucket) {
        auto same = [&](const ScoreTable &t) {
            const auto &g = t.function();
            return g.kind == f.kind && g.p == f.p && g.t == f.t;
        };
        auto it = std::find_if(tables_.begin(), tables_.end(), same);
        if (it == tables_.end()) {
            tables_.emplace_back(f, max_count);
            it = tables_.end() - 1;
        }
        table_of_.push_back(static_cast<std::uint32_t>(it - tables_.begin()));
    }
}

NeighborData::NeighborData(const BipartiteGraph &g, std::uint32_t k) : k_(k), block_(g.num_queries()) {
    EdgeIndex total = 0;
    for (QueryId q = 0; q < g.num_queries(); ++q) {
        block_[q] = total;
        total += 1 + std::min(g.query_degree(q), k);
    }
    entries_.assign(total, BucketCount{0, 0});
}

NeighborData NeighborData::compute(const BipartiteGraph &g, const PartitionState &state) {
    NeighborData nd(g, state.k());
    std::vector<BucketId> buckets;
    std::vector<BucketCount> entries;
    for (QueryId q = 0; q < g.num_queries(); ++q) {
        buckets.clear();
        for (DataId v : g.query_neighbors(q)) {
            buckets.push_back(state.bucket_of(v));
        }
        std::sort(buckets.begin(), buckets.end());
        entries.clear();
        for (BucketId b : buckets) {
            if (!entries.empty() && entries.back().bucket == b) {
                ++entries.back().count;
            } else {
                entries.push_back({b, 1});
            }
        }
        nd.assign(q, entries);
    }
    return nd;
}

std::uint32_t NeighborData::count(QueryId q, BucketId b) const {
    const auto entries = of(q);
    const auto it = std::lower_bound(entries.begin(), entries.end(), b,
                                     [](const BucketCount &e, BucketId x) { return e.bucket < x; });
    return it != entries.end() && it->bucket == b ? it->count : 0;
}

void NeighborData::assign(QueryId q, std::span<const BucketCount> entries) {
    const auto at = entries_.begin() + static_cast<std::ptrdiff_t>(block_[q]);
    at->count = static_cast<std::uint32_t>(entries.size());
    std::copy(entries.begin(), entries.end(), at + 1);
}

double score_query(std::span<const BucketCount> counts, const ScoreFunction &f) {
    double s = 0.0;
    for (const BucketCount &c : counts) {
        s += f(c.count);
    }
    return s;
}

double total_objective(const BipartiteGraph &g, const PartitionState &state, const ScoreFunction &f) {
    if (g.num_queries() == 0) {
        return 0.0;
    }
    const NeighborData nd = NeighborData::compute(g, state);
    double sum = 0.0;
    for (QueryId q = 0; q < g.num_queries(); ++q) {
        sum += score_query(nd.of(q), f);
    }
    return sum / g.num_queries();
}

namespace {

template <typename StepFrom, typename StepTo>
double gain_over_queries(const BipartiteGraph &g, const NeighborData &nd, DataId v, BucketId from, BucketId to,
                         StepFrom step_from, StepTo step_to) {
    double gain = 0.0;
    for (QueryId q : g.data_neighbors(v)) {
        const std::uint32_t n_from = nd.count(q, from);
        if (n_from == 0) {
            throw ValidationError("neighbor data does not place vertex " + std::to_string(v) + " in bucket " +
                                  std::to_string(from));
        }
        gain += step_from(n_from - 1) - step_to(nd.count(q, to));
    }
    return gain;
}

} // namespace

double move_gain(const BipartiteGraph &g, const NeighborData &nd, DataId v, BucketId from, BucketId to,
                 const ScoreFunction &f, const MovePenalty &penalty) {
    if (from == to) {
        return 0.0;
    }
    const double lg = log_decay(f);
    const double coeff = step_coefficient(f);
    auto step = [&](std::uint32_t n) { return coeff * power_of_decay(lg, n); };
    return gain_over_queries(g, nd, v, from, to, step, step) - penalty.charge(v, from, to);
}

double move_gain(const BipartiteGraph &g, const NeighborData &nd, DataId v, BucketId from, BucketId to,
                 const ScoreModel &model, const MovePenalty &penalty) {
    if (from == to) {
        return 0.0;
    }
    const ScoreTable &tf = model.table(from);
    const ScoreTable &tt = model.table(to);
    return gain_over_queries(
               g, nd, v, from, to, [&](std::uint32_t n) { return tf.step(n); },
               [&](std::uint32_t n) { return tt.step(n); }) -
           penalty.charge(v, from, to);
}

std::uint32_t clique_weight(const BipartiteGraph &g, DataId u, DataId v) {
    if (u == v) {
        throw ValidationError("clique weight is undefined for a vertex with itself");
    }
    const auto a = g.data_neighbors(u);
    const auto b = g.data_neighbors(v);
    std::uint32_t shared = 0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j) {
            ++i;
        } else if (*j < *i) {
            ++j;
        } else {
            ++shared;
            ++i;
            ++j;
        }
    }
    return shared;
}

std::uint64_t weighted_edge_cut(const BipartiteGraph &g, const PartitionState &state) {
    const NeighborData nd = NeighborData::compute(g, state);
    std::uint64_t cut = 0;
    for (QueryId q = 0; q < g.num_queries(); ++q) {
        const std::uint64_t deg = g.query_degree(q);
        std::uint64_t within = 0;
        for (const BucketCount &c : nd.of(q)) {
            within += static_cast<std::uint64_t>(c.count) * c.count;
        }
        cut += (deg * deg - within) / 2;
    }
    return cut;
}

std::uint64_t fanout_sum(const BipartiteGraph &g, const PartitionState &state) {
    const NeighborData nd = NeighborData::compute(g, state);
    std::uint64_t sum = 0;
    for (QueryId q = 0; q < g.num_queries(); ++q) {
        sum += nd.fanout(q);
    }
    return sum;
}

std::uint64_t soed(const BipartiteGraph &g, const PartitionState &state) {
    const NeighborData nd = NeighborData::compute(g, state);
    std::uint64_t sum = 0;
    for (QueryId q = 0; q < g.num_queries(); ++q) {
        const std::uint32_t fo = nd.fanout(q);
        sum += fo + (fo > 1 ? 1 : 0);
    }
    return sum;
}

} // namespace shp
