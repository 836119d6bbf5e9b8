#include "shp/bsp_engine.hpp"

#include <algorithm>

namespace shp {

WorkerPool::WorkerPool(std::size_t workers) {
    const std::size_t extra = workers > 1 ? workers - 1 : 0;
    threads_.reserve(extra);
    for (std::size_t w = 1; w <= extra; ++w) {
        threads_.emplace_back([this, w] { loop(w); });
    }
}

WorkerPool::~WorkerPool() {
    {
        std::lock_guard lock(mu_);
        stop_ = true;
    }
    start_.notify_all();
    for (auto &t : threads_) {
        t.join();
    }
}

void WorkerPool::range(std::size_t worker, std::size_t &begin, std::size_t &end) const {
    const std::size_t w = size();
    begin = n_ * worker / w;
    end = n_ * (worker + 1) / w;
}

void WorkerPool::execute(std::size_t worker) {
    std::size_t begin = 0;
    std::size_t end = 0;
    range(worker, begin, end);
    try {
        if (begin < end) {
            (*job_)(worker, begin, end);
        }
    } catch (...) {
        std::lock_guard lock(mu_);
        if (!error_) {
            error_ = std::current_exception();
        }
    }
}

void WorkerPool::loop(std::size_t worker) {
    std::uint64_t seen = 0;
    std::unique_lock lock(mu_);
    while (true) {
        start_.wait(lock, [&] { return stop_ || generation_ != seen; });
        if (stop_) {
            return;
        }
        seen = generation_;
        lock.unlock();
        execute(worker);
        lock.lock();
        if (--pending_ == 0) {
            done_.notify_one();
        }
    }
}

void WorkerPool::run(std::size_t n, const Job &job) {
    if (threads_.empty()) {
        if (n > 0) {
            job(0, 0, n);
        }
        return;
    }
    {
        std::lock_guard lock(mu_);
        job_ = &job;
        n_ = n;
        pending_ = threads_.size();
        error_ = nullptr;
        ++generation_;
    }
    start_.notify_all();
    execute(0);
    std::exception_ptr error;
    {
        std::unique_lock lock(mu_);
        done_.wait(lock, [&] { return pending_ == 0; });
        job_ = nullptr;
        error = error_;
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

DirtySet lazy_recompute(const BipartiteGraph &g, std::span<const DataId> moved, bool all) {
    DirtySet d;
    d.query.assign(g.num_queries(), all ? 1 : 0);
    d.data.assign(g.num_data(), all ? 1 : 0);
    if (all) {
        d.num_queries = g.num_queries();
        d.num_data = g.num_data();
        d.announcements = g.num_edges();
        return d;
    }
    std::vector<QueryId> dirty_queries;
    for (DataId v : moved) {
        d.announcements += g.data_degree(v);
        for (QueryId q : g.data_neighbors(v)) {
            if (!d.query[q]) {
                d.query[q] = 1;
                dirty_queries.push_back(q);
            }
        }
        // A moved vertex changed its own bucket, so its gains are stale too.
        if (!d.data[v]) {
            d.data[v] = 1;
            ++d.num_data;
        }
    }
    d.num_queries = dirty_queries.size();
    for (QueryId q : dirty_queries) {
        for (DataId v : g.query_neighbors(q)) {
            if (!d.data[v]) {
                d.data[v] = 1;
                ++d.num_data;
            }
        }
    }
    return d;
}

BspEngine::BspEngine(const BipartiteGraph &g, std::size_t workers)
    : g_(g), pool_(workers), query_score_(g.num_queries(), 0.0), proposals_(g.num_data()) {}

void BspEngine::reset(ScoreModel model, MovePenalty penalty) {
    model_ = std::move(model);
    penalty_ = penalty;
    fresh_ = true;
    if (neighbor_data_.k() != model_.k() || neighbor_data_.num_queries() != g_.num_queries()) {
        neighbor_data_ = NeighborData(g_, model_.k());
        data_block_.resize(g_.num_edges());
        for (DataId v = 0; v < g_.num_data(); ++v) {
            EdgeIndex e = g_.data_offset(v);
            for (QueryId q : g_.data_neighbors(v)) {
                data_block_[e++] = neighbor_data_.block(q);
            }
        }
    }
    ensure_scratch(model_.k());
}

void BspEngine::ensure_scratch(std::uint32_t k) {
    scratch_.resize(pool_.size());
    for (auto &s : scratch_) {
        s.count.assign(k, 0);
        s.acc.assign(k, 0.0);
        s.mark.assign(k, 0);
        s.touched.clear();
    }
    worker_totals_.assign(pool_.size(), {});
}

const IterationSnapshot &BspEngine::run_iteration(const PartitionState &state, std::span<const DataId> moved) {
    if (state.k() != model_.k()) {
        throw ValidationError("partition bucket count does not match the engine's score model");
    }
    dirty_ = lazy_recompute(g_, moved, fresh_);
    fresh_ = false;

    snapshot_ = IterationSnapshot{};
    auto &c = snapshot_.counters;
    c.messages[0] = c.payload[0] = dirty_.announcements;
    c.dirty_queries = dirty_.num_queries;
    c.dirty_data = dirty_.num_data;

    refresh_queries(state);
    propose(state);
    collect_histograms(state);
    snapshot_.proposals = proposals_;
    return snapshot_;
}

// Supersteps 1 and 2: dirty queries rebuild their neighbor data and (logically)
// send the nonzero entries to every adjacent data vertex.
void BspEngine::refresh_queries(const PartitionState &state) {
    const std::size_t nq = g_.num_queries();
    const std::size_t chunks = (nq + kChunk - 1) / kChunk;
    chunk_score_.assign(chunks, 0.0);
    for (auto &t : worker_totals_) {
        t = {};
    }

    pool_.run(chunks, [&](std::size_t worker, std::size_t chunk_begin, std::size_t chunk_end) {
        Scratch &s = scratch_[worker];
        auto &totals = worker_totals_[worker];
        for (std::size_t chunk = chunk_begin; chunk < chunk_end; ++chunk) {
            const QueryId q_begin = static_cast<QueryId>(chunk * kChunk);
            const QueryId q_end = static_cast<QueryId>(std::min(nq, (chunk + 1) * kChunk));
            double chunk_sum = 0.0;
            for (QueryId q = q_begin; q < q_end; ++q) {
                if (dirty_.query[q]) {
                    s.touched.clear();
                    for (DataId v : g_.query_neighbors(q)) {
                        const BucketId b = state.bucket_of(v);
                        if (s.count[b]++ == 0) {
                            s.touched.push_back(b);
                        }
                    }
                    std::sort(s.touched.begin(), s.touched.end());
                    s.entries.clear();
                    double score = 0.0;
                    for (BucketId b : s.touched) {
                        s.entries.push_back({b, s.count[b]});
                        score += model_.table(b).value(s.count[b]);
                        s.count[b] = 0;
                    }
                    neighbor_data_.assign(q, s.entries);
                    query_score_[q] = score;
                    const std::uint64_t deg = g_.query_degree(q);
                    totals[0] += deg;
                    totals[1] += deg * s.entries.size();
                }
                totals[2] += neighbor_data_.fanout(q);
                chunk_sum += query_score_[q];
            }
            chunk_score_[chunk] = chunk_sum;
        }
    });

    std::uint64_t fanout_total = 0;
    for (const auto &t : worker_totals_) {
        snapshot_.counters.messages[1] += t[0];
        snapshot_.counters.payload[1] += t[1];
        fanout_total += t[2];
    }
    // Chunk sums are added in chunk order, independent of the worker count.
    double score_total = 0.0;
    for (double x : chunk_score_) {
        score_total += x;
    }
    if (nq > 0) {
        snapshot_.objective = score_total / static_cast<double>(nq);
        snapshot_.exact_fanout = static_cast<double>(fanout_total) / static_cast<double>(nq);
    }
}

// Superstep 3, vertex side: dirty data vertices recompute gains and pick a target.
void BspEngine::propose(const PartitionState &state) {
    const std::size_t nd = g_.num_data();
    const std::size_t chunks = (nd + kChunk - 1) / kChunk;
    for (auto &t : worker_totals_) {
        t = {};
    }
    pool_.run(chunks, [&](std::size_t worker, std::size_t chunk_begin, std::size_t chunk_end) {
        Scratch &s = scratch_[worker];
        std::uint64_t evaluations = 0;
        const DataId v_begin = static_cast<DataId>(chunk_begin * kChunk);
        const DataId v_end = static_cast<DataId>(std::min(nd, chunk_end * kChunk));
        for (DataId v = v_begin; v < v_end; ++v) {
            if (dirty_.data[v]) {
                proposals_[v] = propose_vertex(state, v, s, evaluations);
            }
        }
        worker_totals_[worker][3] = evaluations;
    });
    for (const auto &t : worker_totals_) {
        snapshot_.counters.gain_evaluations += t[3];
    }
}

// gain_j = sum_q [step_from(n_from - 1) - step_j(n_j)]
//        = A - deg(v) * step_j(0) + sum_{q : n_j > 0} (step_j(0) - step_j(n_j))
// so only buckets present in some neighbor data need per-bucket work.
Proposal BspEngine::propose_vertex(const PartitionState &state, DataId v, Scratch &s,
                                   std::uint64_t &evaluations) const {
    const BucketId from = state.bucket_of(v);
    const TargetRange range = state.allowed(v);
    if (range.size() <= 1) {
        return {};
    }
    const ScoreTable &from_table = model_.table(from);
    double leave = 0.0;
    s.touched.clear();
    const EdgeIndex first = g_.data_offset(v);
    for (EdgeIndex i = first; i < first + g_.data_degree(v); ++i) {
        for (const BucketCount &e : neighbor_data_.at_block(data_block_[i])) {
            if (e.bucket == from) {
                leave += from_table.step(e.count - 1);
            } else if (range.contains(e.bucket)) {
                const ScoreTable &t = model_.table(e.bucket);
                if (!s.mark[e.bucket]) {
                    s.mark[e.bucket] = 1;
                    s.touched.push_back(e.bucket);
                }
                s.acc[e.bucket] += t.step(0) - t.step(e.count);
            }
        }
    }
    const double deg = static_cast<double>(g_.data_degree(v));
    auto gain_to = [&](BucketId j) {
        return leave - deg * model_.table(j).step(0) + s.acc[j] - penalty_.charge(v, from, j);
    };

    s.candidates.clear();
    const bool sparse = model_.uniform() && (penalty_.lambda == 0.0 || penalty_.initial.empty());
    if (sparse) {
        // Untouched buckets all share the same gain; the lowest id represents them.
        for (BucketId j : s.touched) {
            s.candidates.emplace_back(j, gain_to(j));
        }
        for (BucketId j = range.lo; j < range.hi; ++j) {
            if (j != from && !s.mark[j]) {
                s.candidates.emplace_back(j, gain_to(j));
                break;
            }
        }
    } else {
        for (BucketId j = range.lo; j < range.hi; ++j) {
            if (j != from) {
                s.candidates.emplace_back(j, gain_to(j));
            }
        }
    }
    evaluations += s.candidates.size();
    for (BucketId j : s.touched) {
        s.acc[j] = 0.0;
        s.mark[j] = 0;
    }
    return select_target(s.candidates);
}

// Superstep 3, master side: aggregate proposals into per-pair histograms.
void BspEngine::collect_histograms(const PartitionState &state) {
    auto &c = snapshot_.counters;
    for (DataId v = 0; v < g_.num_data(); ++v) {
        const Proposal &p = proposals_[v];
        if (!p.valid()) {
            continue;
        }
        snapshot_.histograms[{state.bucket_of(v), p.target}].add(GainBins::of(p.gain));
        ++c.messages[2];
    }
    c.payload[2] = c.messages[2];
}

} // namespace shp
