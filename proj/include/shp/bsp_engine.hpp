// bsp_engine.hpp - in-process bulk-synchronous executor for one refinement iteration
//
// One iteration runs the vertex-centric supersteps
//   1. data -> query   moved data vertices announce their bucket; queries
//                      rebuild their neighbor data
//   2. query -> data   dirty queries send their nonzero neighbor data entries
//   3. data -> master  dirty data vertices recompute gains and propose a target;
//                      the master collects per-pair gain histograms
// with a barrier after each. Superstep 4 (master -> data directives) is driven
// by the refinement loop. Workers own contiguous vertex ranges and only read
// state published at the previous barrier, so results do not depend on the
// number of workers.
#ifndef SHP_BSP_ENGINE_HPP
#define SHP_BSP_ENGINE_HPP

#include "shp/gain.hpp"
#include "shp/graph.hpp"
#include "shp/objective.hpp"
#include "shp/partition.hpp"

#include <array>
#include <condition_variable>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace shp {

// Fixed pool of threads executing one range-partitioned job at a time. The
// calling thread acts as worker 0.
class WorkerPool {
public:
    using Job = std::function<void(std::size_t worker, std::size_t begin, std::size_t end)>;

    explicit WorkerPool(std::size_t workers);
    ~WorkerPool();
    WorkerPool(const WorkerPool &) = delete;
    WorkerPool &operator=(const WorkerPool &) = delete;

    std::size_t size() const { return threads_.size() + 1; }

    // Splits [0, n) into size() contiguous ranges, runs job on each and
    // returns once all ranges finished. Rethrows the first worker exception.
    void run(std::size_t n, const Job &job);

private:
    void range(std::size_t worker, std::size_t &begin, std::size_t &end) const;
    void execute(std::size_t worker);
    void loop(std::size_t worker);

    std::vector<std::thread> threads_;
    std::mutex mu_;
    std::condition_variable start_;
    std::condition_variable done_;
    std::uint64_t generation_ = 0;
    std::size_t pending_ = 0;
    bool stop_ = false;
    const Job *job_ = nullptr;
    std::size_t n_ = 0;
    std::exception_ptr error_;
};

// Per-superstep logical message counts and payload entries.
struct MessageCounters {
    std::array<std::uint64_t, 4> messages{};
    std::array<std::uint64_t, 4> payload{};
    std::uint64_t gain_evaluations = 0;
    std::uint64_t dirty_queries = 0;
    std::uint64_t dirty_data = 0;

    bool operator==(const MessageCounters &) const = default;
};

// Vertices whose state must be recomputed after a set of moves.
struct DirtySet {
    std::vector<std::uint8_t> query; // flag per query
    std::vector<std::uint8_t> data;  // flag per data vertex
    std::uint64_t num_queries = 0;
    std::uint64_t num_data = 0;
    std::uint64_t announcements = 0; // superstep-1 messages, sum of deg(v) over moved v
};

// Queries adjacent to a moved vertex, and the data vertices adjacent to those
// queries. With `all` set every vertex is dirty (first iteration of a level).
DirtySet lazy_recompute(const BipartiteGraph &g, std::span<const DataId> moved, bool all = false);

// Output of supersteps 1-3.
struct IterationSnapshot {
    double objective = 0.0;    // (1/|Q|) sum of bucket scores of the current state
    double exact_fanout = 0.0; // average fanout of the current state
    std::span<const Proposal> proposals;
    std::map<BucketPair, GainHistogram> histograms;
    MessageCounters counters;
};

class BspEngine {
public:
    // Vertex ranges are cut in chunks of this many vertices.
    static constexpr std::size_t kChunk = 1024;

    BspEngine(const BipartiteGraph &g, std::size_t workers);

    // Starts a new schedule: everything is dirty on the next iteration.
    void reset(ScoreModel model, MovePenalty penalty = {});

    // Supersteps 1-3 against `state`. `moved` lists the vertices that changed
    // bucket since the previous call; ignored right after reset().
    const IterationSnapshot &run_iteration(const PartitionState &state, std::span<const DataId> moved);

    const NeighborData &neighbor_data() const { return neighbor_data_; }
    const DirtySet &dirty() const { return dirty_; }
    WorkerPool &pool() { return pool_; }

private:
    struct Scratch {
        std::vector<std::uint32_t> count;
        std::vector<double> acc;
        std::vector<std::uint8_t> mark;
        std::vector<BucketId> touched;
        std::vector<BucketCount> entries;
        std::vector<std::pair<BucketId, double>> candidates;
    };

    void refresh_queries(const PartitionState &state);
    void propose(const PartitionState &state);
    Proposal propose_vertex(const PartitionState &state, DataId v, Scratch &s, std::uint64_t &evaluations) const;
    void collect_histograms(const PartitionState &state);
    void ensure_scratch(std::uint32_t k);

    const BipartiteGraph &g_;
    WorkerPool pool_;
    ScoreModel model_;
    MovePenalty penalty_;
    bool fresh_ = true;

    NeighborData neighbor_data_;
    std::vector<EdgeIndex> data_block_; // per data-side edge, the query's block
    std::vector<double> query_score_;
    std::vector<Proposal> proposals_;
    DirtySet dirty_;
    std::vector<Scratch> scratch_;
    std::vector<std::array<std::uint64_t, 4>> worker_totals_;
    std::vector<double> chunk_score_;
    IterationSnapshot snapshot_;
};

} // namespace shp

#endif // SHP_BSP_ENGINE_HPP
