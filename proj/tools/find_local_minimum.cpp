// Searches small random bipartite graphs for a 2-way state that is a local
// minimum of exact fanout (every single move has gain <= 0) but not optimal,
// from which p-fanout refinement reaches the optimum. Prints the instance as
// C++ initializers for freezing into tests.
#include "../tests/oracles.hpp"
#include "shp/objective.hpp"
#include "shp/refine.hpp"

#include <cstdio>
#include <cstdlib>

namespace {

bool single_moves_nonpositive(const shp::BipartiteGraph &g, const shp::PartitionState &s) {
    const shp::NeighborData nd = shp::NeighborData::compute(g, s);
    for (shp::DataId v = 0; v < g.num_data(); ++v) {
        const shp::BucketId to = 1 - s.bucket_of(v);
        if (shp::move_gain(g, nd, v, s.bucket_of(v), to, shp::ScoreFunction::exact_fanout()) > 0.0) {
            return false;
        }
    }
    return true;
}

} // namespace

int main(int argc, char **argv) {
    const std::uint64_t tries = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 200000;
    for (std::uint64_t seed = 1; seed <= tries; ++seed) {
        const std::uint32_t n = 6 + 2 * static_cast<std::uint32_t>(seed % 2); // 6 or 8
        const std::uint32_t nq = 3 + static_cast<std::uint32_t>((seed / 2) % 5);
        shp::BipartiteGraph g;
        try {
            g = shp::build_graph(oracle::random_edges(n, nq, 4, seed));
        } catch (const shp::ValidationError &) {
            continue;
        }
        bool covered = g.num_data() == n;
        for (shp::DataId v = 0; covered && v < n; ++v) {
            covered = g.data_degree(v) > 0;
        }
        if (!covered) {
            continue;
        }
        const std::uint32_t cap = n / 2;
        const double best = oracle::exhaustive_min(g, 2, cap, oracle::exact_fanout());
        // Balanced start: first half / second half under a seeded shuffle.
        std::vector<std::uint32_t> a(n);
        std::mt19937_64 rng(seed);
        for (std::uint32_t v = 0; v < n; ++v) {
            a[v] = v < cap ? 0 : 1;
        }
        std::shuffle(a.begin(), a.end(), rng);
        if (oracle::objective_sum(g, a, oracle::exact_fanout()) <= best) {
            continue;
        }
        shp::PartitionState start(2, a);
        if (!single_moves_nonpositive(g, start)) {
            continue;
        }
        shp::RefineParams params;
        params.epsilon = 0.0;
        params.score = shp::ScoreFunction::exact_fanout();
        shp::PartitionState exact = start;
        const auto exact_trace = shp::refine_loop(g, exact, params);
        if (!(exact == start) || exact_trace.size() != 1) {
            continue;
        }
        params.score = shp::ScoreFunction::p_fanout(0.5);
        shp::PartitionState smooth = start;
        shp::refine_loop(g, smooth, params);
        const std::vector<std::uint32_t> result(smooth.assignment().begin(), smooth.assignment().end());
        if (oracle::objective_sum(g, result, oracle::exact_fanout()) != best) {
            continue;
        }
        std::printf("// seed %llu, optimum %.0f, start %.0f\n", static_cast<unsigned long long>(seed), best,
                    oracle::objective_sum(g, a, oracle::exact_fanout()));
        std::printf("queries:");
        for (shp::QueryId q = 0; q < g.num_queries(); ++q) {
            std::printf(" {");
            for (auto v : g.query_neighbors(q)) {
                std::printf("%u,", v);
            }
            std::printf("}");
        }
        std::printf("\nstart:");
        for (auto b : a) {
            std::printf(" %u", b);
        }
        std::printf("\n");
        return 0;
    }
    std::printf("no instance found\n");
    return 1;
}
