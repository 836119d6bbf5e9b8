#include "local_minimum.hpp"
#include "oracles.hpp"
#include "shp/io.hpp"
#include "shp/recurse.hpp"
#include "shp/refine.hpp"

#include <doctest.h>

#include <cmath>

using namespace shp;

namespace {

GainHistogram hist(std::initializer_list<std::pair<double, std::uint64_t>> bins) {
    GainHistogram h;
    for (const auto &[gain, count] : bins) {
        h.add(GainBins::of(gain), count);
    }
    return h;
}

std::uint64_t sum(const BinCounts &c) {
    std::uint64_t s = 0;
    for (auto x : c) {
        s += x;
    }
    return s;
}

} // namespace

TEST_CASE("gain bins") {
    CHECK(GainBins::of(0.0) == 0);
    CHECK(GainBins::of(5e-10) == 0);
    CHECK(GainBins::of(1e-9) == 1);
    CHECK(GainBins::of(1.9e-9) == 1);
    CHECK(GainBins::of(2e-9) == 2);
    CHECK(GainBins::of(-3e-9) == -2);
    CHECK(GainBins::of(1e300) == 64);
    CHECK(GainBins::of(-INFINITY) == -64);
    CHECK(GainBins::representative(1) == doctest::Approx(1.5e-9));
    CHECK(GainBins::representative(-3) == doctest::Approx(-6e-9));
    for (double g : {0.4, -0.1, 3.0, 1e-6}) {
        const int b = GainBins::of(g);
        const double lo = std::ldexp(GainBins::kUnit, std::abs(b) - 1);
        CHECK(std::abs(g) >= lo);
        CHECK(std::abs(g) < 2 * lo);
    }
}

TEST_CASE("matched flows equal min(S_ij, S_ji) with one bin and no slack") {
    const MatchResult m = match_histograms(hist({{0.3, 10}}), hist({{0.3, 4}}), 0, 0);
    CHECK(m.matched == 4);
    CHECK(sum(m.forward) == 4);
    CHECK(sum(m.backward) == 4);
    CHECK(m.forward[GainBins::slot(GainBins::of(0.3))] == 4); // 4/10 of the bin
    CHECK(m.backward[GainBins::slot(GainBins::of(0.3))] == 4); // all of it
}

TEST_CASE("positive and negative bins pair when the representatives sum above zero") {
    const MatchResult m = match_histograms(hist({{0.4, 5}}), hist({{-0.1, 5}}), 0, 0);
    CHECK(m.matched == 5);
    const MatchResult none = match_histograms(hist({{0.1, 5}}), hist({{-0.4, 5}}), 0, 0);
    CHECK(none.matched == 0);
    const MatchResult zeros = match_histograms(hist({{0.0, 5}}), hist({{0.0, 5}}), 0, 0);
    CHECK(zeros.matched == 0);
    const MatchResult empty = match_histograms({}, {}, 10, 10);
    CHECK(empty.matched + empty.extra_forward + empty.extra_backward == 0);
}

TEST_CASE("matching goes best-first") {
    // forward: 2 at 1.0, 3 at 0.01; backward: 4 at 0.5
    const MatchResult m = match_histograms(hist({{1.0, 2}, {0.01, 3}}), hist({{0.5, 4}}), 0, 0);
    CHECK(m.matched == 4);
    CHECK(m.forward[GainBins::slot(GainBins::of(1.0))] == 2);
    CHECK(m.forward[GainBins::slot(GainBins::of(0.01))] == 2);
}

TEST_CASE("slack lets unmatched positive gains move one way") {
    const MatchResult m = match_histograms(hist({{0.3, 10}, {-0.2, 7}}), hist({{0.3, 4}}), 3, 100);
    CHECK(m.matched == 4);
    CHECK(m.extra_forward == 3);
    CHECK(m.extra_backward == 0);
    CHECK(sum(m.forward) == 7);
}

TEST_CASE("directives keep projected sizes within capacity") {
    std::mt19937_64 rng(5);
    for (int round = 0; round < 200; ++round) {
        const std::uint32_t k = 2 + rng() % 6;
        std::vector<std::uint32_t> sizes(k);
        std::vector<std::uint32_t> cap(k);
        for (BucketId b = 0; b < k; ++b) {
            sizes[b] = 10 + rng() % 20;
            cap[b] = sizes[b] + rng() % 5;
        }
        std::map<BucketPair, GainHistogram> h;
        for (BucketId i = 0; i < k; ++i) {
            for (BucketId j = 0; j < k; ++j) {
                if (i != j && rng() % 2) {
                    h[{i, j}].add(static_cast<int>(rng() % 61) - 30, 1 + rng() % 5);
                }
            }
        }
        const MoveDirectives d = compute_directives(h, sizes, cap, round % 2 ? PairOrder::kDescending : PairOrder::kAscending);
        std::vector<std::int64_t> after(sizes.begin(), sizes.end());
        for (const auto &[pair, quota] : d.quota) {
            after[pair.first] -= static_cast<std::int64_t>(sum(quota));
            after[pair.second] += static_cast<std::int64_t>(sum(quota));
            for (std::size_t s = 0; s < quota.size(); ++s) {
                CHECK(quota[s] <= h[pair].counts()[s]);
            }
        }
        for (BucketId b = 0; b < k; ++b) {
            CHECK(after[b] <= static_cast<std::int64_t>(std::max(cap[b], sizes[b])));
        }
        // Zero slack: flows are symmetric.
        const MoveDirectives tight = compute_directives(h, sizes, sizes);
        for (BucketId i = 0; i < k; ++i) {
            for (BucketId j = i + 1; j < k; ++j) {
                const auto a = tight.quota.find({i, j});
                const auto b = tight.quota.find({j, i});
                CHECK((a == tight.quota.end() ? 0 : sum(a->second)) == (b == tight.quota.end() ? 0 : sum(b->second)));
            }
        }
    }
}

TEST_CASE("exact quota moves exactly the quota, chosen by seed") {
    const std::uint32_t n = 10;
    const PartitionState s(2, std::vector<BucketId>(n, 0));
    std::vector<Proposal> props(n, Proposal{1, 0.3});
    std::map<BucketPair, GainHistogram> h;
    h[{0, 1}].add(GainBins::of(0.3), n);
    MoveDirectives d;
    d.quota[{0, 1}][GainBins::slot(GainBins::of(0.3))] = 4;
    const auto a = select_moves(s, props, h, d, MoveMode::kExactQuota, 11);
    const auto b = select_moves(s, props, h, d, MoveMode::kExactQuota, 11);
    CHECK(a.size() == 4);
    CHECK(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].vertex == b[i].vertex);
    }
    bool differs = false;
    for (std::uint64_t seed = 12; seed < 30 && !differs; ++seed) {
        const auto c = select_moves(s, props, h, d, MoveMode::kExactQuota, seed);
        for (std::size_t i = 0; i < c.size(); ++i) {
            differs = differs || c[i].vertex != a[i].vertex;
        }
    }
    CHECK(differs);

    d.quota[{0, 1}][GainBins::slot(GainBins::of(0.3))] = n;
    CHECK(select_moves(s, props, h, d, MoveMode::kExactQuota, 1).size() == n);
    CHECK(select_moves(s, props, h, d, MoveMode::kProbabilistic, 1).size() == n);
}

TEST_CASE("probabilistic mode moves the bin fraction in expectation") {
    const std::uint32_t n = 10000;
    const PartitionState s(2, std::vector<BucketId>(n, 0));
    std::vector<Proposal> props(n, Proposal{1, 0.3});
    std::map<BucketPair, GainHistogram> h;
    h[{0, 1}].add(GainBins::of(0.3), n);
    MoveDirectives d;
    d.quota[{0, 1}][GainBins::slot(GainBins::of(0.3))] = 4000;
    const auto moved = select_moves(s, props, h, d, MoveMode::kProbabilistic, 77).size();
    CHECK(std::abs(static_cast<double>(moved) - 4000.0) <= 3 * std::sqrt(n * 0.24));
}

TEST_CASE("epsilon schedule") {
    CHECK(epsilon_schedule(1, 10, 0.05) == doctest::Approx(0.005));
    CHECK(epsilon_schedule(10, 10, 0.05) == 0.05);
    CHECK(epsilon_schedule(1, 1, 0.05) == 0.05);
    CHECK_THROWS_AS(epsilon_schedule(0, 3, 0.05), ValidationError);
    CHECK_THROWS_AS(epsilon_schedule(4, 3, 0.05), ValidationError);
}

TEST_CASE("a fixed point terminates after one iteration without moves") {
    const BipartiteGraph g = build_graph(generate_planted(2, 20, 30, 3, 0.0, 4));
    std::vector<BucketId> planted(g.num_data());
    for (DataId v = 0; v < g.num_data(); ++v) {
        planted[v] = v < 20 ? 0 : 1;
    }
    PartitionState s(2, planted);
    RefineParams params;
    const auto trace = refine_loop(g, s, params);
    CHECK(trace.size() == 1);
    CHECK(trace[0].moved == 0);
    CHECK(s == PartitionState(2, planted));
}

TEST_CASE("refinement respects capacity in every iteration") {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        const std::uint32_t k = seed % 3 == 0 ? 2 : (seed % 3 == 1 ? 8 : 32);
        const BipartiteGraph g = build_graph(oracle::random_edges(1000, 1500, 8, seed));
        RefineParams params;
        params.seed = seed;
        params.max_iterations = 15;
        const std::uint32_t cap = bucket_capacity(params.epsilon, g.num_data(), k);
        int violations = 0;
        const auto result = direct_partition(g, k, params, [&](const TraceRow &, const PartitionState &s) {
            for (BucketId b = 0; b < k; ++b) {
                violations += s.bucket_size(b) > cap ? 1 : 0;
            }
        });
        CHECK(violations == 0);
        CHECK(result.state.consistent());
    }
}

TEST_CASE("refinement does not end worse than the random start") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const std::uint32_t k = seed % 2 ? 2 : 8;
        const BipartiteGraph g = build_graph(oracle::random_edges(200, 300, 6, seed));
        RefineParams params;
        params.seed = seed;
        const auto r = direct_partition(g, k, params);
        REQUIRE(!r.trace.empty());
        CHECK(total_objective(g, r.state, params.score) <= r.trace.front().objective + 1e-12);
    }
}

TEST_CASE("planted communities are recovered") {
    const BipartiteGraph g = build_graph(generate_planted(2, 50, 100, 3, 0.0, 8));
    int recovered = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        RefineParams params;
        params.seed = seed;
        const auto r = direct_partition(g, 2, params);
        recovered += total_objective(g, r.state, ScoreFunction::exact_fanout()) <= 1.05 ? 1 : 0;
    }
    CHECK(recovered >= 8);
}

TEST_CASE("exact fanout is stuck in the local minimum, p-fanout escapes") {
    const BipartiteGraph g = build_graph(oracle::local_minimum_instance());
    const PartitionState start(2, oracle::local_minimum_start());
    RefineParams params;
    params.epsilon = 0.0;
    params.score = ScoreFunction::exact_fanout();
    PartitionState exact = start;
    const auto trace = refine_loop(g, exact, params);
    CHECK(trace.size() == 1);
    CHECK(trace[0].moved == 0);
    CHECK(exact == start);

    params.score = ScoreFunction::p_fanout(0.5);
    PartitionState smooth = start;
    refine_loop(g, smooth, params);
    CHECK(fanout_sum(g, smooth) == oracle::kLocalMinimumOptimum);
    CHECK(oracle::exhaustive_min(g, 2, 4, oracle::exact_fanout()) == oracle::kLocalMinimumOptimum);
}

TEST_CASE("traces and partitions are identical for any worker count") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const BipartiteGraph g = build_graph(oracle::random_edges(3000, 4000, 8, seed));
        std::vector<PartitionResult> results;
        for (std::size_t w : {1, 2, 8}) {
            RefineParams params;
            params.seed = seed;
            params.workers = w;
            params.max_iterations = 10;
            results.push_back(direct_partition(g, 4, params));
        }
        for (std::size_t i = 1; i < results.size(); ++i) {
            CHECK(results[i].state == results[0].state);
            REQUIRE(results[i].trace.size() == results[0].trace.size());
            for (std::size_t t = 0; t < results[0].trace.size(); ++t) {
                CHECK(results[i].trace[t].objective == results[0].trace[t].objective);
                CHECK(results[i].trace[t].moved == results[0].trace[t].moved);
                CHECK(results[i].trace[t].counters == results[0].trace[t].counters);
            }
        }
    }
}

TEST_CASE("a large movement penalty keeps the initial partition") {
    const BipartiteGraph g = build_graph(oracle::random_edges(300, 400, 6, 3));
    PartitionState s(4, oracle::random_assignment(g.num_data(), 4, 3));
    const PartitionState initial = s;
    RefineParams params;
    params.penalty = 1e6;
    refine_loop(g, s, params);
    CHECK(s == initial);

    params.penalty = 0.0;
    refine_loop(g, s, params);
    CHECK(!(s == initial));
}

TEST_CASE("invalid refine parameters are rejected") {
    RefineParams params;
    params.converged_move_fraction = -1;
    CHECK_THROWS_AS(params.validate(), ValidationError);
    params = {};
    params.workers = 0;
    CHECK_THROWS_AS(params.validate(), ValidationError);
}
