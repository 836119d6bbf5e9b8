#include "oracles.hpp"
#include "shp/partition.hpp"

#include <doctest.h>

#include <cmath>

using namespace shp;

TEST_CASE("capacity is floor((1+eps) n / k)") {
    CHECK(bucket_capacity(0.05, 6, 2) == 3);
    CHECK(bucket_capacity(0.05, 1000, 32) == 32);
    CHECK(bucket_capacity(0.15, 100, 1) == 115); // 1.15 * 100 is 114.999... in binary
    CHECK(bucket_capacity(0.0, 10, 4) == 2);
    CHECK(BalanceSpec{0.05}.capacity(1000, 8) == 131);
    CHECK(bucket_capacity(0.05, 1000, 8, 4) == 525);
}

TEST_CASE("random initial partition is deterministic and rejects k < 2") {
    const BipartiteGraph g = build_graph(oracle::six_vertex());
    CHECK(init_random_partition(g, 2, 7) == init_random_partition(g, 2, 7));
    CHECK_THROWS_AS(init_random_partition(g, 1, 7), ValidationError);
    CHECK(init_random_partition(g, 3, 1).consistent());
}

TEST_CASE("random initial partition sizes concentrate around n/2") {
    EdgeList e;
    e.edges = {{0, 0}, {0, 1}};
    for (std::int64_t v = 0; v < 100000; ++v) {
        e.declared_data.push_back(v);
    }
    const BipartiteGraph g = build_graph(e);
    const PartitionState s = init_random_partition(g, 2, 12345);
    const double bound = 3.0 * std::sqrt(100000 * 0.25);
    CHECK(std::abs(static_cast<double>(s.bucket_size(0)) - 50000.0) <= bound);
}

TEST_CASE("apply_moves updates sizes and is atomic") {
    PartitionState s(2, oracle::six_vertex_partition());
    const std::vector<Move> self{{0, 0}};
    s.apply_moves(self);
    CHECK(s == PartitionState(2, oracle::six_vertex_partition()));

    const std::vector<Move> move3{{2, 1}};
    s.apply_moves(move3);
    CHECK(s.bucket_size(0) == 2);
    CHECK(s.bucket_size(1) == 4);

    PartitionState grouped(4, {0, 1, 2, 3}, {TargetRange{0, 2}, TargetRange{2, 4}}, {0, 0, 1, 1});
    const PartitionState before = grouped;
    const std::vector<Move> bad{{0, 1}, {1, 3}}; // second move leaves its group
    CHECK_THROWS_AS(grouped.apply_moves(bad), ValidationError);
    CHECK(grouped == before);
    CHECK(grouped.consistent());
}

TEST_CASE("sizes stay consistent under random move sequences") {
    std::mt19937_64 rng(3);
    PartitionState s(5, oracle::random_assignment(200, 5, 3));
    for (int round = 0; round < 100; ++round) {
        std::vector<Move> moves;
        for (int i = 0; i < 20; ++i) {
            moves.push_back({static_cast<DataId>(rng() % 200), static_cast<BucketId>(rng() % 5)});
        }
        // Later moves of the same vertex win, as in sequential application.
        s.apply_moves(moves);
        REQUIRE(s.consistent());
    }
}

TEST_CASE("constructor rejects buckets outside the allowed range") {
    CHECK_THROWS_AS(PartitionState(2, {0, 2}), ValidationError);
    CHECK_THROWS_AS(PartitionState(4, {0, 3}, {TargetRange{0, 2}}, {}), ValidationError);
}

TEST_CASE("repair_balance brings every bucket within capacity inside its group") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        PartitionState s(4, std::vector<BucketId>(100, 0));
        const std::vector<std::uint32_t> cap(4, 26);
        repair_balance(s, cap, seed);
        for (BucketId b = 0; b < 4; ++b) {
            CHECK(s.bucket_size(b) <= 26);
        }
        CHECK(s.consistent());
    }
    std::vector<BucketId> a(60);
    std::vector<std::uint32_t> group(60);
    for (DataId v = 0; v < 60; ++v) {
        group[v] = v < 30 ? 0 : 1;
        a[v] = v < 30 ? 0 : 2;
    }
    PartitionState s(4, a, {TargetRange{0, 2}, TargetRange{2, 4}}, group);
    const std::vector<std::uint32_t> cap{15, 15, 16, 16};
    CHECK(repair_balance(s, cap, 9) == 29);
    CHECK(s.bucket_size(0) == 15);
    CHECK(s.bucket_size(1) == 15);
    CHECK(s.bucket_size(2) + s.bucket_size(3) == 30);
    CHECK(s.consistent());
}
