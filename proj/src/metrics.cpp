#include "shp/metrics.hpp"

#include "shp/objective.hpp"

#include <algorithm>

namespace shp {

MetricsReport evaluate(const BipartiteGraph &g, const PartitionState &state, double p) {
    const ScoreFunction f = ScoreFunction::p_fanout(p);
    f.validate();
    if (state.num_vertices() != g.num_data()) {
        throw ValidationError("partition covers " + std::to_string(state.num_vertices()) +
                              " data vertices, graph has " + std::to_string(g.num_data()));
    }
    MetricsReport r;
    r.p = p;
    r.k = state.k();
    r.num_queries = g.num_queries();
    r.num_data = g.num_data();
    r.num_edges = g.num_edges();
    r.bucket_sizes.assign(state.sizes().begin(), state.sizes().end());

    std::vector<std::uint32_t> count(state.k(), 0);
    std::vector<BucketId> touched;
    std::uint64_t fanout_total = 0;
    double p_total = 0.0;
    for (QueryId q = 0; q < g.num_queries(); ++q) {
        touched.clear();
        for (DataId v : g.query_neighbors(q)) {
            const BucketId b = state.bucket_of(v);
            if (count[b]++ == 0) {
                touched.push_back(b);
            }
        }
        const std::uint64_t deg = g.query_degree(q);
        std::uint64_t within = 0;
        for (BucketId b : touched) {
            within += static_cast<std::uint64_t>(count[b]) * count[b];
            p_total += f(count[b]);
            count[b] = 0;
        }
        const std::uint64_t fanout = touched.size();
        fanout_total += fanout;
        r.soed += fanout + (fanout > 1 ? 1 : 0);
        r.hyperedge_cut += fanout > 1 ? 1 : 0;
        r.weighted_edge_cut += (deg * deg - within) / 2;
    }
    if (g.num_queries() > 0) {
        r.average_fanout = static_cast<double>(fanout_total) / g.num_queries();
        r.p_fanout = p_total / g.num_queries();
    }
    if (g.num_data() > 0) {
        const double ideal = static_cast<double>(g.num_data()) / state.k();
        const auto largest = *std::max_element(r.bucket_sizes.begin(), r.bucket_sizes.end());
        r.max_imbalance = static_cast<double>(largest) / ideal - 1.0;
    }
    return r;
}

nlohmann::ordered_json to_json(const MetricsReport &r) {
    nlohmann::ordered_json j;
    j["averageFanout"] = r.average_fanout;
    j["p"] = r.p;
    j["pFanout"] = r.p_fanout;
    j["soed"] = r.soed;
    j["weightedEdgeCut"] = r.weighted_edge_cut;
    j["hyperedgeCut"] = r.hyperedge_cut;
    j["maxImbalance"] = r.max_imbalance;
    j["bucketSizes"] = r.bucket_sizes;
    j["numQueries"] = r.num_queries;
    j["numData"] = r.num_data;
    j["numEdges"] = r.num_edges;
    j["k"] = r.k;
    return j;
}

MetricsReport report_from_json(const nlohmann::json &j) {
    MetricsReport r;
    try {
        r.average_fanout = j.at("averageFanout").get<double>();
        r.p = j.at("p").get<double>();
        r.p_fanout = j.at("pFanout").get<double>();
        r.soed = j.at("soed").get<std::uint64_t>();
        r.weighted_edge_cut = j.at("weightedEdgeCut").get<std::uint64_t>();
        r.hyperedge_cut = j.at("hyperedgeCut").get<std::uint64_t>();
        r.max_imbalance = j.at("maxImbalance").get<double>();
        r.bucket_sizes = j.at("bucketSizes").get<std::vector<std::uint32_t>>();
        r.num_queries = j.at("numQueries").get<std::uint32_t>();
        r.num_data = j.at("numData").get<std::uint32_t>();
        r.num_edges = j.at("numEdges").get<std::uint64_t>();
        r.k = j.at("k").get<std::uint32_t>();
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError(std::string("malformed metrics report: ") + e.what());
    }
    return r;
}

} // namespace shp
