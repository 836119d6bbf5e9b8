// metrics.hpp - partition quality report, independent of how the partition was made
#ifndef SHP_METRICS_HPP
#define SHP_METRICS_HPP

#include "shp/graph.hpp"
#include "shp/partition.hpp"

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace shp {

struct MetricsReport {
    double average_fanout = 0.0;
    double p = 0.5;
    double p_fanout = 0.0;
    std::uint64_t soed = 0;
    std::uint64_t weighted_edge_cut = 0;
    std::uint64_t hyperedge_cut = 0; // queries with fanout > 1
    double max_imbalance = 0.0;      // max_i |V_i| / (n/k) - 1
    std::vector<std::uint32_t> bucket_sizes;
    std::uint32_t num_queries = 0;
    std::uint32_t num_data = 0;
    std::uint64_t num_edges = 0;
    std::uint32_t k = 0;

    bool operator==(const MetricsReport &) const = default;
};

// One pass over the query adjacency. Throws ValidationError if the partition
// does not cover the graph's data vertices or p is outside (0, 1].
MetricsReport evaluate(const BipartiteGraph &g, const PartitionState &state, double p);

nlohmann::ordered_json to_json(const MetricsReport &r);
MetricsReport report_from_json(const nlohmann::json &j);

} // namespace shp

#endif // SHP_METRICS_HPP
