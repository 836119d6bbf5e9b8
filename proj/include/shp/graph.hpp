// graph.hpp - immutable bipartite query/data graph (the hypergraph)
#ifndef SHP_GRAPH_HPP
#define SHP_GRAPH_HPP

#include "shp/types.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace shp {

// Raw input edges before id remapping and preprocessing.
//
// Raw ids are integers. When a label table is present for a side, the raw id
// of that side indexes the table (labels are numbered by first appearance);
// otherwise the raw id itself is the external id.
struct EdgeList {
    std::vector<std::pair<std::int64_t, std::int64_t>> edges; // (query, data)
    std::vector<std::string> query_labels;
    std::vector<std::string> data_labels;
    // Data vertices that exist even if no edge mentions them (e.g. hMetis vertex count).
    std::vector<std::int64_t> declared_data;
};

// External ids of one side, indexed by dense internal id.
class ExternalIds {
public:
    ExternalIds() = default;
    ExternalIds(std::vector<std::int64_t> raw, std::shared_ptr<const std::vector<std::string>> labels)
        : raw_(std::move(raw)), labels_(std::move(labels)) {}

    std::size_t size() const { return raw_.size(); }
    std::int64_t raw(std::size_t i) const { return raw_[i]; }
    bool labeled() const { return labels_ != nullptr; }
    std::string name(std::size_t i) const;

    // name -> internal id, for the I/O boundary.
    std::unordered_map<std::string, std::uint32_t> index() const;

    const std::vector<std::int64_t> &raw_ids() const { return raw_; }
    const std::shared_ptr<const std::vector<std::string>> &labels() const { return labels_; }

private:
    std::vector<std::int64_t> raw_;
    std::shared_ptr<const std::vector<std::string>> labels_;
};

// Bipartite graph G = (Q u D, E) stored as CSR in both directions.
// Adjacency lists are sorted and duplicate free; every query has degree >= 2.
class BipartiteGraph {
public:
    BipartiteGraph() = default;

    std::uint32_t num_queries() const { return static_cast<std::uint32_t>(q_offsets_.size()) - 1; }
    std::uint32_t num_data() const { return static_cast<std::uint32_t>(d_offsets_.size()) - 1; }
    EdgeIndex num_edges() const { return q_adj_.size(); }

    std::span<const DataId> query_neighbors(QueryId q) const {
        return {q_adj_.data() + q_offsets_[q], q_adj_.data() + q_offsets_[q + 1]};
    }
    std::span<const QueryId> data_neighbors(DataId v) const {
        return {d_adj_.data() + d_offsets_[v], d_adj_.data() + d_offsets_[v + 1]};
    }
    std::uint32_t query_degree(QueryId q) const {
        return static_cast<std::uint32_t>(q_offsets_[q + 1] - q_offsets_[q]);
    }
    std::uint32_t data_degree(DataId v) const {
        return static_cast<std::uint32_t>(d_offsets_[v + 1] - d_offsets_[v]);
    }
    EdgeIndex query_offset(QueryId q) const { return q_offsets_[q]; }
    EdgeIndex data_offset(DataId v) const { return d_offsets_[v]; }
    std::uint32_t max_query_degree() const { return max_query_degree_; }

    const ExternalIds &query_ids() const { return query_ids_; }
    const ExternalIds &data_ids() const { return data_ids_; }
    std::string query_name(QueryId q) const { return query_ids_.name(q); }
    std::string data_name(DataId v) const { return data_ids_.name(v); }

    // Edges of this graph in raw-id form; build_graph(to_edge_list()) == *this.
    EdgeList to_edge_list() const;

    // Same adjacency structure, ignoring external ids.
    bool same_structure(const BipartiteGraph &other) const;
    bool operator==(const BipartiteGraph &other) const;

    friend BipartiteGraph build_graph(const EdgeList &input);

private:
    std::vector<EdgeIndex> q_offsets_{0};
    std::vector<DataId> q_adj_;
    std::vector<EdgeIndex> d_offsets_{0};
    std::vector<QueryId> d_adj_;
    std::uint32_t max_query_degree_ = 0;
    ExternalIds query_ids_;
    ExternalIds data_ids_;
};

// Deduplicates edges, drops queries of degree < 2 and assigns dense ids in
// ascending raw-id order. Data vertices left without edges stay as isolated
// vertices. Throws ValidationError on an empty edge list.
BipartiteGraph build_graph(const EdgeList &input);

} // namespace shp

#endif // SHP_GRAPH_HPP
