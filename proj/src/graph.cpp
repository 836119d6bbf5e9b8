#include "shp/graph.hpp"

#include <algorithm>

namespace shp {

std::string ExternalIds::name(std::size_t i) const {
    if (labels_) {
        return (*labels_)[static_cast<std::size_t>(raw_[i])];
    }
    return std::to_string(raw_[i]);
}

std::unordered_map<std::string, std::uint32_t> ExternalIds::index() const {
    std::unordered_map<std::string, std::uint32_t> out;
    out.reserve(raw_.size());
    for (std::size_t i = 0; i < raw_.size(); ++i) {
        out.emplace(name(i), static_cast<std::uint32_t>(i));
    }
    return out;
}

namespace {

std::vector<std::int64_t> sorted_unique(std::vector<std::int64_t> ids) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

std::uint32_t dense_index(const std::vector<std::int64_t> &ids, std::int64_t raw) {
    return static_cast<std::uint32_t>(std::lower_bound(ids.begin(), ids.end(), raw) - ids.begin());
}

std::shared_ptr<const std::vector<std::string>> share_labels(const std::vector<std::string> &labels) {
    if (labels.empty()) {
        return nullptr;
    }
    return std::make_shared<const std::vector<std::string>>(labels);
}

} // namespace

BipartiteGraph build_graph(const EdgeList &input) {
    if (input.edges.empty()) {
        throw ValidationError("edge list is empty");
    }

    std::vector<std::int64_t> query_raw;
    std::vector<std::int64_t> data_raw;
    query_raw.reserve(input.edges.size());
    data_raw.reserve(input.edges.size() + input.declared_data.size());
    for (const auto &[q, v] : input.edges) {
        query_raw.push_back(q);
        data_raw.push_back(v);
    }
    data_raw.insert(data_raw.end(), input.declared_data.begin(), input.declared_data.end());
    query_raw = sorted_unique(std::move(query_raw));
    data_raw = sorted_unique(std::move(data_raw));
    if (data_raw.size() > std::numeric_limits<DataId>::max() - 1 ||
        query_raw.size() > std::numeric_limits<QueryId>::max() - 1) {
        throw ValidationError("graph exceeds 32-bit vertex id range");
    }

    std::vector<std::pair<QueryId, DataId>> edges;
    edges.reserve(input.edges.size());
    for (const auto &[q, v] : input.edges) {
        edges.emplace_back(dense_index(query_raw, q), dense_index(data_raw, v));
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    // Drop queries of degree < 2 and compact the surviving query ids.
    std::vector<std::uint32_t> degree(query_raw.size(), 0);
    for (const auto &e : edges) {
        ++degree[e.first];
    }
    std::vector<QueryId> remap(query_raw.size(), kNoBucket);
    std::vector<std::int64_t> kept_raw;
    for (std::size_t q = 0; q < query_raw.size(); ++q) {
        if (degree[q] >= 2) {
            remap[q] = static_cast<QueryId>(kept_raw.size());
            kept_raw.push_back(query_raw[q]);
        }
    }
    std::erase_if(edges, [&](const auto &e) { return remap[e.first] == kNoBucket; });

    BipartiteGraph g;
    const std::size_t nq = kept_raw.size();
    const std::size_t nd = data_raw.size();
    g.q_offsets_.assign(nq + 1, 0);
    g.d_offsets_.assign(nd + 1, 0);
    g.q_adj_.resize(edges.size());
    g.d_adj_.resize(edges.size());
    for (const auto &[q, v] : edges) {
        ++g.q_offsets_[remap[q] + 1];
        ++g.d_offsets_[v + 1];
    }
    for (std::size_t i = 0; i < nq; ++i) {
        g.q_offsets_[i + 1] += g.q_offsets_[i];
        g.max_query_degree_ = std::max<std::uint32_t>(g.max_query_degree_,
                                                      static_cast<std::uint32_t>(g.q_offsets_[i + 1] - g.q_offsets_[i]));
    }
    for (std::size_t i = 0; i < nd; ++i) {
        g.d_offsets_[i + 1] += g.d_offsets_[i];
    }
    // Edges are sorted by (query, data), so both fills produce sorted lists.
    std::vector<EdgeIndex> q_fill(g.q_offsets_.begin(), g.q_offsets_.end() - 1);
    std::vector<EdgeIndex> d_fill(g.d_offsets_.begin(), g.d_offsets_.end() - 1);
    for (const auto &[q, v] : edges) {
        const QueryId dq = remap[q];
        g.q_adj_[q_fill[dq]++] = v;
        g.d_adj_[d_fill[v]++] = dq;
    }

    g.query_ids_ = ExternalIds(std::move(kept_raw), share_labels(input.query_labels));
    g.data_ids_ = ExternalIds(std::move(data_raw), share_labels(input.data_labels));
    return g;
}

EdgeList BipartiteGraph::to_edge_list() const {
    EdgeList out;
    out.edges.reserve(num_edges());
    for (QueryId q = 0; q < num_queries(); ++q) {
        for (DataId v : query_neighbors(q)) {
            out.edges.emplace_back(query_ids_.raw(q), data_ids_.raw(v));
        }
    }
    for (DataId v = 0; v < num_data(); ++v) {
        if (data_degree(v) == 0) {
            out.declared_data.push_back(data_ids_.raw(v));
        }
    }
    if (query_ids_.labeled()) {
        out.query_labels = *query_ids_.labels();
    }
    if (data_ids_.labeled()) {
        out.data_labels = *data_ids_.labels();
    }
    return out;
}

bool BipartiteGraph::same_structure(const BipartiteGraph &other) const {
    return q_offsets_ == other.q_offsets_ && q_adj_ == other.q_adj_ && d_offsets_ == other.d_offsets_ &&
           d_adj_ == other.d_adj_;
}

bool BipartiteGraph::operator==(const BipartiteGraph &other) const {
    if (!same_structure(other)) {
        return false;
    }
    for (QueryId q = 0; q < num_queries(); ++q) {
        if (query_name(q) != other.query_name(q)) {
            return false;
        }
    }
    for (DataId v = 0; v < num_data(); ++v) {
        if (data_name(v) != other.data_name(v)) {
            return false;
        }
    }
    return true;
}

} // namespace shp
