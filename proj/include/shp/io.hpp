// io.hpp - hypergraph formats, partition files and synthetic instances
#ifndef SHP_IO_HPP
#define SHP_IO_HPP

#include "shp/graph.hpp"
#include "shp/partition.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>

namespace shp {

enum class InputFormat { kHmetis, kEdgeList };

// "hmetis" / "edge-list"; throws ValidationError otherwise.
InputFormat parse_format(const std::string &name);
std::string format_name(InputFormat f);

// hMetis hypergraph: header "numHyperedges numVertices [fmt]", then one line
// of 1-based vertex ids per hyperedge; '%' lines are comments. Hyperedge i
// becomes query i and vertex ids become 0-based. Weighted variants are
// rejected. Every declared vertex exists, even if no hyperedge mentions it.
EdgeList read_hmetis(std::istream &in);

enum class IdMode {
    kAuto,    // integers when every id on a side parses as one, labels otherwise
    kInteger, // non-integer ids are an error
    kString,  // every id is a label
};

// Lines "queryId dataId" separated by tabs or spaces. Blank lines and lines
// starting with '#' or '%' are skipped.
EdgeList read_edge_list(std::istream &in, IdMode ids = IdMode::kAuto);

// Writers whose output the readers above accept.
void write_hmetis(std::ostream &out, const BipartiteGraph &g);
void write_edge_list(std::ostream &out, const BipartiteGraph &g);

// Lines "externalDataId<TAB>bucket" in internal id order.
void write_partition(std::ostream &out, const PartitionState &state, const ExternalIds &ids);

// Every data vertex of g must appear exactly once with a bucket in [0, k).
// With k = 0 the bucket count is one more than the largest bucket seen.
PartitionState read_partition(std::istream &in, const BipartiteGraph &g, std::uint32_t k = 0);

// Planted communities: group c owns data vertices [c V, (c+1) V) and queries
// [c Q, (c+1) Q). Each query samples `query_degree` distinct vertices of its
// own group; each is then replaced with probability `noise` by a uniform
// vertex of another group not already in the query.
EdgeList generate_planted(std::uint32_t groups, std::uint32_t vertices_per_group, std::uint32_t queries_per_group,
                          std::uint32_t query_degree, double noise, std::uint64_t seed);

// Files; a ".gz" suffix selects gzip compression. Failures raise IoError.
std::unique_ptr<std::istream> open_input(const std::string &path);
BipartiteGraph load_graph(const std::string &path, InputFormat format, IdMode ids = IdMode::kAuto);

// Writes via a temporary file renamed into place on success, so a failed
// run leaves no partial output behind.
void write_output(const std::string &path, const std::function<void(std::ostream &)> &writer);

bool has_gzip_suffix(const std::string &path);

} // namespace shp

#endif // SHP_IO_HPP
