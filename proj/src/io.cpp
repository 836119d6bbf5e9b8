#include "shp/io.hpp"

#include <boost/iostreams/filter/gzip.hpp>
#include <boost/iostreams/filtering_stream.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

namespace shp {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f'; }

// Splits on runs of whitespace.
void split(std::string_view line, std::vector<std::string_view> &out) {
    out.clear();
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && is_space(line[i])) {
            ++i;
        }
        const std::size_t start = i;
        while (i < line.size() && !is_space(line[i])) {
            ++i;
        }
        if (i > start) {
            out.push_back(line.substr(start, i - start));
        }
    }
}

template <typename T>
bool parse_int(std::string_view s, T &value) {
    const char *end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, value);
    return ec == std::errc() && ptr == end;
}

bool blank(std::string_view line) {
    return std::all_of(line.begin(), line.end(), is_space);
}

void check_stream(const std::istream &in) {
    if (in.bad()) {
        throw IoError("read failed (corrupt or truncated input)");
    }
}

// Ids of one side of an edge list, numeric until the first non-integer.
class IdColumn {
public:
    IdColumn(IdMode mode, const char *side) : mode_(mode), side_(side), labeled_(mode == IdMode::kString) {}

    // `column` selects the side of `edges` to convert if labels take over.
    std::int64_t intern(std::string_view token, std::size_t line, std::size_t column,
                        std::vector<std::pair<std::int64_t, std::int64_t>> &edges) {
        if (!labeled_) {
            std::int64_t value = 0;
            if (parse_int(token, value)) {
                return value;
            }
            if (mode_ == IdMode::kInteger) {
                throw ParseError(line, std::string("non-integer ") + side_ + " id '" + std::string(token) + "'");
            }
            relabel(edges, column);
        }
        return label(token);
    }

    bool labeled() const { return labeled_; }
    std::vector<std::string> take_labels() { return std::move(labels_); }

private:
    std::int64_t label(std::string_view token) {
        auto it = index_.find(std::string(token));
        if (it != index_.end()) {
            return it->second;
        }
        const auto id = static_cast<std::int64_t>(labels_.size());
        labels_.emplace_back(token);
        index_.emplace(labels_.back(), id);
        return id;
    }

    // Switch to labels: earlier numeric ids become their decimal text.
    void relabel(std::vector<std::pair<std::int64_t, std::int64_t>> &edges, std::size_t column) {
        labeled_ = true;
        for (auto &e : edges) {
            std::int64_t &raw = column == 0 ? e.first : e.second;
            raw = label(std::to_string(raw));
        }
    }

    IdMode mode_;
    const char *side_;
    bool labeled_;
    std::vector<std::string> labels_;
    std::unordered_map<std::string, std::int64_t> index_;
};

} // namespace

InputFormat parse_format(const std::string &name) {
    if (name == "hmetis") {
        return InputFormat::kHmetis;
    }
    if (name == "edge-list") {
        return InputFormat::kEdgeList;
    }
    throw ValidationError("unknown input format '" + name + "' (expected hmetis or edge-list)");
}

std::string format_name(InputFormat f) { return f == InputFormat::kHmetis ? "hmetis" : "edge-list"; }

EdgeList read_hmetis(std::istream &in) {
    EdgeList out;
    std::string line;
    std::vector<std::string_view> tokens;
    std::size_t line_no = 0;
    std::uint64_t num_edges = 0;
    std::uint64_t num_vertices = 0;
    bool header = false;
    std::uint64_t seen = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if ((!line.empty() && line[0] == '%') || blank(line)) {
            continue;
        }
        split(line, tokens);
        if (!header) {
            if (tokens.size() < 2 || tokens.size() > 3 || !parse_int(tokens[0], num_edges) ||
                !parse_int(tokens[1], num_vertices)) {
                throw ParseError(line_no, "expected header 'numHyperedges numVertices [fmt]'");
            }
            if (tokens.size() == 3) {
                int fmt = -1;
                if (!parse_int(tokens[2], fmt)) {
                    throw ParseError(line_no, "malformed fmt code '" + std::string(tokens[2]) + "'");
                }
                if (fmt == 1 || fmt == 10 || fmt == 11) {
                    throw ParseError(line_no, "weighted hypergraphs (fmt " + std::to_string(fmt) + ") are not supported");
                }
                if (fmt != 0) {
                    throw ParseError(line_no, "unknown fmt code " + std::to_string(fmt));
                }
            }
            if (num_edges == 0 || num_vertices == 0) {
                throw ParseError(line_no, "hypergraph is empty");
            }
            if (num_vertices > std::numeric_limits<DataId>::max() - 1) {
                throw ParseError(line_no, "vertex count exceeds 32-bit range");
            }
            header = true;
            continue;
        }
        if (seen == num_edges) {
            throw ParseError(line_no, "more hyperedge lines than the declared " + std::to_string(num_edges));
        }
        for (std::string_view t : tokens) {
            std::uint64_t v = 0;
            if (!parse_int(t, v)) {
                throw ParseError(line_no, "malformed vertex id '" + std::string(t) + "'");
            }
            if (v < 1 || v > num_vertices) {
                throw ParseError(line_no, "vertex id " + std::to_string(v) + " outside [1, " +
                                              std::to_string(num_vertices) + "]");
            }
            out.edges.emplace_back(static_cast<std::int64_t>(seen), static_cast<std::int64_t>(v - 1));
        }
        ++seen;
    }
    check_stream(in);
    if (!header) {
        throw ParseError(line_no, "missing header line");
    }
    if (seen != num_edges) {
        throw ParseError(line_no, "expected " + std::to_string(num_edges) + " hyperedges, found " +
                                      std::to_string(seen));
    }
    out.declared_data.resize(num_vertices);
    for (std::uint64_t v = 0; v < num_vertices; ++v) {
        out.declared_data[v] = static_cast<std::int64_t>(v);
    }
    return out;
}

EdgeList read_edge_list(std::istream &in, IdMode ids) {
    EdgeList out;
    IdColumn queries(ids, "query");
    IdColumn data(ids, "data");
    std::string line;
    std::vector<std::string_view> tokens;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if ((!line.empty() && (line[0] == '#' || line[0] == '%')) || blank(line)) {
            continue;
        }
        split(line, tokens);
        if (tokens.size() != 2) {
            throw ParseError(line_no, "expected 2 columns, found " + std::to_string(tokens.size()));
        }
        const std::int64_t q = queries.intern(tokens[0], line_no, 0, out.edges);
        const std::int64_t v = data.intern(tokens[1], line_no, 1, out.edges);
        out.edges.emplace_back(q, v);
    }
    check_stream(in);
    if (out.edges.empty()) {
        throw ParseError(0, "edge list contains no edges");
    }
    if (queries.labeled()) {
        out.query_labels = queries.take_labels();
    }
    if (data.labeled()) {
        out.data_labels = data.take_labels();
    }
    return out;
}

void write_hmetis(std::ostream &out, const BipartiteGraph &g) {
    out << g.num_queries() << ' ' << g.num_data() << '\n';
    for (QueryId q = 0; q < g.num_queries(); ++q) {
        const auto nb = g.query_neighbors(q);
        for (std::size_t i = 0; i < nb.size(); ++i) {
            out << (i ? " " : "") << nb[i] + 1;
        }
        out << '\n';
    }
}

void write_edge_list(std::ostream &out, const BipartiteGraph &g) {
    for (QueryId q = 0; q < g.num_queries(); ++q) {
        const std::string qname = g.query_name(q);
        for (DataId v : g.query_neighbors(q)) {
            out << qname << '\t' << g.data_name(v) << '\n';
        }
    }
}

void write_partition(std::ostream &out, const PartitionState &state, const ExternalIds &ids) {
    if (ids.size() != state.num_vertices()) {
        throw ValidationError("external id table does not match the partition");
    }
    for (DataId v = 0; v < state.num_vertices(); ++v) {
        out << ids.name(v) << '\t' << state.bucket_of(v) << '\n';
    }
}

PartitionState read_partition(std::istream &in, const BipartiteGraph &g, std::uint32_t k) {
    const auto index = g.data_ids().index();
    std::vector<BucketId> bucket_of(g.num_data(), kNoBucket);
    std::string line;
    std::vector<std::string_view> tokens;
    std::size_t line_no = 0;
    BucketId largest = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if ((!line.empty() && (line[0] == '#' || line[0] == '%')) || blank(line)) {
            continue;
        }
        split(line, tokens);
        if (tokens.size() != 2) {
            throw ParseError(line_no, "expected 'dataId<TAB>bucket'");
        }
        const auto it = index.find(std::string(tokens[0]));
        if (it == index.end()) {
            throw ParseError(line_no, "unknown data vertex '" + std::string(tokens[0]) + "'");
        }
        BucketId b = 0;
        if (!parse_int(tokens[1], b) || b == kNoBucket) {
            throw ParseError(line_no, "malformed bucket '" + std::string(tokens[1]) + "'");
        }
        if (k != 0 && b >= k) {
            throw ParseError(line_no, "bucket " + std::to_string(b) + " outside [0, " + std::to_string(k) + ")");
        }
        if (bucket_of[it->second] != kNoBucket) {
            throw ParseError(line_no, "data vertex '" + std::string(tokens[0]) + "' assigned twice");
        }
        bucket_of[it->second] = b;
        largest = std::max(largest, b);
    }
    check_stream(in);
    for (DataId v = 0; v < g.num_data(); ++v) {
        if (bucket_of[v] == kNoBucket) {
            throw ParseError(0, "partition is missing data vertex '" + g.data_name(v) + "'");
        }
    }
    return PartitionState(k != 0 ? k : largest + 1, std::move(bucket_of));
}

EdgeList generate_planted(std::uint32_t groups, std::uint32_t vertices_per_group, std::uint32_t queries_per_group,
                          std::uint32_t query_degree, double noise, std::uint64_t seed) {
    if (groups == 0 || vertices_per_group == 0 || queries_per_group == 0) {
        throw ValidationError("planted instance needs at least one group, vertex and query");
    }
    if (query_degree < 2) {
        throw ValidationError("query degree must be at least 2");
    }
    if (query_degree > vertices_per_group) {
        throw ValidationError("query degree exceeds the vertices per group");
    }
    if (!(noise >= 0.0 && noise <= 1.0)) {
        throw ValidationError("noise probability must lie in [0, 1]");
    }
    const std::uint64_t n = static_cast<std::uint64_t>(groups) * vertices_per_group;
    if (n > std::numeric_limits<DataId>::max() - 1) {
        throw ValidationError("planted instance exceeds 32-bit vertex ids");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<std::uint32_t> within(0, vertices_per_group - 1);
    EdgeList out;
    out.edges.reserve(static_cast<std::size_t>(groups) * queries_per_group * query_degree);
    std::vector<std::int64_t> members;
    std::int64_t q = 0;
    for (std::uint32_t c = 0; c < groups; ++c) {
        const std::int64_t base = static_cast<std::int64_t>(c) * vertices_per_group;
        for (std::uint32_t i = 0; i < queries_per_group; ++i, ++q) {
            members.clear();
            while (members.size() < query_degree) {
                const std::int64_t v = base + within(rng);
                if (std::find(members.begin(), members.end(), v) == members.end()) {
                    members.push_back(v);
                }
            }
            if (groups > 1) {
                const std::uint64_t outside = n - vertices_per_group;
                std::uniform_int_distribution<std::uint64_t> other(0, outside - 1);
                for (auto &m : members) {
                    if (coin(rng) >= noise) {
                        continue;
                    }
                    // Rejection keeps the query's vertices distinct.
                    while (true) {
                        std::uint64_t x = other(rng);
                        const std::int64_t v = static_cast<std::int64_t>(x < static_cast<std::uint64_t>(base)
                                                                             ? x
                                                                             : x + vertices_per_group);
                        if (std::find(members.begin(), members.end(), v) == members.end()) {
                            m = v;
                            break;
                        }
                    }
                }
            }
            for (std::int64_t v : members) {
                out.edges.emplace_back(q, v);
            }
        }
    }
    out.declared_data.resize(n);
    for (std::uint64_t v = 0; v < n; ++v) {
        out.declared_data[v] = static_cast<std::int64_t>(v);
    }
    return out;
}

bool has_gzip_suffix(const std::string &path) {
    return path.size() >= 3 && path.compare(path.size() - 3, 3, ".gz") == 0;
}

namespace {

class InputFile : public boost::iostreams::filtering_istream {
public:
    explicit InputFile(const std::string &path) : file_(path, std::ios::binary) {
        if (!file_) {
            throw IoError("cannot open '" + path + "' for reading");
        }
        if (has_gzip_suffix(path)) {
            push(boost::iostreams::gzip_decompressor());
        }
        push(file_);
    }

private:
    std::ifstream file_;
};

} // namespace

std::unique_ptr<std::istream> open_input(const std::string &path) {
    if (std::filesystem::is_directory(path)) {
        throw IoError("'" + path + "' is a directory");
    }
    return std::make_unique<InputFile>(path);
}

BipartiteGraph load_graph(const std::string &path, InputFormat format, IdMode ids) {
    auto in = open_input(path);
    try {
        EdgeList edges = format == InputFormat::kHmetis ? read_hmetis(*in) : read_edge_list(*in, ids);
        return build_graph(edges);
    } catch (const boost::iostreams::gzip_error &e) {
        throw IoError("'" + path + "': " + e.what());
    } catch (const ParseError &e) {
        throw ParseError(0, "'" + path + "': " + e.what());
    }
}

void write_output(const std::string &path, const std::function<void(std::ostream &)> &writer) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
        if (!file) {
            throw IoError("cannot open '" + path + "' for writing");
        }
        try {
            if (has_gzip_suffix(path)) {
                boost::iostreams::filtering_ostream out;
                out.push(boost::iostreams::gzip_compressor());
                out.push(file);
                writer(out);
                out.reset();
            } else {
                writer(file);
            }
            file.flush();
            if (!file) {
                throw IoError("write to '" + path + "' failed");
            }
        } catch (...) {
            file.close();
            std::remove(tmp.c_str());
            throw;
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::remove(tmp.c_str());
        throw IoError("cannot move output into '" + path + "': " + ec.message());
    }
}

} // namespace shp
