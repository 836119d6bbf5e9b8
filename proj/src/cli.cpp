#include "shp/cli.hpp"

#include "shp/metrics.hpp"
#include "shp/recurse.hpp"

#include <CLI11.hpp>
#include <boost/iostreams/filter/gzip.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <map>
#include <ostream>
#include <sstream>

namespace shp {

RefineParams RunConfig::refine_params() const {
    RefineParams params;
    params.score = ScoreFunction::p_fanout(p);
    params.max_iterations = effective_max_iterations();
    params.converged_move_fraction = converged_move_fraction;
    params.epsilon = epsilon;
    params.move_mode = move_mode;
    params.seed = seed;
    params.penalty = penalty;
    params.workers = workers;
    params.validate();
    return params;
}

RunResult run_partition(const BipartiteGraph &g, const RunConfig &config) {
    const RefineParams params = config.refine_params();
    if (config.k < 2) {
        throw ValidationError("k must be at least 2");
    }
    if (!config.initial_partition.empty()) {
        if (config.mode != Mode::kDirect) {
            throw ValidationError("an initial partition is only supported in direct mode");
        }
        auto in = open_input(config.initial_partition);
        PartitionState state = read_partition(*in, g, config.k);
        auto trace = refine_loop(g, state, params);
        return {std::move(state), std::move(trace)};
    }
    PartitionResult r = config.mode == Mode::kDirect ? direct_partition(g, config.k, params)
                                                     : recursive_partition(g, config.k, config.arity, params);
    return {std::move(r.state), std::move(r.trace)};
}

namespace {

// RFC 4180 quoting for fields that contain separators or quotes.
std::string csv_field(const std::string &s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        out += c == '"' ? std::string("\"\"") : std::string(1, c);
    }
    return out + '"';
}

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fixed3(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", x);
    return buf;
}

// Outputs are rendered in memory and only written once the run succeeded.
class PendingOutputs {
public:
    void add(const std::string &path, std::string content) {
        if (!path.empty()) {
            files_.emplace_back(path, std::move(content));
        }
    }

    void commit() {
        std::vector<std::string> written;
        try {
            for (const auto &[path, content] : files_) {
                write_output(path, [&](std::ostream &os) { os << content; });
                written.push_back(path);
            }
        } catch (...) {
            for (const auto &path : written) {
                std::error_code ec;
                std::filesystem::remove(path, ec);
            }
            throw;
        }
    }

private:
    std::vector<std::pair<std::string, std::string>> files_;
};

InputFormat guess_format(const std::string &path) {
    std::string base = path;
    if (has_gzip_suffix(base)) {
        base.resize(base.size() - 3);
    }
    const auto ext = std::filesystem::path(base).extension().string();
    return ext == ".hgr" || ext == ".hmetis" ? InputFormat::kHmetis : InputFormat::kEdgeList;
}

const std::map<std::string, InputFormat> kFormats{{"hmetis", InputFormat::kHmetis},
                                                  {"edge-list", InputFormat::kEdgeList}};
const std::map<std::string, IdMode> kIdModes{{"auto", IdMode::kAuto},
                                             {"integer", IdMode::kInteger},
                                             {"string", IdMode::kString}};
const std::map<std::string, Mode> kModes{{"direct", Mode::kDirect}, {"recursive", Mode::kRecursive}};
const std::map<std::string, MoveMode> kMoveModes{{"exact-quota", MoveMode::kExactQuota},
                                                 {"probabilistic", MoveMode::kProbabilistic}};

// Options shared by partition and bench.
void add_refine_options(CLI::App *cmd, RunConfig &c) {
    cmd->add_option("-k,--k", c.k, "number of buckets")->check(CLI::Range(2u, 1u << 30));
    cmd->add_option("--mode", c.mode, "direct (all k buckets) or recursive (r-ary splits)")
        ->transform(CLI::CheckedTransformer(kModes, CLI::ignore_case));
    cmd->add_option("--arity", c.arity, "split arity r of recursive mode")->check(CLI::Range(2u, 1u << 30));
    cmd->add_option("-p,--p", c.p, "probability of the probabilistic fanout objective, in (0, 1]");
    cmd->add_option("--epsilon", c.epsilon, "allowed imbalance");
    cmd->add_option("--max-iterations", c.max_iterations,
                    "refinement iterations (per level in recursive mode) [default: 60 direct, 20 recursive]");
    cmd->add_option("--converged-move-fraction", c.converged_move_fraction,
                    "stop once fewer than this fraction of vertices moved");
    cmd->add_option("--seed", c.seed, "random seed");
    cmd->add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--move-mode", c.move_mode, "exact-quota or probabilistic")
        ->transform(CLI::CheckedTransformer(kMoveModes, CLI::ignore_case));
}

void add_input_options(CLI::App *cmd, std::string &input, std::optional<InputFormat> &format, IdMode &ids) {
    cmd->add_option("--input", input, "hypergraph file (.gz accepted)")->required();
    cmd->add_option("--format", format, "hmetis or edge-list [default: by extension, .hgr is hmetis]")
        ->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case));
    cmd->add_option("--ids", ids, "edge-list id parsing: auto, integer or string")
        ->transform(CLI::CheckedTransformer(kIdModes, CLI::ignore_case));
}

std::string report_text(const MetricsReport &r) { return to_json(r).dump(2) + "\n"; }

std::string mode_name(Mode m) { return m == Mode::kDirect ? "direct" : "recursive"; }

} // namespace

std::string trace_csv(const std::vector<TraceRow> &trace) {
    std::string out = "level,iteration,objective,exactFanout,movedFraction,phase2Payload,elapsedMs\n";
    for (const TraceRow &r : trace) {
        out += std::to_string(r.level) + ',' + std::to_string(r.iteration) + ',' + num(r.objective) + ',' +
               num(r.exact_fanout) + ',' + num(r.moved_fraction) + ',' + std::to_string(r.counters.payload[1]) +
               ',' + fixed3(r.elapsed_ms) + '\n';
    }
    return out;
}

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Balanced k-way hypergraph partitioning minimizing (probabilistic) query fanout", "shp"};
    app.require_subcommand(1);

    // partition
    RunConfig config;
    std::optional<InputFormat> part_format;
    auto *partition = app.add_subcommand("partition", "partition a hypergraph");
    add_input_options(partition, config.input, part_format, config.ids);
    add_refine_options(partition, config);
    partition->add_option("--penalty", config.penalty, "movement penalty per vertex outside its initial bucket");
    partition->add_option("--initial-partition", config.initial_partition,
                          "start from this partition file (direct mode only)");
    partition->add_option("--output", config.output, "partition file: dataId<TAB>bucket per line");
    partition->add_option("--report", config.report, "metrics report JSON [default: stdout]");
    partition->add_option("--trace", config.trace, "per-iteration trace CSV");

    // evaluate
    std::string eval_input;
    std::optional<InputFormat> eval_format;
    IdMode eval_ids = IdMode::kAuto;
    std::string eval_partition;
    std::string eval_report;
    double eval_p = 0.5;
    std::uint32_t eval_k = 0;
    auto *evaluate_cmd = app.add_subcommand("evaluate", "score a partition of a hypergraph");
    add_input_options(evaluate_cmd, eval_input, eval_format, eval_ids);
    evaluate_cmd->add_option("--partition", eval_partition, "partition file")->required();
    evaluate_cmd->add_option("-p,--p", eval_p, "probability for the probabilistic fanout");
    evaluate_cmd->add_option("-k,--k", eval_k, "bucket count [default: largest bucket id + 1]");
    evaluate_cmd->add_option("--report", eval_report, "metrics report JSON [default: stdout]");

    // generate
    std::uint32_t gen_groups = 2;
    std::uint32_t gen_vertices = 50;
    std::uint32_t gen_queries = 100;
    std::uint32_t gen_degree = 3;
    double gen_noise = 0.05;
    std::uint64_t gen_seed = 1;
    std::string gen_output;
    InputFormat gen_format = InputFormat::kEdgeList;
    auto *generate = app.add_subcommand("generate", "write a planted-community instance");
    generate->add_option("--groups", gen_groups, "communities")->check(CLI::PositiveNumber);
    generate->add_option("--vertices-per-group", gen_vertices, "data vertices per community");
    generate->add_option("--queries-per-group", gen_queries, "queries per community");
    generate->add_option("--query-degree", gen_degree, "data vertices per query");
    generate->add_option("--noise", gen_noise, "probability of replacing a vertex by an outside one");
    generate->add_option("--seed", gen_seed, "random seed");
    generate->add_option("--format", gen_format, "hmetis or edge-list")
        ->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case));
    generate->add_option("--output", gen_output, "output file (.gz accepted)")->required();

    // bench
    RunConfig bench_base;
    std::vector<std::string> bench_inputs;
    std::vector<std::string> bench_planted;
    std::vector<std::uint32_t> bench_k{2};
    std::vector<double> bench_p{0.5};
    std::vector<std::string> bench_modes{"direct"};
    std::vector<std::uint64_t> bench_seeds{1};
    std::string bench_output;
    auto *bench = app.add_subcommand("bench", "run a matrix of (instance, k, p, mode, seed) and emit CSV");
    bench->add_option("--input", bench_inputs, "hypergraph files (format by extension)");
    bench->add_option("--planted", bench_planted,
                      "planted instances as groups,verticesPerGroup,queriesPerGroup,degree,noise[,seed]");
    bench->add_option("--ks", bench_k, "bucket counts")->check(CLI::Range(2u, 1u << 30));
    bench->add_option("--ps", bench_p, "probabilities");
    bench->add_option("--modes", bench_modes, "direct and/or recursive")
        ->check(CLI::IsMember({"direct", "recursive"}));
    bench->add_option("--seeds", bench_seeds, "seeds");
    bench->add_option("--arity", bench_base.arity, "split arity of recursive mode")->check(CLI::Range(2u, 1u << 30));
    bench->add_option("--epsilon", bench_base.epsilon, "allowed imbalance");
    bench->add_option("--max-iterations", bench_base.max_iterations, "refinement iterations");
    bench->add_option("--converged-move-fraction", bench_base.converged_move_fraction, "convergence threshold");
    bench->add_option("--workers", bench_base.workers, "worker threads")->check(CLI::PositiveNumber);
    bench->add_option("--output", bench_output, "CSV file [default: stdout]");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        PendingOutputs outputs;
        if (*partition) {
            config.format = part_format.value_or(guess_format(config.input));
            const BipartiteGraph g = load_graph(config.input, config.format, config.ids);
            const RunResult result = run_partition(g, config);
            const MetricsReport report = evaluate(g, result.state, config.p);
            std::ostringstream part;
            write_partition(part, result.state, g.data_ids());
            outputs.add(config.output, part.str());
            outputs.add(config.trace, trace_csv(result.trace));
            outputs.add(config.report, report_text(report));
            outputs.commit();
            if (config.report.empty()) {
                out << report_text(report);
            }
        } else if (*evaluate_cmd) {
            const BipartiteGraph g = load_graph(eval_input, eval_format.value_or(guess_format(eval_input)), eval_ids);
            auto in = open_input(eval_partition);
            const PartitionState state = read_partition(*in, g, eval_k);
            const MetricsReport report = evaluate(g, state, eval_p);
            outputs.add(eval_report, report_text(report));
            outputs.commit();
            if (eval_report.empty()) {
                out << report_text(report);
            }
        } else if (*generate) {
            const BipartiteGraph g =
                build_graph(generate_planted(gen_groups, gen_vertices, gen_queries, gen_degree, gen_noise, gen_seed));
            std::ostringstream text;
            if (gen_format == InputFormat::kHmetis) {
                write_hmetis(text, g);
            } else {
                write_edge_list(text, g);
            }
            outputs.add(gen_output, text.str());
            outputs.commit();
        } else if (*bench) {
            struct Instance {
                std::string name;
                BipartiteGraph graph;
            };
            std::vector<Instance> instances;
            for (const auto &path : bench_inputs) {
                instances.push_back({path, load_graph(path, guess_format(path))});
            }
            for (const auto &spec : bench_planted) {
                std::vector<std::string> parts;
                std::stringstream ss(spec);
                for (std::string item; std::getline(ss, item, ',');) {
                    parts.push_back(item);
                }
                if (parts.size() != 5 && parts.size() != 6) {
                    throw ValidationError("--planted expects groups,verticesPerGroup,queriesPerGroup,degree,noise[,seed]");
                }
                try {
                    const auto seed = parts.size() == 6 ? std::stoull(parts[5]) : 1ULL;
                    instances.push_back({"planted:" + spec,
                                         build_graph(generate_planted(
                                             static_cast<std::uint32_t>(std::stoul(parts[0])),
                                             static_cast<std::uint32_t>(std::stoul(parts[1])),
                                             static_cast<std::uint32_t>(std::stoul(parts[2])),
                                             static_cast<std::uint32_t>(std::stoul(parts[3])), std::stod(parts[4]),
                                             seed))});
                } catch (const std::logic_error &) {
                    throw ValidationError("malformed --planted specification '" + spec + "'");
                }
            }
            if (instances.empty()) {
                throw ValidationError("bench needs at least one --input or --planted instance");
            }
            std::string csv = "instance,numQueries,numData,numEdges,k,p,mode,seed,averageFanout,pFanout,"
                              "maxImbalance,iterations,elapsedMs\n";
            for (const auto &inst : instances) {
                for (std::uint32_t k : bench_k) {
                    for (double p : bench_p) {
                        for (const auto &mode : bench_modes) {
                            for (std::uint64_t seed : bench_seeds) {
                                RunConfig c = bench_base;
                                c.k = k;
                                c.p = p;
                                c.mode = kModes.at(mode);
                                c.seed = seed;
                                const auto start = std::chrono::steady_clock::now();
                                const RunResult r = run_partition(inst.graph, c);
                                const double ms = std::chrono::duration<double, std::milli>(
                                                      std::chrono::steady_clock::now() - start)
                                                      .count();
                                const MetricsReport m = evaluate(inst.graph, r.state, p);
                                csv += csv_field(inst.name) + ',' + std::to_string(m.num_queries) + ',' +
                                       std::to_string(m.num_data) + ',' + std::to_string(m.num_edges) + ',' +
                                       std::to_string(k) + ',' + num(p) + ',' + mode_name(c.mode) + ',' +
                                       std::to_string(seed) + ',' + num(m.average_fanout) + ',' + num(m.p_fanout) +
                                       ',' + num(m.max_imbalance) + ',' + std::to_string(r.trace.size()) + ',' +
                                       fixed3(ms) + '\n';
                            }
                        }
                    }
                }
            }
            outputs.add(bench_output, csv);
            outputs.commit();
            if (bench_output.empty()) {
                out << csv;
            }
        }
    } catch (const IoError &e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const boost::iostreams::gzip_error &e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitOk;
}

} // namespace shp
