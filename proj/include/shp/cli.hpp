// cli.hpp - command-line front end: partition, evaluate, generate, bench
#ifndef SHP_CLI_HPP
#define SHP_CLI_HPP

#include "shp/io.hpp"
#include "shp/refine.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace shp {

enum class Mode { kDirect, kRecursive };

// Exit codes of every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

struct RunConfig {
    std::string input;
    InputFormat format = InputFormat::kEdgeList;
    IdMode ids = IdMode::kAuto;
    std::uint32_t k = 2;
    Mode mode = Mode::kDirect;
    std::uint32_t arity = 2;
    double p = 0.5;
    double epsilon = 0.05;
    std::optional<std::uint32_t> max_iterations; // 60 direct, 20 per level recursive
    double converged_move_fraction = 1e-4;
    std::uint64_t seed = 1;
    std::size_t workers = 1;
    MoveMode move_mode = MoveMode::kExactQuota;
    double penalty = 0.0;
    std::string initial_partition;
    std::string output;
    std::string report;
    std::string trace;

    std::uint32_t effective_max_iterations() const { return max_iterations.value_or(mode == Mode::kDirect ? 60 : 20); }
    RefineParams refine_params() const;
};

// Result of one partitioning run, before anything is written.
struct RunResult {
    PartitionState state;
    std::vector<TraceRow> trace;
};

// Loads the graph and partitions it per `config`.
RunResult run_partition(const BipartiteGraph &g, const RunConfig &config);

// CSV text for a trace: level,iteration,objective,exactFanout,movedFraction,phase2Payload,elapsedMs
std::string trace_csv(const std::vector<TraceRow> &trace);

// Entry point of the `shp` tool. Returns the process exit code.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace shp

#endif // SHP_CLI_HPP
