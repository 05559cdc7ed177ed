#ifndef SANKARM_PIPELINE_HPP
#define SANKARM_PIPELINE_HPP

#include "sankarm/archive.hpp"
#include "sankarm/dataset.hpp"
#include "sankarm/de_miner.hpp"
#include "sankarm/sankey.hpp"
#include "sankarm/selector.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sankarm {

struct PipelineConfig {
    std::string input_path;
    std::optional<std::string> catalog_path;
    std::size_t periods = 4;
    std::vector<std::string> boundaries; ///< switches to boundary partitioning when non-empty
    DEParams de{};
    std::size_t n_runs = 25;
    SelectionParams selection{};
    std::string out_dir = ".";

    /// Throws ArgumentError for anything out of range.
    void validate() const;

    PartitionSpec partition_spec() const;
};

/// Seed of run `run` in period `period` (both 0-based).
constexpr std::uint64_t derived_seed(std::uint64_t base, std::size_t period, std::size_t run) {
    return base + static_cast<std::uint64_t>(period) * 10000u + static_cast<std::uint64_t>(run);
}

struct PeriodResult {
    std::size_t transactions = 0;
    RuleArchive archive;
    RuleSelection selection;
    SankeyGraph graph;
};

/// Runs every stage in memory. Nothing is written.
std::vector<PeriodResult> run_pipeline(const PipelineConfig& config, FeatureCatalog& catalog_out);

/// Artifact file names inside the output directory.
std::string archive_filename(const std::string& label);
std::string selection_filename(const std::string& label);
std::string sankey_filename(const std::string& label);
inline constexpr const char* kReportFilename = "report.html";
inline constexpr const char* kCatalogFilename = "catalog.json";

/// Table of selected rules per period: Part, Rule nr., Association rule, Fitness.
void print_summary(std::ostream& out, const std::vector<PeriodResult>& results, const FeatureCatalog& catalog);

/// Entry point of the command-line tool: subcommands pipeline, mine, select
/// and sankey. Returns the process exit status.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace sankarm

#endif // SANKARM_PIPELINE_HPP
