#include "sankarm/pipeline.hpp"
#include "sankarm/errors.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace sankarm {

namespace fs = std::filesystem;

void PipelineConfig::validate() const {
    de.validate();
    if (periods < 1)
        throw ArgumentError("--periods must be at least 1");
    if (n_runs < 1)
        throw ArgumentError("--runs must be at least 1");
    if (selection.M < 1)
        throw ArgumentError("--map-size must be at least 1");
    if (selection.n_tilde < 1)
        throw ArgumentError("--top-n must be at least 1");
    if (!(selection.s_min >= 0.0 && selection.s_min <= 1.0))
        throw ArgumentError("--smin must lie in [0, 1]");
    if (!(selection.c_min >= 0.0 && selection.c_min <= 1.0))
        throw ArgumentError("--cmin must lie in [0, 1]");
    (void)partition_spec();
}

PartitionSpec PipelineConfig::partition_spec() const {
    if (boundaries.empty())
        return EqualCount{periods};
    TimeBoundaries spec;
    for (const auto& b : boundaries) {
        const auto ts = parse_timestamp(b);
        if (!ts)
            throw ArgumentError("bad boundary '" + b + "' (expected YYYY-MM-DD or an integer)");
        spec.boundaries.push_back(*ts);
    }
    for (std::size_t i = 1; i < spec.boundaries.size(); ++i)
        if (!(spec.boundaries[i - 1] < spec.boundaries[i]))
            throw ArgumentError("boundaries must be strictly increasing");
    return spec;
}

std::string archive_filename(const std::string& label) { return "archive-" + label + ".json"; }
std::string selection_filename(const std::string& label) { return "selection-" + label + ".json"; }
std::string sankey_filename(const std::string& label) { return "sankey-" + label + ".json"; }

namespace {

class StageFailure : public Error {
public:
    StageFailure(std::string stage, const std::string& what)
        : Error(stage + ": " + what), stage_(std::move(stage)) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

template <typename Fn>
auto in_stage(const char* name, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const StageFailure&) {
        throw;
    } catch (const std::exception& e) {
        throw StageFailure(name, e.what());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error("cannot write '" + path.string() + "'");
    out << content;
    if (!out)
        throw Error("failed writing '" + path.string() + "'");
}

fs::path prepare_out_dir(const std::string& dir) {
    fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec)
        throw Error("cannot create output directory '" + dir + "': " + ec.message());
    return p;
}

std::vector<TransactionDB> load_periods(const PipelineConfig& config) {
    std::optional<FeatureCatalog> catalog;
    if (config.catalog_path)
        catalog = load_catalog_file(*config.catalog_path);
    const auto db = load_transactions_file(config.input_path, catalog);
    return partition(db, config.partition_spec());
}

std::vector<RuleArchive> mine_periods(const std::vector<TransactionDB>& parts, const PipelineConfig& config) {
    std::vector<RuleArchive> archives;
    for (std::size_t p = 0; p < parts.size(); ++p) {
        auto archive = run_batch(parts[p], config.de, config.n_runs, derived_seed(config.de.seed, p, 0));
        archive.set_period_label(parts[p].label());
        archives.push_back(std::move(archive));
    }
    return archives;
}

} // namespace

std::vector<PeriodResult> run_pipeline(const PipelineConfig& config, FeatureCatalog& catalog_out) {
    in_stage("config", [&] { config.validate(); });
    const auto parts = in_stage("load", [&] { return load_periods(config); });
    catalog_out = parts.front().catalog();
    const auto archives = in_stage("mine", [&] { return mine_periods(parts, config); });

    std::vector<PeriodResult> results;
    for (std::size_t p = 0; p < parts.size(); ++p) {
        PeriodResult r;
        r.transactions = parts[p].size();
        r.archive = archives[p];
        r.selection = in_stage("select", [&] { return select(r.archive, config.selection, catalog_out); });
        r.graph = in_stage("sankey", [&] { return build_flow(r.selection, catalog_out); });
        results.push_back(std::move(r));
    }
    return results;
}

void print_summary(std::ostream& out, const std::vector<PeriodResult>& results, const FeatureCatalog& catalog) {
    char line[512];
    for (std::size_t p = 0; p < results.size(); ++p) {
        const auto& r = results[p];
        std::snprintf(line, sizeof line, "%s: %zu transactions, archive %zu rules, best fitness %.4f, mode %s\n",
                      r.archive.period_label().c_str(), r.transactions, r.archive.size(), r.archive.best_fitness(),
                      to_string(r.selection.mode).c_str());
        out << line;
    }
    out << "\n";
    std::snprintf(line, sizeof line, "%-6s %-9s %-60s %s\n", "Part", "Rule nr.", "Association rule", "Fitness");
    out << line;
    for (std::size_t p = 0; p < results.size(); ++p) {
        const auto& chosen = results[p].selection.chosen;
        for (std::size_t i = 0; i < chosen.size(); ++i) {
            std::snprintf(line, sizeof line, "%-6zu %-9zu %-60s %.4f\n", p + 1, i + 1,
                          format_rule(chosen[i].rule, catalog).c_str(), chosen[i].fitness);
            out << line;
        }
    }
}

namespace {

void write_sankey_outputs(const fs::path& dir, const std::vector<RuleSelection>& selections,
                          const std::vector<SankeyGraph>& graphs) {
    std::vector<std::pair<std::string, SankeyGraph>> report;
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        write_file(dir / sankey_filename(selections[i].period), emit_json(graphs[i]));
        report.emplace_back(selections[i].period, graphs[i]);
    }
    write_file(dir / kReportFilename, emit_report(report));
}

int cmd_pipeline(const PipelineConfig& config, std::ostream& out) {
    FeatureCatalog catalog;
    const auto results = run_pipeline(config, catalog);
    in_stage("write", [&] {
        const auto dir = prepare_out_dir(config.out_dir);
        write_file(dir / kCatalogFilename, catalog_to_json(catalog));
        std::vector<RuleSelection> selections;
        std::vector<SankeyGraph> graphs;
        for (const auto& r : results) {
            write_file(dir / archive_filename(r.archive.period_label()), archive_to_json(r.archive, catalog));
            write_file(dir / selection_filename(r.selection.period), selection_to_json(r.selection, catalog));
            selections.push_back(r.selection);
            graphs.push_back(r.graph);
        }
        write_sankey_outputs(dir, selections, graphs);
    });
    print_summary(out, results, catalog);
    return 0;
}

int cmd_mine(const PipelineConfig& config, std::ostream& out) {
    in_stage("config", [&] { config.validate(); });
    const auto parts = in_stage("load", [&] { return load_periods(config); });
    const auto& catalog = parts.front().catalog();
    const auto archives = in_stage("mine", [&] { return mine_periods(parts, config); });
    in_stage("write", [&] {
        const auto dir = prepare_out_dir(config.out_dir);
        write_file(dir / kCatalogFilename, catalog_to_json(catalog));
        for (const auto& a : archives)
            write_file(dir / archive_filename(a.period_label()), archive_to_json(a, catalog));
    });
    for (std::size_t p = 0; p < archives.size(); ++p)
        out << archives[p].period_label() << ": " << parts[p].size() << " transactions, archive "
            << archives[p].size() << " rules\n";
    return 0;
}

int cmd_select(const PipelineConfig& config, const std::vector<std::string>& inputs, std::ostream& out) {
    in_stage("config", [&] { config.validate(); });
    if (!config.catalog_path)
        throw StageFailure("config", "select needs --catalog");
    const auto catalog = in_stage("load", [&] { return load_catalog_file(*config.catalog_path); });
    std::vector<RuleSelection> selections;
    for (const auto& path : inputs) {
        const auto archive = in_stage("load", [&] {
            return archive_from_json(read_file(path), catalog, label_from_filename(path, "archive-"));
        });
        selections.push_back(in_stage("select", [&] { return select(archive, config.selection, catalog); }));
    }
    in_stage("write", [&] {
        const auto dir = prepare_out_dir(config.out_dir);
        for (const auto& s : selections)
            write_file(dir / selection_filename(s.period), selection_to_json(s, catalog));
    });
    for (const auto& s : selections)
        out << s.period << ": " << s.chosen.size() << " rules selected (" << to_string(s.mode) << ")\n";
    return 0;
}

int cmd_sankey(const PipelineConfig& config, const std::vector<std::string>& inputs, std::ostream& out) {
    if (!config.catalog_path)
        throw StageFailure("config", "sankey needs --catalog");
    const auto catalog = in_stage("load", [&] { return load_catalog_file(*config.catalog_path); });
    std::vector<RuleSelection> selections;
    std::vector<SankeyGraph> graphs;
    for (const auto& path : inputs) {
        selections.push_back(in_stage("load", [&] { return selection_from_json(read_file(path), catalog); }));
        graphs.push_back(in_stage("sankey", [&] { return build_flow(selections.back(), catalog); }));
    }
    in_stage("write", [&] { write_sankey_outputs(prepare_out_dir(config.out_dir), selections, graphs); });
    out << "wrote " << graphs.size() << " sankey graph(s) and " << kReportFilename << "\n";
    return 0;
}

void add_data_options(CLI::App& cmd, PipelineConfig& c) {
    cmd.add_option("--input", c.input_path, "Transaction CSV")->required();
    cmd.add_option_function<std::string>("--catalog", [&c](const std::string& v) { c.catalog_path = v; },
                                         "Catalog JSON (feature -> attributes)");
    cmd.add_option("--periods", c.periods, "Number of equal-count periods")->capture_default_str();
    cmd.add_option("--boundaries", c.boundaries, "K-1 increasing timestamps (YYYY-MM-DD or integers)")
        ->delimiter(',');
}

void add_de_options(CLI::App& cmd, PipelineConfig& c) {
    cmd.add_option("--np", c.de.NP, "Population size")->capture_default_str();
    cmd.add_option("--f", c.de.F, "Scale factor")->capture_default_str();
    cmd.add_option("--cr", c.de.CR, "Crossover rate")->capture_default_str();
    cmd.add_option("--max-evals", c.de.max_evals, "Fitness evaluations per run")->capture_default_str();
    cmd.add_option("--alpha", c.de.weights.alpha, "Confidence weight")->capture_default_str();
    cmd.add_option("--beta", c.de.weights.beta, "Support weight")->capture_default_str();
    cmd.add_option("--runs", c.n_runs, "Independent runs per period")->capture_default_str();
    cmd.add_option("--seed", c.de.seed, "Base seed")->capture_default_str();
}

void add_select_options(CLI::App& cmd, PipelineConfig& c) {
    cmd.add_option("--smin", c.selection.s_min, "Minimum support")->capture_default_str();
    cmd.add_option("--cmin", c.selection.c_min, "Minimum confidence")->capture_default_str();
    cmd.add_option("--map-size", c.selection.M, "Rules per diagram (M)")->capture_default_str();
    cmd.add_option("--top-n", c.selection.n_tilde, "Best rules considered")->capture_default_str();
    cmd.add_option_function<std::string>(
           "--mode",
           [&c](const std::string& v) {
               const auto m = parse_selection_mode(v);
               if (!m)
                   throw CLI::ValidationError("--mode", "expected auto, exact or dp");
               c.selection.mode = *m;
           },
           "auto, exact or dp")
        ->default_str("auto");
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Mine association rules per time period with differential evolution and export Sankey flows"};
    app.set_config("--config", "", "Key-value config file; command-line flags take precedence");
    app.require_subcommand(1);

    PipelineConfig config;
    std::vector<std::string> inputs;

    auto* pipeline = app.add_subcommand("pipeline", "Load, partition, mine, select and export");
    add_data_options(*pipeline, config);
    add_de_options(*pipeline, config);
    add_select_options(*pipeline, config);
    pipeline->add_option("--out", config.out_dir, "Output directory")->capture_default_str();

    auto* mine_cmd = app.add_subcommand("mine", "Write catalog.json and one rule archive per period");
    add_data_options(*mine_cmd, config);
    add_de_options(*mine_cmd, config);
    mine_cmd->add_option("--out", config.out_dir, "Output directory")->capture_default_str();

    auto* select_cmd = app.add_subcommand("select", "Select the most similar rules from archive files");
    select_cmd->add_option("--input", inputs, "Archive JSON files")->required();
    select_cmd->add_option_function<std::string>(
                  "--catalog", [&config](const std::string& v) { config.catalog_path = v; }, "Catalog JSON")
        ->required();
    add_select_options(*select_cmd, config);
    select_cmd->add_option("--out", config.out_dir, "Output directory")->capture_default_str();

    auto* sankey_cmd = app.add_subcommand("sankey", "Write Sankey JSON per selection and an HTML report");
    sankey_cmd->add_option("--input", inputs, "Selection JSON files")->required();
    sankey_cmd->add_option_function<std::string>(
                  "--catalog", [&config](const std::string& v) { config.catalog_path = v; }, "Catalog JSON")
        ->required();
    sankey_cmd->add_option("--out", config.out_dir, "Output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (pipeline->parsed())
            return cmd_pipeline(config, out);
        if (mine_cmd->parsed())
            return cmd_mine(config, out);
        if (select_cmd->parsed())
            return cmd_select(config, inputs, out);
        return cmd_sankey(config, inputs, out);
    } catch (const StageFailure& e) {
        err << "error in stage " << e.what() << "\n";
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
    }
    return 1;
}

} // namespace sankarm
