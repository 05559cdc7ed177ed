#include "doctest.h"

#include "sankarm/errors.hpp"
#include "support/cli_harness.hpp"

#include <fstream>

using namespace sankarm;
using namespace sankarm::testing;

namespace {

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream(path, std::ios::binary) << text;
}

} // namespace

TEST_CASE("derived seeds") {
    CHECK(derived_seed(42, 0, 0) == 42);
    CHECK(derived_seed(42, 0, 24) == 66);
    CHECK(derived_seed(42, 3, 1) == 30043);
}

TEST_CASE("config defaults and validation") {
    PipelineConfig c;
    CHECK(c.periods == 4);
    CHECK(c.de.F == 0.5);
    CHECK(c.de.CR == 0.9);
    CHECK(c.de.NP == 100);
    CHECK(c.de.max_evals == 10000);
    CHECK(c.de.seed == 42);
    CHECK(c.selection.M == 4);
    CHECK(c.selection.n_tilde == 100);
    CHECK(c.n_runs == 25);
    CHECK(c.de.weights.alpha == 1.0);
    CHECK(c.de.weights.beta == 1.0);
    CHECK(c.selection.s_min == 0.0);
    CHECK(c.selection.c_min == 0.0);
    CHECK_NOTHROW(c.validate());

    auto bad = c;
    bad.selection.s_min = 1.5;
    CHECK_THROWS_AS(bad.validate(), ArgumentError);
    bad = c;
    bad.n_runs = 0;
    CHECK_THROWS_AS(bad.validate(), ArgumentError);
    bad = c;
    bad.boundaries = {"2015-01-01", "2014-01-01"};
    CHECK_THROWS_AS(bad.validate(), ArgumentError);
    bad.boundaries = {"soon"};
    CHECK_THROWS_AS(bad.validate(), ArgumentError);
    bad = c;
    bad.boundaries = {"2015-01-01", "2016-01-01"};
    CHECK(std::get<TimeBoundaries>(bad.partition_spec()).boundaries.size() == 2);
}

TEST_CASE("pipeline on the toy fixture writes every artifact") {
    ScratchDir out("pipeline-toy");
    const auto r = run(concat({"pipeline", "--input", data_path("toy.csv"), "--periods", "2", "--out", out.str()},
                              small_de_flags()));
    REQUIRE_MESSAGE(r.status == 0, r.err);
    const auto tree = read_tree(out.str());
    std::vector<std::string> names;
    for (const auto& [name, bytes] : tree)
        names.push_back(name);
    CHECK(names == std::vector<std::string>{"archive-period-1.json", "archive-period-2.json", "catalog.json",
                                            "report.html", "sankey-period-1.json", "sankey-period-2.json",
                                            "selection-period-1.json", "selection-period-2.json"});
    CHECK(r.out.find("Part") != std::string::npos);
    CHECK(r.out.find("Rule nr.") != std::string::npos);
    CHECK(r.out.find("period-2: 2 transactions") != std::string::npos);
}

TEST_CASE("pipeline is deterministic and equals the chained stages") {
    ScratchDir a("pipeline-a"), b("pipeline-b"), chained("pipeline-chained");
    const auto args = concat({"pipeline", "--input", data_path("toy.csv"), "--periods", "2"}, small_de_flags());
    REQUIRE(run(concat(args, {"--out", a.str()})).status == 0);
    REQUIRE(run(concat(args, {"--out", b.str()})).status == 0);
    const auto tree = read_tree(a.str());
    CHECK(tree == read_tree(b.str()));

    REQUIRE(run(concat({"mine", "--input", data_path("toy.csv"), "--periods", "2", "--out", chained.str()},
                       small_de_flags()))
                .status == 0);
    REQUIRE(run({"select", "--catalog", chained.file("catalog.json"), "--input",
                 chained.file("archive-period-1.json"), chained.file("archive-period-2.json"), "--out", chained.str()})
                .status == 0);
    REQUIRE(run({"sankey", "--catalog", chained.file("catalog.json"), "--input",
                 chained.file("selection-period-1.json"), chained.file("selection-period-2.json"), "--out",
                 chained.str()})
                .status == 0);
    CHECK(read_tree(chained.str()) == tree);
}

TEST_CASE("planted rule appears in the summary of every period") {
    ScratchDir out("pipeline-planted");
    const auto r = run({"pipeline", "--input", data_path("planted.csv"), "--periods", "2", "--np", "50",
                        "--max-evals", "3000", "--runs", "2", "--top-n", "4", "--out", out.str()});
    REQUIRE_MESSAGE(r.status == 0, r.err);
    std::size_t hits = 0;
    std::istringstream lines(r.out);
    for (std::string line; std::getline(lines, line);)
        if (line.find("A_a1 => B_b1") != std::string::npos || line.find("B_b1 => A_a1") != std::string::npos)
            hits += line.rfind("1 ", 0) == 0 ? 1 : (line.rfind("2 ", 0) == 0 ? 100 : 0);
    CHECK(hits % 100 >= 1);
    CHECK(hits / 100 >= 1);
}

TEST_CASE("select stage on a hand-written archive") {
    ScratchDir out("select-hand");
    write_text(out.file("archive-p.json"), R"([
  {"rule": "CALORIES_SMALL & DURATION_SHORT => ASCENT_LOW", "support": 0.9, "confidence": 0.9, "fitness": 0.9},
  {"rule": "CALORIES_SMALL => ASCENT_LOW", "support": 0.8, "confidence": 0.8, "fitness": 0.8},
  {"rule": "DISTANCE_SHORT & HR_HIGH => ASCENT_LOW", "support": 0.7, "confidence": 0.7, "fitness": 0.7}
]
)");
    const auto r = run({"select", "--catalog", data_path("catalog_rides.json"), "--input", out.file("archive-p.json"),
                        "--map-size", "2", "--out", out.str()});
    REQUIRE_MESSAGE(r.status == 0, r.err);
    const auto sel = selection_from_json(slurp(out.file("selection-p.json")), load_catalog_file(data_path("catalog_rides.json")));
    CHECK(sel.period == "p");
    CHECK(sel.mode == SelectionMode::Exact);
    REQUIRE(sel.chosen.size() == 2);
    CHECK(sel.chosen[0].fitness == 0.9);
    CHECK(sel.chosen[1].fitness == 0.8);
    CHECK(sel.objective == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("sankey stage on a one-rule selection") {
    ScratchDir out("sankey-hand");
    write_text(out.file("selection-period-1.json"), R"({
  "period": "period-1",
  "rules": ["CALORIES_SMALL => ASCENT_LOW"],
  "objective": 0,
  "total_fitness": 0.7262,
  "mode": "exact",
  "details": [{"rule": "CALORIES_SMALL => ASCENT_LOW", "support": 0.6, "confidence": 0.85, "fitness": 0.7262}]
}
)");
    const auto r = run({"sankey", "--catalog", data_path("catalog_rides.json"), "--input",
                        out.file("selection-period-1.json"), "--out", out.str()});
    REQUIRE_MESSAGE(r.status == 0, r.err);
    CHECK(slurp(out.file("sankey-period-1.json")) ==
          "{\"nodes\":[{\"name\":\"CALORIES_SMALL\"},{\"name\":\"ASCENT_LOW\"}],"
          "\"links\":[{\"source\":0,\"target\":1,\"value\":0.7262}]}");
    CHECK(slurp(out.file("report.html")).find("Time period 1") != std::string::npos);
}

TEST_CASE("config file supplies values and flags override them") {
    ScratchDir out("config-file");
    write_text(out.file("run.ini"), "[pipeline]\ninput = \"" + data_path("toy.csv") +
                                       "\"\nperiods = 3\nnp = 20\nmax-evals = 100\nruns = 1\n");
    const auto r = run({"--config", out.file("run.ini"), "pipeline", "--periods", "2", "--out", out.str()});
    REQUIRE_MESSAGE(r.status == 0, r.err);
    CHECK(read_tree(out.str()).count("archive-period-2.json") == 1);
    CHECK(read_tree(out.str()).count("archive-period-3.json") == 0);
}

TEST_CASE("errors name the failing stage") {
    ScratchDir out("errors");
    auto r = run({"pipeline", "--input", out.file("missing.csv"), "--out", out.str()});
    CHECK(r.status != 0);
    CHECK(r.err.find("error in stage load") != std::string::npos);

    r = run(concat({"pipeline", "--input", data_path("toy.csv"), "--smin", "2", "--out", out.str()}, small_de_flags()));
    CHECK(r.status != 0);
    CHECK(r.err.find("error in stage config") != std::string::npos);

    r = run(concat({"pipeline", "--input", data_path("toy.csv"), "--np", "2", "--out", out.str()}, {}));
    CHECK(r.status != 0);
    CHECK(r.err.find("stage config") != std::string::npos);

    write_text(out.file("archive-bad.json"), "{\"not\": \"an array\"}");
    r = run({"select", "--catalog", data_path("catalog_rides.json"), "--input", out.file("archive-bad.json"), "--out",
             out.str()});
    CHECK(r.status != 0);
    CHECK(r.err.find("error in stage load") != std::string::npos);

    write_text(out.file("selection-bad.json"), "{\"period\": 3}");
    r = run({"sankey", "--catalog", data_path("catalog_rides.json"), "--input", out.file("selection-bad.json"),
             "--out", out.str()});
    CHECK(r.status != 0);
    CHECK(r.err.find("error in stage load") != std::string::npos);

    r = run({"pipeline"});
    CHECK(r.status != 0);
    r = run({"pipeline", "--input", data_path("toy.csv"), "--mode", "greedy"});
    CHECK(r.status != 0);
    CHECK(run({}).status != 0);
}
