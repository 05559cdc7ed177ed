#include "doctest.h"

#include "sankarm/de_miner.hpp"
#include "support/oracles.hpp"

#include <set>

using namespace sankarm;
using namespace sankarm::testing;

namespace {

FeatureCatalog two_by_two() { return FeatureCatalog({{"A", {"a1", "a2"}}, {"B", {"b1", "b2"}}}); }

Genotype vec(std::initializer_list<double> v) {
    Genotype g(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v)
        g(i++) = x;
    return g;
}

DEParams small_params(std::size_t np, std::size_t evals, std::uint64_t seed) {
    DEParams p;
    p.NP = np;
    p.max_evals = evals;
    p.seed = seed;
    return p;
}

} // namespace

TEST_CASE("parameter validation") {
    DEParams p;
    CHECK_NOTHROW(p.validate());
    p.F = 0.05;
    CHECK_THROWS_AS(p.validate(), ArgumentError);
    p = {};
    p.CR = 1.5;
    CHECK_THROWS_AS(p.validate(), ArgumentError);
    p = {};
    p.NP = 3;
    CHECK_THROWS_AS(p.validate(), ArgumentError);
    p = {};
    p.max_evals = 50;
    CHECK_THROWS_AS(p.validate(), ArgumentError);
    p = {};
    p.weights = {0, 0};
    CHECK_THROWS_AS(p.validate(), ArgumentError);
}

TEST_CASE("population initialization") {
    const auto params = small_params(4, 4, 7);
    Random rng(params.seed);
    const auto pop = init_population(params, 2, rng);
    CHECK(pop.rows() == 5);
    CHECK(pop.cols() == 4);
    CHECK((pop.array() >= 0.0).all());
    CHECK((pop.array() < 1.0).all());

    Random again(params.seed);
    CHECK(init_population(params, 2, again) == pop);

    Random one(1), two(2);
    const auto p1 = init_population(params, 2, one);
    const auto p2 = init_population(params, 2, two);
    CHECK(p1 != p2);
    // First std::mt19937_64 output for the seed, top 53 bits scaled by 2^-53.
    CHECK(p1(0, 0) == 0.13387664401253263);
    CHECK(p2(0, 0) == 0.90360402619399427);

    auto bad = params;
    bad.NP = 3;
    Random r(0);
    CHECK_THROWS_AS(init_population(bad, 2, r), ArgumentError);
}

TEST_CASE("rand/1 mutation arithmetic") {
    const auto base = vec({0.2, 0.4});
    const auto a = vec({0.6, 0.8});
    CHECK(differential_mutation(base, a, a, 0.5) == base);
    const auto u = differential_mutation(base, a, vec({0.2, 0.4}), 0.5);
    CHECK(u(0) == doctest::Approx(0.4));
    CHECK(u(1) == doctest::Approx(0.6));
    const auto clamped = differential_mutation(vec({0.9, 0.1}), vec({0.8, 0.0}), vec({0.2, 0.6}), 0.5);
    CHECK(clamped(0) == 1.0);
    CHECK(clamped(1) == 0.0);
    // Works on expressions and single precision too.
    const Eigen::Vector2f f = differential_mutation(Eigen::Vector2f(0.5f, 0.5f), Eigen::Vector2f::Ones() * 0.75f,
                                                    Eigen::Vector2f::Constant(0.25f), 0.5f);
    CHECK(f(0) == doctest::Approx(0.75f));
}

TEST_CASE("donor sampling") {
    Random rng(3);
    for (int i = 0; i < 500; ++i) {
        const std::size_t target = static_cast<std::size_t>(i % 4);
        const auto d = sample_donors(4, target, rng);
        const std::set<std::size_t> all{d.r0, d.r1, d.r2, target};
        CHECK(all.size() == 4);
        CHECK(d.r0 < 4);
        CHECK(d.r1 < 4);
        CHECK(d.r2 < 4);
    }
    CHECK_THROWS_AS(sample_donors(3, 0, rng), PreconditionError);
}

TEST_CASE("mutate_rand1 on identical donors returns the base") {
    Population pop(3, 4);
    pop.colwise() = Eigen::Vector3d(0.1, 0.5, 0.9);
    Random rng(1);
    CHECK(mutate_rand1(pop, 0, 0.5, rng) == Eigen::Vector3d(0.1, 0.5, 0.9));
    CHECK_THROWS_AS(mutate_rand1(Population(3, 3), 0, 0.5, rng), PreconditionError);
}

TEST_CASE("binomial crossover") {
    const Genotype target = Genotype::Zero(5);
    const Genotype mutant = Genotype::Ones(5);
    Random rng(9);
    CHECK(crossover_bin(target, mutant, 1.0, rng) == mutant);
    for (int i = 0; i < 20; ++i) {
        const auto t = crossover_bin(target, mutant, 0.0, rng);
        CHECK(t.sum() == 1.0);
    }
    Random pinned(1);
    const auto mixed = crossover_bin(target, mutant, 0.9, pinned);
    CHECK(mixed == vec({1, 1, 1, 1, 0}));
    CHECK_THROWS_AS(crossover_bin(target, Genotype::Ones(4), 0.5, rng), ArgumentError);
}

TEST_CASE("decode: hand-traced genotypes") {
    const auto cat = two_by_two();
    const auto r = decode(vec({0.9, 0.2, 0.5, 0.7, 0.4}), cat);
    REQUIRE(r);
    CHECK(*r == AssociationRule({{0, 1}}, {{1, 0}}));
    CHECK(format_rule(*r, cat) == "A_a2 => B_b1");

    CHECK_FALSE(decode(vec({0.2, 0.2, 0.3, 0.7, 0.4}), cat));

    const auto reversed = decode(vec({0.9, 0.8, 0.5, 0.1, 0.4}), cat);
    REQUIRE(reversed);
    CHECK(format_rule(*reversed, cat) == "B_b1 => A_a2");
}

TEST_CASE("decode: boundaries and clamping") {
    const auto cat = two_by_two();
    // g = 1.0 selects the last attribute rather than overflowing.
    const auto top = decode(vec({1.0, 0.0, 1.0, 0.5, 1.0}), cat);
    REQUIRE(top);
    CHECK(format_rule(*top, cat) == "A_a2 => B_b2");
    // Equal ordering components fall back to feature index order.
    const auto tie = decode(vec({0.5, 0.3, 0.5, 0.3, 0.0}), cat);
    REQUIRE(tie);
    CHECK(format_rule(*tie, cat) == "A_a1 => B_b1");
    // One present feature is invalid.
    CHECK_FALSE(decode(vec({0.9, 0.1, 0.1, 0.2, 0.5}), cat));
    CHECK_THROWS_AS(decode(vec({0.5, 0.5, 0.5}), cat), PreconditionError);

    // Cut point clamps to the present attributes: 4 features, cut 3 but only 2 present.
    const FeatureCatalog four({{"A", {"a"}}, {"B", {"b"}}, {"C", {"c"}}, {"D", {"d"}}});
    const auto clamped = decode(vec({0.9, 0.1, 0.9, 0.2, 0.0, 0.3, 0.0, 0.4, 0.99}), four);
    REQUIRE(clamped);
    CHECK(format_rule(*clamped, four) == "A_a => B_b");
    const auto cut2 = decode(vec({0.9, 0.1, 0.9, 0.2, 0.9, 0.3, 0.9, 0.4, 0.5}), four);
    REQUIRE(cut2);
    CHECK(format_rule(*cut2, four) == "A_a & B_b => C_c & D_d");
}

TEST_CASE("decode is total on random genotypes") {
    std::mt19937 gen(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const auto cat = random_catalog(gen, 5, 4);
        Genotype g(static_cast<Eigen::Index>(genotype_length(cat.size())));
        for (Eigen::Index i = 0; i < g.size(); ++i)
            g(i) = u(gen);
        const auto r = decode(g, cat);
        if (r)
            CHECK(r->valid_for(cat));
    }
}

TEST_CASE("evaluate") {
    const auto db = toy_db();
    DEParams params;
    RuleArchive archive("toy");
    CHECK(evaluate(vec({0.1, 0.5, 0.1, 0.5, 0.5}), db, params, archive) == 0.0);
    CHECK(archive.empty());
    // A_a1 => B_b1
    CHECK(evaluate(vec({0.5, 0.1, 0.5, 0.9, 0.5}), db, params, archive) == doctest::Approx(7.0 / 12.0));
    CHECK(evaluate(vec({0.4, 0.2, 0.6, 0.8, 0.1}), db, params, archive) == doctest::Approx(7.0 / 12.0));
    CHECK(archive.size() == 1);
}

TEST_CASE("one-to-one selection") {
    CHECK(select_one_to_one(0.5, 0.7));
    CHECK(select_one_to_one(0.5, 0.5));
    CHECK_FALSE(select_one_to_one(0.7, 0.5));
}

TEST_CASE("mining with a budget of one population keeps only the initial rules") {
    const auto db = planted_db();
    const auto params = small_params(20, 20, 5);
    const auto archive = mine(db, params);

    Random rng(params.seed);
    const auto pop = init_population(params, db.feature_count(), rng);
    std::set<RuleKey> expected;
    for (Eigen::Index i = 0; i < pop.cols(); ++i)
        if (const auto r = decode(pop.col(i), db.catalog()))
            expected.insert(r->key());
    std::set<RuleKey> got;
    for (const auto& [k, v] : archive.entries())
        got.insert(k);
    CHECK(got == expected);
}

TEST_CASE("mining invariants") {
    const auto db = planted_db();
    const auto params = small_params(30, 1000, 13);
    std::vector<double> previous;
    std::size_t last_evals = 0;
    bool elitist = true, bounded = true;
    const auto archive = mine(db, params, [&](const GenerationView& v) {
        if (!previous.empty())
            for (std::size_t i = 0; i < previous.size(); ++i)
                elitist = elitist && v.fitness[i] >= previous[i];
        previous.assign(v.fitness.begin(), v.fitness.end());
        bounded = bounded && (v.population.array() >= 0.0).all() && (v.population.array() <= 1.0).all();
        last_evals = v.evaluations;
    });
    CHECK(elitist);
    CHECK(bounded);
    CHECK(last_evals == 1000);

    double best = 0.0;
    for (const auto& [key, rule] : archive.entries()) {
        const auto fresh = score(rule.rule, db, params.weights);
        CHECK(rule.fitness == fresh.fitness);
        CHECK(rule.support == fresh.support);
        best = std::max(best, rule.fitness);
    }
    CHECK(archive.best_fitness() == best);
    CHECK(archive.period_label() == "period-1");

    CHECK(mine(db, params) == archive);
}

TEST_CASE("budget that is not a multiple of NP stops mid-generation") {
    const auto db = toy_db();
    std::size_t evals = 0;
    mine(db, small_params(10, 25, 1), [&](const GenerationView& v) { evals = v.evaluations; });
    CHECK(evals == 25);
}

TEST_CASE("mining rejects an empty database") {
    const auto db = toy_db();
    const TransactionDB empty(db.catalog(), CodeMatrix(0, 2), std::nullopt, "empty");
    CHECK_THROWS_AS(mine(empty, small_params(4, 4, 1)), PreconditionError);
}

TEST_CASE("planted rule is found") {
    const auto db = planted_db();
    const AssociationRule planted({{0, 0}}, {{1, 0}});
    const AssociationRule inverted({{1, 0}}, {{0, 0}});
    const auto archive = mine(db, small_params(50, 3000, 42));
    CHECK((archive.contains(planted) || archive.contains(inverted)));
}

TEST_CASE("batch runs") {
    const auto db = planted_db();
    const auto params = small_params(20, 400, 0);
    auto single = params;
    single.seed = 100;
    CHECK(run_batch(db, params, 1, 100) == mine(db, single));
    const auto batch = run_batch(db, params, 5, 100);
    CHECK(batch == run_batch(db, params, 5, 100));
    for (std::uint64_t s = 100; s < 105; ++s) {
        auto p = params;
        p.seed = s;
        CHECK(batch.best_fitness() >= mine(db, p).best_fitness());
    }
    CHECK_THROWS_AS(run_batch(db, params, 0, 1), ArgumentError);
}
