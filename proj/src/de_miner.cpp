#include "sankarm/de_miner.hpp"

namespace sankarm {

void DEParams::validate() const {
    if (!(F >= 0.1 && F <= 1.0))
        throw ArgumentError("F must lie in [0.1, 1.0], got " + std::to_string(F));
    if (!(CR >= 0.0 && CR <= 1.0))
        throw ArgumentError("CR must lie in [0, 1], got " + std::to_string(CR));
    if (NP < 4)
        throw ArgumentError("NP must be at least 4, got " + std::to_string(NP));
    if (max_evals < NP)
        throw ArgumentError("max_evals (" + std::to_string(max_evals) + ") must be at least NP (" +
                            std::to_string(NP) + ")");
    if (!(weights.alpha >= 0.0) || !(weights.beta >= 0.0) || weights.alpha + weights.beta <= 0.0)
        throw ArgumentError("alpha and beta must be non-negative with a positive sum");
}

Population init_population(const DEParams& params, std::size_t feature_count, Random& rng) {
    if (params.NP < 4)
        throw ArgumentError("NP must be at least 4, got " + std::to_string(params.NP));
    if (feature_count < 2)
        throw ArgumentError("need at least two features");
    const auto rows = static_cast<Eigen::Index>(genotype_length(feature_count));
    Population pop(rows, static_cast<Eigen::Index>(params.NP));
    // Column by column so the stream maps to individuals in order.
    for (Eigen::Index c = 0; c < pop.cols(); ++c)
        for (Eigen::Index r = 0; r < rows; ++r)
            pop(r, c) = rng.uniform01();
    return pop;
}

double evaluate(const Genotype& genotype, const TransactionDB& db, const DEParams& params, RuleArchive& archive) {
    const auto rule = decode(genotype, db.catalog());
    if (!rule)
        return 0.0;
    const ScoredRule scored = score(*rule, db, params.weights);
    archive.offer(scored);
    return scored.fitness;
}

RuleArchive mine(const TransactionDB& db, const DEParams& params, const GenerationObserver& observer) {
    params.validate();
    if (db.size() == 0)
        throw PreconditionError("cannot mine an empty database '" + db.label() + "'");
    const std::size_t d = db.feature_count();
    const auto np = static_cast<Eigen::Index>(params.NP);

    Random rng(params.seed);
    RuleArchive archive(db.label());
    Population pop = init_population(params, d, rng);
    std::vector<double> fit(params.NP);
    std::size_t evals = 0;
    for (Eigen::Index i = 0; i < np; ++i) {
        fit[static_cast<std::size_t>(i)] = evaluate(pop.col(i), db, params, archive);
        ++evals;
    }
    std::size_t generation = 0;
    if (observer)
        observer({generation, evals, pop, fit});

    while (evals < params.max_evals) {
        // Trials for this generation all come from `pop`; survivors land in `next`.
        Population next = pop;
        std::vector<double> next_fit = fit;
        for (Eigen::Index i = 0; i < np && evals < params.max_evals; ++i) {
            const Genotype mutant = mutate_rand1(pop, static_cast<std::size_t>(i), params.F, rng);
            const Genotype trial = crossover_bin(pop.col(i), mutant, params.CR, rng);
            const double f = evaluate(trial, db, params, archive);
            ++evals;
            if (select_one_to_one(fit[static_cast<std::size_t>(i)], f)) {
                next.col(i) = trial;
                next_fit[static_cast<std::size_t>(i)] = f;
            }
        }
        pop = std::move(next);
        fit = std::move(next_fit);
        ++generation;
        if (observer)
            observer({generation, evals, pop, fit});
    }
    return archive;
}

RuleArchive run_batch(const TransactionDB& db, const DEParams& params, std::size_t n_runs, std::uint64_t base_seed) {
    if (n_runs < 1)
        throw ArgumentError("n_runs must be at least 1");
    std::optional<RuleArchive> best;
    for (std::size_t r = 0; r < n_runs; ++r) {
        DEParams run = params;
        run.seed = base_seed + r;
        RuleArchive archive = mine(db, run);
        if (!best || archive.best_fitness() > best->best_fitness())
            best = std::move(archive);
    }
    return std::move(*best);
}

} // namespace sankarm
