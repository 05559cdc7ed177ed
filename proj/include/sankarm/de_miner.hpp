#ifndef SANKARM_DE_MINER_HPP
#define SANKARM_DE_MINER_HPP

#include "sankarm/archive.hpp"
#include "sankarm/dataset.hpp"
#include "sankarm/errors.hpp"
#include "sankarm/random.hpp"
#include "sankarm/rule.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <span>

namespace sankarm {

/// Search vector in [0,1]^(2d+1): an (attribute, ordering) pair per feature,
/// then the cut point.
template <typename Scalar>
using GenotypeT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using Genotype = GenotypeT<double>;

/// One genotype per column.
template <typename Scalar>
using PopulationT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using Population = PopulationT<double>;

constexpr std::size_t genotype_length(std::size_t feature_count) { return 2 * feature_count + 1; }

struct DEParams {
    double F = 0.5;
    double CR = 0.9;
    std::size_t NP = 100;
    std::size_t max_evals = 10000;
    FitnessWeights weights{};
    std::uint64_t seed = 42;

    /// Throws ArgumentError for out-of-range values.
    void validate() const;
};

/// NP genotypes of length 2d+1 with components uniform in [0, 1).
Population init_population(const DEParams& params, std::size_t feature_count, Random& rng);

/// base + F * (a - b), clamped to [0, 1].
template <typename Base, typename A, typename B>
typename Base::PlainObject differential_mutation(const Eigen::MatrixBase<Base>& base, const Eigen::MatrixBase<A>& a,
                                                 const Eigen::MatrixBase<B>& b, typename Base::Scalar F) {
    using Scalar = typename Base::Scalar;
    return (base + F * (a - b)).cwiseMax(Scalar(0)).cwiseMin(Scalar(1));
}

struct DonorIndices {
    std::size_t r0, r1, r2;
};

/// Three mutually distinct indices in [0, np), all different from `target`.
inline DonorIndices sample_donors(std::size_t np, std::size_t target, Random& rng) {
    if (np < 4)
        throw PreconditionError("rand/1 mutation needs a population of at least 4");
    std::size_t r0, r1, r2;
    do
        r0 = rng.index(np);
    while (r0 == target);
    do
        r1 = rng.index(np);
    while (r1 == target || r1 == r0);
    do
        r2 = rng.index(np);
    while (r2 == target || r2 == r0 || r2 == r1);
    return {r0, r1, r2};
}

/// rand/1 mutant for population column `target`.
template <typename Derived>
GenotypeT<typename Derived::Scalar> mutate_rand1(const Eigen::MatrixBase<Derived>& population, std::size_t target,
                                                 typename Derived::Scalar F, Random& rng) {
    const auto d = sample_donors(static_cast<std::size_t>(population.cols()), target, rng);
    return differential_mutation(population.col(static_cast<Eigen::Index>(d.r0)),
                                 population.col(static_cast<Eigen::Index>(d.r1)),
                                 population.col(static_cast<Eigen::Index>(d.r2)), F);
}

/// Binomial crossover. Draws j_rand first, then one uniform per position in
/// order; position j takes the mutant when its draw is <= CR or j == j_rand.
template <typename T, typename M>
typename T::PlainObject crossover_bin(const Eigen::MatrixBase<T>& target, const Eigen::MatrixBase<M>& mutant,
                                      double CR, Random& rng) {
    if (target.size() != mutant.size())
        throw ArgumentError("crossover of genotypes with different lengths");
    const auto n = static_cast<std::size_t>(target.size());
    if (n == 0)
        throw ArgumentError("crossover of empty genotypes");
    typename T::PlainObject trial = target;
    const std::size_t j_rand = rng.index(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double r = rng.uniform01();
        if (r <= CR || j == j_rand)
            trial(static_cast<Eigen::Index>(j)) = mutant(static_cast<Eigen::Index>(j));
    }
    return trial;
}

/// Genotype to rule. Returns nullopt when fewer than two features are present.
///
/// Feature j's attribute code is floor(g[2j] * (|Feat_j| + 1)), capped at
/// |Feat_j|; code 0 leaves the feature out, code k picks attribute k-1.
/// Present features are ordered by ascending g[2j+1] (ties by feature index),
/// and the first Cp = floor(g[2d] * (d - 2)) + 1 of them form the antecedent,
/// with Cp clamped to [1, present - 1].
template <typename Derived>
std::optional<AssociationRule> decode(const Eigen::MatrixBase<Derived>& g, const FeatureCatalog& catalog) {
    const std::size_t d = catalog.size();
    if (static_cast<std::size_t>(g.size()) != genotype_length(d))
        throw PreconditionError("genotype length " + std::to_string(g.size()) + " does not match 2d+1 = " +
                                std::to_string(genotype_length(d)));
    auto at = [&](std::size_t i) { return static_cast<double>(g(static_cast<Eigen::Index>(i))); };

    std::vector<std::size_t> perm(d);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return at(2 * a + 1) < at(2 * b + 1); });

    std::vector<Item> present;
    for (std::size_t j : perm) {
        const std::size_t domain = catalog.domain_size(j);
        const double scaled = std::floor(std::clamp(at(2 * j), 0.0, 1.0) * static_cast<double>(domain + 1));
        const std::size_t code = std::min(static_cast<std::size_t>(scaled), domain);
        if (code > 0)
            present.push_back({j, code - 1});
    }
    const std::size_t p = present.size();
    if (p < 2)
        return std::nullopt;

    const double raw = std::floor(std::clamp(at(2 * d), 0.0, 1.0) * static_cast<double>(d - 2)) + 1.0;
    const std::size_t cut = std::clamp<std::size_t>(static_cast<std::size_t>(raw), 1, p - 1);
    std::vector<Item> ante(present.begin(), present.begin() + static_cast<std::ptrdiff_t>(cut));
    std::vector<Item> cons(present.begin() + static_cast<std::ptrdiff_t>(cut), present.end());
    return AssociationRule(std::move(ante), std::move(cons));
}

/// Fitness of a genotype; 0 for undecodable ones. Valid rules go to `archive`.
double evaluate(const Genotype& genotype, const TransactionDB& db, const DEParams& params, RuleArchive& archive);

/// Trial survives when it is at least as fit as the target (maximization).
constexpr bool select_one_to_one(double target_fitness, double trial_fitness) {
    return trial_fitness >= target_fitness;
}

/// Snapshot handed to a mining observer after initialization (generation 0)
/// and after every generation.
struct GenerationView {
    std::size_t generation;
    std::size_t evaluations;
    const Population& population;
    std::span<const double> fitness;
};

using GenerationObserver = std::function<void(const GenerationView&)>;

/// Generational rand/1/bin DE until params.max_evals evaluations.
RuleArchive mine(const TransactionDB& db, const DEParams& params, const GenerationObserver& observer = {});

/// Best (by best_fitness, earliest on ties) of `n_runs` runs seeded
/// base_seed + run index.
RuleArchive run_batch(const TransactionDB& db, const DEParams& params, std::size_t n_runs, std::uint64_t base_seed);

} // namespace sankarm

#endif // SANKARM_DE_MINER_HPP
