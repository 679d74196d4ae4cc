#pragma once

// Evolution loops. Both loops are written once against the Technique concept
// and instantiated for MEP, LGP and IFGP:
//
//  * steady state (MEP, IFGP): binary-tournament parents, crossover with
//    probability p_c, mutation of both offspring, and the better offspring
//    replaces the worst member only if strictly better;
//  * tournament of four (LGP): the two best of four distinct members breed and
//    their offspring overwrite the two worst unconditionally.
//
// A generation is population_size / 2 mating events (at least one). The
// best individual ever evaluated is tracked outside the population.

#include <msp/core.hpp>
#include <msp/ifgp.hpp>
#include <msp/lgp.hpp>
#include <msp/mep.hpp>

#include <algorithm>
#include <array>
#include <concepts>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace msp
{

enum class TechniqueId { mep, lgp, ifgp };

std::string_view to_string(TechniqueId t) noexcept;
TechniqueId parse_technique(std::string_view name);

// Display name of a technique/mode pair: MEP/SEP, MS-LGP/SS-LGP, IFGP/SS-IFGP.
std::string variant_name(TechniqueId t, FitnessMode mode);

inline constexpr std::size_t default_generations = 51;
inline constexpr double default_crossover_probability = 0.9;
inline constexpr std::size_t default_mutations = 2;

struct EvolutionConfig {
    TechniqueId technique = TechniqueId::mep;
    FitnessMode mode = FitnessMode::multi;
    std::size_t population_size = 50;
    std::size_t generations = default_generations;
    double crossover_probability = default_crossover_probability;
    std::size_t mutations = default_mutations;
    // Genes (MEP), instructions (LGP) or symbols (IFGP).
    std::size_t length = 20;
};

// Throws std::invalid_argument describing the first problem found.
void validate(const EvolutionConfig &cfg);

std::size_t events_per_generation(std::size_t population_size) noexcept;

struct RunResult {
    // Best-ever fitness after each generation.
    std::vector<double> best_per_generation;
    double best_fitness = Fitness::infinity();
    bool success = false;
    std::uint64_t evaluations = 0;
    std::uint64_t seed = 0;
    std::string best_expression;
};

template <typename T>
concept Technique = requires(const T &t, const typename T::Genome &g, RandomSource &rng) {
    typename T::Genome;
    { t.random(rng) } -> std::same_as<typename T::Genome>;
    { t.crossover(g, g, rng) } -> std::same_as<std::pair<typename T::Genome, typename T::Genome>>;
    { t.mutate(g, rng) } -> std::same_as<typename T::Genome>;
    { t.evaluate(g) } -> std::same_as<Fitness>;
    { t.describe(g) } -> std::convertible_to<std::string>;
};

struct LoopParams {
    std::size_t population_size = 50;
    std::size_t generations = default_generations;
    double crossover_probability = default_crossover_probability;
};

// Two uniform picks with replacement; the fitter wins, ties go to the first.
std::size_t binary_tournament(std::span<const Fitness> fitness, RandomSource &rng);

template <Technique T>
struct Population {
    std::vector<typename T::Genome> members;
    std::vector<Fitness> fitness;
};

namespace detail
{

template <Technique T>
class Evolution
{
public:
    using Genome = typename T::Genome;

    Evolution(const T &tech, const LoopParams &params, RandomSource &rng) : m_tech(tech), m_params(params), m_rng(rng) {}

    void initialize(std::vector<Genome> initial)
    {
        if (initial.empty()) {
            initial.reserve(m_params.population_size);
            for (std::size_t i = 0; i < m_params.population_size; ++i) {
                initial.push_back(m_tech.random(m_rng));
            }
        }
        m_pop.members = std::move(initial);
        m_pop.fitness.clear();
        for (const auto &g : m_pop.members) {
            m_pop.fitness.push_back(evaluate(g));
        }
    }

    Fitness evaluate(const Genome &g)
    {
        const auto f = m_tech.evaluate(g);
        ++m_evaluations;
        if (!m_has_best || f < m_best_fitness) {
            m_best = g;
            m_best_fitness = f;
            m_has_best = true;
        }
        return f;
    }

    std::pair<Genome, Genome> breed(const Genome &a, const Genome &b)
    {
        auto kids = m_rng.bernoulli(m_params.crossover_probability) ? m_tech.crossover(a, b, m_rng)
                                                                     : std::pair<Genome, Genome>{a, b};
        kids.first = m_tech.mutate(kids.first, m_rng);
        kids.second = m_tech.mutate(kids.second, m_rng);
        return kids;
    }

    void steady_state_event()
    {
        const auto p1 = binary_tournament(m_pop.fitness, m_rng);
        const auto p2 = binary_tournament(m_pop.fitness, m_rng);
        auto [c1, c2] = breed(m_pop.members[p1], m_pop.members[p2]);
        const auto f1 = evaluate(c1);
        const auto f2 = evaluate(c2);
        const bool first = !(f2 < f1);
        const auto worst = static_cast<std::size_t>(
            std::max_element(m_pop.fitness.begin(), m_pop.fitness.end()) - m_pop.fitness.begin());
        const auto &best_kid_fitness = first ? f1 : f2;
        if (best_kid_fitness < m_pop.fitness[worst]) {
            m_pop.members[worst] = first ? std::move(c1) : std::move(c2);
            m_pop.fitness[worst] = best_kid_fitness;
        }
    }

    void tournament_event()
    {
        const auto n = m_pop.members.size();
        std::array<std::size_t, 4> pick{};
        for (std::size_t k = 0; k < 4; ++k) {
            std::size_t idx = 0;
            do {
                idx = m_rng.index(n);
            } while (std::find(pick.begin(), pick.begin() + k, idx) != pick.begin() + k);
            pick[k] = idx;
        }
        std::stable_sort(pick.begin(), pick.end(),
                         [&](std::size_t a, std::size_t b) { return m_pop.fitness[a] < m_pop.fitness[b]; });
        auto [c1, c2] = breed(m_pop.members[pick[0]], m_pop.members[pick[1]]);
        const auto f1 = evaluate(c1);
        const auto f2 = evaluate(c2);
        m_pop.members[pick[2]] = std::move(c1);
        m_pop.fitness[pick[2]] = f1;
        m_pop.members[pick[3]] = std::move(c2);
        m_pop.fitness[pick[3]] = f2;
    }

    template <typename Event>
    RunResult run(Event event)
    {
        RunResult result;
        result.seed = m_rng.seed();
        const auto events = events_per_generation(m_pop.members.size());
        for (std::size_t gen = 0; gen < m_params.generations; ++gen) {
            for (std::size_t e = 0; e < events; ++e) {
                event();
            }
            result.best_per_generation.push_back(m_best_fitness.value());
        }
        result.best_fitness = m_best_fitness.value();
        result.success = m_best_fitness < Fitness{success_threshold};
        result.evaluations = m_evaluations;
        result.best_expression = m_tech.describe(m_best);
        return result;
    }

    const Population<T> &population() const noexcept { return m_pop; }

private:
    const T &m_tech;
    LoopParams m_params;
    RandomSource &m_rng;
    Population<T> m_pop;
    Genome m_best{};
    Fitness m_best_fitness = Fitness::worst();
    bool m_has_best = false;
    std::uint64_t m_evaluations = 0;
};

} // namespace detail

// `initial`, when given, replaces the random initial population.
template <Technique T>
RunResult evolve_steady_state(const T &tech, const LoopParams &params, RandomSource &rng,
                              std::vector<typename T::Genome> initial = {})
{
    if (params.population_size == 0 && initial.empty()) {
        throw std::invalid_argument("population size must be positive");
    }
    detail::Evolution<T> evo(tech, params, rng);
    evo.initialize(std::move(initial));
    return evo.run([&] { evo.steady_state_event(); });
}

template <Technique T>
RunResult evolve_tournament(const T &tech, const LoopParams &params, RandomSource &rng,
                            std::vector<typename T::Genome> initial = {})
{
    const auto size = initial.empty() ? params.population_size : initial.size();
    if (size < 4) {
        throw std::invalid_argument("the four-member tournament needs a population of at least 4");
    }
    detail::Evolution<T> evo(tech, params, rng);
    evo.initialize(std::move(initial));
    return evo.run([&] { evo.tournament_event(); });
}

// Technique adapters over a fixed fitness-case set. They hold references, so
// the primitives and cases must outlive them.

struct MepTechnique {
    using Genome = MepChromosome;
    const FitnessCaseSet &cases;
    const PrimitiveSet &prims;
    std::size_t length;
    std::size_t mutations;
    FitnessMode mode;

    Genome random(RandomSource &rng) const { return mep_random(length, prims, rng); }
    std::pair<Genome, Genome> crossover(const Genome &a, const Genome &b, RandomSource &rng) const
    {
        return mep_crossover_uniform(a, b, rng);
    }
    Genome mutate(const Genome &g, RandomSource &rng) const { return mep_mutate(g, mutations, prims, rng); }
    Fitness evaluate(const Genome &g) const { return mep_fitness(g, cases, mode).fitness; }
    std::string describe(const Genome &g) const;
};

struct LgpTechnique {
    using Genome = LgpProgram;
    const FitnessCaseSet &cases;
    const PrimitiveSet &prims;
    LgpShape shape;
    std::size_t length;
    std::size_t mutations;
    FitnessMode mode;

    Genome random(RandomSource &rng) const { return lgp_random(length, shape, prims, rng); }
    std::pair<Genome, Genome> crossover(const Genome &a, const Genome &b, RandomSource &rng) const
    {
        return lgp_crossover_uniform(a, b, rng);
    }
    Genome mutate(const Genome &g, RandomSource &rng) const { return lgp_mutate(g, mutations, prims, rng); }
    Fitness evaluate(const Genome &g) const { return lgp_fitness(g, cases, mode).fitness; }
    std::string describe(const Genome &g) const;
};

struct IfgpTechnique {
    using Genome = IfgpChromosome;
    const FitnessCaseSet &cases;
    const PrimitiveSet &prims;
    std::size_t length;
    std::size_t mutations;
    FitnessMode mode;

    Genome random(RandomSource &rng) const { return ifgp_random(length, prims, rng); }
    std::pair<Genome, Genome> crossover(const Genome &a, const Genome &b, RandomSource &rng) const
    {
        return ifgp_crossover_two_point(a, b, rng);
    }
    Genome mutate(const Genome &g, RandomSource &rng) const { return ifgp_mutate(g, mutations, prims, rng); }
    Fitness evaluate(const Genome &g) const { return ifgp_fitness(g, cases, prims, mode).fitness; }
    std::string describe(const Genome &g) const;
};

// Terminal names for a problem with `num_inputs` inputs: "x" or x1..xk.
PrimitiveSet problem_primitives(std::size_t num_inputs);

// MEP or IFGP. Throws std::invalid_argument for LGP or an invalid config.
RunResult evolve_steady_state(const EvolutionConfig &cfg, const FitnessCaseSet &problem, RandomSource &rng);
// LGP only; population must be at least 4.
RunResult evolve_lgp_tournament(const EvolutionConfig &cfg, const FitnessCaseSet &problem, RandomSource &rng);
// Dispatches on cfg.technique.
RunResult run_evolution(const EvolutionConfig &cfg, const FitnessCaseSet &problem, RandomSource &rng);

} // namespace msp
