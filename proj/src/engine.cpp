#include <msp/engine.hpp>

namespace msp
{

std::string_view to_string(TechniqueId t) noexcept
{
    switch (t) {
        case TechniqueId::mep:
            return "mep";
        case TechniqueId::lgp:
            return "lgp";
        case TechniqueId::ifgp:
            return "ifgp";
    }
    return "?";
}

TechniqueId parse_technique(std::string_view name)
{
    for (auto t : {TechniqueId::mep, TechniqueId::lgp, TechniqueId::ifgp}) {
        if (name == to_string(t)) {
            return t;
        }
    }
    throw std::invalid_argument("unknown technique '" + std::string(name) + "'");
}

std::string variant_name(TechniqueId t, FitnessMode mode)
{
    const bool multi = mode == FitnessMode::multi;
    switch (t) {
        case TechniqueId::mep:
            return multi ? "MEP" : "SEP";
        case TechniqueId::lgp:
            return multi ? "MS-LGP" : "SS-LGP";
        case TechniqueId::ifgp:
            return multi ? "IFGP" : "SS-IFGP";
    }
    return "?";
}

void validate(const EvolutionConfig &cfg)
{
    if (cfg.population_size == 0) {
        throw std::invalid_argument("population size must be positive");
    }
    if (cfg.technique == TechniqueId::lgp && cfg.population_size < 4) {
        throw std::invalid_argument("LGP needs a population of at least 4");
    }
    if (cfg.generations == 0) {
        throw std::invalid_argument("generations must be positive");
    }
    if (!(cfg.crossover_probability >= 0.0 && cfg.crossover_probability <= 1.0)) {
        throw std::invalid_argument("crossover probability must lie in [0, 1]");
    }
    const std::size_t min_length = cfg.technique == TechniqueId::ifgp ? 2 : 1;
    if (cfg.length < min_length) {
        throw std::invalid_argument("chromosome length too small for " + std::string(to_string(cfg.technique)));
    }
}

std::size_t events_per_generation(std::size_t population_size) noexcept
{
    return std::max<std::size_t>(1, population_size / 2);
}

std::size_t binary_tournament(std::span<const Fitness> fitness, RandomSource &rng)
{
    const auto a = rng.index(fitness.size());
    const auto b = rng.index(fitness.size());
    return fitness[b] < fitness[a] ? b : a;
}

std::string MepTechnique::describe(const Genome &g) const
{
    const auto best = mep_fitness(g, cases, mode);
    return mep_expression(g, best.gene, prims);
}

std::string LgpTechnique::describe(const Genome &g) const
{
    const auto best = lgp_fitness(g, cases, mode);
    return lgp_expression(g, best.record, prims.terminals);
}

std::string IfgpTechnique::describe(const Genome &g) const
{
    const auto expr = ifgp_decode(g, prims);
    const auto best = ifgp_fitness(expr, cases, mode);
    return render_node(expr, best.node, prims);
}

PrimitiveSet problem_primitives(std::size_t num_inputs)
{
    std::vector<std::string> names;
    if (num_inputs == 1) {
        names.emplace_back("x");
    } else {
        for (std::size_t v = 0; v < num_inputs; ++v) {
            names.push_back("x" + std::to_string(v + 1));
        }
    }
    return PrimitiveSet::arithmetic(std::move(names));
}

namespace
{

LoopParams loop_params(const EvolutionConfig &cfg)
{
    return {cfg.population_size, cfg.generations, cfg.crossover_probability};
}

} // namespace

RunResult evolve_steady_state(const EvolutionConfig &cfg, const FitnessCaseSet &problem, RandomSource &rng)
{
    validate(cfg);
    const auto prims = problem_primitives(problem.num_inputs());
    switch (cfg.technique) {
        case TechniqueId::mep: {
            const MepTechnique tech{problem, prims, cfg.length, cfg.mutations, cfg.mode};
            return evolve_steady_state(tech, loop_params(cfg), rng);
        }
        case TechniqueId::ifgp: {
            const IfgpTechnique tech{problem, prims, cfg.length, cfg.mutations, cfg.mode};
            return evolve_steady_state(tech, loop_params(cfg), rng);
        }
        case TechniqueId::lgp:
            break;
    }
    throw std::invalid_argument("the steady-state loop runs MEP and IFGP; LGP uses the tournament loop");
}

RunResult evolve_lgp_tournament(const EvolutionConfig &cfg, const FitnessCaseSet &problem, RandomSource &rng)
{
    if (cfg.technique != TechniqueId::lgp) {
        throw std::invalid_argument("the tournament loop runs LGP only");
    }
    validate(cfg);
    const auto prims = problem_primitives(problem.num_inputs());
    const LgpTechnique tech{problem, prims, LgpShape::for_inputs(problem.num_inputs()), cfg.length, cfg.mutations,
                            cfg.mode};
    return evolve_tournament(tech, loop_params(cfg), rng);
}

RunResult run_evolution(const EvolutionConfig &cfg, const FitnessCaseSet &problem, RandomSource &rng)
{
    return cfg.technique == TechniqueId::lgp ? evolve_lgp_tournament(cfg, problem, rng)
                                             : evolve_steady_state(cfg, problem, rng);
}

} // namespace msp
