#include <doctest.h>

#include <msp/engine.hpp>

#include <cmath>
#include <stdexcept>

using namespace msp;

namespace
{

// Genomes are their own fitness. Offspring are always worse than their
// parents, which makes replacement decisions observable.
struct WorseningToy {
    using Genome = double;
    double penalty = 100.0;

    Genome random(RandomSource &rng) const { return rng.uniform(10, 20); }
    std::pair<Genome, Genome> crossover(const Genome &a, const Genome &b, RandomSource &) const { return {a, b}; }
    Genome mutate(const Genome &g, RandomSource &) const { return g + penalty; }
    Fitness evaluate(const Genome &g) const { return Fitness{g}; }
    std::string describe(const Genome &g) const { return std::to_string(g); }
};

static_assert(Technique<WorseningToy>);
static_assert(Technique<MepTechnique>);
static_assert(Technique<LgpTechnique>);
static_assert(Technique<IfgpTechnique>);

EvolutionConfig config(TechniqueId t, FitnessMode m, std::size_t length)
{
    EvolutionConfig c;
    c.technique = t;
    c.mode = m;
    c.length = length;
    return c;
}

} // namespace

TEST_CASE("binary tournament favours the best at 7/16")
{
    const std::vector<Fitness> f{Fitness{1}, Fitness{2}, Fitness{3}, Fitness{4}};
    RandomSource rng(41);
    const int trials = 10000;
    int best = 0;
    for (int i = 0; i < trials; ++i) {
        best += binary_tournament(f, rng) == 0 ? 1 : 0;
    }
    CHECK(std::fabs(double(best) / trials - 7.0 / 16.0) <= 0.02);
}

TEST_CASE("steady state keeps worse offspring out")
{
    RandomSource rng(42);
    const WorseningToy toy;
    detail::Evolution<WorseningToy> evo(toy, {4, 3, 0.9}, rng);
    evo.initialize({1, 2, 3, 4});
    const auto result = evo.run([&] { evo.steady_state_event(); });
    CHECK(evo.population().members == std::vector<double>{1, 2, 3, 4});
    CHECK(result.best_fitness == 1.0);
    CHECK(result.evaluations == 4 + 2 * 2 * 3);
    CHECK_FALSE(result.success);
}

TEST_CASE("tournament replaces the two worst unconditionally")
{
    RandomSource rng(43);
    const WorseningToy toy;
    detail::Evolution<WorseningToy> evo(toy, {4, 1, 0.9}, rng);
    evo.initialize({1, 2, 3, 4});
    evo.tournament_event();
    const auto &m = evo.population().members;
    CHECK(m[0] == 1);
    CHECK(m[1] == 2);
    CHECK(m[2] == 101);
    CHECK(m[3] == 102);

    // Offspring worse than everything keep entering; the best-ever record stays put.
    RandomSource rng2(44);
    detail::Evolution<WorseningToy> evo2(toy, {4, 10, 0.9}, rng2);
    evo2.initialize({1, 2, 3, 4});
    const auto result = evo2.run([&] { evo2.tournament_event(); });
    CHECK(result.best_fitness == 1.0);
    CHECK(result.best_expression == std::to_string(1.0));
    CHECK(std::max_element(evo2.population().members.begin(), evo2.population().members.end())[0] > 100.0);
}

TEST_CASE("tournament needs four members")
{
    RandomSource rng(45);
    const WorseningToy toy;
    CHECK_THROWS_AS(evolve_tournament(toy, {3, 1, 0.9}, rng), std::invalid_argument);
    CHECK_NOTHROW(evolve_tournament(toy, {4, 1, 0.9}, rng));
}

TEST_CASE("a perfect initial individual succeeds at once")
{
    const auto prims = problem_primitives(1);
    std::vector<FitnessCase> raw;
    for (int k = 0; k < 20; ++k) {
        raw.push_back({{double(k)}, 2.0 * k});
    }
    const FitnessCaseSet cases(raw);
    const MepTechnique tech{cases, prims, 2, 2, FitnessMode::single};
    const MepChromosome perfect{{MepGene::make_terminal(0), MepGene::make_function(Op::add, 0, 0)}};
    RandomSource rng(46);
    std::vector<MepChromosome> init(10, perfect);
    const auto result = evolve_steady_state(tech, {10, 5, 0.9}, rng, init);
    CHECK(result.success);
    CHECK(result.best_per_generation.front() == 0.0);
    CHECK(result.best_expression == "x+x");
}

TEST_CASE("best-ever series never increases")
{
    for (auto t : {TechniqueId::mep, TechniqueId::lgp, TechniqueId::ifgp}) {
        for (std::uint64_t seed = 1; seed <= 34; ++seed) {
            RandomSource rng(seed);
            const auto problem = make_problem(all_problems[seed % 4], rng);
            auto cfg = config(t, seed % 2 ? FitnessMode::multi : FitnessMode::single, 12);
            cfg.population_size = 20;
            cfg.generations = 20;
            const auto r = run_evolution(cfg, problem, rng);
            REQUIRE(r.best_per_generation.size() == 20);
            for (std::size_t g = 1; g < r.best_per_generation.size(); ++g) {
                REQUIRE(r.best_per_generation[g] <= r.best_per_generation[g - 1]);
            }
            REQUIRE(r.best_fitness == r.best_per_generation.back());
            REQUIRE(r.success == (r.best_fitness < success_threshold));
        }
    }
}

TEST_CASE("runs are deterministic per seed")
{
    for (auto t : {TechniqueId::mep, TechniqueId::lgp, TechniqueId::ifgp}) {
        const auto cfg = config(t, FitnessMode::multi, 10);
        RandomSource a(7), b(7);
        const auto pa = make_problem(ProblemId::f1, a);
        const auto pb = make_problem(ProblemId::f1, b);
        const auto ra = run_evolution(cfg, pa, a);
        const auto rb = run_evolution(cfg, pb, b);
        CHECK(ra.best_per_generation == rb.best_per_generation);
        CHECK(ra.best_expression == rb.best_expression);
        CHECK(ra.seed == 7);
    }
}

TEST_CASE("evaluation accounting")
{
    for (auto t : {TechniqueId::mep, TechniqueId::lgp, TechniqueId::ifgp}) {
        const auto cfg = config(t, FitnessMode::single, 10);
        RandomSource rng(8);
        const auto problem = make_problem(ProblemId::f3, rng);
        const auto r = run_evolution(cfg, problem, rng);
        CHECK(r.evaluations == 50 + 2 * 25 * 51);
    }
    CHECK(events_per_generation(1) == 1);
    CHECK(events_per_generation(7) == 3);
}

TEST_CASE("invalid configurations are rejected")
{
    RandomSource rng(9);
    const auto problem = make_problem(ProblemId::f1, rng);
    auto cfg = config(TechniqueId::lgp, FitnessMode::multi, 10);
    cfg.population_size = 3;
    CHECK_THROWS_AS(run_evolution(cfg, problem, rng), std::invalid_argument);
    CHECK_THROWS_AS(evolve_steady_state(config(TechniqueId::lgp, FitnessMode::multi, 10), problem, rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(evolve_lgp_tournament(config(TechniqueId::mep, FitnessMode::multi, 10), problem, rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(run_evolution(config(TechniqueId::ifgp, FitnessMode::multi, 1), problem, rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(run_evolution(config(TechniqueId::mep, FitnessMode::multi, 0), problem, rng),
                    std::invalid_argument);
    cfg = config(TechniqueId::mep, FitnessMode::multi, 10);
    cfg.crossover_probability = 1.5;
    CHECK_THROWS_AS(run_evolution(cfg, problem, rng), std::invalid_argument);
    cfg.crossover_probability = 0.9;
    cfg.generations = 0;
    CHECK_THROWS_AS(run_evolution(cfg, problem, rng), std::invalid_argument);
    CHECK_THROWS_AS(parse_technique("gep"), std::invalid_argument);
    CHECK(variant_name(TechniqueId::lgp, FitnessMode::single) == "SS-LGP");
    CHECK(variant_name(TechniqueId::ifgp, FitnessMode::multi) == "IFGP");
}
