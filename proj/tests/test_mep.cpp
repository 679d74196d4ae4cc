#include <doctest.h>

#include "oracles.hpp"

#include <msp/mep.hpp>

#include <cmath>
#include <stdexcept>

using namespace msp;

namespace
{

using G = MepGene;

const PrimitiveSet abcd = PrimitiveSet::arithmetic({"a", "b", "c", "d"});

// 1: a  2: b  3: + 1, 2  4: c  5: d  6: + 4, 5  7: * 3, 6
MepChromosome sample_chromosome()
{
    return {{G::make_terminal(0), G::make_terminal(1), G::make_function(Op::add, 0, 1), G::make_terminal(2),
             G::make_terminal(3), G::make_function(Op::add, 3, 4), G::make_function(Op::mul, 2, 5)}};
}

FitnessCaseSet random_cases(std::size_t n, std::size_t inputs, RandomSource &rng)
{
    std::vector<FitnessCase> raw;
    for (std::size_t k = 0; k < n; ++k) {
        FitnessCase c;
        for (std::size_t v = 0; v < inputs; ++v) {
            c.inputs.push_back(rng.uniform(-10, 10));
        }
        c.target = rng.uniform(-50, 50);
        raw.push_back(std::move(c));
    }
    return FitnessCaseSet(std::move(raw));
}

bool close(double a, double b)
{
    return a == b || std::fabs(a - b) <= 1e-12 * std::max(std::fabs(a), std::fabs(b));
}

} // namespace

TEST_CASE("sample chromosome evaluates and renders")
{
    const FitnessCaseSet cases({{{1, 2, 3, 4}, 21}});
    const auto chrom = sample_chromosome();
    REQUIRE_FALSE(check(chrom, abcd));
    const auto table = mep_decode(chrom, cases);
    CHECK(table.rows[2].values[0] == 3.0);
    CHECK(table.rows[5].values[0] == 7.0);
    CHECK(table.rows[6].values[0] == 21.0);
    CHECK(mep_expression(chrom, 6, abcd) == "(a+b)*(c+d)");
    CHECK(mep_expression(chrom, 2, abcd) == "a+b");
    CHECK(mep_expression(chrom, 0, abcd) == "a");
    CHECK(mep_dump(chrom, abcd) == "1: a\n2: b\n3: + 1, 2\n4: c\n5: d\n6: + 4, 5\n7: * 3, 6\n");

    const auto f = mep_fitness(chrom, cases, FitnessMode::single);
    CHECK(f.fitness.value() == 0.0);
    CHECK(f.gene == 6);
}

TEST_CASE("multi fitness finds an interior gene")
{
    // Target a+b: only gene 3 is exact.
    const FitnessCaseSet cases({{{1, 2, 3, 4}, 3}, {{5, 1, 0, 2}, 6}});
    const auto chrom = sample_chromosome();
    const auto multi = mep_fitness(chrom, cases, FitnessMode::multi);
    CHECK(multi.fitness.value() == 0.0);
    CHECK(multi.gene == 2);
    const auto single = mep_fitness(chrom, cases, FitnessMode::single);
    CHECK(single.gene == 6);
    CHECK(single.fitness.value() == doctest::Approx(18.0 + 6.0));
}

TEST_CASE("uniform crossover under a fixed mask")
{
    // C1 = b, * 1,1, + 2,1, a, * 3,2, a, - 1,4 (1-based pointers)
    const MepChromosome c1{{G::make_terminal(1), G::make_function(Op::mul, 0, 0), G::make_function(Op::add, 1, 0),
                            G::make_terminal(0), G::make_function(Op::mul, 2, 1), G::make_terminal(0),
                            G::make_function(Op::sub, 0, 3)}};
    const auto c2 = sample_chromosome();
    REQUIRE_FALSE(check(c1, abcd));

    // O1 takes genes 1, 4, 6 from C2 and the rest from C1.
    const auto [o1, o2] = mep_crossover_mask(c2, c1, {true, false, false, true, false, true, false});
    CHECK(mep_dump(o1, abcd) == "1: a\n2: * 1, 1\n3: + 2, 1\n4: c\n5: * 3, 2\n6: + 4, 5\n7: - 1, 4\n");
    CHECK(mep_dump(o2, abcd) == "1: b\n2: b\n3: + 1, 2\n4: a\n5: d\n6: a\n7: * 3, 6\n");
    CHECK_FALSE(check(o1, abcd));
    CHECK_FALSE(check(o2, abcd));

    CHECK_THROWS_AS(mep_crossover_mask(c1, MepChromosome{{G::make_terminal(0)}}, {true}), std::invalid_argument);
}

TEST_CASE("mutation edits as listed")
{
    // C = a, * 1,1, b, * 2,2, b, + 3,5, a
    const MepChromosome c{{G::make_terminal(0), G::make_function(Op::mul, 0, 0), G::make_terminal(1),
                           G::make_function(Op::mul, 1, 1), G::make_terminal(1), G::make_function(Op::add, 2, 4),
                           G::make_terminal(0)}};
    const auto o = mep_apply(c, {{2, G::make_function(Op::add, 0, 1)}, {5, G::make_function(Op::add, 0, 4)}}, abcd);
    CHECK(mep_dump(o, abcd) == "1: a\n2: * 1, 1\n3: + 1, 2\n4: * 2, 2\n5: b\n6: + 1, 5\n7: a\n");

    CHECK_THROWS_AS(mep_apply(c, {{0, G::make_function(Op::add, 0, 0)}}, abcd), std::invalid_argument);
    CHECK_THROWS_AS(mep_apply(c, {{3, G::make_function(Op::add, 3, 0)}}, abcd), std::invalid_argument);
    CHECK_THROWS_AS(mep_apply(c, {{9, G::make_terminal(0)}}, abcd), std::invalid_argument);
}

TEST_CASE("decode table matches the recursive oracle")
{
    RandomSource rng(11);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto inputs = 1 + rng.index(4);
        std::vector<std::string> names;
        for (std::size_t v = 0; v < inputs; ++v) {
            names.push_back("t" + std::to_string(v));
        }
        const auto prims = PrimitiveSet::arithmetic(names);
        const auto cases = random_cases(5, inputs, rng);
        const auto chrom = mep_random(1 + rng.index(16), prims, rng);

        const auto table = mep_decode(chrom, cases);
        for (std::size_t i = 0; i < chrom.length(); ++i) {
            bool ok = true;
            for (std::size_t k = 0; k < cases.size(); ++k) {
                const auto ref = oracle::mep_gene(chrom, i, cases[k].inputs);
                ok = ok && ref.ok;
                if (ref.ok && table.rows[i].valid) {
                    REQUIRE(close(table.rows[i].values[k], ref.value));
                }
            }
            REQUIRE(table.rows[i].valid == ok);
        }
        const auto errors = oracle::mep_gene_errors(chrom, cases);
        REQUIRE(mep_fitness(chrom, cases, FitnessMode::multi).fitness.value() == oracle::min_of(errors));
        REQUIRE(mep_fitness(chrom, cases, FitnessMode::single).fitness.value() == errors.back());
    }
}

TEST_CASE("multi never worse than single; equal at length 1")
{
    RandomSource rng(12);
    const auto prims = PrimitiveSet::arithmetic({"x"});
    const auto cases = random_cases(10, 1, rng);
    for (int trial = 0; trial < 2000; ++trial) {
        const auto chrom = mep_random(1 + rng.index(30), prims, rng);
        const auto multi = mep_fitness(chrom, cases, FitnessMode::multi).fitness;
        const auto single = mep_fitness(chrom, cases, FitnessMode::single).fitness;
        REQUIRE(multi <= single);
        if (chrom.length() == 1) {
            REQUIRE(multi == single);
        }
    }
}

TEST_CASE("random, crossover and mutation keep chromosomes valid")
{
    RandomSource rng(13);
    const auto prims = PrimitiveSet::arithmetic({"x", "y"});
    for (int trial = 0; trial < 10000; ++trial) {
        const auto len = 1 + rng.index(25);
        const auto a = mep_random(len, prims, rng);
        const auto b = mep_random(len, prims, rng);
        REQUIRE_FALSE(check(a, prims));
        REQUIRE(a.length() == len);
        REQUIRE_FALSE(a.genes[0].is_function);
        const auto [c, d] = mep_crossover_uniform(a, b, rng);
        REQUIRE_FALSE(check(c, prims));
        REQUIRE_FALSE(check(d, prims));
        for (std::size_t i = 0; i < len; ++i) {
            // Complementary inheritance.
            const bool from_a = c.genes[i] == a.genes[i] && d.genes[i] == b.genes[i];
            const bool from_b = c.genes[i] == b.genes[i] && d.genes[i] == a.genes[i];
            REQUIRE((from_a || from_b));
        }
        const auto m = mep_mutate(a, rng.index(4), prims, rng);
        REQUIRE_FALSE(check(m, prims));
    }
}

TEST_CASE("mutation extremes")
{
    RandomSource rng(14);
    const auto prims = PrimitiveSet::arithmetic({"x"});
    const auto a = mep_random(10, prims, rng);
    CHECK(mep_mutate(a, 0, prims, rng) == a);
    const auto [c, d] = mep_crossover_uniform(a, a, rng);
    CHECK(c == a);
    CHECK(d == a);
    CHECK_THROWS_AS(mep_random(0, prims, rng), std::invalid_argument);
}

TEST_CASE("decoding costs one vector operation per function gene")
{
    RandomSource rng(15);
    const auto prims = PrimitiveSet::arithmetic({"x"});
    const auto cases = random_cases(20, 1, rng);
    for (int trial = 0; trial < 200; ++trial) {
        const auto chrom = mep_random(1 + rng.index(40), prims, rng);
        std::size_t functions = 0;
        for (const auto &g : chrom.genes) {
            functions += g.is_function ? 1 : 0;
        }
        reset_op_counter();
        mep_fitness(chrom, cases, FitnessMode::multi);
        const auto multi_ops = op_counter();
        reset_op_counter();
        mep_fitness(chrom, cases, FitnessMode::single);
        CHECK(op_counter() == multi_ops);
        CHECK(multi_ops == functions * cases.size());
    }
}

TEST_CASE("validator rejects malformed chromosomes")
{
    const auto prims = PrimitiveSet::arithmetic({"x"});
    CHECK(check(MepChromosome{}, prims));
    CHECK(check(MepChromosome{{G::make_function(Op::add, 0, 0)}}, prims));
    CHECK(check(MepChromosome{{G::make_terminal(1)}}, prims));
    CHECK(check(MepChromosome{{G::make_terminal(0), G::make_function(Op::add, 0, 1)}}, prims));
    CHECK_FALSE(check(MepChromosome{{G::make_terminal(0), G::make_function(Op::add, 0, 0)}}, prims));
}
