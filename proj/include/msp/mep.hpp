#pragma once

// Multi Expression Programming. A chromosome is a fixed-length list of genes;
// a gene is a terminal or a binary function whose arguments point at earlier
// genes. Every gene encodes an expression, and one top-down pass computes all
// of them.

#include <msp/core.hpp>

#include <optional>
#include <string>
#include <vector>

namespace msp
{

struct MepGene {
    bool is_function = false;
    // Terminal index for terminals, ignored for functions.
    std::uint32_t terminal = 0;
    Op op = Op::add;
    // 0-based indices of earlier genes.
    std::uint32_t arg1 = 0;
    std::uint32_t arg2 = 0;

    static MepGene make_terminal(std::uint32_t t) noexcept { return {false, t, Op::add, 0, 0}; }
    static MepGene make_function(Op op, std::uint32_t a1, std::uint32_t a2) noexcept { return {true, 0, op, a1, a2}; }

    bool operator==(const MepGene &) const = default;
};

struct MepChromosome {
    std::vector<MepGene> genes;

    std::size_t length() const noexcept { return genes.size(); }
    bool operator==(const MepChromosome &) const = default;
};

// Reason the chromosome is malformed, or nullopt.
std::optional<std::string> check(const MepChromosome &chrom, const PrimitiveSet &prims);

// Function genes are drawn with this probability when a position is sampled.
inline constexpr double mep_function_probability = 0.5;

// A random gene legal at `position`.
MepGene mep_random_gene(std::size_t position, const PrimitiveSet &prims, RandomSource &rng);

// Throws std::invalid_argument for length 0.
MepChromosome mep_random(std::size_t length, const PrimitiveSet &prims, RandomSource &rng);

// rows[i] holds the value of expression i over every fitness case.
struct MepEvalTable {
    std::vector<ValueVector> rows;
};

// Terminal t reads input column t. One pass, L gene evaluations.
MepEvalTable mep_decode(const MepChromosome &chrom, const FitnessCaseSet &cases);

struct MepFitness {
    Fitness fitness;
    std::size_t gene = 0;
};

// multi: best expression over all genes; single: the last gene only.
MepFitness mep_fitness(const MepChromosome &chrom, const FitnessCaseSet &cases, FitnessMode mode);
MepFitness mep_fitness(const MepEvalTable &table, const FitnessCaseSet &cases, FitnessMode mode);

// Offspring 1 takes gene i from p1 where take_first[i] is set, otherwise from
// p2; offspring 2 gets the complement. Throws on length mismatch.
std::pair<MepChromosome, MepChromosome> mep_crossover_mask(const MepChromosome &p1, const MepChromosome &p2,
                                                           const std::vector<bool> &take_first);
std::pair<MepChromosome, MepChromosome> mep_crossover_uniform(const MepChromosome &p1, const MepChromosome &p2,
                                                              RandomSource &rng);

struct MepEdit {
    std::size_t position = 0;
    MepGene gene;
};

// Replaces genes in order. Throws if an edit would break the chromosome invariants.
MepChromosome mep_apply(MepChromosome chrom, const std::vector<MepEdit> &edits, const PrimitiveSet &prims);

// Resamples `mutations` uniformly chosen positions (with replacement).
MepChromosome mep_mutate(const MepChromosome &chrom, std::size_t mutations, const PrimitiveSet &prims,
                         RandomSource &rng);

// Infix text of expression `gene`, e.g. "(a+b)*(c+d)".
std::string mep_expression(const MepChromosome &chrom, std::size_t gene, const PrimitiveSet &prims);

// One gene per line, 1-based labels: "1: a", "3: + 1, 2".
std::string mep_dump(const MepChromosome &chrom, const PrimitiveSet &prims);

} // namespace msp
