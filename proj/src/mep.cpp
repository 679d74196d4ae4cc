#include <msp/mep.hpp>

#include <algorithm>
#include <stdexcept>

namespace msp
{

std::optional<std::string> check(const MepChromosome &chrom, const PrimitiveSet &prims)
{
    if (chrom.genes.empty()) {
        return "chromosome has no genes";
    }
    for (std::size_t i = 0; i < chrom.genes.size(); ++i) {
        const auto &g = chrom.genes[i];
        const auto label = "gene " + std::to_string(i + 1);
        if (!g.is_function) {
            if (g.terminal >= prims.num_terminals()) {
                return label + ": terminal index out of range";
            }
            continue;
        }
        if (i == 0) {
            return std::string("the first gene must be a terminal");
        }
        if (g.arg1 >= i || g.arg2 >= i) {
            return label + ": arguments must point at earlier genes";
        }
        bool known = false;
        for (auto op : prims.functions) {
            known = known || op == g.op;
        }
        if (!known) {
            return label + ": operator not in the function set";
        }
    }
    return std::nullopt;
}

MepGene mep_random_gene(std::size_t position, const PrimitiveSet &prims, RandomSource &rng)
{
    if (position > 0 && rng.bernoulli(mep_function_probability)) {
        const auto op = prims.functions[rng.index(prims.num_functions())];
        const auto a1 = static_cast<std::uint32_t>(rng.index(position));
        const auto a2 = static_cast<std::uint32_t>(rng.index(position));
        return MepGene::make_function(op, a1, a2);
    }
    return MepGene::make_terminal(static_cast<std::uint32_t>(rng.index(prims.num_terminals())));
}

MepChromosome mep_random(std::size_t length, const PrimitiveSet &prims, RandomSource &rng)
{
    if (length == 0) {
        throw std::invalid_argument("MEP chromosome length must be at least 1");
    }
    MepChromosome c;
    c.genes.reserve(length);
    for (std::size_t i = 0; i < length; ++i) {
        c.genes.push_back(mep_random_gene(i, prims, rng));
    }
    return c;
}

MepEvalTable mep_decode(const MepChromosome &chrom, const FitnessCaseSet &cases)
{
    MepEvalTable table;
    table.rows.resize(chrom.genes.size());
    for (std::size_t i = 0; i < chrom.genes.size(); ++i) {
        const auto &g = chrom.genes[i];
        auto &row = table.rows[i];
        if (g.is_function) {
            apply_vector(g.op, table.rows[g.arg1], table.rows[g.arg2], row);
        } else {
            row.values = cases.input_column(g.terminal);
            row.valid = true;
        }
    }
    return table;
}

MepFitness mep_fitness(const MepEvalTable &table, const FitnessCaseSet &cases, FitnessMode mode)
{
    const auto targets = cases.targets();
    if (mode == FitnessMode::single) {
        const auto last = table.rows.size() - 1;
        return {sum_abs_error(table.rows[last], targets), last};
    }
    MepFitness best{sum_abs_error(table.rows[0], targets), 0};
    for (std::size_t i = 1; i < table.rows.size(); ++i) {
        const auto f = sum_abs_error(table.rows[i], targets);
        if (f < best.fitness) {
            best = {f, i};
        }
    }
    return best;
}

MepFitness mep_fitness(const MepChromosome &chrom, const FitnessCaseSet &cases, FitnessMode mode)
{
    return mep_fitness(mep_decode(chrom, cases), cases, mode);
}

std::pair<MepChromosome, MepChromosome> mep_crossover_mask(const MepChromosome &p1, const MepChromosome &p2,
                                                           const std::vector<bool> &take_first)
{
    if (p1.length() != p2.length()) {
        throw std::invalid_argument("MEP crossover needs parents of equal length");
    }
    if (take_first.size() != p1.length()) {
        throw std::invalid_argument("crossover mask length differs from chromosome length");
    }
    std::pair<MepChromosome, MepChromosome> out{p1, p2};
    for (std::size_t i = 0; i < p1.length(); ++i) {
        if (!take_first[i]) {
            std::swap(out.first.genes[i], out.second.genes[i]);
        }
    }
    return out;
}

std::pair<MepChromosome, MepChromosome> mep_crossover_uniform(const MepChromosome &p1, const MepChromosome &p2,
                                                              RandomSource &rng)
{
    if (p1.length() != p2.length()) {
        throw std::invalid_argument("MEP crossover needs parents of equal length");
    }
    std::vector<bool> mask(p1.length());
    for (std::size_t i = 0; i < mask.size(); ++i) {
        mask[i] = rng.bernoulli(0.5);
    }
    return mep_crossover_mask(p1, p2, mask);
}

MepChromosome mep_apply(MepChromosome chrom, const std::vector<MepEdit> &edits, const PrimitiveSet &prims)
{
    for (const auto &e : edits) {
        if (e.position >= chrom.length()) {
            throw std::invalid_argument("MEP edit position out of range");
        }
        chrom.genes[e.position] = e.gene;
    }
    if (auto err = check(chrom, prims)) {
        throw std::invalid_argument("MEP edit breaks the chromosome: " + *err);
    }
    return chrom;
}

MepChromosome mep_mutate(const MepChromosome &chrom, std::size_t mutations, const PrimitiveSet &prims,
                         RandomSource &rng)
{
    MepChromosome out = chrom;
    for (std::size_t m = 0; m < mutations; ++m) {
        const auto pos = rng.index(out.length());
        out.genes[pos] = mep_random_gene(pos, prims, rng);
    }
    return out;
}

namespace
{

constexpr std::size_t max_rendered_chars = 1 << 16;

} // namespace

std::string mep_expression(const MepChromosome &chrom, std::size_t gene, const PrimitiveSet &prims)
{
    if (gene >= chrom.length()) {
        throw std::out_of_range("MEP gene index out of range");
    }
    // Shared sub-expressions make the text grow exponentially with depth, so
    // measure before building.
    std::vector<std::size_t> size(gene + 1);
    for (std::size_t i = 0; i <= gene; ++i) {
        const auto &g = chrom.genes[i];
        if (!g.is_function) {
            size[i] = prims.terminals[g.terminal].size();
            continue;
        }
        auto wrapped = [&](std::uint32_t a) { return size[a] + (chrom.genes[a].is_function ? 2 : 0); };
        size[i] = std::min(max_rendered_chars + 1, wrapped(g.arg1) + wrapped(g.arg2) + 1);
    }
    if (size[gene] > max_rendered_chars) {
        return "<expression longer than " + std::to_string(max_rendered_chars) + " characters>";
    }

    std::vector<bool> used(gene + 1, false);
    used[gene] = true;
    for (std::size_t i = gene + 1; i-- > 0;) {
        if (used[i] && chrom.genes[i].is_function) {
            used[chrom.genes[i].arg1] = true;
            used[chrom.genes[i].arg2] = true;
        }
    }

    std::vector<std::string> text(gene + 1);
    for (std::size_t i = 0; i <= gene; ++i) {
        const auto &g = chrom.genes[i];
        if (!used[i]) {
            continue;
        }
        if (!g.is_function) {
            text[i] = prims.terminals[g.terminal];
            continue;
        }
        auto operand = [&](std::uint32_t a) {
            return chrom.genes[a].is_function ? "(" + text[a] + ")" : text[a];
        };
        text[i] = operand(g.arg1) + op_symbol(g.op) + operand(g.arg2);
    }
    return text[gene];
}

std::string mep_dump(const MepChromosome &chrom, const PrimitiveSet &prims)
{
    std::string out;
    for (std::size_t i = 0; i < chrom.length(); ++i) {
        const auto &g = chrom.genes[i];
        out += std::to_string(i + 1) + ": ";
        if (g.is_function) {
            out += op_symbol(g.op);
            out += " " + std::to_string(g.arg1 + 1) + ", " + std::to_string(g.arg2 + 1);
        } else {
            out += prims.terminals.at(g.terminal);
        }
        out += '\n';
    }
    return out;
}

} // namespace msp
