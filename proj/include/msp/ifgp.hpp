#pragma once

// Infix Form GP. A chromosome is a fixed-length string of integers. Reading
// left to right, each gene picks (modulo the number of choices) one of the
// symbols allowed after the previous symbol. The last gene feeds the repair
// step that makes the expression complete. Every sub-tree of the parsed
// expression is a candidate solution.

#include <msp/core.hpp>

#include <optional>
#include <string>
#include <vector>

namespace msp
{

struct IfgpChromosome {
    std::vector<std::uint32_t> genes;

    std::size_t length() const noexcept { return genes.size(); }
    bool operator==(const IfgpChromosome &) const = default;
};

// Variables, then the functions, then '(' and ')'.
std::size_t ifgp_num_symbols(const PrimitiveSet &prims) noexcept;

std::optional<std::string> check(const IfgpChromosome &chrom, const PrimitiveSet &prims);

// Throws std::invalid_argument for length < 2.
IfgpChromosome ifgp_random(std::size_t length, const PrimitiveSet &prims, RandomSource &rng);

enum class TokenKind : std::uint8_t { variable, op, open, close };

struct Token {
    TokenKind kind = TokenKind::variable;
    std::uint32_t variable = 0;
    Op op = Op::add;

    bool operator==(const Token &) const = default;
};

struct ExprNode {
    bool is_op = false;
    std::uint32_t variable = 0;
    Op op = Op::add;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    // Parenthesis pairs written directly around this sub-expression.
    std::uint32_t parens = 0;
};

struct InfixExpression {
    std::vector<Token> tokens;
    // Children precede their parents; the root is the last node.
    std::vector<ExprNode> nodes;

    std::size_t root() const noexcept { return nodes.size() - 1; }
};

// Category rules: a variable or ')' is followed by an operator or ')'; an
// operator or '(' (or the start) is followed by a variable or '('. ')' needs
// an unmatched '('. The expression ends with a variable or ')' and is balanced.
std::optional<std::string> check_tokens(const std::vector<Token> &tokens, std::size_t num_variables);

// Parses with the usual precedence (* and / over + and -), left associative.
// Throws std::invalid_argument on malformed input.
InfixExpression parse_tokens(std::vector<Token> tokens);

// Translates genes 0..L-2 then repairs with the last gene.
InfixExpression ifgp_decode(const IfgpChromosome &chrom, const PrimitiveSet &prims);

// Token text, e.g. "b/(a+a)".
std::string render(const std::vector<Token> &tokens, const PrimitiveSet &prims);
std::string render(const InfixExpression &expr, const PrimitiveSet &prims);
// The sub-expression rooted at `node`, without its own enclosing parentheses.
std::string render_node(const InfixExpression &expr, std::size_t node, const PrimitiveSet &prims);
// Tokens regenerated from the tree.
std::vector<Token> tree_tokens(const InfixExpression &expr);
// Structural key, e.g. "/(b,+(a,a))"; parentheses do not matter.
std::string canonical(const InfixExpression &expr, std::size_t node);

// Distinct sub-trees in post-order, first occurrence kept.
std::vector<std::size_t> ifgp_subexpressions(const InfixExpression &expr);

// values[i] for node i, each node evaluated exactly once.
std::vector<ValueVector> ifgp_evaluate(const InfixExpression &expr, const FitnessCaseSet &cases);

struct IfgpFitness {
    Fitness fitness;
    std::size_t node = 0;
};

// multi: best sub-tree; single: the whole expression.
IfgpFitness ifgp_fitness(const InfixExpression &expr, const FitnessCaseSet &cases, FitnessMode mode);
IfgpFitness ifgp_fitness(const IfgpChromosome &chrom, const FitnessCaseSet &cases, const PrimitiveSet &prims,
                         FitnessMode mode);

// Swaps genes in [cut1, cut2). Requires cut1 < cut2 <= L.
std::pair<IfgpChromosome, IfgpChromosome> ifgp_crossover_cuts(const IfgpChromosome &p1, const IfgpChromosome &p2,
                                                              std::size_t cut1, std::size_t cut2);
std::pair<IfgpChromosome, IfgpChromosome> ifgp_crossover_two_point(const IfgpChromosome &p1,
                                                                   const IfgpChromosome &p2, RandomSource &rng);

IfgpChromosome ifgp_mutate(const IfgpChromosome &chrom, std::size_t mutations, const PrimitiveSet &prims,
                           RandomSource &rng);

} // namespace msp
