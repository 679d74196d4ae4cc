#include <msp/ifgp.hpp>

#include <stdexcept>
#include <unordered_set>

namespace msp
{

namespace
{

bool is_operand_end(TokenKind k) noexcept
{
    return k == TokenKind::variable || k == TokenKind::close;
}

class Parser
{
public:
    explicit Parser(const std::vector<Token> &tokens) : m_tokens(tokens) {}

    std::vector<ExprNode> run()
    {
        parse_sum();
        if (m_pos != m_tokens.size()) {
            fail("unexpected token");
        }
        return std::move(m_nodes);
    }

private:
    [[noreturn]] void fail(const char *what) const
    {
        throw std::invalid_argument(std::string("infix parse error at token ") + std::to_string(m_pos) + ": " + what);
    }

    const Token *peek() const { return m_pos < m_tokens.size() ? &m_tokens[m_pos] : nullptr; }

    std::uint32_t push_op(Op op, std::uint32_t l, std::uint32_t r)
    {
        ExprNode n;
        n.is_op = true;
        n.op = op;
        n.left = l;
        n.right = r;
        m_nodes.push_back(n);
        return static_cast<std::uint32_t>(m_nodes.size() - 1);
    }

    std::uint32_t parse_sum()
    {
        auto lhs = parse_product();
        while (const auto *t = peek()) {
            if (t->kind != TokenKind::op || (t->op != Op::add && t->op != Op::sub)) {
                break;
            }
            ++m_pos;
            const auto rhs = parse_product();
            lhs = push_op(t->op, lhs, rhs);
        }
        return lhs;
    }

    std::uint32_t parse_product()
    {
        auto lhs = parse_factor();
        while (const auto *t = peek()) {
            if (t->kind != TokenKind::op || (t->op != Op::mul && t->op != Op::div)) {
                break;
            }
            ++m_pos;
            const auto rhs = parse_factor();
            lhs = push_op(t->op, lhs, rhs);
        }
        return lhs;
    }

    std::uint32_t parse_factor()
    {
        const auto *t = peek();
        if (t == nullptr) {
            fail("expression ends early");
        }
        if (t->kind == TokenKind::variable) {
            ++m_pos;
            ExprNode n;
            n.variable = t->variable;
            m_nodes.push_back(n);
            return static_cast<std::uint32_t>(m_nodes.size() - 1);
        }
        if (t->kind != TokenKind::open) {
            fail("expected a variable or '('");
        }
        ++m_pos;
        const auto inner = parse_sum();
        const auto *close = peek();
        if (close == nullptr || close->kind != TokenKind::close) {
            fail("missing ')'");
        }
        ++m_pos;
        ++m_nodes[inner].parens;
        return inner;
    }

    const std::vector<Token> &m_tokens;
    std::size_t m_pos = 0;
    std::vector<ExprNode> m_nodes;
};

void emit_tokens(const InfixExpression &expr, std::size_t node, bool own_parens, std::vector<Token> &out)
{
    const auto &n = expr.nodes[node];
    const auto wrap = own_parens ? n.parens : 0u;
    for (std::uint32_t i = 0; i < wrap; ++i) {
        out.push_back({TokenKind::open, 0, Op::add});
    }
    if (n.is_op) {
        emit_tokens(expr, n.left, true, out);
        out.push_back({TokenKind::op, 0, n.op});
        emit_tokens(expr, n.right, true, out);
    } else {
        out.push_back({TokenKind::variable, n.variable, Op::add});
    }
    for (std::uint32_t i = 0; i < wrap; ++i) {
        out.push_back({TokenKind::close, 0, Op::add});
    }
}

std::vector<std::string> canonical_all(const InfixExpression &expr)
{
    std::vector<std::string> key(expr.nodes.size());
    for (std::size_t i = 0; i < expr.nodes.size(); ++i) {
        const auto &n = expr.nodes[i];
        if (n.is_op) {
            key[i] = std::string(1, op_symbol(n.op)) + "(" + key[n.left] + "," + key[n.right] + ")";
        } else {
            key[i] = "x" + std::to_string(n.variable);
        }
    }
    return key;
}

} // namespace

std::size_t ifgp_num_symbols(const PrimitiveSet &prims) noexcept
{
    return prims.num_terminals() + prims.num_functions() + 2;
}

std::optional<std::string> check(const IfgpChromosome &chrom, const PrimitiveSet &prims)
{
    if (chrom.length() < 2) {
        return "IFGP chromosomes need at least two genes";
    }
    const auto symbols = ifgp_num_symbols(prims);
    for (std::size_t i = 0; i < chrom.length(); ++i) {
        if (chrom.genes[i] >= symbols) {
            return "gene " + std::to_string(i) + " out of range";
        }
    }
    return std::nullopt;
}

IfgpChromosome ifgp_random(std::size_t length, const PrimitiveSet &prims, RandomSource &rng)
{
    if (length < 2) {
        throw std::invalid_argument("IFGP chromosome length must be at least 2");
    }
    const auto symbols = ifgp_num_symbols(prims);
    IfgpChromosome c;
    c.genes.resize(length);
    for (auto &g : c.genes) {
        g = static_cast<std::uint32_t>(rng.index(symbols));
    }
    return c;
}

std::optional<std::string> check_tokens(const std::vector<Token> &tokens, std::size_t num_variables)
{
    if (tokens.empty()) {
        return "empty expression";
    }
    std::size_t surplus = 0;
    bool expect_operand = true;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto &t = tokens[i];
        const auto where = "token " + std::to_string(i);
        switch (t.kind) {
            case TokenKind::variable:
                if (!expect_operand) {
                    return where + ": variable must follow an operator or '('";
                }
                if (t.variable >= num_variables) {
                    return where + ": unknown variable";
                }
                expect_operand = false;
                break;
            case TokenKind::open:
                if (!expect_operand) {
                    return where + ": '(' must follow an operator or '('";
                }
                ++surplus;
                break;
            case TokenKind::op:
                if (expect_operand) {
                    return where + ": operator must follow a variable or ')'";
                }
                expect_operand = true;
                break;
            case TokenKind::close:
                if (expect_operand) {
                    return where + ": ')' must follow a variable or ')'";
                }
                if (surplus == 0) {
                    return where + ": unmatched ')'";
                }
                --surplus;
                break;
        }
    }
    if (expect_operand) {
        return std::string("expression ends with an operator or '('");
    }
    if (surplus != 0) {
        return std::string("unbalanced parentheses");
    }
    return std::nullopt;
}

InfixExpression parse_tokens(std::vector<Token> tokens)
{
    InfixExpression expr;
    expr.nodes = Parser(tokens).run();
    expr.tokens = std::move(tokens);
    return expr;
}

InfixExpression ifgp_decode(const IfgpChromosome &chrom, const PrimitiveSet &prims)
{
    const auto num_vars = prims.num_terminals();
    std::vector<Token> tokens;
    tokens.reserve(2 * chrom.length());
    std::vector<Token> allowed;
    std::size_t surplus = 0;

    for (std::size_t i = 0; i + 1 < chrom.length(); ++i) {
        allowed.clear();
        const bool after_operand = !tokens.empty() && is_operand_end(tokens.back().kind);
        if (after_operand) {
            for (auto op : prims.functions) {
                allowed.push_back({TokenKind::op, 0, op});
            }
            if (surplus > 0) {
                allowed.push_back({TokenKind::close, 0, Op::add});
            }
        } else {
            for (std::size_t v = 0; v < num_vars; ++v) {
                allowed.push_back({TokenKind::variable, static_cast<std::uint32_t>(v), Op::add});
            }
            allowed.push_back({TokenKind::open, 0, Op::add});
        }
        const auto &pick = allowed[chrom.genes[i] % allowed.size()];
        if (pick.kind == TokenKind::open) {
            ++surplus;
        } else if (pick.kind == TokenKind::close) {
            --surplus;
        }
        tokens.push_back(pick);
    }

    if (tokens.empty() || !is_operand_end(tokens.back().kind)) {
        tokens.push_back({TokenKind::variable, static_cast<std::uint32_t>(chrom.genes.back() % num_vars), Op::add});
    }
    tokens.insert(tokens.end(), surplus, Token{TokenKind::close, 0, Op::add});
    return parse_tokens(std::move(tokens));
}

std::string render(const std::vector<Token> &tokens, const PrimitiveSet &prims)
{
    std::string out;
    for (const auto &t : tokens) {
        switch (t.kind) {
            case TokenKind::variable:
                out += prims.terminals.at(t.variable);
                break;
            case TokenKind::op:
                out += op_symbol(t.op);
                break;
            case TokenKind::open:
                out += '(';
                break;
            case TokenKind::close:
                out += ')';
                break;
        }
    }
    return out;
}

std::string render(const InfixExpression &expr, const PrimitiveSet &prims)
{
    return render(expr.tokens, prims);
}

std::string render_node(const InfixExpression &expr, std::size_t node, const PrimitiveSet &prims)
{
    std::vector<Token> tokens;
    emit_tokens(expr, node, false, tokens);
    return render(tokens, prims);
}

std::vector<Token> tree_tokens(const InfixExpression &expr)
{
    std::vector<Token> tokens;
    emit_tokens(expr, expr.root(), true, tokens);
    return tokens;
}

std::string canonical(const InfixExpression &expr, std::size_t node)
{
    return canonical_all(expr).at(node);
}

std::vector<std::size_t> ifgp_subexpressions(const InfixExpression &expr)
{
    const auto keys = canonical_all(expr);
    std::unordered_set<std::string> seen;
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        if (seen.insert(keys[i]).second) {
            out.push_back(i);
        }
    }
    return out;
}

std::vector<ValueVector> ifgp_evaluate(const InfixExpression &expr, const FitnessCaseSet &cases)
{
    std::vector<ValueVector> values(expr.nodes.size());
    for (std::size_t i = 0; i < expr.nodes.size(); ++i) {
        const auto &n = expr.nodes[i];
        if (n.is_op) {
            apply_vector(n.op, values[n.left], values[n.right], values[i]);
        } else {
            values[i].values = cases.input_column(n.variable);
        }
    }
    return values;
}

IfgpFitness ifgp_fitness(const InfixExpression &expr, const FitnessCaseSet &cases, FitnessMode mode)
{
    const auto values = ifgp_evaluate(expr, cases);
    const auto targets = cases.targets();
    if (mode == FitnessMode::single) {
        return {sum_abs_error(values[expr.root()], targets), expr.root()};
    }
    IfgpFitness best{sum_abs_error(values[0], targets), 0};
    for (std::size_t i = 1; i < values.size(); ++i) {
        const auto f = sum_abs_error(values[i], targets);
        if (f < best.fitness) {
            best = {f, i};
        }
    }
    return best;
}

IfgpFitness ifgp_fitness(const IfgpChromosome &chrom, const FitnessCaseSet &cases, const PrimitiveSet &prims,
                         FitnessMode mode)
{
    return ifgp_fitness(ifgp_decode(chrom, prims), cases, mode);
}

std::pair<IfgpChromosome, IfgpChromosome> ifgp_crossover_cuts(const IfgpChromosome &p1, const IfgpChromosome &p2,
                                                              std::size_t cut1, std::size_t cut2)
{
    if (p1.length() != p2.length()) {
        throw std::invalid_argument("IFGP crossover needs parents of equal length");
    }
    if (!(cut1 < cut2 && cut2 <= p1.length())) {
        throw std::invalid_argument("IFGP crossover cut points must satisfy cut1 < cut2 <= length");
    }
    std::pair<IfgpChromosome, IfgpChromosome> out{p1, p2};
    for (std::size_t i = cut1; i < cut2; ++i) {
        std::swap(out.first.genes[i], out.second.genes[i]);
    }
    return out;
}

std::pair<IfgpChromosome, IfgpChromosome> ifgp_crossover_two_point(const IfgpChromosome &p1,
                                                                   const IfgpChromosome &p2, RandomSource &rng)
{
    if (p1.length() != p2.length() || p1.length() < 2) {
        throw std::invalid_argument("IFGP crossover needs parents of equal length >= 2");
    }
    const auto cuts = p1.length() + 1;
    std::size_t a = 0, b = 0;
    do {
        a = rng.index(cuts);
        b = rng.index(cuts);
    } while (a == b);
    if (b < a) {
        std::swap(a, b);
    }
    return ifgp_crossover_cuts(p1, p2, a, b);
}

IfgpChromosome ifgp_mutate(const IfgpChromosome &chrom, std::size_t mutations, const PrimitiveSet &prims,
                           RandomSource &rng)
{
    const auto symbols = ifgp_num_symbols(prims);
    IfgpChromosome out = chrom;
    for (std::size_t m = 0; m < mutations; ++m) {
        const auto pos = rng.index(out.length());
        out.genes[pos] = static_cast<std::uint32_t>(rng.index(symbols));
    }
    return out;
}

} // namespace msp
