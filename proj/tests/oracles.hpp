#pragma once

// Reference evaluators written without the library's vectorized code paths:
// plain recursion for MEP, a scalar register machine for LGP and a tree walk
// for IFGP. Shared by the unit tests and the acceptance binary.

#include <msp/ifgp.hpp>
#include <msp/lgp.hpp>
#include <msp/mep.hpp>

#include <cmath>
#include <limits>
#include <vector>

namespace oracle
{

// A scalar value plus "nothing non-finite happened on the way here".
struct Scalar {
    double value = 0.0;
    bool ok = true;
};

inline double apply(msp::Op op, double a, double b)
{
    switch (op) {
        case msp::Op::add:
            return a + b;
        case msp::Op::sub:
            return a - b;
        case msp::Op::mul:
            return a * b;
        case msp::Op::div:
            return std::fabs(b) < 1e-12 ? 1.0 : a / b;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

inline Scalar combine(msp::Op op, Scalar a, Scalar b)
{
    const double v = apply(op, a.value, b.value);
    return {v, a.ok && b.ok && std::isfinite(v)};
}

// Error of one candidate given its per-case outputs.
inline double error(const std::vector<Scalar> &outputs, const msp::FitnessCaseSet &cases)
{
    double sum = 0.0;
    for (std::size_t k = 0; k < cases.size(); ++k) {
        if (!outputs[k].ok) {
            return std::numeric_limits<double>::infinity();
        }
        sum += std::fabs(outputs[k].value - cases[k].target);
    }
    return std::isnan(sum) ? std::numeric_limits<double>::infinity() : sum;
}

inline double min_of(const std::vector<double> &v)
{
    double best = std::numeric_limits<double>::infinity();
    for (double x : v) {
        if (x < best) {
            best = x;
        }
    }
    return best;
}

// ---- MEP ----------------------------------------------------------------

inline Scalar mep_gene(const msp::MepChromosome &c, std::size_t gene, const std::vector<double> &inputs)
{
    const auto &g = c.genes[gene];
    if (!g.is_function) {
        return {inputs[g.terminal], true};
    }
    return combine(g.op, mep_gene(c, g.arg1, inputs), mep_gene(c, g.arg2, inputs));
}

// Per-gene error, each gene evaluated from scratch by recursion.
inline std::vector<double> mep_gene_errors(const msp::MepChromosome &c, const msp::FitnessCaseSet &cases)
{
    std::vector<double> out;
    for (std::size_t i = 0; i < c.length(); ++i) {
        std::vector<Scalar> values;
        for (const auto &fc : cases.cases()) {
            values.push_back(mep_gene(c, i, fc.inputs));
        }
        out.push_back(error(values, cases));
    }
    return out;
}

// ---- LGP ----------------------------------------------------------------

// Runs the first `prefix` instructions on one case; returns the register file.
inline std::vector<Scalar> lgp_run(const msp::LgpProgram &p, std::size_t prefix, const std::vector<double> &inputs)
{
    std::vector<Scalar> reg(p.shape.num_registers);
    for (std::size_t r = 0; r < reg.size(); ++r) {
        reg[r] = {r < p.shape.num_inputs ? inputs[r] : 1.0, true};
    }
    auto read = [&](const msp::LgpOperand &o) {
        return o.is_constant ? Scalar{o.constant, true} : reg[o.reg];
    };
    for (std::size_t i = 0; i < prefix; ++i) {
        const auto &ins = p.instructions[i];
        reg[ins.dest] = combine(ins.op, read(ins.src1), read(ins.src2));
    }
    return reg;
}

// Error of the value written by instruction i, re-executing the prefix 0..i.
inline std::vector<double> lgp_prefix_errors(const msp::LgpProgram &p, const msp::FitnessCaseSet &cases)
{
    std::vector<double> out;
    for (std::size_t i = 0; i < p.length(); ++i) {
        std::vector<Scalar> values;
        for (const auto &fc : cases.cases()) {
            values.push_back(lgp_run(p, i + 1, fc.inputs)[p.instructions[i].dest]);
        }
        out.push_back(error(values, cases));
    }
    return out;
}

inline double lgp_r0_error(const msp::LgpProgram &p, const msp::FitnessCaseSet &cases)
{
    std::vector<Scalar> values;
    for (const auto &fc : cases.cases()) {
        values.push_back(lgp_run(p, p.length(), fc.inputs)[0]);
    }
    return error(values, cases);
}

// ---- IFGP ---------------------------------------------------------------

inline Scalar ifgp_node(const msp::InfixExpression &e, std::size_t node, const std::vector<double> &inputs)
{
    const auto &n = e.nodes[node];
    if (!n.is_op) {
        return {inputs[n.variable], true};
    }
    return combine(n.op, ifgp_node(e, n.left, inputs), ifgp_node(e, n.right, inputs));
}

inline double ifgp_node_error(const msp::InfixExpression &e, std::size_t node, const msp::FitnessCaseSet &cases)
{
    std::vector<Scalar> values;
    for (const auto &fc : cases.cases()) {
        values.push_back(ifgp_node(e, node, fc.inputs));
    }
    return error(values, cases);
}

} // namespace oracle
