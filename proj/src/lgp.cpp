#include <msp/lgp.hpp>

#include <cstdio>
#include <stdexcept>

namespace msp
{

namespace
{

bool has_op(const PrimitiveSet &prims, Op op)
{
    for (auto f : prims.functions) {
        if (f == op) {
            return true;
        }
    }
    return false;
}

LgpOperand random_operand(const LgpShape &shape, RandomSource &rng)
{
    if (!shape.constants.empty() && rng.bernoulli(shape.constant_probability)) {
        return LgpOperand::make_constant(shape.constants[rng.index(shape.constants.size())]);
    }
    return LgpOperand::make_register(static_cast<std::uint32_t>(rng.index(shape.num_registers)));
}

void check_shape(const LgpShape &shape)
{
    if (shape.num_registers == 0) {
        throw std::invalid_argument("LGP needs at least one register");
    }
    if (shape.num_inputs > shape.num_registers) {
        throw std::invalid_argument("LGP has more inputs than registers");
    }
}

std::string operand_text(const LgpOperand &o)
{
    if (!o.is_constant) {
        return "r[" + std::to_string(o.reg) + "]";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", o.constant);
    return buf;
}

} // namespace

LgpShape LgpShape::for_inputs(std::size_t num_inputs)
{
    LgpShape s;
    s.num_inputs = num_inputs;
    s.num_registers = num_inputs + lgp_supplementary_registers;
    return s;
}

std::optional<std::string> check(const LgpProgram &prog, const PrimitiveSet &prims)
{
    const auto &shape = prog.shape;
    if (prog.instructions.empty()) {
        return "program has no instructions";
    }
    if (shape.num_registers == 0 || shape.num_inputs > shape.num_registers) {
        return "bad register configuration";
    }
    for (std::size_t i = 0; i < prog.length(); ++i) {
        const auto &ins = prog.instructions[i];
        const auto label = "instruction " + std::to_string(i);
        if (ins.dest >= shape.num_registers) {
            return label + ": destination out of range";
        }
        for (const auto *o : {&ins.src1, &ins.src2}) {
            if (o->is_constant ? shape.constants.empty() : o->reg >= shape.num_registers) {
                return label + ": bad source operand";
            }
        }
        if (!has_op(prims, ins.op)) {
            return label + ": operator not in the function set";
        }
    }
    return std::nullopt;
}

LgpInstruction lgp_random_instruction(const LgpShape &shape, const PrimitiveSet &prims, RandomSource &rng)
{
    LgpInstruction ins;
    ins.dest = static_cast<std::uint32_t>(rng.index(shape.num_registers));
    ins.op = prims.functions[rng.index(prims.num_functions())];
    ins.src1 = random_operand(shape, rng);
    ins.src2 = random_operand(shape, rng);
    return ins;
}

LgpProgram lgp_random(std::size_t length, const LgpShape &shape, const PrimitiveSet &prims, RandomSource &rng)
{
    if (length == 0) {
        throw std::invalid_argument("LGP program length must be at least 1");
    }
    check_shape(shape);
    LgpProgram p;
    p.shape = shape;
    p.instructions.reserve(length);
    for (std::size_t i = 0; i < length; ++i) {
        p.instructions.push_back(lgp_random_instruction(shape, prims, rng));
    }
    return p;
}

LgpTrace lgp_execute(const LgpProgram &prog, const FitnessCaseSet &cases)
{
    const auto &shape = prog.shape;
    if (cases.num_inputs() < shape.num_inputs) {
        throw std::invalid_argument("fitness cases have fewer inputs than the program expects");
    }
    const auto n = cases.size();

    LgpTrace trace;
    trace.registers.resize(shape.num_registers);
    for (std::size_t r = 0; r < shape.num_registers; ++r) {
        if (r < shape.num_inputs) {
            trace.registers[r].values = cases.input_column(r);
        } else {
            trace.registers[r].values.assign(n, lgp_supplementary_init);
        }
    }

    ValueVector lhs, rhs, out;
    auto load = [&](const LgpOperand &o, ValueVector &scratch) -> const ValueVector & {
        if (!o.is_constant) {
            return trace.registers[o.reg];
        }
        scratch.values.assign(n, o.constant);
        scratch.valid = true;
        return scratch;
    };

    trace.records.reserve(prog.length());
    for (std::size_t i = 0; i < prog.length(); ++i) {
        const auto &ins = prog.instructions[i];
        apply_vector(ins.op, load(ins.src1, lhs), load(ins.src2, rhs), out);
        trace.registers[ins.dest] = out;
        trace.records.push_back({i, ins.dest, out});
    }
    return trace;
}

LgpFitness lgp_fitness(const LgpTrace &trace, const FitnessCaseSet &cases, FitnessMode mode)
{
    const auto targets = cases.targets();
    if (mode == FitnessMode::single) {
        std::optional<std::size_t> last;
        for (std::size_t i = 0; i < trace.records.size(); ++i) {
            if (trace.records[i].dest == 0) {
                last = i;
            }
        }
        return {sum_abs_error(trace.registers.at(0), targets), last};
    }
    LgpFitness best{Fitness::worst(), std::nullopt};
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
        const auto f = sum_abs_error(trace.records[i].value, targets);
        if (!best.record || f < best.fitness) {
            best = {f, i};
        }
    }
    return best;
}

LgpFitness lgp_fitness(const LgpProgram &prog, const FitnessCaseSet &cases, FitnessMode mode)
{
    return lgp_fitness(lgp_execute(prog, cases), cases, mode);
}

std::pair<LgpProgram, LgpProgram> lgp_crossover_mask(const LgpProgram &p1, const LgpProgram &p2,
                                                     const std::vector<bool> &take_first)
{
    if (p1.length() != p2.length() || !(p1.shape == p2.shape)) {
        throw std::invalid_argument("LGP crossover needs parents of the same shape");
    }
    if (take_first.size() != p1.length()) {
        throw std::invalid_argument("crossover mask length differs from program length");
    }
    std::pair<LgpProgram, LgpProgram> out{p1, p2};
    for (std::size_t i = 0; i < p1.length(); ++i) {
        if (!take_first[i]) {
            std::swap(out.first.instructions[i], out.second.instructions[i]);
        }
    }
    return out;
}

std::pair<LgpProgram, LgpProgram> lgp_crossover_uniform(const LgpProgram &p1, const LgpProgram &p2,
                                                        RandomSource &rng)
{
    if (p1.length() != p2.length() || !(p1.shape == p2.shape)) {
        throw std::invalid_argument("LGP crossover needs parents of the same shape");
    }
    std::vector<bool> mask(p1.length());
    for (std::size_t i = 0; i < mask.size(); ++i) {
        mask[i] = rng.bernoulli(0.5);
    }
    return lgp_crossover_mask(p1, p2, mask);
}

LgpMicroMutation lgp_random_micro_mutation(const LgpProgram &prog, const PrimitiveSet &prims, RandomSource &rng)
{
    LgpMicroMutation m;
    m.instruction = rng.index(prog.length());
    m.field = static_cast<LgpField>(rng.index(4));
    switch (m.field) {
        case LgpField::dest:
            m.replacement.dest = static_cast<std::uint32_t>(rng.index(prog.shape.num_registers));
            break;
        case LgpField::op:
            m.replacement.op = prims.functions[rng.index(prims.num_functions())];
            break;
        case LgpField::src1:
            m.replacement.src1 = random_operand(prog.shape, rng);
            break;
        case LgpField::src2:
            m.replacement.src2 = random_operand(prog.shape, rng);
            break;
    }
    return m;
}

LgpProgram lgp_apply(LgpProgram prog, const LgpMicroMutation &m)
{
    auto &ins = prog.instructions.at(m.instruction);
    switch (m.field) {
        case LgpField::dest:
            ins.dest = m.replacement.dest;
            break;
        case LgpField::op:
            ins.op = m.replacement.op;
            break;
        case LgpField::src1:
            ins.src1 = m.replacement.src1;
            break;
        case LgpField::src2:
            ins.src2 = m.replacement.src2;
            break;
    }
    return prog;
}

LgpProgram lgp_mutate(const LgpProgram &prog, std::size_t mutations, const PrimitiveSet &prims, RandomSource &rng)
{
    LgpProgram out = prog;
    for (std::size_t k = 0; k < mutations; ++k) {
        const auto m = lgp_random_micro_mutation(out, prims, rng);
        out = lgp_apply(std::move(out), m);
    }
    return out;
}

std::string lgp_expression(const LgpProgram &prog, std::optional<std::size_t> record,
                           const std::vector<std::string> &input_names)
{
    constexpr std::size_t max_chars = 1 << 16;
    const auto &shape = prog.shape;
    const std::size_t end = record ? *record + 1 : prog.length();
    if (end > prog.length()) {
        throw std::out_of_range("LGP record index out of range");
    }

    // text of each register before instruction i, updated as we go
    std::vector<std::string> reg(shape.num_registers);
    for (std::size_t r = 0; r < shape.num_registers; ++r) {
        reg[r] = r < shape.num_inputs ? input_names.at(r) : operand_text(LgpOperand::make_constant(lgp_supplementary_init));
    }
    std::vector<bool> compound(shape.num_registers, false);
    auto operand = [&](const LgpOperand &o) {
        if (o.is_constant) {
            return operand_text(o);
        }
        return compound[o.reg] ? "(" + reg[o.reg] + ")" : reg[o.reg];
    };
    for (std::size_t i = 0; i < end; ++i) {
        const auto &ins = prog.instructions[i];
        auto text = operand(ins.src1) + op_symbol(ins.op) + operand(ins.src2);
        if (text.size() > max_chars) {
            text = "<expression longer than " + std::to_string(max_chars) + " characters>";
        }
        reg[ins.dest] = std::move(text);
        compound[ins.dest] = true;
    }
    return record ? reg[prog.instructions[*record].dest] : reg[0];
}

std::string lgp_instruction_text(const LgpInstruction &ins)
{
    return "r[" + std::to_string(ins.dest) + "] = " + operand_text(ins.src1) + " " + op_symbol(ins.op) + " "
           + operand_text(ins.src2) + ";";
}

std::string lgp_dump(const LgpProgram &prog)
{
    std::string out;
    for (const auto &ins : prog.instructions) {
        out += lgp_instruction_text(ins);
        out += '\n';
    }
    return out;
}

} // namespace msp
