#pragma once

// Linear GP: a fixed-length sequence of three-address instructions
// `r[dest] = src1 op src2` over a register file. The first num_inputs
// registers receive the fitness-case inputs, the rest start at 1.0.
//
// Single-solution fitness reads r[0] after the whole program has run (for a
// univariate problem r[0] is also the input register). Multi-solution fitness
// treats the value written by every instruction as a candidate output.

#include <msp/core.hpp>

#include <optional>
#include <string>
#include <vector>

namespace msp
{

struct LgpOperand {
    bool is_constant = false;
    std::uint32_t reg = 0;
    double constant = 0.0;

    static LgpOperand make_register(std::uint32_t r) noexcept { return {false, r, 0.0}; }
    static LgpOperand make_constant(double c) noexcept { return {true, 0, c}; }

    bool operator==(const LgpOperand &) const = default;
};

struct LgpInstruction {
    std::uint32_t dest = 0;
    Op op = Op::add;
    LgpOperand src1;
    LgpOperand src2;

    bool operator==(const LgpInstruction &) const = default;
};

inline constexpr std::size_t lgp_supplementary_registers = 4;
inline constexpr double lgp_supplementary_init = 1.0;

// Register file and operand alphabet shared by every program of a run.
struct LgpShape {
    std::size_t num_registers = 1 + lgp_supplementary_registers;
    std::size_t num_inputs = 1;
    // When non-empty, source operands may also be drawn from this pool.
    std::vector<double> constants;
    // Probability of a constant source operand when `constants` is non-empty.
    double constant_probability = 0.5;

    // Problem inputs plus the four supplementary registers.
    static LgpShape for_inputs(std::size_t num_inputs);

    bool operator==(const LgpShape &) const = default;
};

struct LgpProgram {
    std::vector<LgpInstruction> instructions;
    LgpShape shape;

    std::size_t length() const noexcept { return instructions.size(); }
    bool operator==(const LgpProgram &) const = default;
};

std::optional<std::string> check(const LgpProgram &prog, const PrimitiveSet &prims);

LgpInstruction lgp_random_instruction(const LgpShape &shape, const PrimitiveSet &prims, RandomSource &rng);

// Throws std::invalid_argument for zero length, zero registers or
// num_inputs > num_registers.
LgpProgram lgp_random(std::size_t length, const LgpShape &shape, const PrimitiveSet &prims, RandomSource &rng);

struct LgpTraceRecord {
    std::size_t instruction = 0;
    std::uint32_t dest = 0;
    ValueVector value;
};

struct LgpTrace {
    std::vector<LgpTraceRecord> records;
    // Register contents after the last instruction.
    std::vector<ValueVector> registers;
};

// Throws std::invalid_argument if the cases carry fewer inputs than
// shape.num_inputs.
LgpTrace lgp_execute(const LgpProgram &prog, const FitnessCaseSet &cases);

struct LgpFitness {
    Fitness fitness;
    // Trace record that produced the fitness; nullopt when single mode reads
    // an r[0] that no instruction wrote.
    std::optional<std::size_t> record;
};

LgpFitness lgp_fitness(const LgpProgram &prog, const FitnessCaseSet &cases, FitnessMode mode);
LgpFitness lgp_fitness(const LgpTrace &trace, const FitnessCaseSet &cases, FitnessMode mode);

// Offspring 1 takes slot i from p1 where take_first[i], otherwise from p2.
// Throws on mismatched lengths or shapes.
std::pair<LgpProgram, LgpProgram> lgp_crossover_mask(const LgpProgram &p1, const LgpProgram &p2,
                                                     const std::vector<bool> &take_first);
std::pair<LgpProgram, LgpProgram> lgp_crossover_uniform(const LgpProgram &p1, const LgpProgram &p2,
                                                        RandomSource &rng);

enum class LgpField : std::uint8_t { dest, op, src1, src2 };

// One micro-mutation: a fresh uniform value for a single field.
struct LgpMicroMutation {
    std::size_t instruction = 0;
    LgpField field = LgpField::dest;
    LgpInstruction replacement;  // only `field` is read
};

LgpMicroMutation lgp_random_micro_mutation(const LgpProgram &prog, const PrimitiveSet &prims, RandomSource &rng);
LgpProgram lgp_apply(LgpProgram prog, const LgpMicroMutation &m);

LgpProgram lgp_mutate(const LgpProgram &prog, std::size_t mutations, const PrimitiveSet &prims, RandomSource &rng);

// Functional form of a register value obtained by substituting earlier writes
// backwards. `record` names the trace record (instruction) whose destination
// is read; nullopt reads r[0] after the whole program. `input_names` label the
// input registers; untouched supplementary registers print as their initial value.
std::string lgp_expression(const LgpProgram &prog, std::optional<std::size_t> record,
                           const std::vector<std::string> &input_names);

// "r[2] = r[5] + r[4];" per line.
std::string lgp_dump(const LgpProgram &prog);
std::string lgp_instruction_text(const LgpInstruction &ins);

} // namespace msp
