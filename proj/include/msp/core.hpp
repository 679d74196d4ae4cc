#pragma once

// Shared vocabulary for every encoding: primitive operators, fitness cases,
// value vectors, fitness aggregation and the portable random source.

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace msp
{

enum class Op : std::uint8_t { add, sub, mul, div };

inline constexpr std::array<Op, 4> all_ops{Op::add, Op::sub, Op::mul, Op::div};

char op_symbol(Op op) noexcept;

// Denominators with magnitude below this make division return 1.0.
inline constexpr double protected_div_epsilon = 1e-12;

// add/sub/mul are plain IEEE operations; div is protected. Non-finite
// results are returned as-is and turned into an invalid ValueVector by callers.
double protected_apply(Op op, double a, double b) noexcept;

// Number of primitive applications performed on the calling thread since the
// last reset. Every vectorized application of an operator over n fitness
// cases adds n. Used to check that multi- and single-solution decoding cost
// the same.
std::uint64_t op_counter() noexcept;
void reset_op_counter() noexcept;

struct PrimitiveSet {
    std::vector<Op> functions;
    std::vector<std::string> terminals;

    // {+,-,*,/} over the given terminal names.
    static PrimitiveSet arithmetic(std::vector<std::string> terminals);

    std::size_t num_functions() const noexcept { return functions.size(); }
    std::size_t num_terminals() const noexcept { return terminals.size(); }
};

// Throws std::invalid_argument on an empty terminal list, duplicate names
// or an empty function list.
void validate(const PrimitiveSet &prims);

struct FitnessCase {
    std::vector<double> inputs;
    double target = 0.0;

    bool operator==(const FitnessCase &) const = default;
};

class FitnessCaseSet
{
public:
    FitnessCaseSet() = default;
    // Throws std::invalid_argument if cases is empty or input widths differ.
    explicit FitnessCaseSet(std::vector<FitnessCase> cases);

    std::size_t size() const noexcept { return m_cases.size(); }
    std::size_t num_inputs() const noexcept { return m_cases.empty() ? 0 : m_cases.front().inputs.size(); }
    const std::vector<FitnessCase> &cases() const noexcept { return m_cases; }
    const FitnessCase &operator[](std::size_t k) const { return m_cases[k]; }

    // Column `var` of the inputs, one value per case.
    std::vector<double> input_column(std::size_t var) const;
    std::vector<double> targets() const;

    bool operator==(const FitnessCaseSet &) const = default;

private:
    std::vector<FitnessCase> m_cases;
};

// One value per fitness case, plus a flag cleared on numerical failure.
struct ValueVector {
    std::vector<double> values;
    bool valid = true;

    std::size_t size() const noexcept { return values.size(); }
};

// out[k] = op(a[k], b[k]); valid iff both inputs are valid and every result
// is finite. Counts a.size() primitive applications.
void apply_vector(Op op, const ValueVector &a, const ValueVector &b, ValueVector &out);

class Fitness
{
public:
    constexpr Fitness() noexcept = default;
    // NaN is mapped to +infinity so that the order stays total.
    constexpr explicit Fitness(double v) noexcept : m_value(v != v ? infinity() : v) {}

    static constexpr double infinity() noexcept { return std::numeric_limits<double>::infinity(); }
    static constexpr Fitness worst() noexcept { return Fitness{infinity()}; }

    constexpr double value() const noexcept { return m_value; }
    constexpr bool is_finite() const noexcept { return m_value < infinity(); }

    constexpr auto operator<=>(const Fitness &) const noexcept = default;

private:
    double m_value = std::numeric_limits<double>::infinity();
};

// Sum of absolute residuals; +infinity for an invalid vector.
// Throws std::invalid_argument when the lengths differ.
Fitness sum_abs_error(const ValueVector &outputs, const FitnessCaseSet &cases);
Fitness sum_abs_error(const ValueVector &outputs, std::span<const double> targets);

struct BestOf {
    std::size_t index = 0;
    Fitness fitness;
};

// Minimum and its first index. Throws std::invalid_argument on an empty list.
BestOf best_of(std::span<const Fitness> fitnesses);

// multi: the best of all encoded expressions represents the chromosome.
// single: only the one designated expression does.
enum class FitnessMode { multi, single };

std::string_view to_string(FitnessMode mode) noexcept;
// Throws std::invalid_argument for anything but "multi" / "single".
FitnessMode parse_mode(std::string_view name);

// A run counts as successful when its best fitness drops below this.
inline constexpr double success_threshold = 0.01;

// xoshiro256** seeded through splitmix64. All draws are built from next_u64()
// with integer arithmetic only, so sequences are identical on every platform.
class RandomSource
{
public:
    explicit RandomSource(std::uint64_t seed) noexcept;

    std::uint64_t seed() const noexcept { return m_seed; }
    std::uint64_t next_u64() noexcept;

    // Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound) noexcept;
    std::size_t index(std::size_t size) noexcept { return static_cast<std::size_t>(below(size)); }
    // Uniform double in [0, 1) with 53 bits of precision.
    double uniform01() noexcept;
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }
    bool bernoulli(double p) noexcept { return uniform01() < p; }

private:
    std::uint64_t m_seed;
    std::array<std::uint64_t, 4> m_state{};
};

enum class ProblemId { f1, f2, f3, f4 };

inline constexpr std::array<ProblemId, 4> all_problems{ProblemId::f1, ProblemId::f2, ProblemId::f3, ProblemId::f4};

std::string_view to_string(ProblemId id) noexcept;
// Accepts f1..f4 (case-insensitive). Throws std::invalid_argument otherwise.
ProblemId parse_problem(std::string_view name);

double problem_target(ProblemId id, double x) noexcept;

inline constexpr std::size_t problem_cases = 20;
inline constexpr double problem_lo = 0.0;
inline constexpr double problem_hi = 10.0;

// 20 cases with x drawn uniformly from [0, 10].
FitnessCaseSet make_problem(ProblemId id, RandomSource &rng);

// Dataset CSV: header `x,target` (or `x1,...,xk,target`), one row per case,
// values printed with 17 significant digits.
void write_dataset(std::ostream &os, const FitnessCaseSet &cases);
FitnessCaseSet read_dataset(std::istream &is);
FitnessCaseSet read_dataset_file(const std::string &path);

} // namespace msp
