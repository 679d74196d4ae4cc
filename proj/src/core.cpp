#include <msp/core.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace msp
{

namespace
{

thread_local std::uint64_t t_op_counter = 0;

std::uint64_t splitmix64(std::uint64_t &x) noexcept
{
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept
{
    return (x << k) | (x >> (64 - k));
}

std::string format_g17(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

char op_symbol(Op op) noexcept
{
    switch (op) {
        case Op::add:
            return '+';
        case Op::sub:
            return '-';
        case Op::mul:
            return '*';
        case Op::div:
            return '/';
    }
    return '?';
}

double protected_apply(Op op, double a, double b) noexcept
{
    switch (op) {
        case Op::add:
            return a + b;
        case Op::sub:
            return a - b;
        case Op::mul:
            return a * b;
        case Op::div:
            return std::fabs(b) < protected_div_epsilon ? 1.0 : a / b;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

std::uint64_t op_counter() noexcept
{
    return t_op_counter;
}

void reset_op_counter() noexcept
{
    t_op_counter = 0;
}

PrimitiveSet PrimitiveSet::arithmetic(std::vector<std::string> terminals)
{
    PrimitiveSet p{{all_ops.begin(), all_ops.end()}, std::move(terminals)};
    validate(p);
    return p;
}

void validate(const PrimitiveSet &prims)
{
    if (prims.functions.empty()) {
        throw std::invalid_argument("primitive set has no functions");
    }
    if (prims.terminals.empty()) {
        throw std::invalid_argument("primitive set has no terminals");
    }
    std::set<std::string> seen(prims.terminals.begin(), prims.terminals.end());
    if (seen.size() != prims.terminals.size()) {
        throw std::invalid_argument("duplicate terminal identifiers");
    }
    std::set<Op> ops(prims.functions.begin(), prims.functions.end());
    if (ops.size() != prims.functions.size()) {
        throw std::invalid_argument("duplicate function identifiers");
    }
}

FitnessCaseSet::FitnessCaseSet(std::vector<FitnessCase> cases) : m_cases(std::move(cases))
{
    if (m_cases.empty()) {
        throw std::invalid_argument("a fitness case set needs at least one case");
    }
    const auto width = m_cases.front().inputs.size();
    for (const auto &c : m_cases) {
        if (c.inputs.size() != width) {
            throw std::invalid_argument("fitness cases have different input widths");
        }
    }
}

std::vector<double> FitnessCaseSet::input_column(std::size_t var) const
{
    std::vector<double> col;
    col.reserve(m_cases.size());
    for (const auto &c : m_cases) {
        col.push_back(c.inputs.at(var));
    }
    return col;
}

std::vector<double> FitnessCaseSet::targets() const
{
    std::vector<double> t;
    t.reserve(m_cases.size());
    for (const auto &c : m_cases) {
        t.push_back(c.target);
    }
    return t;
}

void apply_vector(Op op, const ValueVector &a, const ValueVector &b, ValueVector &out)
{
    const auto n = a.values.size();
    out.values.resize(n);
    bool finite = true;
    for (std::size_t k = 0; k < n; ++k) {
        const double v = protected_apply(op, a.values[k], b.values[k]);
        out.values[k] = v;
        finite = finite && std::isfinite(v);
    }
    t_op_counter += n;
    out.valid = a.valid && b.valid && finite;
}

Fitness sum_abs_error(const ValueVector &outputs, std::span<const double> targets)
{
    if (outputs.values.size() != targets.size()) {
        throw std::invalid_argument("output vector and fitness cases differ in length");
    }
    if (!outputs.valid) {
        return Fitness::worst();
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < targets.size(); ++k) {
        sum += std::fabs(outputs.values[k] - targets[k]);
    }
    return Fitness{sum};
}

Fitness sum_abs_error(const ValueVector &outputs, const FitnessCaseSet &cases)
{
    const auto t = cases.targets();
    return sum_abs_error(outputs, t);
}

BestOf best_of(std::span<const Fitness> fitnesses)
{
    if (fitnesses.empty()) {
        throw std::invalid_argument("best_of on an empty list");
    }
    BestOf best{0, fitnesses[0]};
    for (std::size_t i = 1; i < fitnesses.size(); ++i) {
        if (fitnesses[i] < best.fitness) {
            best = {i, fitnesses[i]};
        }
    }
    return best;
}

std::string_view to_string(FitnessMode mode) noexcept
{
    return mode == FitnessMode::multi ? "multi" : "single";
}

FitnessMode parse_mode(std::string_view name)
{
    if (name == "multi") {
        return FitnessMode::multi;
    }
    if (name == "single") {
        return FitnessMode::single;
    }
    throw std::invalid_argument("unknown fitness mode '" + std::string(name) + "'");
}

RandomSource::RandomSource(std::uint64_t seed) noexcept : m_seed(seed)
{
    std::uint64_t x = seed;
    for (auto &s : m_state) {
        s = splitmix64(x);
    }
}

std::uint64_t RandomSource::next_u64() noexcept
{
    const std::uint64_t result = rotl(m_state[1] * 5, 7) * 9;
    const std::uint64_t t = m_state[1] << 17;
    m_state[2] ^= m_state[0];
    m_state[3] ^= m_state[1];
    m_state[1] ^= m_state[2];
    m_state[0] ^= m_state[3];
    m_state[2] ^= t;
    m_state[3] = rotl(m_state[3], 45);
    return result;
}

std::uint64_t RandomSource::below(std::uint64_t bound) noexcept
{
    // Lemire's multiply-shift with rejection; unbiased.
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            m = static_cast<unsigned __int128>(next_u64()) * bound;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

double RandomSource::uniform01() noexcept
{
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::string_view to_string(ProblemId id) noexcept
{
    switch (id) {
        case ProblemId::f1:
            return "f1";
        case ProblemId::f2:
            return "f2";
        case ProblemId::f3:
            return "f3";
        case ProblemId::f4:
            return "f4";
    }
    return "?";
}

ProblemId parse_problem(std::string_view name)
{
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    for (auto id : all_problems) {
        if (lower == to_string(id)) {
            return id;
        }
    }
    throw std::invalid_argument("unknown problem id '" + std::string(name) + "'");
}

double problem_target(ProblemId id, double x) noexcept
{
    const double x2 = x * x;
    const double x3 = x2 * x;
    const double x4 = x3 * x;
    switch (id) {
        case ProblemId::f1:
            return x4 - x3 + x2 - x;
        case ProblemId::f2:
            return x4 + x3 + x2 + x;
        case ProblemId::f3:
            return x4 + 2 * x3 + 3 * x2 + 4 * x;
        case ProblemId::f4:
            return x4 * x2 - 2 * x4 + x2;
    }
    return 0.0;
}

FitnessCaseSet make_problem(ProblemId id, RandomSource &rng)
{
    std::vector<FitnessCase> cases;
    cases.reserve(problem_cases);
    for (std::size_t k = 0; k < problem_cases; ++k) {
        const double x = rng.uniform(problem_lo, problem_hi);
        cases.push_back({{x}, problem_target(id, x)});
    }
    return FitnessCaseSet{std::move(cases)};
}

void write_dataset(std::ostream &os, const FitnessCaseSet &cases)
{
    const auto width = cases.num_inputs();
    if (width == 1) {
        os << "x";
    } else {
        for (std::size_t v = 0; v < width; ++v) {
            os << (v ? "," : "") << 'x' << (v + 1);
        }
    }
    os << ",target\n";
    for (const auto &c : cases.cases()) {
        for (double x : c.inputs) {
            os << format_g17(x) << ',';
        }
        os << format_g17(c.target) << '\n';
    }
}

FitnessCaseSet read_dataset(std::istream &is)
{
    std::string line;
    if (!std::getline(is, line)) {
        throw std::invalid_argument("dataset is empty");
    }
    const auto columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
    if (columns < 2 || line.substr(line.rfind(',') + 1).rfind("target", 0) != 0) {
        throw std::invalid_argument("dataset header must end with a 'target' column");
    }
    std::vector<FitnessCase> cases;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            std::size_t used = 0;
            double v = 0;
            try {
                v = std::stod(cell, &used);
            } catch (const std::exception &) {
                used = 0;
            }
            if (used == 0) {
                throw std::invalid_argument("dataset line " + std::to_string(lineno) + ": bad number '" + cell + "'");
            }
            row.push_back(v);
        }
        if (row.size() != columns) {
            throw std::invalid_argument("dataset line " + std::to_string(lineno) + ": expected "
                                        + std::to_string(columns) + " columns");
        }
        const double target = row.back();
        row.pop_back();
        cases.push_back({std::move(row), target});
    }
    return FitnessCaseSet{std::move(cases)};
}

FitnessCaseSet read_dataset_file(const std::string &path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open dataset '" + path + "'");
    }
    return read_dataset(in);
}

} // namespace msp
