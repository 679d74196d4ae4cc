#include <doctest.h>

#include <msp/core.hpp>

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

using namespace msp;

namespace
{

ValueVector vec(std::vector<double> v)
{
    return ValueVector{std::move(v), true};
}

} // namespace

TEST_CASE("protected_apply on the four operators")
{
    CHECK(protected_apply(Op::add, 2, 3) == 5.0);
    CHECK(protected_apply(Op::sub, 2, 3) == -1.0);
    CHECK(protected_apply(Op::mul, 2, 3) == 6.0);
    CHECK(protected_apply(Op::div, 6, 3) == 2.0);
    CHECK(protected_apply(Op::div, 5, 0) == 1.0);
    CHECK(protected_apply(Op::div, 5, 1e-13) == 1.0);
    CHECK(protected_apply(Op::div, 5, -1e-13) == 1.0);
    CHECK(protected_apply(Op::div, 1, 1e-11) == doctest::Approx(1e11));
}

TEST_CASE("apply_vector never yields NaN from finite inputs")
{
    RandomSource rng(7);
    for (int trial = 0; trial < 2000; ++trial) {
        ValueVector a, b, out;
        for (int k = 0; k < 8; ++k) {
            // Mix of ordinary values, exact zeros and tiny denominators.
            auto draw = [&] {
                switch (rng.index(4)) {
                    case 0:
                        return 0.0;
                    case 1:
                        return rng.uniform(-1e-12, 1e-12);
                    default:
                        return rng.uniform(-1e3, 1e3);
                }
            };
            a.values.push_back(draw());
            b.values.push_back(draw());
        }
        const auto op = all_ops[rng.index(4)];
        apply_vector(op, a, b, out);
        REQUIRE(out.valid);
        for (double v : out.values) {
            CHECK(std::isfinite(v));
        }
    }
}

TEST_CASE("apply_vector marks overflow invalid and propagates invalid inputs")
{
    ValueVector out;
    apply_vector(Op::mul, vec({1e200}), vec({1e200}), out);
    CHECK_FALSE(out.valid);

    auto bad = vec({1.0});
    bad.valid = false;
    apply_vector(Op::add, bad, vec({1.0}), out);
    CHECK_FALSE(out.valid);
}

TEST_CASE("op counter counts one per case")
{
    reset_op_counter();
    ValueVector out;
    apply_vector(Op::add, vec({1, 2, 3}), vec({1, 2, 3}), out);
    apply_vector(Op::div, vec({1, 2, 3}), vec({0, 2, 3}), out);
    CHECK(op_counter() == 6);
    reset_op_counter();
    CHECK(op_counter() == 0);
}

TEST_CASE("problem targets")
{
    CHECK(problem_target(ProblemId::f1, 2) == 10.0);
    CHECK(problem_target(ProblemId::f2, 0) == 0.0);
    CHECK(problem_target(ProblemId::f2, 2) == 30.0);
    CHECK(problem_target(ProblemId::f3, 1) == 10.0);
    CHECK(problem_target(ProblemId::f4, 1) == 0.0);
    CHECK(problem_target(ProblemId::f4, 2) == 36.0);
}

TEST_CASE("problem names")
{
    CHECK(parse_problem("f3") == ProblemId::f3);
    CHECK(parse_problem("F4") == ProblemId::f4);
    CHECK_THROWS_AS(parse_problem("f9"), std::invalid_argument);
    for (auto id : all_problems) {
        CHECK(parse_problem(to_string(id)) == id);
    }
    CHECK(parse_mode("multi") == FitnessMode::multi);
    CHECK(parse_mode("single") == FitnessMode::single);
    CHECK_THROWS_AS(parse_mode("both"), std::invalid_argument);
}

TEST_CASE("sum_abs_error")
{
    std::vector<FitnessCase> raw;
    for (int k = 0; k < 20; ++k) {
        raw.push_back({{double(k)}, 2.0 * k});
    }
    const FitnessCaseSet cases(raw);
    auto exact = vec(cases.targets());
    CHECK(sum_abs_error(exact, cases).value() == 0.0);

    auto shifted = exact;
    for (auto &v : shifted.values) {
        v += 1.0;
    }
    CHECK(sum_abs_error(shifted, cases).value() == doctest::Approx(20.0));

    shifted.valid = false;
    CHECK(sum_abs_error(shifted, cases).value() == Fitness::infinity());

    CHECK_THROWS_AS(sum_abs_error(vec({1.0}), cases), std::invalid_argument);
}

TEST_CASE("best_of picks the first minimum")
{
    auto f = [](std::vector<double> v) {
        std::vector<Fitness> out;
        for (double x : v) {
            out.emplace_back(x);
        }
        return out;
    };
    auto r = best_of(f({3, 1, 1}));
    CHECK(r.index == 1);
    CHECK(r.fitness.value() == 1.0);
    r = best_of(f({Fitness::infinity(), 5}));
    CHECK(r.index == 1);
    CHECK(r.fitness.value() == 5.0);
    r = best_of(f({7}));
    CHECK(r.index == 0);
    CHECK_THROWS_AS(best_of(std::span<const Fitness>{}), std::invalid_argument);
}

TEST_CASE("Fitness orders NaN as worst")
{
    CHECK(Fitness{std::nan("")}.value() == Fitness::infinity());
    CHECK(Fitness{1.0} < Fitness{2.0});
    CHECK(Fitness{1e300} < Fitness::worst());
    CHECK_FALSE(Fitness::worst().is_finite());
}

TEST_CASE("RandomSource is deterministic per seed")
{
    RandomSource a(42), b(42), c(43);
    bool differs = false;
    for (int i = 0; i < 1'000'000; ++i) {
        const auto x = a.next_u64();
        REQUIRE(x == b.next_u64());
        differs = differs || x != c.next_u64();
    }
    CHECK(differs);
    CHECK(a.seed() == 42);
}

TEST_CASE("RandomSource ranges")
{
    RandomSource rng(3);
    std::vector<int> hits(7, 0);
    for (int i = 0; i < 70000; ++i) {
        const auto v = rng.below(7);
        REQUIRE(v < 7);
        ++hits[v];
        const double u = rng.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }
    for (int h : hits) {
        CHECK(h > 9000);
        CHECK(h < 11000);
    }
    CHECK(rng.below(1) == 0);
}

TEST_CASE("make_problem draws 20 cases in range")
{
    RandomSource r1(5), r2(5);
    const auto p = make_problem(ProblemId::f2, r1);
    CHECK(p == make_problem(ProblemId::f2, r2));
    REQUIRE(p.size() == problem_cases);
    CHECK(p.num_inputs() == 1);
    std::set<double> xs;
    for (const auto &c : p.cases()) {
        CHECK(c.inputs[0] >= problem_lo);
        CHECK(c.inputs[0] <= problem_hi);
        CHECK(c.target == problem_target(ProblemId::f2, c.inputs[0]));
        xs.insert(c.inputs[0]);
    }
    CHECK(xs.size() == problem_cases);
}

TEST_CASE("FitnessCaseSet rejects empty and ragged input")
{
    CHECK_THROWS_AS(FitnessCaseSet(std::vector<FitnessCase>{}), std::invalid_argument);
    CHECK_THROWS_AS(FitnessCaseSet({{{1.0}, 1.0}, {{1.0, 2.0}, 1.0}}), std::invalid_argument);
    const FitnessCaseSet s({{{1.0, 2.0}, 3.0}, {{4.0, 5.0}, 6.0}});
    CHECK(s.input_column(1) == std::vector<double>{2.0, 5.0});
    CHECK(s.targets() == std::vector<double>{3.0, 6.0});
}

TEST_CASE("dataset text round trip")
{
    RandomSource rng(9);
    const auto p = make_problem(ProblemId::f4, rng);
    std::stringstream ss;
    write_dataset(ss, p);
    CHECK(ss.str().rfind("x,target\n", 0) == 0);
    CHECK(read_dataset(ss) == p);

    const FitnessCaseSet two({{{0.5, 0.25}, 1.0}});
    std::stringstream ss2;
    write_dataset(ss2, two);
    CHECK(ss2.str().rfind("x1,x2,target\n", 0) == 0);
    CHECK(read_dataset(ss2) == two);

    std::stringstream bad("x,target\n1,2,3\n");
    CHECK_THROWS(read_dataset(bad));
}

TEST_CASE("primitive set validation")
{
    CHECK_NOTHROW(validate(PrimitiveSet::arithmetic({"a", "b"})));
    CHECK_THROWS_AS(validate(PrimitiveSet::arithmetic({})), std::invalid_argument);
    CHECK_THROWS_AS(validate(PrimitiveSet::arithmetic({"a", "a"})), std::invalid_argument);
    CHECK_THROWS_AS(validate(PrimitiveSet{{}, {"a"}}), std::invalid_argument);
}
