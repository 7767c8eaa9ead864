#include <doctest.h>

#include <cmath>
#include <cstring>

#include "helpers.hpp"
#include "tlmt/theory.hpp"
#include "tlmt/util.hpp"

using namespace tlmt;
using namespace tlmt::syntax;
using namespace tlmt::theory;

namespace {

// parse + resolve a lambda over the parking variables with constants a..d
LambdaPtr resolved_lambda(const std::string& text) {
    Signature sig;
    sig.variables = {"x", "y", "vx", "vy", "sin_t", "cos_t"};
    sig.constants = {"a", "b", "c", "d"};
    return resolve_lambda(parse_lambda(text), sig);
}

TermPtr resolved_term(const std::string& text) {
    return resolved_lambda("(" + text + ") < 0")->atom.lhs;
}

}  // namespace

TEST_CASE("eval_term: ball distance at its center is exactly zero") {
    auto t = resolved_term("(x + 0.2)^2 + (y + 0.08)^2");
    VarAssignment mu = {-0.2, -0.08, 0, 0, 0, 1};
    CHECK(eval_term(t, mu, {}) == 0.0);
}

TEST_CASE("eval_term: parking task 3 box term at the goal point") {
    auto t = resolved_term("abs(x - a) + 0.2*abs(y - b)");
    VarAssignment mu = {0.18, 0.14, 0, 0, 0, 1};
    ConstAssignment kappa = {{"a", 0.18}, {"b", 0.14}};
    CHECK(eval_term(t, mu, kappa) == 0.0);
}

TEST_CASE("eval_term: goal distance from the origin matches the naive oracle") {
    auto t = resolved_term("(x - a)^2 + (y - b)^2");
    VarAssignment mu = {0.0, 0.0, 0, 0, 0, 1};
    ConstAssignment kappa = {{"a", 0.2}, {"b", 0.08}};
    CHECK(eval_term(t, mu, kappa) == doctest::Approx(0.0464).epsilon(1e-12));
    CHECK(eval_term(t, mu, kappa) == testing::naive_eval_term(t, mu, kappa));
}

TEST_CASE("eval_term: agreement with the naive interpreter on random terms") {
    Rng rng(99101);
    Signature sig;
    sig.variables = {"x", "y", "vx"};
    sig.constants = {"a", "b"};
    for (int i = 0; i < 2000; ++i) {
        auto l = testing::random_lambda(rng, {"x", "y", "vx", "a", "b"}, 0);
        auto r = resolve_lambda(l, sig);
        VarAssignment mu = {uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1)};
        ConstAssignment kappa = {{"a", uniform(rng, -1, 1)}, {"b", uniform(rng, -1, 1)}};
        CAPTURE(print_lambda(r));
        CHECK(eval_term(r->atom.lhs, mu, kappa) ==
              testing::naive_eval_term(r->atom.lhs, mu, kappa));
    }
}

TEST_CASE("eval_term: errors") {
    auto t = resolved_term("x + a");
    CHECK_THROWS_AS(eval_term(t, {0, 0, 0, 0, 0, 1}, {}), EvalError);  // missing constant
    // overflow is reported, not propagated
    auto big = resolved_term("((x * x)^4)^4");
    VarAssignment huge = {1e300, 0, 0, 0, 0, 1};
    CHECK_THROWS_AS(eval_term(big, huge, {}), EvalError);
}

TEST_CASE("eval_lambda: ball membership and boundary semantics") {
    auto ball = resolved_lambda("(x + 0.2)^2 + (y + 0.08)^2 < 0.03^2");
    CHECK(eval_lambda(ball, {-0.2, -0.08, 0, 0, 0, 1}, {}));

    // x <= -0.19 is true exactly at the boundary (reacher task 1 atom)
    auto le = resolved_lambda("x <= (-0.19)");
    CHECK(eval_lambda(le, {-0.19, 0, 0, 0, 0, 1}, {}));
    CHECK_FALSE(eval_lambda(le, {-0.189, 0, 0, 0, 0, 1}, {}));
}

TEST_CASE("eval_lambda: parking task 3 box atom at the published goal") {
    auto box = resolved_lambda(
        "abs(x - a) + 0.2*abs(y - b) + 0.02*abs(sin_t - c) + 0.02*abs(cos_t - d) < 0.0144");
    ConstAssignment kappa = {{"a", 0.18}, {"b", 0.14}, {"c", 0.0}, {"d", 1.0}};
    VarAssignment mu = {0.18, 0.14, 0, 0, 0.0, 1.0};
    CHECK(eval_lambda(box, mu, kappa));
    CHECK(eval_lambda(box, mu, kappa) == testing::naive_eval_lambda(box, mu, kappa));
}

TEST_CASE("eval_lambda: boolean connectives against the naive oracle") {
    Rng rng(7321);
    Signature sig;
    sig.variables = {"x", "y", "vx"};
    sig.constants = {"a", "b"};
    for (int i = 0; i < 2000; ++i) {
        auto l = resolve_lambda(testing::random_lambda(rng, {"x", "y", "a", "b"}, 3), sig);
        VarAssignment mu = {uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1)};
        ConstAssignment kappa = {{"a", uniform(rng, -1, 1)}, {"b", uniform(rng, -1, 1)}};
        CHECK(eval_lambda(l, mu, kappa) == testing::naive_eval_lambda(l, mu, kappa));
    }
}

TEST_CASE("trichotomy of ground term comparison") {
    Rng rng(5150);
    Signature sig;
    sig.variables = {"x", "y", "vx"};
    sig.constants = {"a"};
    for (int i = 0; i < 1000; ++i) {
        auto t1 = resolve_lambda(testing::random_lambda(rng, {"x", "y", "a"}, 0), sig)->atom.lhs;
        auto t2 = resolve_lambda(testing::random_lambda(rng, {"x", "y", "a"}, 0), sig)->atom.lhs;
        VarAssignment mu = {uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1)};
        ConstAssignment kappa = {{"a", uniform(rng, -1, 1)}};
        double v1 = eval_term(t1, mu, kappa);
        double v2 = eval_term(t2, mu, kappa);
        int holds = (v1 < v2) + (v1 == v2) + (v1 > v2);
        CHECK(holds == 1);
    }
}

TEST_CASE("determinism: repeated evaluation is bit-identical") {
    auto t = resolved_term("(x - a)^2 * abs(y) + x * y * vx - 0.37");
    VarAssignment mu = {0.123456789, -0.987654321, 0.5, 0, 0, 1};
    ConstAssignment kappa = {{"a", 0.31415926}};
    double first = eval_term(t, mu, kappa);
    for (int i = 0; i < 100; ++i) {
        double again = eval_term(t, mu, kappa);
        CHECK(std::memcmp(&first, &again, sizeof(double)) == 0);
    }
}

TEST_CASE("substitute_constants: syntactic replacement") {
    auto phi = parse_formula(testing::corpus_formula("parking_task1"));
    auto [resolved, sig] =
        resolve(phi, {"a", "b"}, {"x", "y", "vx", "vy", "sin_t", "cos_t"});

    auto subst = substitute_constants(resolved, {{"a", 0.05}, {"b", 0.11}});
    // inner atom becomes (x - 0.05)^2 + (y - 0.11)^2 < 0.03^2
    auto expected = resolved_lambda("(x - 0.05)^2 + (y - 0.11)^2 < 0.03^2");
    auto inner = subst->lhs->rhs->lhs->lhs->lam;
    CHECK(normal_key(inner) == normal_key(expected));

    // empty delta is the identity
    CHECK(equal(substitute_constants(resolved, {}), resolved));

    // negative substitution values stay printable and parseable
    auto negd = substitute_constants(resolved, {{"a", -0.3}});
    CHECK_NOTHROW(parse_formula(print_formula(negd)));
}

TEST_CASE("substitution lemma on 1000 random (formula, mu, kappa) triples") {
    Rng rng(424242);
    Signature sig;
    sig.variables = {"x", "y", "vx"};
    sig.constants = {"a", "b", "c"};
    for (int i = 0; i < 1000; ++i) {
        auto l = resolve_lambda(testing::random_lambda(rng, {"x", "y", "vx", "a", "b", "c"}, 2),
                                sig);
        VarAssignment mu = {uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1)};
        ConstAssignment kappa = {{"b", uniform(rng, -1, 1)}, {"c", uniform(rng, -1, 1)}};
        double v = uniform(rng, -1, 1);

        ConstAssignment extended = kappa;
        extended["a"] = v;
        bool via_subst = eval_lambda(substitute_constants(l, {{"a", v}}), mu, kappa);
        bool via_kappa = eval_lambda(l, mu, extended);
        CHECK(via_subst == via_kappa);
    }
}

TEST_CASE("eval counter increments per lambda evaluation") {
    auto l = resolved_lambda("x < 1");
    auto before = EvalStats::lambda_evals;
    eval_lambda(l, {0, 0, 0, 0, 0, 1}, {});
    CHECK(EvalStats::lambda_evals == before + 1);
}
