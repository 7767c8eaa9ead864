#include <doctest.h>

#include <set>

#include "helpers.hpp"
#include "tlmt/abstraction.hpp"
#include "tlmt/automaton.hpp"
#include "tlmt/util.hpp"

using namespace tlmt;
using namespace tlmt::abstraction;

namespace {

const std::vector<std::string> kParkingVars = {"x", "y", "vx", "vy", "sin_t", "cos_t"};

std::pair<syntax::PhiPtr, syntax::Signature> load_resolved(const std::string& name,
                                                           const std::set<std::string>& consts) {
    auto ast = syntax::parse_formula(testing::corpus_formula(name));
    return syntax::resolve(ast, consts, kParkingVars);
}

// independent atom census: count distinct normalized atoms by traversal
void collect_atoms(const syntax::LambdaPtr& l, std::set<std::string>& keys) {
    using syntax::LambdaKind;
    if (l->kind == LambdaKind::Atom || l->kind == LambdaKind::NotAtom) {
        keys.insert(syntax::normal_key(l->atom));
    } else {
        collect_atoms(l->lhs, keys);
        collect_atoms(l->rhs, keys);
    }
}

void collect_atoms(const syntax::PhiPtr& p, std::set<std::string>& keys) {
    if (p->lam) collect_atoms(p->lam, keys);
    if (p->lhs) collect_atoms(p->lhs, keys);
    if (p->rhs) collect_atoms(p->rhs, keys);
}

}  // namespace

TEST_CASE("abstract_formula: parking task 1 becomes F(p0 && X F p1)") {
    auto [resolved, sig] = load_resolved("parking_task1", {"a", "b"});
    prop::Factory f;
    auto res = abstract_formula(resolved, f);
    CHECK(res.table.size() == 2);
    CHECK(res.table.entries[0].name == "p0");
    CHECK(res.table.entries[1].name == "p1");

    prop::FormulaId expected =
        f.eventually(f.make_and(f.letter(0), f.next(f.eventually(f.letter(1)))));
    CHECK(res.formula == expected);
}

TEST_CASE("abstract_formula: true has an empty table") {
    auto [resolved, sig] = syntax::resolve(syntax::parse_formula("true"), {}, {});
    prop::Factory f;
    auto res = abstract_formula(resolved, f);
    CHECK(res.formula == f.true_id());
    CHECK(res.table.size() == 0);
}

TEST_CASE("abstract_formula: parking task 2 shares checkpoint letters (3, not 6)") {
    auto [resolved, sig] = load_resolved("parking_task2", {"a", "b"});
    prop::Factory f;
    auto res = abstract_formula(resolved, f);
    CHECK(res.table.size() == 3);

    std::set<std::string> atom_keys;
    collect_atoms(resolved, atom_keys);
    CHECK(res.table.size() == atom_keys.size());
}

TEST_CASE("abstract_formula: letter count equals distinct normalized atoms on random formulas") {
    Rng rng(31337);
    for (int i = 0; i < 300; ++i) {
        auto phi = testing::random_phi(rng, {"x", "y", "vx", "a"}, 4);
        auto [resolved, s] = syntax::resolve(phi, {"a"}, {"x", "y", "vx"});
        prop::Factory f;
        auto res = abstract_formula(resolved, f);
        std::set<std::string> atom_keys;
        collect_atoms(resolved, atom_keys);
        CHECK(res.table.size() == atom_keys.size());
    }
}

TEST_CASE("abstract_formula: stability, same letter order twice") {
    auto [resolved, sig] = load_resolved("parking_task4", {"a", "b", "c", "d"});
    prop::Factory f1, f2;
    auto r1 = abstract_formula(resolved, f1);
    auto r2 = abstract_formula(resolved, f2);
    REQUIRE(r1.table.size() == r2.table.size());
    for (std::uint32_t i = 0; i < r1.table.size(); ++i) {
        CHECK(syntax::normal_key(r1.table.entries[i].payload) ==
              syntax::normal_key(r2.table.entries[i].payload));
    }
}

TEST_CASE("abstract_formula: requires a resolved formula") {
    prop::Factory f;
    CHECK_THROWS_AS(abstract_formula(syntax::parse_formula("x < 1"), f), tlmt::CompileError);
}

TEST_CASE("label_state: parking task 1 letters at the published points") {
    auto [resolved, sig] = load_resolved("parking_task1", {"a", "b"});
    prop::Factory f;
    auto res = abstract_formula(resolved, f);
    theory::ConstAssignment kappa = {{"a", 0.2}, {"b", 0.08}};

    // at checkpoint A = (-0.2, -0.08): p0 only
    CHECK(label_state(res.table, {-0.2, -0.08, 0, 0, 0, 1}, kappa) == 0b01);
    // at the goal (0.2, 0.08): p1 only
    CHECK(label_state(res.table, {0.2, 0.08, 0, 0, 0, 1}, kappa) == 0b10);
    // far away: nothing
    CHECK(label_state(res.table, {0.9, 0.9, 0, 0, 0, 1}, kappa) == 0);

    // oracle agreement at every probed point
    for (const auto& mu : std::vector<theory::VarAssignment>{
             {-0.2, -0.08, 0, 0, 0, 1}, {0.2, 0.08, 0, 0, 0, 1}, {0.9, 0.9, 0, 0, 0, 1}}) {
        Bitmask expect = 0;
        for (std::uint32_t i = 0; i < res.table.size(); ++i) {
            if (testing::naive_eval_lambda(res.table.entries[i].payload, mu, kappa)) {
                expect |= Bitmask{1} << i;
            }
        }
        CHECK(label_state(res.table, mu, kappa) == expect);
    }
}

TEST_CASE("label_state: empty table gives the empty bitmask") {
    LetterTable empty;
    CHECK(label_state(empty, {1.0, 2.0}, {}) == 0);
}

TEST_CASE("abstract_trace: pointwise labeling") {
    auto [resolved, sig] = load_resolved("parking_task1", {"a", "b"});
    prop::Factory f;
    auto res = abstract_formula(resolved, f);
    theory::ConstAssignment kappa = {{"a", 0.2}, {"b", 0.08}};

    // empty trace maps to the empty trace
    CHECK(abstract_trace(res.table, {}, kappa).empty());

    // scripted three-step straight-line drive into ball A
    std::vector<theory::VarAssignment> drive = {
        {-0.2, -0.3, 0, 0, 0, 1}, {-0.2, -0.19, 0, 0, 0, 1}, {-0.2, -0.08, 0, 0, 0, 1}};
    PropTrace w = abstract_trace(res.table, drive, kappa);
    REQUIRE(w.size() == 3);
    CHECK(w[0] == 0);
    CHECK(w[1] == 0);
    CHECK(w[2] == 0b01);

    // constant trace parked at the goal: every step {p1}
    std::vector<theory::VarAssignment> parked(4, {0.2, 0.08, 0, 0, 0, 1});
    for (Bitmask m : abstract_trace(res.table, parked, kappa)) CHECK(m == 0b10);
}

TEST_CASE("soundness: direct temporal evaluation equals LTLf on the abstraction") {
    // The full-size version runs in the acceptance suite; this is the same
    // property at unit scale.
    Rng rng(777001);
    const std::vector<std::string> vars = {"x", "y", "vx"};
    for (int i = 0; i < 1500; ++i) {
        auto phi = testing::random_phi(rng, {"x", "y", "vx", "a"}, 4);
        auto [resolved, sig] = syntax::resolve(phi, {"a"}, vars);
        prop::Factory f;
        auto res = abstract_formula(resolved, f);
        theory::ConstAssignment kappa = {{"a", uniform(rng, -1, 1)}};

        std::size_t len = 1 + uniform_below(rng, 6);
        std::vector<theory::VarAssignment> tau(len);
        for (auto& mu : tau) {
            mu = {uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1)};
        }
        bool direct = automaton::ltlfmt_eval(resolved, tau, kappa, 0);
        bool abstracted =
            automaton::ltlf_eval(f, res.formula, abstract_trace(res.table, tau, kappa), 0);
        CAPTURE(syntax::print_formula(resolved));
        REQUIRE(direct == abstracted);
    }
}
