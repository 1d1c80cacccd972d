#include "fixtures.hpp"

#include <polyhom/engine.hpp>

#include <doctest.h>

#include <set>

using namespace polyhom;
using namespace fixtures;

namespace {

ExtensionProblem problem(const FiniteStructure& src, const FiniteStructure& dst,
                         std::vector<std::pair<PowerIndex, Element>> pins = {})
{
    return ExtensionProblem{power(src, 1), dst, std::move(pins), {}};
}

// Every map source -> target, filtered by a naive membership test.
std::vector<std::vector<Element>> brute_force(const FiniteStructure& src, const FiniteStructure& dst,
                                              const std::vector<std::pair<PowerIndex, Element>>& pins)
{
    std::vector<std::vector<Element>> out;
    std::vector<Element> f(src.size(), 0);
    while (true) {
        bool ok = true;
        for (auto [x, v] : pins)
            ok = ok && f[x] == v;
        for (std::size_t r = 0; ok && r < src.signature().size(); ++r) {
            const auto& rel = src.relation(r);
            for (std::size_t i = 0; ok && i < rel.size(); ++i) {
                Tuple img;
                for (auto e : rel.tuple(i))
                    img.push_back(f[e]);
                bool found = false;
                for (const auto& t : dst.relation(r).tuples())
                    found = found || t == img;
                ok = found;
            }
        }
        if (ok)
            out.push_back(f);
        std::size_t j = f.size();
        while (j > 0 && ++f[j - 1] == dst.size())
            f[--j] = 0;
        if (j == 0)
            break;
    }
    return out;
}

}  // namespace

TEST_CASE("check_is_homomorphism")
{
    auto c2 = chain2();
    CHECK(check_is_homomorphism(c2, c2, std::vector<Element>{0, 1}));
    CHECK(check_is_homomorphism(c2, c2, std::vector<Element>{0, 0}));
    auto flip = check_is_homomorphism(c2, c2, std::vector<Element>{1, 0});
    REQUIRE_FALSE(flip);
    REQUIRE(flip.violation);
    CHECK(flip.violation->symbol == "le");
    CHECK(flip.violation->source_tuple == std::vector<PowerIndex>{0, 1});
    CHECK(flip.violation->image == std::vector<Element>{1, 0});
    CHECK_THROWS_AS(check_is_homomorphism(c2, k2(), std::vector<Element>{0, 1}), std::invalid_argument);
}

TEST_CASE("solve: small cases")
{
    auto c2 = chain2();
    auto r1 = solve(problem(c2, c2, {{0, 0}}));
    CHECK(r1.status == SearchStatus::Found);
    CHECK(r1.assignment[0] == 0);

    CHECK(solve(problem(k2(), edgeless(2))).status == SearchStatus::Unsat);

    auto p = power(c2, 2);
    ExtensionProblem pr{p, c2, {{p.encode(Tuple{0, 1}), 0}, {p.encode(Tuple{1, 0}), 1}}, {}};
    auto r2 = solve(pr);
    REQUIRE(r2.status == SearchStatus::Found);
    CHECK(check_is_homomorphism(p, c2, r2.assignment));
    CHECK(r2.assignment[p.encode(Tuple{0, 1})] == 0);
    CHECK(r2.assignment[p.encode(Tuple{1, 0})] == 1);
}

TEST_CASE("solve rejects bad problems")
{
    CHECK_THROWS_AS(solve(problem(chain2(), k2())), std::invalid_argument);
    // 0 <= 1 pinned to 1, 0 violates le
    CHECK_THROWS_AS(solve(problem(chain2(), chain2(), {{0, 1}, {1, 0}})), std::invalid_argument);
    CHECK_THROWS_AS(solve(problem(chain2(), chain2(), {{0, 2}})), std::invalid_argument);
    CHECK_FALSE(pins_consistent(power(chain2(), 1), chain2(), std::vector<std::pair<PowerIndex, Element>>{{0, 1}, {1, 0}}));
}

TEST_CASE("enumerate_solutions: small counts")
{
    auto c2 = chain2();
    auto pt_c2 = FiniteStructure("pt", 1, c2.signature(), {RelationSet(2, 1, {})});
    CHECK(enumerate_solutions(problem(pt_c2, c2), 10).solutions.size() == 2);

    auto e = enumerate_solutions(problem(c2, c2), 10);
    CHECK(e.complete);
    CHECK_FALSE(e.capped);
    CHECK(e.solutions == std::vector<std::vector<Element>>{{0, 0}, {0, 1}, {1, 1}});

    auto kk = enumerate_solutions(problem(k2(), k2()), 10);
    CHECK(kk.solutions == std::vector<std::vector<Element>>{{0, 1}, {1, 0}});

    auto capped = enumerate_solutions(problem(c2, c2), 2);
    CHECK(capped.solutions.size() == 2);
    CHECK(capped.capped);
    CHECK_FALSE(capped.complete);

    auto exact = enumerate_solutions(problem(c2, c2), 3);
    CHECK(exact.solutions.size() == 3);
    CHECK(exact.complete);
    CHECK_FALSE(exact.capped);
}

TEST_CASE("node budget exhaustion is not Unsat")
{
    ExtensionProblem pr{power(k3(), 2), k2(), {}, {}};
    pr.limits.node_budget = 1;
    auto r = solve(pr);
    CHECK(r.status == SearchStatus::Exhausted);
    // K3^2 -> K2 has no solution, but one node is not enough to prove it
    pr.limits.node_budget = 10'000'000;
    CHECK(solve(pr).status == SearchStatus::Unsat);
}

TEST_CASE("solve and enumerate agree with brute force (source <= 6, target <= 3)")
{
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 400; ++trial) {
        const std::size_t ns = 1 + rng() % 6, nt = 1 + rng() % 3;
        const bool ternary = trial % 4 == 0;
        auto src = random_structure(rng, ns, ternary, "S");
        auto dst = random_structure(rng, nt, ternary, "T");
        std::vector<std::pair<PowerIndex, Element>> pins;
        if (trial % 3 == 0)
            pins.emplace_back(rng() % ns, static_cast<Element>(rng() % nt));
        auto all = brute_force(src, dst, pins);
        for (auto prop : {Propagation::ArcConsistency, Propagation::ForwardCheck}) {
            auto pr = problem(src, dst, pins);
            pr.limits.propagation = prop;
            if (!pins_consistent(pr.source, dst, pins)) {
                CHECK(all.empty());
                CHECK_THROWS_AS(solve(pr), std::invalid_argument);
                continue;
            }
            auto r = solve(pr);
            if (all.empty()) {
                CHECK(r.status == SearchStatus::Unsat);
            }
            else {
                REQUIRE(r.status == SearchStatus::Found);
                CHECK(check_is_homomorphism(src, dst, r.assignment));
            }
            auto e = enumerate_solutions(pr, 1u << 20);
            CHECK(e.complete);
            std::set<std::vector<Element>> got(e.solutions.begin(), e.solutions.end());
            CHECK(got.size() == e.solutions.size());
            CHECK(got == std::set<std::vector<Element>>(all.begin(), all.end()));
        }
    }
}

TEST_CASE("determinism")
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        auto src = random_structure(rng, 5, false, "S");
        auto dst = random_structure(rng, 3, false, "T");
        auto a = enumerate_solutions(problem(src, dst), 100);
        auto b = enumerate_solutions(problem(src, dst), 100);
        CHECK(a.solutions == b.solutions);
        auto s1 = solve(problem(src, dst)), s2 = solve(problem(src, dst));
        CHECK(s1.status == s2.status);
        CHECK(s1.assignment == s2.assignment);
    }
}
