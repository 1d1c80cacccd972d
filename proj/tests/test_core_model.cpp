#include "fixtures.hpp"

#include <polyhom/partial_op.hpp>
#include <polyhom/power.hpp>

#include <doctest.h>

#include <set>

using namespace polyhom;
using namespace fixtures;

namespace {

// Explicit product, built by nested loops over coordinate vectors. Independent
// of PowerHandle's odometer and encoding code.
std::set<std::vector<Tuple>> explicit_product(const FiniteStructure& a, std::size_t rel, std::size_t k)
{
    std::set<std::vector<Tuple>> out;
    const RelationSet& r = a.relation(rel);
    std::vector<std::size_t> choice(k, 0);
    if (r.empty())
        return out;
    while (true) {
        std::vector<Tuple> tuple(r.arity(), Tuple(k));
        for (std::size_t j = 0; j < k; ++j)
            for (std::size_t i = 0; i < r.arity(); ++i)
                tuple[i][j] = r.tuple(choice[j])[i];
        out.insert(tuple);
        std::size_t j = k;
        while (j > 0 && ++choice[j - 1] == r.size())
            choice[--j] = 0;
        if (j == 0)
            break;
    }
    return out;
}

PowerIndex encode_by_hand(const Tuple& coords, std::size_t n)
{
    PowerIndex x = 0;
    for (auto c : coords)
        x = x * n + c;
    return x;
}

}  // namespace

TEST_CASE("validate_structure canonicalizes well-formed input")
{
    RawStructure raw{"C2", 2, {{"le", 2, {{1, 1}, {0, 1}, {0, 0}, {0, 1}}}}};
    auto a = validate_structure(raw);
    CHECK(a == chain2());
    CHECK(a.relation(0).size() == 3);
    CHECK(serialize_rel(a) == "structure C2 2\nrelation le 2\n0 0\n0 1\n1 1\n");
}

TEST_CASE("validate_structure reports every violation")
{
    SUBCASE("out of range entry")
    {
        RawStructure raw{"bad", 2, {{"e", 2, {{0, 2}}}}};
        try {
            validate_structure(raw);
            FAIL("expected StructureError");
        }
        catch (const StructureError& e) {
            REQUIRE(e.violations().size() == 1);
            CHECK(e.violations()[0].symbol == "e");
            CHECK(e.violations()[0].tuple_index == 0);
            CHECK(e.violations()[0].rule == "entry 2 out of range");
        }
    }
    SUBCASE("arity mismatch and duplicate symbol")
    {
        RawStructure raw{"bad", 3, {{"e", 2, {{0, 1}, {0, 1, 2}}}, {"e", 1, {{0}}}}};
        try {
            validate_structure(raw);
            FAIL("expected StructureError");
        }
        catch (const StructureError& e) {
            REQUIRE(e.violations().size() == 2);
            CHECK(e.violations()[0].tuple_index == 1);
            CHECK(e.violations()[0].rule.find("arity mismatch") == 0);
            CHECK(e.violations()[1].rule == "duplicate symbol");
        }
    }
    SUBCASE("one point, empty signature")
    {
        auto a = validate_structure(RawStructure{"pt", 1, {}});
        CHECK(a.size() == 1);
        CHECK(a.signature().empty());
    }
}

TEST_CASE(".rel parser handles comments, streams and errors")
{
    auto raws = parse_rel("# two structures\nstructure a 2 # trailing\nrelation r 1\n0\n\nstructure b 1\n");
    REQUIRE(raws.size() == 2);
    CHECK(raws[0].relations[0].tuples.size() == 1);
    CHECK_THROWS_AS(parse_rel("relation r 2\n"), ParseError);
    CHECK_THROWS_AS(parse_rel("structure a 2\nrelation r 2\n0 x\n"), ParseError);
    CHECK_THROWS_AS(parse_rel("structure a 2\n0 1\n"), ParseError);
}

TEST_CASE("serialize . parse . validate is the identity on canonical files")
{
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        auto a = random_structure(rng, 1 + trial % 4, trial % 2 == 0, "s" + std::to_string(trial));
        auto text = serialize_rel(a);
        auto raws = parse_rel(text);
        REQUIRE(raws.size() == 1);
        auto b = validate_structure(raws[0]);
        CHECK(b == a);
        CHECK(serialize_rel(b) == text);
    }
}

TEST_CASE("power membership is coordinatewise")
{
    auto p = power(chain2(), 2);
    CHECK(p.size() == 4);
    const PowerIndex x01 = p.encode(Tuple{0, 1}), x11 = p.encode(Tuple{1, 1}), x10 = p.encode(Tuple{1, 0});
    CHECK(p.related(0, x01, x11));
    CHECK_FALSE(p.related(0, x01, x10));

    auto q = power(k2(), 2);
    const PowerIndex x00 = q.encode(Tuple{0, 0}), y11 = q.encode(Tuple{1, 1});
    CHECK(q.related(0, x00, y11));
    // brute-force edge list of K2 x K2: (a,b)~(c,d) iff a!=c and b!=d
    std::set<std::pair<PowerIndex, PowerIndex>> edges;
    for (Element a = 0; a < 2; ++a)
        for (Element b = 0; b < 2; ++b)
            for (Element c = 0; c < 2; ++c)
                for (Element d = 0; d < 2; ++d)
                    if (a != c && b != d)
                        edges.insert({encode_by_hand({a, b}, 2), encode_by_hand({c, d}, 2)});
    std::set<std::pair<PowerIndex, PowerIndex>> seen;
    q.for_each_tuple(0, [&](std::span<const PowerIndex> t) { seen.insert({t[0], t[1]}); });
    CHECK(seen == edges);
}

TEST_CASE("power agrees with the explicit product for n^k <= 64")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 1 + trial % 4;
        auto a = random_structure(rng, n, trial % 3 == 0, "r");
        for (std::size_t k = 1; k <= 3; ++k) {
            auto p = power(a, k);
            if (p.size() > 64)
                continue;
            for (std::size_t rel = 0; rel < a.signature().size(); ++rel) {
                auto oracle = explicit_product(a, rel, k);
                std::set<std::vector<Tuple>> seen;
                p.for_each_tuple(rel, [&](std::span<const PowerIndex> t) {
                    std::vector<Tuple> decoded;
                    for (auto e : t)
                        decoded.push_back(p.decode(e));
                    seen.insert(decoded);
                    std::vector<PowerIndex> tv(t.begin(), t.end());
                    CHECK(p.contains(rel, tv));
                });
                CHECK(seen == oracle);
                auto m = p.materialize();
                CHECK(m.relation(rel).size() == oracle.size());
                for (const auto& t : oracle) {
                    Tuple codes;
                    for (const auto& c : t)
                        codes.push_back(static_cast<Element>(encode_by_hand(c, n)));
                    CHECK(m.relation(rel).contains(codes));
                }
                if (a.relation(rel).arity() == 2) {
                    for (PowerIndex x = 0; x < p.size(); ++x) {
                        std::set<PowerIndex> succ, expect;
                        p.for_each_successor(rel, x, [&](PowerIndex y) { succ.insert(y); });
                        for (const auto& t : oracle)
                            if (encode_by_hand(t[0], n) == x)
                                expect.insert(encode_by_hand(t[1], n));
                        CHECK(succ == expect);
                    }
                }
            }
        }
    }
}

TEST_CASE("power overflow is reported")
{
    auto a = edgeless(3);
    CHECK_THROWS_AS(power(a, 60), std::overflow_error);
    CHECK_THROWS_AS(power(a, 0), std::invalid_argument);
    CHECK_THROWS_AS(power(a, 13).materialize(), std::length_error);
}

TEST_CASE("induced substructures")
{
    auto s = induced_substructure(chain2(), std::vector<Element>{0});
    CHECK(s.structure.size() == 1);
    CHECK(s.structure.relation(0).size() == 1);

    auto t = induced_substructure(p3(), std::vector<Element>{0, 2});
    CHECK(t.structure.size() == 2);
    CHECK(t.structure.relation(0).empty());
    CHECK(t.embedding == std::vector<PowerIndex>{0, 2});

    auto p = power(chain2(), 2);
    auto all = induced_substructure(p, std::vector<PowerIndex>{0, 1, 2, 3});
    CHECK(all.structure == p.materialize());

    CHECK_THROWS_AS(induced_substructure(chain2(), std::vector<Element>{}), std::invalid_argument);
}

TEST_CASE("canonical structures check family axioms")
{
    auto g = graph_from_edges(4, {{0, 1}, {2, 3}});
    CHECK(g.relation(0).size() == 4);
    CHECK_FALSE(family_violation(Family::Graph, g));

    try {
        canonical_structure(Family::Poset, 2, {{0, 0}, {1, 1}, {0, 1}, {1, 0}});
        FAIL("expected FamilyError");
    }
    catch (const FamilyError& e) {
        CHECK(e.violation().axiom == "antisymmetry");
        CHECK(e.violation().witness == Tuple{0, 1});
    }
    CHECK_THROWS_AS(canonical_structure(Family::StrictPoset, 2, {{0, 0}}), FamilyError);
    CHECK_THROWS_AS(canonical_structure(Family::Graph, 2, {{0, 1}}), FamilyError);

    // {01|23}, {02|13}, {03|12}: two blocks of size two give 2*2*2 = 8 pairs
    auto m3 = canonical_structure(4, {{0, 0, 1, 1}, {0, 1, 0, 1}, {0, 1, 1, 0}});
    REQUIRE(m3.signature().size() == 3);
    for (const auto& r : m3.relations())
        CHECK(r.size() == 8);
    CHECK_FALSE(family_violation(Family::EqLattice, m3));
}

TEST_CASE("reduce_columns")
{
    PartialOpMap f(3, 2, {{{0, 0, 1}, 0}, {{1, 1, 0}, 1}});
    auto [g, map] = reduce_columns(f);
    CHECK(g.arity() == 2);
    CHECK(g == PartialOpMap(2, 2, {{{0, 1}, 0}, {{1, 0}, 1}}));
    CHECK(map == std::vector<std::size_t>{0, 0, 1});

    PartialOpMap unary(1, 3, {{{2}, 0}, {{1}, 1}});
    auto [u, umap] = reduce_columns(unary);
    CHECK(u == unary);
    CHECK(umap == std::vector<std::size_t>{0});

    PartialOpMap same(4, 3, {{{1, 1, 1, 1}, 0}, {{2, 2, 2, 2}, 2}});
    CHECK(reduce_columns(same).reduced.arity() == 1);

    CHECK_THROWS_AS(reduce_columns(PartialOpMap(2, 2, {})), std::invalid_argument);
}

TEST_CASE("reduce_columns recomposes to the original map")
{
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + trial % 3, k = 1 + trial % 6, rows = 1 + rng() % 4;
        std::vector<PartialOpMap::Entry> entries;
        std::set<Tuple> used;
        for (std::size_t i = 0; i < rows; ++i) {
            Tuple r(k);
            for (auto& e : r)
                e = static_cast<Element>(rng() % (trial % 2 ? 2 : n));
            if (used.insert(r).second)
                entries.emplace_back(r, static_cast<Element>(rng() % n));
        }
        PartialOpMap f(k, n, entries);
        auto [g, map] = reduce_columns(f);
        for (const auto& [row, v] : f.entries()) {
            Tuple projected(g.arity());
            for (std::size_t j = 0; j < k; ++j)
                projected[map[j]] = row[j];
            CHECK(g.lookup(projected) == v);
        }
        CHECK(g.size() == f.size());
    }
}

TEST_CASE("partial operation invariants")
{
    CHECK_THROWS_AS(PartialOpMap(1, 2, {{{0}, 0}, {{0}, 1}}), std::invalid_argument);
    CHECK_THROWS_AS(PartialOpMap(1, 2, {{{2}, 0}}), std::out_of_range);
    CHECK_THROWS_AS(PartialOpMap(2, 2, {{{0}, 0}}), std::invalid_argument);
}
