#include "fixtures.hpp"
#include "oracles.hpp"

#include <polyhom/homogeneity.hpp>

#include <doctest.h>

using namespace polyhom;
using namespace fixtures;

namespace {

bool holds(const HomogeneityResult& r)
{
    REQUIRE(r.status != HomogeneityStatus::Exhausted);
    return r.status == HomogeneityStatus::Holds;
}

}  // namespace

TEST_CASE("is_partial_polymorphism")
{
    auto c2 = chain2();
    CHECK(is_partial_polymorphism(c2, PartialOpMap(1, 2, {{{0}, 1}})));
    auto flip = is_partial_polymorphism(c2, PartialOpMap(1, 2, {{{0}, 1}, {{1}, 0}}));
    REQUIRE_FALSE(flip);
    CHECK(flip.violation->symbol == "le");
    CHECK(flip.violation->rows == std::vector<std::size_t>{0, 1});
    CHECK(flip.violation->image == Tuple{1, 0});
    CHECK(is_partial_polymorphism(c2, PartialOpMap(2, 2, {{{0, 1}, 0}, {{1, 0}, 1}})));
}

TEST_CASE("is_partial_polymorphism agrees with the naive oracle")
{
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + trial % 2, k = 1 + trial % 3;
        auto a = random_structure(rng, n, trial % 5 == 0, "A");
        auto points = oracles::all_tuples(n, k);
        std::vector<PartialOpMap::Entry> entries;
        for (const auto& p : points)
            if (rng() % 3 == 0)
                entries.emplace_back(p, static_cast<Element>(rng() % n));
        PartialOpMap f(k, n, entries);
        std::vector<Tuple> rows;
        std::vector<Element> values;
        for (const auto& [r, v] : f.entries()) {
            rows.push_back(r);
            values.push_back(v);
        }
        CHECK(bool(is_partial_polymorphism(a, f)) == oracles::preserves(a, rows, values));
    }
}

TEST_CASE("extendable")
{
    auto c2 = chain2();
    auto e = extendable(c2, PartialOpMap(2, 2, {{{0, 1}, 0}, {{1, 0}, 1}}));
    REQUIRE(e.status == SearchStatus::Found);
    REQUIRE(e.polymorphism);
    CHECK((*e.polymorphism)(Tuple{0, 1}) == 0);
    CHECK((*e.polymorphism)(Tuple{1, 0}) == 1);

    CHECK(extendable(bowtie(), PartialOpMap(1, 4, {{{0}, 2}, {{1}, 3}})).status == SearchStatus::Unsat);
    CHECK(extendable(edgeless(2), PartialOpMap(2, 2, {{{0, 1}, 1}, {{1, 1}, 0}})).status == SearchStatus::Found);
    CHECK_THROWS_AS(extendable(c2, PartialOpMap(1, 2, {{{0}, 1}, {{1}, 0}})), std::invalid_argument);
}

TEST_CASE("extendable agrees with brute force over all total maps (n = 2, k <= 2)")
{
    for (const auto& a : all_n2_binary()) {
        for (std::size_t k = 1; k <= 2; ++k) {
            const auto pols = oracles::polymorphisms(a, k);
            const auto points = oracles::all_tuples(2, k);
            for (const auto& code : oracles::all_tuples(3, points.size())) {
                std::vector<PartialOpMap::Entry> entries;
                std::vector<Tuple> rows;
                std::vector<std::size_t> idx;
                std::vector<Element> values;
                for (std::size_t p = 0; p < points.size(); ++p)
                    if (code[p] < 2) {
                        entries.emplace_back(points[p], code[p]);
                        rows.push_back(points[p]);
                        idx.push_back(p);
                        values.push_back(code[p]);
                    }
                if (!oracles::preserves(a, rows, values))
                    continue;
                auto e = extendable(a, PartialOpMap(k, 2, entries));
                CHECK((e.status == SearchStatus::Found) == oracles::extends(pols, idx, values));
            }
        }
    }
}

TEST_CASE("hom-homogeneity examples")
{
    CHECK(holds(is_hom_homogeneous(edgeless(4))));
    CHECK(holds(is_hom_homogeneous(chain2())));

    auto r = is_hom_homogeneous(bowtie());
    REQUIRE(r.status == HomogeneityStatus::Counterexample);
    CHECK(r.counterexample->domain == std::vector<PowerIndex>{0, 1});
    CHECK(r.counterexample->values == std::vector<Element>{2, 3});
    CHECK(r.counterexample->missing == 2);
    CHECK(r.recheck == SearchStatus::Unsat);
}

TEST_CASE("k-PH examples")
{
    for (std::size_t k = 1; k <= 3; ++k)
        CHECK(holds(is_k_ph(edgeless(2), k)));
    CHECK(holds(is_k_ph(chain2(), 2)));

    auto p = is_k_ph(p3(), 3);
    REQUIRE(p.status == HomogeneityStatus::Counterexample);
    auto f = as_partial_op(power(p3(), 3), *p.counterexample);
    CHECK(is_partial_polymorphism(p3(), f));
    CHECK(extendable(p3(), f).status == SearchStatus::Unsat);
}

TEST_CASE("one-point reduction matches full extension brute force on all n = 2 structures")
{
    for (const auto& a : all_n2_binary())
        for (std::size_t k = 1; k <= 3; ++k) {
            INFO(a.name(), " k=", k);
            CHECK(holds(is_k_ph(a, k)) == oracles::is_k_ph(a, k));
        }
}

TEST_CASE("hom-homogeneity matches brute force on small random structures")
{
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 2 + trial % 3;
        auto a = random_structure(rng, n, false, "R");
        INFO(serialize_rel(a));
        CHECK(holds(is_hom_homogeneous(a)) == oracles::is_k_ph(a, 1));
    }
}

TEST_CASE("canonical partial near-unanimity maps")
{
    auto two = canonical_partial_nu(edgeless(2), 3);
    CHECK(two.size() == 8);
    for (const auto& [row, v] : two.entries()) {
        const auto ones = std::count(row.begin(), row.end(), Element{1});
        CHECK(v == (ones >= 2 ? 1u : 0u));
    }
    CHECK(canonical_partial_nu(k3(), 3).size() == 3 + 3 * 2 * 3);
    CHECK(canonical_partial_nu(FiniteStructure("one", 1, k2().signature(), {RelationSet(2, 1, {})}), 3).size() == 1);
    CHECK_THROWS_AS(canonical_partial_nu(chain2(), 2), std::invalid_argument);

    // a ternary relation defeats the ternary canonical map
    auto t = FiniteStructure("t", 2, Signature({{"t", 3}}), {RelationSet(3, 2, {{0, 0, 1}, {0, 1, 0}, {1, 0, 0}})});
    CHECK_THROWS_AS(canonical_partial_nu(t, 3), std::domain_error);
}

TEST_CASE("near-unanimity polymorphisms")
{
    for (auto a : {chain2(), k2(), edgeless(3)}) {
        auto e = find_nu_polymorphism(a, 3);
        REQUIRE(e.status == SearchStatus::Found);
        const auto& g = *e.polymorphism;
        for (Element x = 0; x < a.size(); ++x)
            for (Element y = 0; y < a.size(); ++y) {
                CHECK(g(Tuple{y, x, x}) == x);
                CHECK(g(Tuple{x, y, x}) == x);
                CHECK(g(Tuple{x, x, y}) == x);
            }
        CHECK(check_is_homomorphism(power(a, 3), a, g.table()));
    }
}

TEST_CASE("decide_ph examples")
{
    auto c2 = decide_ph(chain2());
    CHECK(c2.status == PHStatus::PH);
    CHECK(c2.trace.nu_status == SearchStatus::Found);

    CHECK(decide_ph(one_point()).status == PHStatus::PH);

    auto bt = decide_ph(bowtie());
    REQUIRE(bt.status == PHStatus::NotPH);
    REQUIRE(bt.certificate);
    CHECK(verify_certificate(bowtie(), *bt.certificate));

    auto chain5 = canonical_structure(Family::Poset, 5, [] {
        Pairs ps;
        for (Element a = 0; a < 5; ++a)
            for (Element b = a; b < 5; ++b)
                ps.emplace_back(a, b);
        return ps;
    }());
    auto v5 = decide_ph(chain5);
    CHECK(v5.status == PHStatus::Inconclusive);
    CHECK_FALSE(v5.trace.within_envelope);
}

TEST_CASE("decide_ph: serial and OpenMP backends agree")
{
    for (const auto& a : all_n2_binary()) {
        auto s = decide_ph(a, {{}, Backend::Serial});
        auto p = decide_ph(a, {{}, Backend::OpenMP});
        CHECK(s.status == p.status);
        CHECK(s.trace.candidates == p.trace.candidates);
        CHECK(s.certificate.has_value() == p.certificate.has_value());
        if (s.certificate && p.certificate)
            CHECK(s.certificate->map == p.certificate->map);
    }
}

TEST_CASE("decide_ph skip of locally closed column sets changes nothing")
{
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 10; ++trial) {
        auto a = random_structure(rng, 3, false, "R");
        DecideOptions with;
        with.skip_locally_closed = true;
        auto x = decide_ph(a), y = decide_ph(a, with);
        CHECK(x.status == y.status);
        if (x.certificate && y.certificate)
            CHECK(x.certificate->map == y.certificate->map);
    }
}

TEST_CASE("decide_ph on n = 2 agrees with the k-PH brute force")
{
    for (const auto& a : all_n2_binary()) {
        auto v = decide_ph(a);
        INFO(a.name());
        REQUIRE(v.status != PHStatus::Inconclusive);
        bool oracle = true;
        for (std::size_t k = 1; k <= 3 && oracle; ++k)
            oracle = oracles::is_k_ph(a, k);
        CHECK((v.status == PHStatus::PH) == oracle);
        if (v.certificate)
            CHECK(verify_certificate(a, *v.certificate));
        if (v.status == PHStatus::PH)
            CHECK(find_nu_polymorphism(a, 3).status == SearchStatus::Found);
    }
}
