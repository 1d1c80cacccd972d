#include "fixtures.hpp"

#include <polyhom/classify.hpp>
#include <polyhom/generate.hpp>

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

using namespace polyhom;
using namespace fixtures;

namespace {

void check_witness(const FiniteStructure& a, const ClassReport& r)
{
    if (r.verdict != PHStatus::NotPH)
        return;
    REQUIRE(r.witness);
    CHECK(is_partial_polymorphism(a, *r.witness));
    CHECK(extendable(a, *r.witness).status == SearchStatus::Unsat);
}

FiniteStructure relabel(const FiniteStructure& g, const std::vector<Element>& perm)
{
    Pairs edges;
    for (const auto& t : g.relation(0).tuples())
        if (t[0] < t[1])
            edges.emplace_back(perm[t[0]], perm[t[1]]);
    return graph_from_edges(g.size(), edges);
}

// Partitions as equivalence matrices; meet is intersection, join is the
// transitive closure of the union.
using Eq = std::vector<std::vector<bool>>;

Eq as_matrix(const Partition& p)
{
    Eq m(p.size(), std::vector<bool>(p.size()));
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < p.size(); ++j)
            m[i][j] = p[i] == p[j];
    return m;
}

Eq naive_meet(const Eq& x, const Eq& y)
{
    Eq m = x;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j)
            m[i][j] = x[i][j] && y[i][j];
    return m;
}

Eq naive_join(const Eq& x, const Eq& y)
{
    const std::size_t n = x.size();
    Eq m = x;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            m[i][j] = x[i][j] || y[i][j];
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (m[i][k] && m[k][j])
                    m[i][j] = true;
    return m;
}

std::size_t brute_sublattice_count(std::size_t n)
{
    std::vector<Eq> all;
    for (const auto& p : all_partitions(n))
        all.push_back(as_matrix(p));
    std::size_t count = 0;
    for (std::uint32_t s = 1; s < (1u << all.size()); ++s) {
        std::vector<Eq> members;
        for (std::size_t i = 0; i < all.size(); ++i)
            if (s >> i & 1)
                members.push_back(all[i]);
        auto inside = [&](const Eq& e) { return std::find(members.begin(), members.end(), e) != members.end(); };
        bool closed = true;
        for (const auto& x : members)
            for (const auto& y : members)
                closed = closed && inside(naive_meet(x, y)) && inside(naive_join(x, y));
        count += closed;
    }
    return count;
}

}  // namespace

TEST_CASE("graph classification examples")
{
    auto two_k2 = graph_from_edges(4, {{0, 1}, {2, 3}});
    auto r = classify_graph(two_k2);
    CHECK(r.verdict == PHStatus::PH);
    CHECK(r.reason("is_k2_union") == true);
    CHECK(r.reason("property_star") == true);
    CHECK_FALSE(graph_star_witness(two_k2));

    CHECK(classify_graph(edgeless(5)).verdict == PHStatus::PH);

    auto p = classify_graph(p3());
    CHECK(p.verdict == PHStatus::NotPH);
    CHECK(p.reason("property_star") == false);
    check_witness(p3(), p);

    CHECK_THROWS(classify_graph(chain2()));
}

TEST_CASE("star witnesses")
{
    auto w = graph_star_witness(p3());
    REQUIRE(w);
    CHECK(w->map.arity() == 3);
    CHECK(w->neighborless == std::vector<Element>{0, 1});
    CHECK(w->check == SearchStatus::Unsat);

    auto t = graph_star_witness(k3());
    REQUIRE(t);
    CHECK(t->k == 3);
    CHECK(t->map.arity() == 4);
    CHECK(t->neighborless == std::vector<Element>{0, 1, 2});
    CHECK(is_partial_polymorphism(k3(), t->map));
    CHECK(extendable(k3(), t->map).status == SearchStatus::Unsat);
}

TEST_CASE("graph verdicts agree with decide_ph on at most 3 vertices")
{
    for (std::size_t n = 1; n <= 3; ++n)
        for (const auto& g : all_labeled(GenFamily::Graph, n)) {
            INFO(g.name());
            auto c = classify_graph(g);
            CHECK(c.verdict == decide_ph(g).status);
            check_witness(g, c);
        }
}

TEST_CASE("graph verdict is invariant under relabeling")
{
    for (std::size_t n = 1; n <= 4; ++n)
        for (const auto& g : all_labeled(GenFamily::Graph, n)) {
            const auto v = classify_graph(g).verdict;
            std::vector<Element> perm(n);
            std::iota(perm.begin(), perm.end(), Element{0});
            do
                CHECK(classify_graph(relabel(g, perm)).verdict == v);
            while (std::next_permutation(perm.begin(), perm.end()));
        }
}

TEST_CASE("poset classification examples")
{
    CHECK(classify_poset(chain2()).verdict == PHStatus::PH);

    auto bt = classify_poset(bowtie());
    CHECK(bt.verdict == PHStatus::NotPH);
    CHECK(bt.reason("is_x5_dense") == false);
    REQUIRE(bt.witness);
    CHECK(*bt.witness == PartialOpMap(1, 4, {{{0}, 2}, {{1}, 3}}));
    check_witness(bowtie(), bt);

    auto anti = canonical_structure(Family::Poset, 3, {{0, 0}, {1, 1}, {2, 2}});
    auto a = classify_poset(anti);
    CHECK(a.verdict == PHStatus::PH);
    CHECK(a.reason("is_antichain") == true);

    auto d = classify_poset(diamond());
    CHECK(d.verdict == PHStatus::PH);
    CHECK(d.reason("locally_bounded") == true);
}

TEST_CASE("poset verdicts agree with decide_ph on at most 3 elements")
{
    std::size_t total = 0;
    for (std::size_t n = 1; n <= 3; ++n)
        for (const auto& p : all_labeled(GenFamily::Poset, n)) {
            INFO(p.name());
            auto c = classify_poset(p);
            CHECK(c.verdict == decide_ph(p).status);
            check_witness(p, c);
            ++total;
        }
    CHECK(total == 1 + 3 + 19);
}

TEST_CASE("realizers")
{
    auto chain3 = canonical_structure(Family::Poset, 3, {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {1, 2}, {0, 2}});
    CHECK(realizer(chain3) == std::vector<std::vector<Element>>{{0, 1, 2}});
    CHECK(realizer(canonical_structure(Family::Poset, 2, {{0, 0}, {1, 1}})).size() == 2);
    CHECK(realizer(bowtie()).size() == 2);

    for (std::size_t n = 1; n <= 4; ++n)
        for (const auto& p : all_labeled(GenFamily::Poset, n)) {
            std::set<std::pair<Element, Element>> meet_of_orders;
            for (Element a = 0; a < n; ++a)
                for (Element b = 0; b < n; ++b)
                    meet_of_orders.insert({a, b});
            for (const auto& order : realizer(p)) {
                REQUIRE(order.size() == n);
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j < i; ++j)
                        meet_of_orders.erase({order[i], order[j]});
            }
            std::set<std::pair<Element, Element>> le;
            for (const auto& t : p.relation(0).tuples())
                le.insert({t[0], t[1]});
            CHECK(meet_of_orders == le);
        }
}

TEST_CASE("strict posets")
{
    auto chain = canonical_structure(Family::StrictPoset, 2, {{0, 1}});
    auto c = classify_strict_poset(chain);
    CHECK(c.verdict == PHStatus::NotPH);
    check_witness(chain, c);
    CHECK(classify_strict_poset(canonical_structure(Family::StrictPoset, 4, {})).verdict == PHStatus::PH);
    auto bow = canonical_structure(Family::StrictPoset, 4, {{0, 2}, {0, 3}, {1, 2}, {1, 3}});
    CHECK(classify_strict_poset(bow).verdict == PHStatus::NotPH);

    for (std::size_t n = 1; n <= 3; ++n)
        for (const auto& s : all_labeled(GenFamily::StrictPoset, n)) {
            INFO(s.name());
            auto r = classify_strict_poset(s);
            CHECK(r.verdict == decide_ph(s).status);
            check_witness(s, r);
        }
}

TEST_CASE("partition arithmetic")
{
    CHECK(all_partitions(3).size() == 5);
    CHECK(all_partitions(4).size() == 15);
    CHECK(normalize(Partition{5, 2, 5}) == Partition{0, 1, 0});
    Partition x{0, 0, 1, 1}, y{0, 1, 0, 1};
    CHECK(meet(x, y) == discrete_partition(4));
    CHECK(join(x, y) == full_partition(4));
    CHECK(leq(discrete_partition(4), x));
    CHECK_FALSE(leq(x, y));
    CHECK(permute(x, y));
    CHECK_FALSE(permute(Partition{0, 0, 1}, Partition{0, 1, 1}));
}

TEST_CASE("meet-complete sublattices")
{
    auto one = enumerate_meet_complete_sublattices(1);
    REQUIRE(one.lattices.size() == 1);
    CHECK(one.lattices[0] == PartitionFamily{{0}});

    auto two = enumerate_meet_complete_sublattices(2);
    REQUIRE(two.lattices.size() == 3);
    CHECK(two.lattices[0] == PartitionFamily{{0, 0}});
    CHECK(two.lattices[1] == PartitionFamily{{0, 1}});
    CHECK(two.lattices[2] == PartitionFamily{{0, 0}, {0, 1}});

    for (std::size_t n = 1; n <= 4; ++n) {
        auto e = enumerate_meet_complete_sublattices(n);
        CHECK_FALSE(e.capped);
        CHECK(e.lattices.size() == brute_sublattice_count(n));
    }
    CHECK(enumerate_meet_complete_sublattices(4, 10).capped);
}

TEST_CASE("arithmetical lattices")
{
    for (std::size_t n = 1; n <= 4; ++n)
        CHECK(is_arithmetical({full_partition(n), discrete_partition(n)}).ok);
    CHECK(is_arithmetical({{0, 0, 0}, {0, 0, 1}, {0, 1, 2}}).ok);

    PartitionFamily m3{{0, 0, 0, 0}, {0, 0, 1, 1}, {0, 1, 0, 1}, {0, 1, 1, 0}, {0, 1, 2, 3}};
    auto r = is_arithmetical(m3);
    CHECK_FALSE(r.ok);
    CHECK_FALSE(r.non_permuting);
    REQUIRE(r.non_distributive);
    auto [i, j, k] = *r.non_distributive;
    CHECK(meet(m3[i], join(m3[j], m3[k])) != join(meet(m3[i], m3[j]), meet(m3[i], m3[k])));

    auto np = is_arithmetical({{0, 0, 0}, {0, 0, 1}, {0, 1, 1}, {0, 1, 2}});
    CHECK_FALSE(np.ok);
    CHECK(np.non_permuting);
}

TEST_CASE("Kaarli cross-check for n <= 3")
{
    auto two = kaarli_cross_check(2);
    CHECK(two.entries.size() == 3);
    for (const auto& e : two.entries) {
        CHECK(e.arithmetical.ok);
        CHECK(e.decided == PHStatus::PH);
    }
    auto three = kaarli_cross_check(3);
    CHECK(three.disagreements == 0);
    CHECK(three.inconclusive == 0);
    CHECK(three.agreements == three.entries.size());
    for (const auto& e : three.entries)
        if (e.refutation)
            CHECK(extendable(lattice_structure(e.lattice), *e.refutation).status == SearchStatus::Unsat);
}
