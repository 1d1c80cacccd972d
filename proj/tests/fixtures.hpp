#pragma once

#include <polyhom/families.hpp>
#include <polyhom/rel_format.hpp>

#include <random>

namespace fixtures {

using namespace polyhom;

inline FiniteStructure one_binary(const std::string& name, std::size_t n, const std::string& symbol, Pairs pairs)
{
    std::vector<Tuple> ts;
    for (auto [a, b] : pairs)
        ts.push_back({a, b});
    return FiniteStructure(name, n, Signature({{symbol, 2}}), {RelationSet(2, n, std::move(ts))});
}

inline FiniteStructure chain2() { return one_binary("C2", 2, "le", {{0, 0}, {0, 1}, {1, 1}}); }
inline FiniteStructure k2() { return graph_from_edges(2, {{0, 1}}, "K2"); }
inline FiniteStructure edgeless(std::size_t n) { return graph_from_edges(n, {}, "E" + std::to_string(n)); }
inline FiniteStructure p3() { return graph_from_edges(3, {{0, 1}, {1, 2}}, "P3"); }
inline FiniteStructure k3() { return graph_from_edges(3, {{0, 1}, {0, 2}, {1, 2}}, "K3"); }
inline FiniteStructure one_point() { return FiniteStructure("pt", 1, Signature{}, {}); }

/// a1=0, a2=1 below a3=2, a4=3.
inline FiniteStructure bowtie()
{
    return canonical_structure(Family::Poset, 4, {{0, 0}, {1, 1}, {2, 2}, {3, 3}, {0, 2}, {0, 3}, {1, 2}, {1, 3}},
                               "bowtie");
}

/// 0 < 1,2 < 3.
inline FiniteStructure diamond()
{
    return canonical_structure(Family::Poset, 4,
                               {{0, 0}, {1, 1}, {2, 2}, {3, 3}, {0, 1}, {0, 2}, {0, 3}, {1, 3}, {2, 3}}, "diamond");
}

/// The 16 structures on {0,1} with one binary relation, in mask order
/// (bit i of the mask is pair (i/2, i%2)).
inline std::vector<FiniteStructure> all_n2_binary()
{
    std::vector<FiniteStructure> out;
    for (unsigned mask = 0; mask < 16; ++mask) {
        Pairs ps;
        for (unsigned i = 0; i < 4; ++i)
            if (mask & (1u << i))
                ps.emplace_back(i / 2, i % 2);
        out.push_back(one_binary("n2_" + std::to_string(mask), 2, "r", ps));
    }
    return out;
}

/// Random structure with one binary relation (density ~1/2) and, when
/// `ternary`, an extra ternary relation.
inline FiniteStructure random_structure(std::mt19937_64& rng, std::size_t n, bool ternary, const std::string& name)
{
    std::vector<Tuple> bin, ter;
    for (Element a = 0; a < n; ++a)
        for (Element b = 0; b < n; ++b)
            if (rng() & 1)
                bin.push_back({a, b});
    std::vector<Symbol> sig{{"r", 2}};
    std::vector<RelationSet> rels{RelationSet(2, n, bin)};
    if (ternary) {
        for (Element a = 0; a < n; ++a)
            for (Element b = 0; b < n; ++b)
                for (Element c = 0; c < n; ++c)
                    if (rng() % 3 != 0)
                        ter.push_back({a, b, c});
        sig.push_back({"t", 3});
        rels.emplace_back(3, n, ter);
    }
    return FiniteStructure(name, n, Signature(sig), std::move(rels));
}

}  // namespace fixtures
