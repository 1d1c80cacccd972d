#pragma once

// Brute-force reference computations. Deliberately naive: no pruning, no
// shared code with the library beyond the data types.

#include <polyhom/partial_op.hpp>
#include <polyhom/structure.hpp>

#include <functional>
#include <set>

namespace oracles {

using namespace polyhom;

inline std::vector<Tuple> all_tuples(std::size_t n, std::size_t k)
{
    std::vector<Tuple> out;
    Tuple t(k, 0);
    while (true) {
        out.push_back(t);
        std::size_t j = k;
        while (j > 0 && ++t[j - 1] == n)
            t[--j] = 0;
        if (j == 0)
            return out;
    }
}

inline bool in_relation(const RelationSet& r, const Tuple& t)
{
    for (const auto& u : r.tuples())
        if (u == t)
            return true;
    return false;
}

/// rows[i] -> values[i] preserves every relation: every choice of rows with
/// all columns in the relation has its image in the relation.
inline bool preserves(const FiniteStructure& a, const std::vector<Tuple>& rows, const std::vector<Element>& values)
{
    if (rows.empty())
        return true;
    const std::size_t k = rows[0].size();
    for (std::size_t r = 0; r < a.signature().size(); ++r) {
        const RelationSet& rel = a.relation(r);
        for (const auto& sel : all_tuples(rows.size(), rel.arity())) {
            bool binding = true;
            for (std::size_t j = 0; j < k && binding; ++j) {
                Tuple col;
                for (auto i : sel)
                    col.push_back(rows[i][j]);
                binding = in_relation(rel, col);
            }
            if (!binding)
                continue;
            Tuple img;
            for (auto i : sel)
                img.push_back(values[i]);
            if (!in_relation(rel, img))
                return false;
        }
    }
    return true;
}

/// All k-ary polymorphisms as tables indexed like all_tuples(n, k).
inline std::vector<std::vector<Element>> polymorphisms(const FiniteStructure& a, std::size_t k)
{
    const auto points = all_tuples(a.size(), k);
    std::vector<std::vector<Element>> out;
    for (const auto& table : all_tuples(a.size(), points.size()))
        if (preserves(a, points, table))
            out.push_back(table);
    return out;
}

inline std::size_t index_of(const Tuple& t, std::size_t n)
{
    std::size_t x = 0;
    for (auto e : t)
        x = x * n + e;
    return x;
}

inline bool extends(const std::vector<std::vector<Element>>& pols, const std::vector<std::size_t>& points,
                    const std::vector<Element>& values)
{
    for (const auto& g : pols) {
        bool ok = true;
        for (std::size_t i = 0; i < points.size() && ok; ++i)
            ok = g[points[i]] == values[i];
        if (ok)
            return true;
    }
    return false;
}

/// k-PH by definition: every local k-ary polymorphism extends. Enumerates
/// all (n+1)^(n^k) partial maps.
inline bool is_k_ph(const FiniteStructure& a, std::size_t k)
{
    const std::size_t n = a.size();
    const auto points = all_tuples(n, k);
    const auto pols = polymorphisms(a, k);
    for (const auto& code : all_tuples(n + 1, points.size())) {
        std::vector<Tuple> rows;
        std::vector<std::size_t> idx;
        std::vector<Element> values;
        for (std::size_t p = 0; p < points.size(); ++p)
            if (code[p] < n) {
                rows.push_back(points[p]);
                idx.push_back(p);
                values.push_back(code[p]);
            }
        if (preserves(a, rows, values) && !extends(pols, idx, values))
            return false;
    }
    return true;
}

}  // namespace oracles
