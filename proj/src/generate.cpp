#include <polyhom/generate.hpp>

#include <algorithm>
#include <random>

namespace polyhom {

std::optional<GenFamily> parse_gen_family(const std::string& s)
{
    if (s == "graph" || s == "graphs")
        return GenFamily::Graph;
    if (s == "poset" || s == "posets")
        return GenFamily::Poset;
    if (s == "strict" || s == "strict-poset" || s == "strict-posets")
        return GenFamily::StrictPoset;
    if (s == "n2" || s == "n2-binary")
        return GenFamily::N2Binary;
    return std::nullopt;
}

const char* to_string(GenFamily f)
{
    switch (f) {
    case GenFamily::Graph: return "graph";
    case GenFamily::Poset: return "poset";
    case GenFamily::StrictPoset: return "strict";
    case GenFamily::N2Binary: return "n2-binary";
    }
    return "?";
}

namespace {

Pairs off_diagonal(std::size_t n, bool ordered)
{
    Pairs ps;
    for (Element a = 0; a < n; ++a)
        for (Element b = 0; b < n; ++b)
            if (ordered ? a != b : a < b)
                ps.emplace_back(a, b);
    return ps;
}

Pairs select(const Pairs& from, std::uint64_t mask)
{
    Pairs out;
    for (std::size_t i = 0; i < from.size(); ++i)
        if (mask >> i & 1)
            out.push_back(from[i]);
    return out;
}

bool is_strict_order(std::size_t n, const Pairs& ps)
{
    std::vector<bool> r(n * n, false);
    for (auto [a, b] : ps)
        r[a * n + b] = true;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            if (!r[a * n + b])
                continue;
            if (r[b * n + a])
                return false;
            for (std::size_t c = 0; c < n; ++c)
                if (r[b * n + c] && !r[a * n + c])
                    return false;
        }
    return true;
}

Pairs reflexive(std::size_t n, Pairs ps)
{
    for (Element a = 0; a < n; ++a)
        ps.emplace_back(a, a);
    return ps;
}

FiniteStructure make(GenFamily family, std::size_t n, const Pairs& strict, const std::string& name)
{
    switch (family) {
    case GenFamily::Graph: return graph_from_edges(n, strict, name);
    case GenFamily::Poset: return canonical_structure(Family::Poset, n, reflexive(n, strict), name);
    case GenFamily::StrictPoset: return canonical_structure(Family::StrictPoset, n, strict, name);
    case GenFamily::N2Binary: break;
    }
    std::vector<Tuple> ts;
    for (auto [a, b] : strict)
        ts.push_back({a, b});
    return FiniteStructure(name, 2, Signature({{"r", 2}}), {RelationSet(2, 2, std::move(ts))});
}

std::string prefix(GenFamily family, std::size_t n)
{
    return std::string(to_string(family)) + std::to_string(n) + "_";
}

}  // namespace

std::vector<FiniteStructure> all_labeled(GenFamily family, std::size_t n)
{
    if (family == GenFamily::N2Binary)
        n = 2;
    if (n == 0 || n > 8)
        throw std::invalid_argument("exhaustive generation needs 1 <= n <= 8");
    Pairs pool;
    if (family == GenFamily::N2Binary)
        pool = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    else
        pool = off_diagonal(n, family != GenFamily::Graph);
    if (pool.size() > 30)
        throw std::invalid_argument("too many labeled instances to enumerate");
    std::vector<FiniteStructure> out;
    const std::string pre = prefix(family, n);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << pool.size()); ++mask) {
        Pairs ps = select(pool, mask);
        if ((family == GenFamily::Poset || family == GenFamily::StrictPoset) && !is_strict_order(n, ps))
            continue;
        out.push_back(make(family, n, ps, pre + std::to_string(mask)));
    }
    return out;
}

std::vector<FiniteStructure> random_labeled(GenFamily family, std::size_t n, std::size_t count, std::uint64_t seed)
{
    if (family == GenFamily::N2Binary)
        n = 2;
    if (n == 0 || n > 64)
        throw std::invalid_argument("random generation needs 1 <= n <= 64");
    std::mt19937_64 rng(seed);
    std::vector<FiniteStructure> out;
    const std::string pre = prefix(family, n) + "r";
    for (std::size_t i = 0; i < count; ++i) {
        Pairs ps;
        if (family == GenFamily::N2Binary) {
            for (auto p : Pairs{{0, 0}, {0, 1}, {1, 0}, {1, 1}})
                if (rng() & 1)
                    ps.push_back(p);
        } else if (family == GenFamily::Graph) {
            for (auto p : off_diagonal(n, false))
                if (rng() & 1)
                    ps.push_back(p);
        } else {
            // random DAG on a shuffled labeling, then transitive closure
            std::vector<Element> perm(n);
            for (Element a = 0; a < n; ++a)
                perm[a] = a;
            std::shuffle(perm.begin(), perm.end(), rng);
            std::vector<bool> r(n * n, false);
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = a + 1; b < n; ++b)
                    if (rng() % 3 == 0)
                        r[perm[a] * n + perm[b]] = true;
            for (std::size_t c = 0; c < n; ++c)
                for (std::size_t a = 0; a < n; ++a)
                    for (std::size_t b = 0; b < n; ++b)
                        if (r[a * n + c] && r[c * n + b])
                            r[a * n + b] = true;
            for (Element a = 0; a < n; ++a)
                for (Element b = 0; b < n; ++b)
                    if (r[a * n + b])
                        ps.emplace_back(a, b);
        }
        out.push_back(make(family, n, ps, pre + std::to_string(i)));
    }
    return out;
}

}  // namespace polyhom
