#include <polyhom/classify.hpp>

#include <algorithm>
#include <bit>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace polyhom {

std::optional<bool> ClassReport::reason(const std::string& name) const
{
    for (const auto& r : reasons)
        if (r.name == name)
            return r.value;
    return std::nullopt;
}

namespace {

using Matrix = std::vector<std::vector<bool>>;

Matrix relation_matrix(const FiniteStructure& a)
{
    const std::size_t n = a.size();
    Matrix m(n, std::vector<bool>(n, false));
    const RelationSet& r = a.relation(0);
    for (std::size_t i = 0; i < r.size(); ++i) {
        auto t = r.tuple(i);
        m[t[0]][t[1]] = true;
    }
    return m;
}

// Escalating k-PH search; returns the first verified non-extendable map.
struct Refutation
{
    std::size_t k = 0;
    PartialOpMap map;
    SearchStatus check = SearchStatus::Unsat;
};

std::optional<Refutation> refute_by_search(const FiniteStructure& a, std::size_t max_k, const SearchLimits& limits,
                                           bool* exhausted = nullptr)
{
    for (std::size_t k = 1; k <= max_k; ++k) {
        auto r = is_k_ph(a, k, limits);
        if (r.status == HomogeneityStatus::Exhausted) {
            if (exhausted)
                *exhausted = true;
            continue;
        }
        if (r.status != HomogeneityStatus::Counterexample)
            continue;
        auto f = as_partial_op(power(a, k), *r.counterexample);
        if (!is_partial_polymorphism(a, f))
            continue;
        auto e = extendable(a, f, limits);
        if (e.status == SearchStatus::Unsat)
            return Refutation{k, std::move(f), e.status};
    }
    return std::nullopt;
}

void attach(ClassReport& report, std::optional<Refutation> r)
{
    if (!r)
        return;
    report.witness = std::move(r->map);
    report.witness_check = r->check;
}

}  // namespace

// ---------------------------------------------------------------- graphs

ClassReport classify_graph(const FiniteStructure& g, const SearchLimits& limits)
{
    require_family(Family::Graph, g);
    const std::size_t n = g.size();
    const Matrix adj = relation_matrix(g);

    std::vector<std::size_t> degree(n, 0);
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = 0; v < n; ++v)
            degree[u] += adj[u][v];

    // components
    std::vector<std::size_t> comp(n, n);
    std::size_t isolated = 0, k2s = 0, other = 0, components = 0;
    for (std::size_t s = 0; s < n; ++s) {
        if (comp[s] != n)
            continue;
        std::vector<std::size_t> members{s};
        comp[s] = components;
        for (std::size_t i = 0; i < members.size(); ++i)
            for (std::size_t v = 0; v < n; ++v)
                if (adj[members[i]][v] && comp[v] == n) {
                    comp[v] = components;
                    members.push_back(v);
                }
        ++components;
        if (members.size() == 1)
            ++isolated;
        else if (members.size() == 2)
            ++k2s;
        else
            ++other;
    }

    const bool edgeless = g.relation(0).empty();
    const bool k2_union = !edgeless && isolated == 0 && other == 0;
    // no a - b - c with a != c, i.e. every degree is at most 1
    const bool star = std::all_of(degree.begin(), degree.end(), [](std::size_t d) { return d <= 1; });
    const auto witness = star ? std::nullopt : graph_star_witness(g, limits);

    ClassReport report;
    report.family = Family::Graph;
    std::ostringstream census;
    census << "K1:" << isolated << " K2:" << k2s << " larger:" << other;
    report.reasons = {
        {"edgeless", edgeless, {}},
        {"is_k2_union", k2_union, {}},
        {"property_star", star, {}},
        {"connected", components <= 1, {}},
        {"components", other == 0, census.str()},
    };
    report.verdict = edgeless || k2_union ? PHStatus::PH : PHStatus::NotPH;
    if (report.verdict == PHStatus::PH)
        return report;

    if (witness) {
        report.witness = witness->map;
        report.witness_tuple = Tuple{witness->a, witness->b, witness->c};
        report.witness_check = witness->check;
        return report;
    }
    attach(report, refute_by_search(g, 3, limits));
    return report;
}

std::optional<StarWitness> graph_star_witness(const FiniteStructure& g, const SearchLimits& limits)
{
    require_family(Family::Graph, g);
    const std::size_t n = g.size();
    const Matrix adj = relation_matrix(g);

    // a - b - c with a != c: an induced path or a triangle
    std::optional<std::array<Element, 3>> abc;
    for (Element a = 0; a < n && !abc; ++a)
        for (Element b = 0; b < n && !abc; ++b)
            for (Element c = 0; c < n && !abc; ++c)
                if (a != c && adj[a][b] && adj[b][c])
                    abc = std::array<Element, 3>{a, b, c};
    if (!abc)
        return std::nullopt;

    // smallest vertex set without a common neighbor, by size then lex
    std::optional<std::vector<Element>> lonely;
    for (std::size_t size = 1; size <= n && !lonely; ++size) {
        std::vector<bool> pick(n, false);
        std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(size), true);
        do {
            std::vector<Element> set;
            for (Element v = 0; v < n; ++v)
                if (pick[v])
                    set.push_back(v);
            bool common = false;
            for (Element w = 0; w < n && !common; ++w)
                common = std::all_of(set.begin(), set.end(), [&](Element v) { return bool(adj[v][w]); });
            if (!common)
                lonely = set;
        } while (!lonely && std::prev_permutation(pick.begin(), pick.end()));
    }
    if (!lonely)
        return std::nullopt;

    const auto [a, b, c] = *abc;
    const std::size_t k = lonely->size();
    const std::size_t arity = k + 1;
    std::vector<PartialOpMap::Entry> entries;
    for (std::size_t i = 1; i <= k; ++i) {
        Tuple leaf(arity, a);
        leaf[i] = c;
        entries.emplace_back(std::move(leaf), (*lonely)[i - 1]);
    }
    PartialOpMap f(arity, n, std::move(entries));
    if (!is_partial_polymorphism(g, f))
        return std::nullopt;
    auto e = extendable(g, f, limits);
    if (e.status != SearchStatus::Unsat)
        return std::nullopt;

    const auto center = power(g, arity).encode(Tuple(arity, b));
    return StarWitness{k, a, b, c, *lonely, std::move(f), center, e.status};
}

// ---------------------------------------------------------------- posets

namespace {

std::vector<Element> topological(const Matrix& le, bool largest_first, std::optional<std::pair<Element, Element>> force)
{
    const std::size_t n = le.size();
    std::vector<bool> placed(n, false);
    std::vector<Element> out;
    while (out.size() < n) {
        std::optional<Element> best;
        for (Element v = 0; v < n; ++v) {
            if (placed[v])
                continue;
            bool ready = true;
            for (Element u = 0; u < n && ready; ++u)
                if (u != v && le[u][v] && !placed[u])
                    ready = false;
            if (ready && force && v == force->second && !placed[force->first])
                ready = false;
            if (ready && (!best || largest_first))
                best = v;
        }
        placed[*best] = true;
        out.push_back(*best);
    }
    return out;
}

}  // namespace

std::vector<std::vector<Element>> realizer(const FiniteStructure& p)
{
    require_family(Family::Poset, p);
    const std::size_t n = p.size();
    const Matrix le = relation_matrix(p);
    std::vector<std::vector<Element>> out;
    auto add = [&](std::vector<Element> order) {
        if (std::find(out.begin(), out.end(), order) == out.end())
            out.push_back(std::move(order));
    };
    add(topological(le, false, std::nullopt));
    add(topological(le, true, std::nullopt));

    auto covered = [&](Element x, Element y) {
        for (const auto& order : out) {
            auto px = std::find(order.begin(), order.end(), x);
            auto py = std::find(order.begin(), order.end(), y);
            if (px < py)
                return true;
        }
        return false;
    };
    for (Element x = 0; x < n; ++x)
        for (Element y = 0; y < n; ++y)
            if (x != y && !le[x][y] && !le[y][x] && !covered(x, y))
                add(topological(le, false, std::pair{x, y}));
    return out;
}

ClassReport classify_poset(const FiniteStructure& p, const SearchLimits& limits)
{
    require_family(Family::Poset, p);
    const std::size_t n = p.size();
    const Matrix le = relation_matrix(p);

    bool antichain = true;
    for (Element x = 0; x < n; ++x)
        for (Element y = 0; y < n; ++y)
            if (x != y && le[x][y])
                antichain = false;

    auto bound = [&](Element x, Element y, bool upper) -> std::optional<Element> {
        std::vector<Element> common;
        for (Element z = 0; z < n; ++z)
            if (upper ? le[x][z] && le[y][z] : le[z][x] && le[z][y])
                common.push_back(z);
        for (Element z : common)
            if (std::all_of(common.begin(), common.end(), [&](Element w) { return upper ? le[z][w] : le[w][z]; }))
                return z;
        return std::nullopt;
    };
    bool lattice = true;
    for (Element x = 0; x < n && lattice; ++x)
        for (Element y = 0; y < n && lattice; ++y)
            lattice = bound(x, y, true) && bound(x, y, false);

    std::optional<Tuple> x5;
    for (Element a1 = 0; a1 < n && !x5; ++a1)
        for (Element a2 = 0; a2 < n && !x5; ++a2)
            for (Element a3 = 0; a3 < n && !x5; ++a3)
                for (Element a4 = 0; a4 < n && !x5; ++a4) {
                    if (!(le[a1][a3] && le[a1][a4] && le[a2][a3] && le[a2][a4]))
                        continue;
                    bool mid = false;
                    for (Element c = 0; c < n && !mid; ++c)
                        mid = le[a1][c] && le[a2][c] && le[c][a3] && le[c][a4];
                    if (!mid)
                        x5 = Tuple{a1, a2, a3, a4};
                }

    bool has_min = false, has_max = false;
    for (Element c = 0; c < n; ++c) {
        bool below = true, above = true;
        for (Element x = 0; x < n; ++x) {
            below = below && le[c][x];
            above = above && le[x][c];
        }
        has_min = has_min || below;
        has_max = has_max || above;
    }

    ClassReport report;
    report.family = Family::Poset;
    report.reasons = {
        {"is_antichain", antichain, {}},
        {"is_lattice", lattice, {}},
        {"is_x5_dense", !x5.has_value(), {}},
        {"locally_bounded", has_min && has_max, "global minimum and maximum"},
    };
    report.verdict = antichain || lattice ? PHStatus::PH : PHStatus::NotPH;
    if (report.verdict == PHStatus::PH)
        return report;

    if (x5) {
        const Tuple& t = *x5;
        PartialOpMap f(1, n, {{{t[0]}, t[2]}, {{t[1]}, t[3]}});
        if (is_partial_polymorphism(p, f)) {
            auto e = extendable(p, f, limits);
            if (e.status == SearchStatus::Unsat) {
                report.witness = std::move(f);
                report.witness_tuple = t;
                report.witness_check = e.status;
                return report;
            }
        }
    }
    attach(report, refute_by_search(p, 3, limits));
    return report;
}

ClassReport classify_strict_poset(const FiniteStructure& s, const SearchLimits& limits)
{
    require_family(Family::StrictPoset, s);
    const bool empty = s.relation(0).empty();
    ClassReport report;
    report.family = Family::StrictPoset;
    report.reasons = {
        {"is_antichain", empty, {}},
        {"strictly_locally_bounded", false, "no element lies strictly below the whole carrier"},
    };
    report.verdict = empty ? PHStatus::PH : PHStatus::NotPH;
    if (!empty)
        attach(report, refute_by_search(s, 3, limits));
    return report;
}

// ---------------------------------------------------------------- partitions

Partition normalize(const Partition& p)
{
    std::map<Element, Element> relabel;
    Partition out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        auto [it, fresh] = relabel.try_emplace(p[i], static_cast<Element>(relabel.size()));
        out[i] = it->second;
    }
    return out;
}

std::vector<Partition> all_partitions(std::size_t n)
{
    std::vector<Partition> out;
    if (n == 0)
        return {Partition{}};
    Partition p(n, 0);
    // restricted growth strings in lexicographic order
    auto rec = [&](auto&& self, std::size_t i, Element top) -> void {
        if (i == n) {
            out.push_back(p);
            return;
        }
        for (Element v = 0; v <= top + 1; ++v) {
            p[i] = v;
            self(self, i + 1, std::max(top, v));
        }
    };
    p[0] = 0;
    rec(rec, 1, 0);
    return out;
}

Partition meet(const Partition& x, const Partition& y)
{
    std::map<std::pair<Element, Element>, Element> label;
    Partition out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        out[i] = label.try_emplace({x[i], y[i]}, static_cast<Element>(label.size())).first->second;
    return normalize(out);
}

Partition join(const Partition& x, const Partition& y)
{
    const std::size_t n = x.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t v) {
        while (parent[v] != v)
            v = parent[v] = parent[parent[v]];
        return v;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (x[i] == x[j] || y[i] == y[j])
                parent[find(i)] = find(j);
    Partition out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = static_cast<Element>(find(i));
    return normalize(out);
}

bool leq(const Partition& x, const Partition& y)
{
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j)
            if (x[i] == x[j] && y[i] != y[j])
                return false;
    return true;
}

bool permute(const Partition& x, const Partition& y)
{
    const std::size_t n = x.size();
    auto compose = [n](const Partition& f, const Partition& g) {
        std::vector<bool> r(n * n, false);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                if (f[a] == f[b])
                    for (std::size_t c = 0; c < n; ++c)
                        if (g[b] == g[c])
                            r[a * n + c] = true;
        return r;
    };
    return compose(x, y) == compose(y, x);
}

Partition discrete_partition(std::size_t n)
{
    Partition p(n);
    std::iota(p.begin(), p.end(), Element{0});
    return p;
}

Partition full_partition(std::size_t n) { return Partition(n, 0); }

LatticeEnumeration enumerate_meet_complete_sublattices(std::size_t n, std::size_t cap)
{
    if (n == 0 || n > 4)
        throw std::invalid_argument("sublattice enumeration needs 1 <= n <= 4");
    const auto parts = all_partitions(n);
    const std::size_t m = parts.size();
    std::vector<std::vector<std::size_t>> meet_of(m, std::vector<std::size_t>(m)), join_of = meet_of;
    auto index = [&](const Partition& p) {
        return static_cast<std::size_t>(std::lower_bound(parts.begin(), parts.end(), p) - parts.begin());
    };
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            meet_of[i][j] = index(meet(parts[i], parts[j]));
            join_of[i][j] = index(join(parts[i], parts[j]));
        }
    auto close = [&](std::uint32_t s) {
        while (true) {
            std::uint32_t next = s;
            for (std::uint32_t a = s; a; a &= a - 1)
                for (std::uint32_t b = s; b; b &= b - 1) {
                    const auto i = std::countr_zero(a), j = std::countr_zero(b);
                    next |= std::uint32_t{1} << meet_of[i][j];
                    next |= std::uint32_t{1} << join_of[i][j];
                }
            if (next == s)
                return s;
            s = next;
        }
    };

    LatticeEnumeration out;
    std::set<std::uint32_t> seen;
    std::deque<std::uint32_t> queue;
    for (std::size_t i = 0; i < m; ++i) {
        auto s = close(std::uint32_t{1} << i);
        if (seen.insert(s).second)
            queue.push_back(s);
    }
    while (!queue.empty()) {
        if (seen.size() > cap) {
            out.capped = true;
            break;
        }
        const auto s = queue.front();
        queue.pop_front();
        for (std::size_t i = 0; i < m; ++i)
            if (!(s >> i & 1)) {
                auto t = close(s | std::uint32_t{1} << i);
                if (seen.insert(t).second)
                    queue.push_back(t);
            }
    }
    for (auto s : seen) {
        PartitionFamily f;
        for (std::uint32_t rest = s; rest; rest &= rest - 1)
            f.push_back(parts[std::countr_zero(rest)]);
        out.lattices.push_back(std::move(f));
    }
    std::sort(out.lattices.begin(), out.lattices.end(), [](const auto& x, const auto& y) {
        return x.size() != y.size() ? x.size() < y.size() : x < y;
    });
    if (out.lattices.size() > cap) {
        out.lattices.resize(cap);
        out.capped = true;
    }
    return out;
}

ArithmeticalCheck is_arithmetical(const PartitionFamily& lattice)
{
    ArithmeticalCheck out;
    const std::size_t m = lattice.size();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            if (!permute(lattice[i], lattice[j])) {
                out.ok = false;
                out.non_permuting = std::array<std::size_t, 2>{i, j};
                return out;
            }
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = 0; k < m; ++k) {
                const auto& x = lattice[i];
                if (meet(x, join(lattice[j], lattice[k])) != join(meet(x, lattice[j]), meet(x, lattice[k]))) {
                    out.ok = false;
                    out.non_distributive = std::array<std::size_t, 3>{i, j, k};
                    return out;
                }
            }
    return out;
}

FiniteStructure lattice_structure(const PartitionFamily& lattice, std::string name)
{
    if (lattice.empty())
        throw std::invalid_argument("empty partition family");
    return canonical_structure(lattice[0].size(), lattice, std::move(name));
}

ClassReport classify_eq_lattice(const FiniteStructure& a, const SearchLimits& limits)
{
    require_family(Family::EqLattice, a);
    const std::size_t n = a.size();
    PartitionFamily lattice;
    for (const auto& r : a.relations()) {
        Partition p(n);
        for (Element x = 0; x < n; ++x) {
            p[x] = x;
            for (Element y = 0; y < x; ++y)
                if (r.contains_pair(y, x)) {
                    p[x] = p[y];
                    break;
                }
        }
        lattice.push_back(normalize(p));
    }
    std::sort(lattice.begin(), lattice.end());
    lattice.erase(std::unique(lattice.begin(), lattice.end()), lattice.end());
    auto inside = [&](const Partition& p) { return std::binary_search(lattice.begin(), lattice.end(), p); };
    for (const auto& x : lattice)
        for (const auto& y : lattice)
            if (!inside(meet(x, y)) || !inside(join(x, y)))
                throw std::invalid_argument("relations are not closed under meets and joins");

    const auto check = is_arithmetical(lattice);
    ClassReport report;
    report.family = Family::EqLattice;
    report.reasons = {
        {"is_arithmetical", check.ok, {}},
        {"permuting", !check.non_permuting.has_value(), {}},
    };
    report.verdict = check.ok ? PHStatus::PH : PHStatus::NotPH;
    if (check.ok)
        return report;
    // the pair or triple is indexed into the sorted, normalized family
    if (check.non_permuting)
        report.witness_tuple = Tuple(check.non_permuting->begin(), check.non_permuting->end());
    else
        report.witness_tuple = Tuple(check.non_distributive->begin(), check.non_distributive->end());
    attach(report, refute_by_search(a, 3, limits));
    return report;
}

KaarliReport kaarli_cross_check(std::size_t n, const KaarliOptions& options)
{
    KaarliReport report;
    report.n = n;
    for (auto& l : enumerate_meet_complete_sublattices(n).lattices)
        if (!options.filter || options.filter(l))
            report.entries.push_back(KaarliEntry{std::move(l), {}, {}, {}, {}});

    for_each_index(report.entries.size(), options.backend, [&](std::size_t i) {
        KaarliEntry& e = report.entries[i];
        e.arithmetical = is_arithmetical(e.lattice);
        const auto a = lattice_structure(e.lattice);
        if (n <= 3) {
            DecideOptions d;
            d.limits = options.limits;
            d.backend = Backend::Serial;
            auto v = decide_ph(a, d);
            e.decided = v.status;
            e.inconclusive = v.status == PHStatus::Inconclusive;
            e.agrees = !e.inconclusive && (v.status == PHStatus::PH) == e.arithmetical.ok;
            if (v.certificate) {
                e.refutation = v.certificate->map;
                e.refutation_arity = v.certificate->map.arity();
            }
            return;
        }
        if (e.arithmetical.ok) {
            e.checked = false;
            return;
        }
        auto r = refute_by_search(a, options.max_k, options.limits);
        e.inconclusive = !r;
        e.agrees = r.has_value();
        if (r) {
            e.decided = PHStatus::NotPH;
            e.refutation_arity = r->k;
            e.refutation = std::move(r->map);
        }
    });

    for (const auto& e : report.entries) {
        if (!e.checked)
            ++report.unchecked;
        else if (e.inconclusive)
            ++report.inconclusive;
        else if (e.agrees)
            ++report.agreements;
        else
            ++report.disagreements;
    }
    return report;
}

}  // namespace polyhom
