#include <polyhom/galois.hpp>
#include <polyhom/homogeneity.hpp>

#include <algorithm>
#include <set>

namespace polyhom {

const char* to_string(PpStatus s)
{
    switch (s) {
    case PpStatus::Yes: return "yes";
    case PpStatus::No: return "no";
    case PpStatus::Inconclusive: return "inconclusive";
    }
    return "?";
}

const char* to_string(PolylocalStatus s)
{
    switch (s) {
    case PolylocalStatus::Holds: return "holds";
    case PolylocalStatus::Fails: return "fails";
    case PolylocalStatus::Inconclusive: return "inconclusive";
    }
    return "?";
}

bool RelationFamily::contains(const RelationSet& r) const
{
    return std::find(members.begin(), members.end(), r) != members.end();
}

void sort_family(RelationFamily& f)
{
    std::sort(f.members.begin(), f.members.end(), [](const RelationSet& x, const RelationSet& y) {
        if (x.size() != y.size())
            return x.size() < y.size();
        return x.flat() < y.flat();
    });
    f.members.erase(std::unique(f.members.begin(), f.members.end()), f.members.end());
}

PolymorphismList enumerate_polymorphisms(const FiniteStructure& a, std::size_t k, std::size_t cap,
                                         const SearchLimits& limits)
{
    auto p = power(a, k);
    if (p.size() > (PowerIndex{1} << 20))
        throw std::length_error("polymorphism tables above 2^20 entries are not enumerated");
    auto e = enumerate_solutions(ExtensionProblem{p, a, {}, limits}, cap);
    PolymorphismList out;
    for (auto& s : e.solutions)
        out.functions.emplace_back(k, a.size(), std::move(s));
    out.complete = e.complete;
    out.capped = e.capped;
    out.budget_exhausted = e.budget_exhausted;
    out.stats = e.stats;
    return out;
}

std::vector<Tuple> row_matrix(const RelationSet& tau)
{
    std::vector<Tuple> rows(tau.arity(), Tuple(tau.size()));
    for (std::size_t c = 0; c < tau.size(); ++c)
        for (std::size_t i = 0; i < tau.arity(); ++i)
            rows[i][c] = tau.tuple(c)[i];
    return rows;
}

namespace {

std::uint64_t checked_power(std::size_t n, std::size_t m, std::uint64_t limit)
{
    std::uint64_t v = 1;
    for (std::size_t i = 0; i < m; ++i) {
        v *= n;
        if (v > limit)
            throw std::length_error("carrier power too large to enumerate");
    }
    return v;
}

Tuple decode_tuple(std::uint64_t code, std::size_t n, std::size_t m)
{
    Tuple t(m);
    for (std::size_t i = m; i-- > 0;) {
        t[i] = static_cast<Element>(code % n);
        code /= n;
    }
    return t;
}

}  // namespace

RelationSet qf_type_closure(const FiniteStructure& a, const RelationSet& tau, const QfOptions& options)
{
    if (tau.empty())
        throw std::invalid_argument("qf_type_closure needs a nonempty relation");
    const std::size_t m = tau.arity(), n = a.size();
    const auto rows = row_matrix(tau);

    // binding selections: position vectors whose columns all lie in the relation
    struct Binding
    {
        std::size_t rel;
        std::vector<std::size_t> positions;
    };
    std::vector<Binding> bindings;
    for (std::size_t r = 0; r < a.signature().size(); ++r) {
        const RelationSet& rel = a.relation(r);
        if (rel.is_full())
            continue;
        const std::size_t ar = rel.arity();
        std::vector<std::size_t> sel(ar, 0);
        Tuple column(ar);
        while (true) {
            bool binding = true;
            for (std::size_t c = 0; c < tau.size() && binding; ++c) {
                for (std::size_t p = 0; p < ar; ++p)
                    column[p] = rows[sel[p]][c];
                binding = rel.contains(column);
            }
            if (binding)
                bindings.push_back({r, sel});
            std::size_t p = ar;
            while (p > 0 && ++sel[p - 1] == m)
                sel[--p] = 0;
            if (p == 0)
                break;
        }
    }
    std::vector<std::pair<std::size_t, std::size_t>> equal_rows;
    if (options.equality_atoms)
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j)
                if (rows[i] == rows[j])
                    equal_rows.emplace_back(i, j);

    const auto total = checked_power(n, m, std::uint64_t{1} << 24);
    std::vector<Tuple> out;
    Tuple image;
    for (std::uint64_t code = 0; code < total; ++code) {
        Tuple b = decode_tuple(code, n, m);
        bool ok = true;
        for (auto [i, j] : equal_rows)
            ok = ok && b[i] == b[j];
        for (std::size_t q = 0; q < bindings.size() && ok; ++q) {
            const auto& bd = bindings[q];
            image.resize(bd.positions.size());
            for (std::size_t p = 0; p < bd.positions.size(); ++p)
                image[p] = b[bd.positions[p]];
            ok = a.relation(bd.rel).contains(image);
        }
        if (ok)
            out.push_back(std::move(b));
    }
    return RelationSet(m, n, std::move(out));
}

namespace {

PartialOpMap row_map(const RelationSet& tau, std::span<const Element> b)
{
    const auto rows = row_matrix(tau);
    std::vector<PartialOpMap::Entry> entries;
    for (std::size_t i = 0; i < rows.size(); ++i)
        entries.emplace_back(rows[i], b[i]);
    return PartialOpMap(tau.size(), tau.carrier(), std::move(entries));
}

bool functional(const RelationSet& tau, std::span<const Element> b)
{
    const auto rows = row_matrix(tau);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = i + 1; j < rows.size(); ++j)
            if (rows[i] == rows[j] && b[i] != b[j])
                return false;
    return true;
}

}  // namespace

GammaResult gamma_closure(const FiniteStructure& a, const RelationSet& tau, const SearchLimits& limits,
                          Backend backend)
{
    const auto candidates = qf_type_closure(a, tau);
    std::vector<SearchStatus> status(candidates.size(), SearchStatus::Unsat);
    std::vector<SearchStats> stats(candidates.size());
    for_each_index(candidates.size(), backend, [&](std::size_t i) {
        auto b = candidates.tuple(i);
        if (tau.contains(b)) {
            status[i] = SearchStatus::Found;
            return;
        }
        if (!functional(tau, b))
            return;
        auto e = extendable(a, row_map(tau, b), limits);
        status[i] = e.status;
        stats[i] = e.stats;
    });
    GammaResult out;
    std::vector<Tuple> proven;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        out.stats += stats[i];
        auto b = candidates.tuple(i);
        if (status[i] == SearchStatus::Found)
            proven.emplace_back(b.begin(), b.end());
        else if (status[i] == SearchStatus::Exhausted)
            out.undecided.emplace_back(b.begin(), b.end());
    }
    out.complete = out.undecided.empty();
    out.closure = RelationSet(tau.arity(), tau.carrier(), std::move(proven));
    return out;
}

PpResult is_pp_definable(const FiniteStructure& a, const RelationSet& sigma, const SearchLimits& limits,
                         const PpOptions& options)
{
    PpResult out;
    if (sigma.empty()) {
        out.status = options.empty_is_definable ? PpStatus::Yes : PpStatus::No;
        return out;
    }
    auto g = gamma_closure(a, sigma, limits);
    for (std::size_t i = 0; i < g.closure.size(); ++i)
        if (!sigma.contains(g.closure.tuple(i))) {
            out.status = PpStatus::No;
            out.witness = Tuple(g.closure.tuple(i).begin(), g.closure.tuple(i).end());
            return out;
        }
    out.undecided = g.undecided;
    out.status = g.complete ? PpStatus::Yes : PpStatus::Inconclusive;
    return out;
}

namespace {

// op lifted to A^m: table over universe^arity, coordinatewise application.
std::vector<std::uint32_t> lift(const FunctionTable& f, std::size_t n, std::size_t m, std::size_t universe)
{
    const std::size_t ar = f.arity();
    std::uint64_t cells = 1;
    for (std::size_t i = 0; i < ar; ++i)
        cells *= universe;
    if (cells > (std::uint64_t{1} << 26))
        throw std::length_error("lifted operation table too large");
    std::vector<Tuple> points(universe);
    for (std::size_t u = 0; u < universe; ++u)
        points[u] = decode_tuple(u, n, m);
    std::vector<std::uint32_t> table(cells);
    std::vector<std::size_t> args(ar, 0);
    Tuple coords(ar);
    for (std::uint64_t cell = 0; cell < cells; ++cell) {
        std::uint64_t rest = cell;
        for (std::size_t i = ar; i-- > 0;) {
            args[i] = rest % universe;
            rest /= universe;
        }
        std::uint32_t code = 0;
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t i = 0; i < ar; ++i)
                coords[i] = points[args[i]][j];
            code = static_cast<std::uint32_t>(code * n + f(coords));
        }
        table[cell] = code;
    }
    return table;
}

RelationSet subset_relation(std::uint64_t mask, std::size_t n, std::size_t m)
{
    std::vector<Tuple> ts;
    for (std::size_t u = 0; mask; ++u, mask >>= 1)
        if (mask & 1)
            ts.push_back(decode_tuple(u, n, m));
    return RelationSet(m, n, std::move(ts));
}

}  // namespace

RelationFamily invariant_relations(std::span<const FunctionTable> functions, std::size_t carrier, std::size_t m,
                                   const InvOptions& options)
{
    if (m == 0)
        throw std::invalid_argument("relation arity must be at least 1");
    const auto universe = static_cast<std::size_t>(checked_power(carrier, m, 24));
    std::vector<std::vector<std::uint32_t>> ops;
    std::vector<std::size_t> arities;
    for (const auto& f : functions) {
        if (f.carrier() != carrier)
            throw std::invalid_argument("function carrier differs from the requested carrier");
        ops.push_back(lift(f, carrier, m, universe));
        arities.push_back(f.arity());
    }
    auto closed = closed_subsets(universe, ops, arities, options.backend);
    RelationFamily out{m, carrier, {}};
    for (std::uint64_t s = options.include_empty ? 0 : 1; s < closed.size(); ++s)
        if (closed[s])
            out.members.push_back(subset_relation(s, carrier, m));
    sort_family(out);
    return out;
}

RelationSet generated_relation(std::span<const FunctionTable> functions, std::size_t carrier, const RelationSet& seed)
{
    std::set<Tuple> current;
    for (std::size_t i = 0; i < seed.size(); ++i)
        current.emplace(seed.tuple(i).begin(), seed.tuple(i).end());
    const std::size_t m = seed.arity();
    bool grew = !current.empty();
    while (grew) {
        grew = false;
        std::vector<Tuple> members(current.begin(), current.end());
        for (const auto& f : functions) {
            const std::size_t ar = f.arity();
            std::vector<std::size_t> pick(ar, 0);
            Tuple coords(ar), image(m);
            while (true) {
                for (std::size_t j = 0; j < m; ++j) {
                    for (std::size_t i = 0; i < ar; ++i)
                        coords[i] = members[pick[i]][j];
                    image[j] = f(coords);
                }
                grew = current.insert(image).second || grew;
                std::size_t p = ar;
                while (p > 0 && ++pick[p - 1] == members.size())
                    pick[--p] = 0;
                if (p == 0)
                    break;
            }
        }
    }
    return RelationSet(m, carrier, std::vector<Tuple>(current.begin(), current.end()));
}

RelationFamily invariant_relations_generated(std::span<const FunctionTable> functions, std::size_t carrier,
                                             std::size_t m, std::span<const RelationSet> seeds)
{
    RelationFamily out{m, carrier, {}};
    for (const auto& s : seeds) {
        if (s.arity() != m)
            throw std::invalid_argument("seed arity differs from m");
        out.members.push_back(generated_relation(functions, carrier, s));
    }
    sort_family(out);
    return out;
}

namespace {

// Nonempty subsets of a universe of u points as masks, ordered by size and
// then lexicographically by their sorted member lists.
std::vector<std::uint64_t> subsets_by_size(std::size_t u)
{
    std::vector<std::uint64_t> out;
    for (std::size_t size = 1; size <= u; ++size) {
        std::vector<std::size_t> c(size);
        for (std::size_t i = 0; i < size; ++i)
            c[i] = i;
        while (true) {
            std::uint64_t mask = 0;
            for (auto e : c)
                mask |= std::uint64_t{1} << e;
            out.push_back(mask);
            std::size_t i = size;
            while (i > 0 && c[i - 1] == u - size + i - 1)
                --i;
            if (i == 0)
                break;
            ++c[i - 1];
            for (std::size_t j = i; j < size; ++j)
                c[j] = c[j - 1] + 1;
        }
    }
    return out;
}

}  // namespace

PolylocalResult check_finite_polylocal(const FiniteStructure& a, std::size_t m, const SearchLimits& limits,
                                       Backend backend)
{
    const auto universe = static_cast<std::size_t>(checked_power(a.size(), m, 16));
    PolylocalResult out;
    for (auto mask : subsets_by_size(universe)) {
        auto tau = subset_relation(mask, a.size(), m);
        ++out.checked;
        if (checked_power(a.size(), tau.size(), ~std::uint64_t{0} >> 1) > (std::uint64_t{1} << 22)) {
            out.status = PolylocalStatus::Inconclusive;
            out.tau = tau;
            return out;
        }
        auto qf = qf_type_closure(a, tau);
        auto gamma = gamma_closure(a, tau, limits, backend);
        for (std::size_t i = 0; i < qf.size(); ++i) {
            auto b = qf.tuple(i);
            if (gamma.closure.contains(b))
                continue;
            if (std::find_if(gamma.undecided.begin(), gamma.undecided.end(),
                             [&](const Tuple& t) { return std::equal(t.begin(), t.end(), b.begin(), b.end()); }) !=
                gamma.undecided.end()) {
                out.status = PolylocalStatus::Inconclusive;
                out.tau = tau;
                out.b = Tuple(b.begin(), b.end());
                return out;
            }
            out.status = PolylocalStatus::Fails;
            out.tau = tau;
            out.b = Tuple(b.begin(), b.end());
            return out;
        }
    }
    return out;
}

InvPolReport cross_check_inv_pol(const FiniteStructure& a, std::size_t m, std::size_t max_arity,
                                 const SearchLimits& limits, Backend backend)
{
    if (max_arity == 0)
        throw std::invalid_argument("polymorphism arity bound must be at least 1");
    const std::size_t n = a.size();
    const auto universe = static_cast<std::size_t>(checked_power(n, m, 16));
    InvPolReport out;
    out.m = m;
    out.max_arity = max_arity;
    std::vector<FunctionTable> pool;
    for (std::size_t k = 1; k <= max_arity; ++k) {
        auto pol = enumerate_polymorphisms(a, k, 1u << 16, limits);
        out.polymorphisms_capped = out.polymorphisms_capped || pol.capped;
        out.complete = out.complete && !pol.budget_exhausted;
        pool.insert(pool.end(), pol.functions.begin(), pol.functions.end());
        out.by_arity.push_back(invariant_relations(pool, n, m, {true, backend}));
    }
    out.stabilization = max_arity;
    while (out.stabilization > 1 && out.by_arity[out.stabilization - 2] == out.by_arity.back())
        --out.stabilization;

    out.gamma_closed = RelationFamily{m, n, {RelationSet(m, n, {})}};
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << universe); ++mask) {
        auto sigma = subset_relation(mask, n, m);
        auto pp = is_pp_definable(a, sigma, limits);
        if (pp.status == PpStatus::Yes)
            out.gamma_closed.members.push_back(std::move(sigma));
        else if (pp.status == PpStatus::Inconclusive)
            out.complete = false;
    }
    sort_family(out.gamma_closed);
    const auto& inv = out.by_arity.back();
    out.gamma_subset = std::all_of(out.gamma_closed.members.begin(), out.gamma_closed.members.end(),
                                   [&](const RelationSet& r) { return inv.contains(r); });
    out.equal = out.gamma_closed == inv;
    return out;
}

}  // namespace polyhom
