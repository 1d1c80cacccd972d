#include <polyhom/galois.hpp>
#include <polyhom/homogeneity.hpp>

#include <algorithm>
#include <bit>

namespace polyhom {

namespace {

constexpr std::uint64_t envelope_cells = std::uint64_t{1} << 20;
constexpr std::size_t envelope_columns = 20;
constexpr std::size_t outside_columns = 64;
constexpr std::size_t unary_pool_cap = 1024;
constexpr std::size_t binary_pool_cap = 256;

// n^e, or 0 when it exceeds limit
std::uint64_t bounded_power(std::uint64_t n, std::uint64_t e, std::uint64_t limit)
{
    std::uint64_t v = 1;
    for (std::uint64_t i = 0; i < e; ++i) {
        if (v > limit / n)
            return 0;
        v *= n;
    }
    return v;
}

Tuple decode_column(std::uint64_t code, std::size_t n, std::size_t m)
{
    Tuple t(m);
    for (std::size_t i = m; i-- > 0;) {
        t[i] = static_cast<Element>(code % n);
        code /= n;
    }
    return t;
}

std::uint64_t encode_column(std::span<const Element> t, std::size_t n)
{
    std::uint64_t c = 0;
    for (auto e : t)
        c = c * n + e;
    return c;
}

// Verified polymorphisms lifted to A^m, used to discharge candidates without a
// search: anything generated from tau by polymorphisms lies in Gamma(tau).
struct Pool
{
    std::size_t universe = 0;
    std::vector<std::vector<std::uint32_t>> ops;
    std::vector<std::size_t> arities;

    std::vector<char> closure(std::span<const std::uint64_t> tau) const
    {
        std::vector<char> in(universe, 0);
        std::vector<std::uint32_t> members;
        for (auto c : tau)
            if (!in[c]) {
                in[c] = 1;
                members.push_back(static_cast<std::uint32_t>(c));
            }
        bool grew = true;
        std::vector<std::size_t> pick;
        while (grew) {
            grew = false;
            const std::size_t size = members.size();
            for (std::size_t f = 0; f < ops.size(); ++f) {
                const std::size_t ar = arities[f];
                pick.assign(ar, 0);
                while (true) {
                    std::size_t cell = 0;
                    for (std::size_t i = 0; i < ar; ++i)
                        cell = cell * universe + members[pick[i]];
                    const auto v = ops[f][cell];
                    if (!in[v]) {
                        in[v] = 1;
                        members.push_back(v);
                        grew = true;
                    }
                    std::size_t p = ar;
                    while (p > 0 && ++pick[p - 1] == size)
                        pick[--p] = 0;
                    if (p == 0)
                        break;
                }
            }
        }
        return in;
    }
};

Pool make_pool(const std::vector<FunctionTable>& functions, std::size_t n, std::size_t m, std::size_t universe)
{
    Pool pool;
    pool.universe = universe;
    std::vector<Tuple> points(universe);
    for (std::size_t u = 0; u < universe; ++u)
        points[u] = decode_column(u, n, m);
    for (const auto& f : functions) {
        const std::size_t ar = f.arity();
        const std::uint64_t cells = bounded_power(universe, ar, std::uint64_t{1} << 18);
        if (cells == 0)
            continue;
        std::vector<std::uint32_t> table(cells);
        Tuple coords(ar), image(m);
        for (std::uint64_t cell = 0; cell < cells; ++cell) {
            std::uint64_t rest = cell;
            std::vector<std::size_t> args(ar);
            for (std::size_t i = ar; i-- > 0;) {
                args[i] = rest % universe;
                rest /= universe;
            }
            for (std::size_t j = 0; j < m; ++j) {
                for (std::size_t i = 0; i < ar; ++i)
                    coords[i] = points[args[i]][j];
                image[j] = f(coords);
            }
            table[cell] = static_cast<std::uint32_t>(encode_column(image, n));
        }
        pool.ops.push_back(std::move(table));
        pool.arities.push_back(ar);
    }
    return pool;
}

enum class Discharge : std::uint8_t { Projection, Pool, Monotone, Search };

struct TauOutcome
{
    std::uint64_t candidates = 0;
    std::uint64_t by[4] = {0, 0, 0, 0};
    std::uint32_t proven = 0;  // mask over columns, envelope only
    std::optional<PHCertificate> refuted;
    std::optional<PHCertificate> exhausted;
    SearchStats stats;
};

struct LevelContext
{
    const FiniteStructure& a;
    const DecideOptions& options;
    std::size_t m;
    std::size_t universe;
    bool memo;
    const std::vector<std::uint32_t>* proven;  // indexed by tau mask
    const Pool* pool;
};

TauOutcome check_tau(const LevelContext& ctx, std::span<const std::uint64_t> columns)
{
    TauOutcome out;
    const std::size_t n = ctx.a.size();
    std::vector<Tuple> cols;
    for (auto c : columns)
        cols.push_back(decode_column(c, n, ctx.m));
    const RelationSet tau(ctx.m, n, cols);
    const auto candidates = qf_type_closure(ctx.a, tau);
    if (ctx.options.skip_locally_closed && candidates.size() == tau.size()) {
        out.candidates = candidates.size();
        out.by[static_cast<int>(Discharge::Projection)] = candidates.size();
        if (ctx.memo)
            for (auto c : columns)
                out.proven |= std::uint32_t{1} << c;
        return out;
    }

    std::uint32_t inherited = 0;
    std::uint32_t tau_mask = 0;
    if (ctx.memo) {
        for (auto c : columns)
            tau_mask |= std::uint32_t{1} << c;
        for (auto c : columns)
            if (columns.size() > 1)
                inherited |= (*ctx.proven)[tau_mask & ~(std::uint32_t{1} << c)];
    }
    std::optional<std::vector<char>> generated;
    const auto rows = row_matrix(tau);

    for (std::size_t i = 0; i < candidates.size(); ++i) {
        auto b = candidates.tuple(i);
        const auto code = encode_column(b, n);
        ++out.candidates;
        auto mark = [&](Discharge d) {
            ++out.by[static_cast<int>(d)];
            if (ctx.memo)
                out.proven |= std::uint32_t{1} << code;
        };
        if (tau.contains(b)) {
            mark(Discharge::Projection);
            continue;
        }
        if (ctx.memo && (inherited >> code & 1)) {
            mark(Discharge::Monotone);
            continue;
        }
        if (ctx.pool && !ctx.pool->ops.empty()) {
            if (!generated)
                generated = ctx.pool->closure(columns);
            if ((*generated)[code]) {
                mark(Discharge::Pool);
                continue;
            }
        }
        std::vector<PartialOpMap::Entry> entries;
        for (std::size_t r = 0; r < rows.size(); ++r)
            entries.emplace_back(rows[r], b[r]);
        PartialOpMap f(tau.size(), n, std::move(entries));
        auto e = extendable(ctx.a, f, ctx.options.limits);
        out.stats += e.stats;
        if (e.status == SearchStatus::Found) {
            mark(Discharge::Search);
            continue;
        }
        PHCertificate cert{"local", std::move(f), ctx.m, tau, Tuple(b.begin(), b.end()), e.stats};
        if (e.status == SearchStatus::Unsat) {
            out.refuted = std::move(cert);
            break;
        }
        if (!out.exhausted)
            out.exhausted = std::move(cert);
    }
    return out;
}

// Column sets of a given size over a universe, in lexicographic order.
std::vector<std::vector<std::uint64_t>> combinations(std::size_t universe, std::size_t size)
{
    std::vector<std::vector<std::uint64_t>> out;
    if (size > universe)
        return out;
    std::vector<std::uint64_t> c(size);
    for (std::size_t i = 0; i < size; ++i)
        c[i] = i;
    while (true) {
        out.push_back(c);
        std::size_t i = size;
        while (i > 0 && c[i - 1] == universe - size + i - 1)
            --i;
        if (i == 0)
            break;
        ++c[i - 1];
        for (std::size_t j = i; j < size; ++j)
            c[j] = c[j - 1] + 1;
    }
    return out;
}

}  // namespace

Verdict decide_ph(const FiniteStructure& a, const DecideOptions& options)
{
    Verdict v;
    const std::size_t n = a.size();
    const std::size_t d = std::max<std::size_t>(2, a.max_arity());
    v.trace.d = d;
    if (n == 1)
        return v;

    const std::uint64_t columns_d = bounded_power(n, d, envelope_columns);
    v.trace.within_envelope = columns_d != 0 && bounded_power(n, columns_d, envelope_cells) != 0;

    std::optional<PHCertificate> first_exhausted;
    std::vector<FunctionTable> pool_functions;

    if (bounded_power(n, d + 1, std::uint64_t{1} << 22) != 0) {
        auto nu_map = canonical_partial_nu(a, d + 1);
        auto nu = extendable(a, nu_map, options.limits);
        v.trace.nu_status = nu.status;
        v.trace.stats += nu.stats;
        if (nu.status == SearchStatus::Unsat) {
            v.status = PHStatus::NotPH;
            v.certificate = PHCertificate{"nu", nu_map, 0, std::nullopt, {}, nu.stats};
            return v;
        }
        if (nu.status == SearchStatus::Exhausted)
            first_exhausted = PHCertificate{"nu", nu_map, 0, std::nullopt, {}, nu.stats};
        else {
            v.trace.nu = nu.polymorphism;
            pool_functions.push_back(*nu.polymorphism);
        }
    }
    for (std::size_t k : {1, 2}) {
        const std::size_t cap = k == 1 ? unary_pool_cap : binary_pool_cap;
        if (bounded_power(n, k, std::uint64_t{1} << 12) == 0)
            continue;
        auto pol = enumerate_polymorphisms(a, k, cap, options.limits);
        v.trace.stats += pol.stats;
        pool_functions.insert(pool_functions.end(), pol.functions.begin(), pol.functions.end());
    }

    for (std::size_t m = 1; m <= d; ++m) {
        const std::uint64_t universe = bounded_power(n, m, v.trace.within_envelope ? envelope_columns : outside_columns);
        if (universe == 0)
            continue;
        const bool memo = v.trace.within_envelope;
        std::vector<std::uint32_t> proven;
        if (memo)
            proven.assign(std::size_t{1} << universe, 0);
        const Pool pool = make_pool(pool_functions, n, m, universe);
        const std::size_t max_size = v.trace.within_envelope ? universe : std::min<std::uint64_t>(2, universe);
        LevelContext ctx{a, options, m, static_cast<std::size_t>(universe), memo, &proven, &pool};

        for (std::size_t size = 1; size <= max_size; ++size) {
            const auto taus = combinations(universe, size);
            std::vector<TauOutcome> results(taus.size());
            for_each_index(taus.size(), options.backend,
                           [&](std::size_t i) { results[i] = check_tau(ctx, taus[i]); });
            for (std::size_t i = 0; i < taus.size(); ++i) {
                const auto& r = results[i];
                ++v.trace.column_sets;
                v.trace.candidates += r.candidates;
                v.trace.by_projection += r.by[static_cast<int>(Discharge::Projection)];
                v.trace.by_pool += r.by[static_cast<int>(Discharge::Pool)];
                v.trace.by_monotonicity += r.by[static_cast<int>(Discharge::Monotone)];
                v.trace.by_search += r.by[static_cast<int>(Discharge::Search)];
                v.trace.stats += r.stats;
                if (r.exhausted) {
                    ++v.trace.exhausted;
                    if (!first_exhausted)
                        first_exhausted = r.exhausted;
                }
                if (r.refuted) {
                    ++v.trace.refuted;
                    v.status = PHStatus::NotPH;
                    v.certificate = r.refuted;
                    return v;
                }
                if (memo) {
                    std::uint32_t mask = 0;
                    for (auto c : taus[i])
                        mask |= std::uint32_t{1} << c;
                    proven[mask] = r.proven;
                }
            }
        }
    }

    if (first_exhausted) {
        v.status = PHStatus::Inconclusive;
        v.reason = "search budget exhausted";
        v.blocking = first_exhausted;
        return v;
    }
    if (!v.trace.within_envelope) {
        v.status = PHStatus::Inconclusive;
        v.reason = "outside the certified envelope (n^(n^d) > 2^20); no refutation found among small column "
                   "sets; for graphs, posets, strict posets and equivalence lattices use classify";
        return v;
    }
    v.status = PHStatus::PH;
    return v;
}

}  // namespace polyhom
