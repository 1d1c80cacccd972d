#include <polyhom/homogeneity.hpp>

#include <algorithm>
#include <bit>
#include <unordered_set>

namespace polyhom {

const char* to_string(HomogeneityStatus s)
{
    switch (s) {
    case HomogeneityStatus::Holds: return "Holds";
    case HomogeneityStatus::Counterexample: return "CounterexampleFound";
    case HomogeneityStatus::Exhausted: return "Exhausted";
    }
    return "?";
}

const char* to_string(PHStatus s)
{
    switch (s) {
    case PHStatus::PH: return "PH";
    case PHStatus::NotPH: return "NotPH";
    case PHStatus::Inconclusive: return "Inconclusive";
    }
    return "?";
}

namespace {

// Prefix codes of a relation, for pruning row selections column by column.
class PrefixIndex
{
public:
    PrefixIndex(const RelationSet& r, std::size_t n) : n_(n), levels_(r.arity())
    {
        for (std::size_t i = 0; i < r.size(); ++i) {
            auto t = r.tuple(i);
            std::uint64_t code = 0;
            for (std::size_t p = 0; p < t.size(); ++p) {
                code = code * n_ + t[p];
                levels_[p].insert(code);
            }
        }
    }

    bool has_prefix(std::size_t length, std::uint64_t code) const { return levels_[length - 1].count(code) != 0; }
    std::size_t base() const { return n_; }

private:
    std::size_t n_;
    std::vector<std::unordered_set<std::uint64_t>> levels_;
};

bool codes_fit(std::size_t n, std::size_t arity)
{
    long double v = 1;
    for (std::size_t i = 0; i < arity; ++i)
        v *= static_cast<long double>(n);
    return v < 9.0e18L;
}

}  // namespace

RowCheck check_row_map(const FiniteStructure& a, std::span<const Tuple> rows, std::span<const Element> values)
{
    if (rows.size() != values.size())
        throw std::invalid_argument("row map needs one value per row");
    RowCheck out;
    if (rows.empty())
        return out;
    const std::size_t k = rows[0].size(), n = a.size();
    for (const auto& row : rows)
        if (row.size() != k)
            throw std::invalid_argument("rows of a row map must have equal length");
    for (std::size_t r = 0; r < a.signature().size() && out.ok; ++r) {
        const RelationSet& rel = a.relation(r);
        if (rel.is_full())
            continue;
        const std::size_t ar = rel.arity();
        const bool fit = codes_fit(n, ar);
        std::optional<PrefixIndex> prefixes;
        if (fit)
            prefixes.emplace(rel, n);
        std::vector<std::size_t> pick(ar, 0);
        std::vector<std::uint64_t> codes((ar + 1) * k, 0);
        Tuple column(ar), image(ar);
        // depth-first over selections, with per-column prefix checks
        std::size_t depth = 0;
        pick[0] = 0;
        while (true) {
            bool ok = true;
            if (prefixes) {
                const Tuple& row = rows[pick[depth]];
                for (std::size_t j = 0; j < k && ok; ++j) {
                    codes[(depth + 1) * k + j] = codes[depth * k + j] * n + row[j];
                    ok = prefixes->has_prefix(depth + 1, codes[(depth + 1) * k + j]);
                }
            }
            if (ok && depth + 1 == ar) {
                bool binding = true;
                if (!prefixes)
                    for (std::size_t j = 0; j < k && binding; ++j) {
                        for (std::size_t p = 0; p < ar; ++p)
                            column[p] = rows[pick[p]][j];
                        binding = rel.contains(column);
                    }
                if (binding) {
                    for (std::size_t p = 0; p < ar; ++p)
                        image[p] = values[pick[p]];
                    if (!rel.contains(image)) {
                        out.ok = false;
                        out.violation = RowViolation{a.signature()[r].name, pick, image};
                        break;
                    }
                }
                ok = false;
            }
            if (ok) {
                pick[++depth] = 0;
                continue;
            }
            while (++pick[depth] == rows.size()) {
                if (depth == 0)
                    break;
                --depth;
            }
            if (pick[depth] == rows.size())
                break;
        }
    }
    return out;
}

RowCheck is_partial_polymorphism(const FiniteStructure& a, const PartialOpMap& f)
{
    if (f.carrier() != a.size())
        throw std::invalid_argument("partial operation and structure have different carriers");
    std::vector<Tuple> rows;
    std::vector<Element> values;
    for (const auto& [row, v] : f.entries()) {
        rows.push_back(row);
        values.push_back(v);
    }
    return check_row_map(a, rows, values);
}

Extension extendable(const FiniteStructure& a, const PartialOpMap& f, const SearchLimits& limits)
{
    if (auto check = is_partial_polymorphism(a, f); !check)
        throw std::invalid_argument("not a partial polymorphism: relation " + check.violation->symbol);
    ExtensionProblem problem{power(a, f.arity()), a, {}, limits};
    for (const auto& [row, v] : f.entries())
        problem.pins.emplace_back(problem.source.encode(row), v);
    auto outcome = solve(problem);
    Extension out;
    out.status = outcome.status;
    out.stats = outcome.stats;
    if (outcome.status == SearchStatus::Found)
        out.polymorphism = FunctionTable(f.arity(), a.size(), std::move(outcome.assignment));
    return out;
}

namespace {

using Mask = std::uint64_t;

// Kill search for one-point obstructions. A value v for the missing point x is
// killed by a source tuple through x whose other entries are assigned and
// whose image with x -> v leaves the target relation. Each step kills the
// smallest live value, so every minimal counterexample is reachable.
class ObstructionSearch
{
public:
    ObstructionSearch(const PowerHandle& source, const FiniteStructure& target, const SearchLimits& limits) :
        src_(source), tgt_(target), limits_(limits), n_(target.size()), start_(std::chrono::steady_clock::now())
    {
        value_.assign(static_cast<std::size_t>(source.size()), unassigned);
        for (std::size_t r = 0; r < source.signature().size(); ++r)
            if (!target.relation(r).is_full() && !source.base().relation(r).empty())
                active_.push_back(r);
    }

    // true: finished the level; false: budget ran out
    bool run_level(std::size_t level)
    {
        level_ = level;
        for (PowerIndex x = 0; x < src_.size(); ++x) {
            x_ = x;
            domain_.clear();
            Mask alive = low_mask();
            alive &= allowed_by(std::span<const PowerIndex>{});
            if (!dfs(alive))
                return false;
        }
        return true;
    }

    const std::optional<LocalCounterexample>& best() const { return best_; }
    SearchStats stats() const
    {
        SearchStats s = stats_;
        s.elapsed = std::chrono::steady_clock::now() - start_;
        return s;
    }

private:
    static constexpr Element unassigned = ~Element{0};

    Mask low_mask() const { return n_ >= 64 ? ~Mask{0} : (Mask{1} << n_) - 1; }

    bool out_of_budget()
    {
        if (++stats_.nodes > limits_.node_budget)
            return true;
        if ((stats_.nodes & 0x3ff) == 0 && std::chrono::steady_clock::now() - start_ > limits_.wall_budget)
            return true;
        return false;
    }

    // Values of x compatible with every tuple over domain_ + {x} that
    // contains x and, when `fresh` is nonempty, at least one fresh point.
    Mask allowed_by(std::span<const PowerIndex> fresh)
    {
        Mask alive = low_mask();
        std::vector<PowerIndex> pool(domain_.begin(), domain_.end());
        pool.push_back(x_);
        for (std::size_t r : active_) {
            const RelationSet& t = tgt_.relation(r);
            const std::size_t ar = t.arity();
            select_.assign(ar, 0);
            tuple_.resize(ar);
            image_.resize(ar);
            for_each_selection(pool.size(), ar, [&] {
                bool has_x = false, has_fresh = fresh.empty();
                for (std::size_t p = 0; p < ar; ++p) {
                    tuple_[p] = pool[select_[p]];
                    has_x = has_x || tuple_[p] == x_;
                    if (!has_fresh)
                        has_fresh = std::find(fresh.begin(), fresh.end(), tuple_[p]) != fresh.end();
                }
                if (!has_x || !has_fresh || !src_.contains(r, tuple_))
                    return;
                Mask ok = 0;
                for (Element v = 0; v < n_; ++v) {
                    if (!(alive >> v & 1))
                        continue;
                    for (std::size_t p = 0; p < ar; ++p)
                        image_[p] = tuple_[p] == x_ ? v : value_[tuple_[p]];
                    if (t.contains(image_))
                        ok |= Mask{1} << v;
                }
                alive &= ok;
            });
        }
        return alive;
    }

    // Every tuple over domain_ that contains a fresh point maps into the target.
    bool consistent(std::span<const PowerIndex> fresh)
    {
        for (std::size_t r : active_) {
            const RelationSet& t = tgt_.relation(r);
            const std::size_t ar = t.arity();
            select_.assign(ar, 0);
            tuple_.resize(ar);
            image_.resize(ar);
            bool ok = true;
            for_each_selection(domain_.size(), ar, [&] {
                if (!ok)
                    return;
                bool has_fresh = false;
                for (std::size_t p = 0; p < ar; ++p) {
                    tuple_[p] = domain_[select_[p]];
                    has_fresh = has_fresh || std::find(fresh.begin(), fresh.end(), tuple_[p]) != fresh.end();
                }
                if (!has_fresh || !src_.contains(r, tuple_))
                    return;
                for (std::size_t p = 0; p < ar; ++p)
                    image_[p] = value_[tuple_[p]];
                ok = t.contains(image_);
            });
            if (!ok)
                return false;
        }
        return true;
    }

    template <class F>
    void for_each_selection(std::size_t size, std::size_t ar, F&& fn)
    {
        if (size == 0)
            return;
        std::fill(select_.begin(), select_.end(), 0);
        while (true) {
            fn();
            std::size_t p = ar;
            while (p > 0 && ++select_[p - 1] == size)
                select_[--p] = 0;
            if (p == 0)
                return;
        }
    }

    void record()
    {
        LocalCounterexample c;
        std::vector<std::size_t> order(domain_.size());
        for (std::size_t i = 0; i < order.size(); ++i)
            order[i] = i;
        std::sort(order.begin(), order.end(), [&](auto i, auto j) { return domain_[i] < domain_[j]; });
        for (auto i : order) {
            c.domain.push_back(domain_[i]);
            c.values.push_back(value_[domain_[i]]);
        }
        c.missing = x_;
        auto key = [](const LocalCounterexample& e) { return std::tie(e.domain, e.values, e.missing); };
        if (!best_ || key(c) < key(*best_))
            best_ = std::move(c);
    }

    bool dfs(Mask alive)
    {
        if (alive == 0) {
            record();
            return true;
        }
        if (domain_.size() >= level_)
            return true;
        if (out_of_budget())
            return false;
        const auto v0 = static_cast<Element>(std::countr_zero(alive));
        std::vector<PowerIndex> fresh;
        std::vector<std::vector<PowerIndex>> tried;
        for (std::size_t r : active_) {
            const RelationSet& t = tgt_.relation(r);
            const std::size_t ar = t.arity();
            for (std::size_t pos = 0; pos < ar; ++pos) {
                bool stop = false;
                src_.for_each_tuple_through(r, x_, pos, [&](std::span<const PowerIndex> tuple) {
                    for (std::size_t p = 0; p < pos; ++p)
                        if (tuple[p] == x_)
                            return true;
                    fresh.clear();
                    for (auto e : tuple)
                        if (e != x_ && value_[e] == unassigned &&
                            std::find(fresh.begin(), fresh.end(), e) == fresh.end())
                            fresh.push_back(e);
                    if (fresh.empty() || domain_.size() + fresh.size() > level_)
                        return true;
                    std::sort(fresh.begin(), fresh.end());
                    std::vector<PowerIndex> tuple_copy(tuple.begin(), tuple.end());
                    if (!branch(r, tuple_copy, fresh, v0, alive))
                        stop = true;
                    return !stop;
                });
                if (stop)
                    return false;
            }
        }
        return true;
    }

    // Assign fresh points of `tuple` so that the tuple kills v0.
    bool branch(std::size_t r, const std::vector<PowerIndex>& tuple, const std::vector<PowerIndex>& fresh, Element v0,
                Mask alive)
    {
        const RelationSet& t = tgt_.relation(r);
        std::vector<Element> assign(fresh.size(), 0);
        Tuple image(tuple.size());
        const std::vector<PowerIndex> fresh_points = fresh;
        while (true) {
            for (std::size_t i = 0; i < fresh_points.size(); ++i)
                value_[fresh_points[i]] = assign[i];
            for (std::size_t p = 0; p < tuple.size(); ++p)
                image[p] = tuple[p] == x_ ? v0 : value_[tuple[p]];
            if (!t.contains(image)) {
                const std::size_t mark = domain_.size();
                domain_.insert(domain_.end(), fresh_points.begin(), fresh_points.end());
                bool keep = true;
                if (consistent(fresh_points)) {
                    const Mask next = alive & allowed_by(fresh_points);
                    keep = dfs(next);
                }
                domain_.resize(mark);
                if (!keep) {
                    for (auto e : fresh_points)
                        value_[e] = unassigned;
                    return false;
                }
            }
            std::size_t i = assign.size();
            while (i > 0 && ++assign[i - 1] == n_)
                assign[--i] = 0;
            if (i == 0)
                break;
        }
        for (auto e : fresh_points)
            value_[e] = unassigned;
        return true;
    }

    const PowerHandle& src_;
    const FiniteStructure& tgt_;
    SearchLimits limits_;
    std::size_t n_;
    std::vector<std::size_t> active_;
    std::vector<Element> value_;
    std::vector<PowerIndex> domain_;
    PowerIndex x_ = 0;
    std::size_t level_ = 0;
    std::vector<std::size_t> select_;
    std::vector<PowerIndex> tuple_;
    Tuple image_;
    std::optional<LocalCounterexample> best_;
    SearchStats stats_;
    std::chrono::steady_clock::time_point start_;
};

std::vector<Tuple> decoded_rows(const PowerHandle& source, std::span<const PowerIndex> points)
{
    std::vector<Tuple> rows;
    for (auto p : points)
        rows.push_back(source.decode(p));
    return rows;
}

// Independent of the search: the map is a local homomorphism and every value
// for the missing point breaks it.
bool obstruction_holds(const PowerHandle& source, const FiniteStructure& target, const LocalCounterexample& c)
{
    auto rows = decoded_rows(source, c.domain);
    if (!check_row_map(target, rows, c.values))
        return false;
    rows.push_back(source.decode(c.missing));
    std::vector<Element> values = c.values;
    values.push_back(0);
    for (Element v = 0; v < target.size(); ++v) {
        values.back() = v;
        if (check_row_map(target, rows, values))
            return false;
    }
    return true;
}

}  // namespace

HomogeneityResult find_one_point_obstruction(const PowerHandle& source, const FiniteStructure& target,
                                             const SearchLimits& limits)
{
    if (!(source.base() == target))
        throw std::invalid_argument("obstruction search needs a power of the target as source");
    if (target.size() > 64)
        throw std::invalid_argument("target carrier above 64 elements");
    std::size_t max_arity = 1;
    for (const auto& s : target.signature().symbols())
        max_arity = std::max(max_arity, s.arity);
    const std::size_t max_level = target.size() * (max_arity - 1);

    ObstructionSearch search(source, target, limits);
    HomogeneityResult out;
    bool finished = true;
    for (std::size_t level = 0; level <= max_level; ++level) {
        finished = search.run_level(level);
        if (search.best() || !finished)
            break;
    }
    out.stats = search.stats();
    if (!search.best()) {
        out.status = finished ? HomogeneityStatus::Holds : HomogeneityStatus::Exhausted;
        return out;
    }
    const LocalCounterexample& c = *search.best();
    if (!obstruction_holds(source, target, c))
        throw std::logic_error("obstruction search returned an invalid counterexample");
    out.status = HomogeneityStatus::Counterexample;
    out.counterexample = c;
    ExtensionProblem problem{source, target, {}, limits};
    for (std::size_t i = 0; i < c.domain.size(); ++i)
        problem.pins.emplace_back(c.domain[i], c.values[i]);
    auto recheck = solve(problem);
    if (recheck.status == SearchStatus::Found)
        throw std::logic_error("obstruction extends to a total homomorphism");
    out.recheck = recheck.status;
    out.stats += recheck.stats;
    return out;
}

HomogeneityResult is_hom_homogeneous(const FiniteStructure& a, const SearchLimits& limits)
{
    return find_one_point_obstruction(power(a, 1), a, limits);
}

HomogeneityResult is_hom_homogeneous(const PowerHandle& a, const SearchLimits& limits)
{
    if (a.size() > 64)
        throw std::invalid_argument("power has more than 64 elements");
    return is_hom_homogeneous(a.materialize(), limits);
}

HomogeneityResult is_k_ph(const FiniteStructure& a, std::size_t k, const SearchLimits& limits)
{
    if (k == 0)
        throw std::invalid_argument("k must be at least 1");
    return find_one_point_obstruction(power(a, k), a, limits);
}

PartialOpMap as_partial_op(const PowerHandle& source, const LocalCounterexample& c)
{
    std::vector<PartialOpMap::Entry> entries;
    for (std::size_t i = 0; i < c.domain.size(); ++i)
        entries.emplace_back(source.decode(c.domain[i]), c.values[i]);
    return PartialOpMap(source.exponent(), source.carrier(), std::move(entries));
}

PartialOpMap canonical_partial_nu(const FiniteStructure& a, std::size_t r)
{
    if (r < 3)
        throw std::invalid_argument("near-unanimity arity must be at least 3");
    const std::size_t n = a.size();
    std::vector<PartialOpMap::Entry> entries;
    for (Element major = 0; major < n; ++major) {
        entries.emplace_back(Tuple(r, major), major);
        for (std::size_t pos = 0; pos < r; ++pos)
            for (Element dev = 0; dev < n; ++dev) {
                if (dev == major)
                    continue;
                Tuple t(r, major);
                t[pos] = dev;
                entries.emplace_back(std::move(t), major);
            }
    }
    PartialOpMap f(r, n, std::move(entries));
    if (auto check = is_partial_polymorphism(a, f); !check)
        throw std::domain_error("canonical near-unanimity map is not a partial polymorphism (relation " +
                                check.violation->symbol + ")");
    return f;
}

Extension find_nu_polymorphism(const FiniteStructure& a, std::size_t r, const SearchLimits& limits)
{
    return extendable(a, canonical_partial_nu(a, r), limits);
}

bool verify_certificate(const FiniteStructure& a, const PHCertificate& c, const SearchLimits& limits)
{
    if (c.map.carrier() != a.size() || !is_partial_polymorphism(a, c.map))
        return false;
    return extendable(a, c.map, limits).status == SearchStatus::Unsat;
}

}  // namespace polyhom
