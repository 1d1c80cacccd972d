#include <polyhom/engine.hpp>

#include <algorithm>
#include <bit>
#include <queue>
#include <unordered_map>

namespace polyhom {

const char* to_string(SearchStatus s)
{
    switch (s) {
    case SearchStatus::Found: return "Found";
    case SearchStatus::Unsat: return "Unsat";
    case SearchStatus::Exhausted: return "Exhausted";
    }
    return "?";
}

namespace {

constexpr PowerIndex max_variables = PowerIndex{1} << 22;
constexpr std::size_t support_table_limit = 12;

using Mask = std::uint64_t;
using Clock = std::chrono::steady_clock;

Mask low_mask(std::size_t n) { return n >= 64 ? ~Mask{0} : ((Mask{1} << n) - 1); }

void validate_problem(const ExtensionProblem& p)
{
    if (!(p.source.signature() == p.target.signature()))
        throw std::invalid_argument("source and target signatures differ");
    if (p.target.size() > 64)
        throw std::invalid_argument("target carrier above 64 elements is not supported by the search engine");
    if (p.source.size() > max_variables)
        throw std::length_error("source has " + std::to_string(p.source.size()) +
                                " elements; the search engine is limited to 2^22 variables");
    if (p.limits.node_budget == 0 || p.limits.wall_budget.count() <= 0)
        throw std::invalid_argument("search budgets must be positive");
    if (!pins_consistent(p.source, p.target, p.pins))
        throw std::invalid_argument("pins violate a fully pinned constraint");
}

// Binary target relation with cached supports: out(S) = union of successors
// of S, in(S) = union of predecessors.
struct BinaryConstraint
{
    std::size_t rel = 0;
    const RelationSet* target = nullptr;
    std::vector<Mask> out_table, in_table;

    Mask out_support(Mask s) const
    {
        if (!out_table.empty())
            return out_table[s];
        Mask r = 0;
        for (; s; s &= s - 1)
            r |= target->successors(static_cast<Element>(std::countr_zero(s)));
        return r;
    }
    Mask in_support(Mask s) const
    {
        if (!in_table.empty())
            return in_table[s];
        Mask r = 0;
        for (; s; s &= s - 1)
            r |= target->predecessors(static_cast<Element>(std::countr_zero(s)));
        return r;
    }
};

class Search
{
public:
    explicit Search(const ExtensionProblem& p) :
        src_(p.source), tgt_(p.target), limits_(p.limits), n_(p.target.size()), full_(low_mask(n_)),
        variables_(static_cast<std::size_t>(p.source.size())), start_(Clock::now())
    {
        for (std::size_t r = 0; r < src_.signature().size(); ++r) {
            const auto ar = src_.signature()[r].arity;
            if (src_.base().relation(r).empty())
                continue;
            if (ar == 2) {
                BinaryConstraint b;
                b.rel = r;
                b.target = &tgt_.relation(r);
                if (n_ <= support_table_limit) {
                    const std::size_t cells = std::size_t{1} << n_;
                    b.out_table.assign(cells, 0);
                    b.in_table.assign(cells, 0);
                    for (std::size_t s = 1; s < cells; ++s) {
                        const auto v = static_cast<Element>(std::countr_zero(s));
                        const std::size_t rest = s & (s - 1);
                        b.out_table[s] = b.out_table[rest] | b.target->successors(v);
                        b.in_table[s] = b.in_table[rest] | b.target->predecessors(v);
                    }
                }
                binary_.push_back(std::move(b));
            }
            else if (ar >= 3)
                higher_.push_back(r);
        }
        dom_.assign(variables_, full_);
        prop_.assign(variables_, full_);
        queued_.assign(variables_, 0);
    }

    // false: root is inconsistent
    bool initialize(std::span<const std::pair<PowerIndex, Element>> pins)
    {
        for (std::size_t x = 0; x < variables_; ++x) {
            Mask m = node_mask(x);
            dom_[x] = m;
            if (m == 0)
                return false;
            if (m != full_ || n_ == 1)
                enqueue(x);
        }
        for (auto [x, v] : pins) {
            const Mask bit = Mask{1} << v;
            if (!(dom_[x] & bit))
                return false;
            dom_[x] = bit;
            enqueue(x);
        }
        if (!propagate())
            return false;
        for (std::size_t x = 0; x < variables_; ++x)
            if (std::popcount(dom_[x]) >= 2)
                heap_.push({static_cast<unsigned>(std::popcount(dom_[x])), x});
        return true;
    }

    // Runs the DFS. on_solution returns false to stop.
    template <class OnSolution>
    SearchStatus run(OnSolution&& on_solution)
    {
        struct Frame
        {
            std::size_t var;
            Mask remaining;
            std::size_t mark;
        };
        std::vector<Frame> frames;
        bool need_select = true;
        while (true) {
            if (need_select) {
                auto x = select();
                if (!x) {
                    if (!on_solution(assignment()))
                        return SearchStatus::Found;
                }
                else
                    frames.push_back({*x, dom_[*x], trail_.size()});
            }
            // try the next value of the deepest frame with values left
            bool placed = false;
            while (!frames.empty()) {
                Frame& f = frames.back();
                undo_to(f.mark);
                if (f.remaining == 0) {
                    heap_.push({static_cast<unsigned>(std::popcount(dom_[f.var])), f.var});
                    frames.pop_back();
                    continue;
                }
                const Mask bit = f.remaining & (~f.remaining + 1);
                f.remaining &= ~bit;
                if (++stats_.nodes > limits_.node_budget || out_of_time())
                    return SearchStatus::Exhausted;
                conflict_ = false;
                narrow(f.var, bit);
                if (propagate()) {
                    placed = true;
                    break;
                }
            }
            if (!placed)
                return exhausted_ ? SearchStatus::Exhausted : SearchStatus::Unsat;
            need_select = true;
        }
    }

    bool exhausted() const { return exhausted_; }
    SearchStats stats() const
    {
        SearchStats s = stats_;
        s.elapsed = Clock::now() - start_;
        return s;
    }

private:
    struct TrailEntry
    {
        std::size_t var;
        Mask dom;
        Mask prop;
    };

    Mask node_mask(std::size_t x) const
    {
        Mask m = full_;
        for (std::size_t r = 0; r < src_.signature().size(); ++r) {
            const RelationSet& base = src_.base().relation(r);
            if (base.empty())
                continue;
            const RelationSet& t = tgt_.relation(r);
            const std::size_t ar = base.arity();
            for (std::size_t p = 0; p < ar; ++p) {
                if (!src_.occurs_at(r, x, p))
                    continue;
                Mask allowed = 0;
                for (std::size_t i = 0; i < t.size(); ++i)
                    allowed |= Mask{1} << t.tuple(i)[p];
                m &= allowed;
            }
            if (ar == 2 && src_.has_loop(r, x)) {
                Mask loops = 0;
                for (Element v = 0; v < n_; ++v)
                    if (t.contains_pair(v, v))
                        loops |= Mask{1} << v;
                m &= loops;
            }
        }
        return m;
    }

    void enqueue(std::size_t x)
    {
        if (!queued_[x]) {
            queued_[x] = 1;
            queue_.push_back(x);
        }
    }

    void clear_queue()
    {
        for (std::size_t i = head_; i < queue_.size(); ++i)
            queued_[queue_[i]] = 0;
        queue_.clear();
        head_ = 0;
    }

    void narrow(std::size_t y, Mask mask)
    {
        if (conflict_)
            return;
        const Mask nd = dom_[y] & mask;
        if (nd == dom_[y])
            return;
        trail_.push_back({y, dom_[y], prop_[y]});
        dom_[y] = nd;
        if (nd == 0) {
            conflict_ = true;
            return;
        }
        enqueue(y);
        if (std::popcount(nd) >= 2)
            heap_.push({static_cast<unsigned>(std::popcount(nd)), y});
    }

    bool propagate()
    {
        if (conflict_) {
            clear_queue();
            return false;
        }
        while (head_ < queue_.size()) {
            const std::size_t x = queue_[head_++];
            queued_[x] = 0;
            ++stats_.propagations;
            if ((stats_.propagations & 0xfff) == 0 && out_of_time()) {
                conflict_ = true;
                exhausted_ = true;
            }
            if (!conflict_)
                process(x);
            if (conflict_) {
                clear_queue();
                return false;
            }
        }
        queue_.clear();
        head_ = 0;
        return true;
    }

    void process(std::size_t x)
    {
        const Mask d = dom_[x], p = prop_[x];
        const bool singleton = std::popcount(d) == 1;
        const bool arc = limits_.propagation == Propagation::ArcConsistency;
        if (arc || singleton) {
            for (const auto& b : binary_) {
                const Mask out = b.out_support(d);
                if (out != full_ && out != b.out_support(p))
                    src_.for_each_successor(b.rel, x, [&](PowerIndex y) {
                        narrow(static_cast<std::size_t>(y), out);
                        return !conflict_;
                    });
                if (conflict_)
                    return;
                const Mask in = b.in_support(d);
                if (in != full_ && in != b.in_support(p))
                    src_.for_each_predecessor(b.rel, x, [&](PowerIndex y) {
                        narrow(static_cast<std::size_t>(y), in);
                        return !conflict_;
                    });
                if (conflict_)
                    return;
            }
            if (d != p) {
                trail_.push_back({x, dom_[x], prop_[x]});
                prop_[x] = d;
            }
        }
        if (singleton)
            for (std::size_t r : higher_)
                forward_check(r, x);
    }

    void forward_check(std::size_t r, std::size_t x)
    {
        const RelationSet& t = tgt_.relation(r);
        const std::size_t ar = t.arity();
        Tuple values(ar);
        for (std::size_t pos = 0; pos < ar && !conflict_; ++pos) {
            src_.for_each_tuple_through(r, x, pos, [&](std::span<const PowerIndex> tuple) {
                std::size_t free_var = variables_;
                for (auto e : tuple) {
                    if (std::popcount(dom_[e]) != 1) {
                        if (free_var == variables_)
                            free_var = static_cast<std::size_t>(e);
                        else if (free_var != e)
                            return true;
                    }
                }
                auto fill = [&](std::size_t var, Element w) {
                    for (std::size_t i = 0; i < ar; ++i)
                        values[i] = tuple[i] == var ? w : static_cast<Element>(std::countr_zero(dom_[tuple[i]]));
                };
                if (free_var == variables_) {
                    fill(variables_, 0);
                    if (!t.contains(values))
                        conflict_ = true;
                    return !conflict_;
                }
                Mask allowed = 0;
                for (Mask s = dom_[free_var]; s; s &= s - 1) {
                    const auto w = static_cast<Element>(std::countr_zero(s));
                    fill(free_var, w);
                    if (t.contains(values))
                        allowed |= Mask{1} << w;
                }
                narrow(free_var, allowed);
                return !conflict_;
            });
        }
    }

    void undo_to(std::size_t mark)
    {
        while (trail_.size() > mark) {
            const auto& e = trail_.back();
            dom_[e.var] = e.dom;
            prop_[e.var] = e.prop;
            if (std::popcount(e.dom) >= 2)
                heap_.push({static_cast<unsigned>(std::popcount(e.dom)), e.var});
            trail_.pop_back();
        }
    }

    std::optional<std::size_t> select()
    {
        while (!heap_.empty()) {
            auto [size, x] = heap_.top();
            heap_.pop();
            if (static_cast<unsigned>(std::popcount(dom_[x])) == size)
                return x;
        }
        return std::nullopt;
    }

    std::vector<Element> assignment() const
    {
        std::vector<Element> a(variables_);
        for (std::size_t x = 0; x < variables_; ++x)
            a[x] = static_cast<Element>(std::countr_zero(dom_[x]));
        return a;
    }

    bool out_of_time()
    {
        if (exhausted_)
            return true;
        if (Clock::now() - start_ > limits_.wall_budget)
            exhausted_ = true;
        return exhausted_;
    }

    const PowerHandle& src_;
    const FiniteStructure& tgt_;
    SearchLimits limits_;
    std::size_t n_;
    Mask full_;
    std::size_t variables_;
    std::vector<BinaryConstraint> binary_;
    std::vector<std::size_t> higher_;
    std::vector<Mask> dom_, prop_;
    std::vector<TrailEntry> trail_;
    std::vector<std::size_t> queue_;
    std::size_t head_ = 0;
    std::vector<char> queued_;
    std::priority_queue<std::pair<unsigned, std::size_t>, std::vector<std::pair<unsigned, std::size_t>>,
                        std::greater<>>
        heap_;
    bool conflict_ = false;
    bool exhausted_ = false;
    SearchStats stats_;
    Clock::time_point start_;
};

void verify_or_throw(const ExtensionProblem& p, const std::vector<Element>& map)
{
    auto check = check_is_homomorphism(p.source, p.target, map);
    if (!check)
        throw std::logic_error("search produced a map that is not a homomorphism (relation " +
                               check.violation->symbol + ")");
    for (auto [x, v] : p.pins)
        if (map[x] != v)
            throw std::logic_error("search produced a map that ignores a pin");
}

}  // namespace

bool pins_consistent(const PowerHandle& source, const FiniteStructure& target,
                     std::span<const std::pair<PowerIndex, Element>> pins)
{
    std::unordered_map<PowerIndex, Element> pinned;
    for (auto [x, v] : pins) {
        if (x >= source.size() || v >= target.size())
            return false;
        auto [it, fresh] = pinned.emplace(x, v);
        if (!fresh && it->second != v)
            return false;
    }
    Tuple image;
    for (auto [x, v] : pinned) {
        for (std::size_t r = 0; r < source.signature().size(); ++r) {
            const RelationSet& t = target.relation(r);
            bool ok = true;
            for (std::size_t pos = 0; pos < t.arity() && ok; ++pos)
                source.for_each_tuple_through(r, x, pos, [&](std::span<const PowerIndex> tuple) {
                    image.clear();
                    for (auto e : tuple) {
                        auto it = pinned.find(e);
                        if (it == pinned.end())
                            return true;
                        image.push_back(it->second);
                    }
                    ok = t.contains(image);
                    return ok;
                });
            if (!ok)
                return false;
        }
    }
    return true;
}

HomCheck check_is_homomorphism(const PowerHandle& source, const FiniteStructure& target,
                               std::span<const Element> map)
{
    if (!(source.signature() == target.signature()))
        throw std::invalid_argument("source and target signatures differ");
    if (map.size() != source.size())
        throw std::invalid_argument("map is not total on the source carrier");
    for (Element v : map)
        if (v >= target.size())
            throw std::out_of_range("map value outside the target carrier");
    HomCheck result;
    Tuple image;
    for (std::size_t r = 0; r < source.signature().size() && result.ok; ++r) {
        const RelationSet& t = target.relation(r);
        if (t.is_full())
            continue;
        source.for_each_tuple(r, [&](std::span<const PowerIndex> tuple) {
            image.clear();
            for (auto e : tuple)
                image.push_back(map[e]);
            if (t.contains(image))
                return true;
            result.ok = false;
            result.violation = HomViolation{source.signature()[r].name, {tuple.begin(), tuple.end()}, image};
            return false;
        });
    }
    return result;
}

HomCheck check_is_homomorphism(const FiniteStructure& source, const FiniteStructure& target,
                               std::span<const Element> map)
{
    return check_is_homomorphism(power(source, 1), target, map);
}

SearchOutcome solve(const ExtensionProblem& problem)
{
    validate_problem(problem);
    Search search(problem);
    SearchOutcome out;
    if (!search.initialize(problem.pins)) {
        out.status = search.exhausted() ? SearchStatus::Exhausted : SearchStatus::Unsat;
        out.stats = search.stats();
        return out;
    }
    out.status = search.run([&](std::vector<Element> a) {
        out.assignment = std::move(a);
        return false;
    });
    out.stats = search.stats();
    if (out.status == SearchStatus::Found)
        verify_or_throw(problem, out.assignment);
    else
        out.assignment.clear();
    return out;
}

Enumeration enumerate_solutions(const ExtensionProblem& problem, std::size_t cap)
{
    if (cap == 0)
        throw std::invalid_argument("enumeration cap must be at least 1");
    validate_problem(problem);
    Search search(problem);
    Enumeration out;
    if (!search.initialize(problem.pins)) {
        out.budget_exhausted = search.exhausted();
        out.complete = !out.budget_exhausted;
        out.stats = search.stats();
        return out;
    }
    auto status = search.run([&](std::vector<Element> a) {
        if (out.solutions.size() == cap) {
            out.capped = true;
            return false;
        }
        verify_or_throw(problem, a);
        out.solutions.push_back(std::move(a));
        return true;
    });
    out.budget_exhausted = status == SearchStatus::Exhausted;
    out.complete = status == SearchStatus::Unsat;
    out.stats = search.stats();
    return out;
}

}  // namespace polyhom
