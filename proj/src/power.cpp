#include <polyhom/power.hpp>

#include <algorithm>

namespace polyhom {

PowerHandle::PowerHandle(FiniteStructure base, std::size_t exponent) : base_(std::move(base)), k_(exponent)
{
    if (k_ == 0)
        throw std::invalid_argument("power exponent must be at least 1");
    const PowerIndex n = base_.size();
    constexpr PowerIndex limit = PowerIndex{1} << 62;
    size_ = 1;
    for (std::size_t i = 0; i < k_; ++i) {
        if (size_ > limit / n)
            throw std::overflow_error("power " + std::to_string(n) + "^" + std::to_string(k_) +
                                      " exceeds the 2^62 index range");
        size_ *= n;
    }
    place_.resize(k_);
    PowerIndex p = 1;
    for (std::size_t j = k_; j-- > 0;) {
        place_[j] = p;
        p *= n;
    }
}

PowerHandle power(const FiniteStructure& a, std::size_t k) { return PowerHandle(a, k); }

Tuple PowerHandle::decode(PowerIndex x) const
{
    Tuple t(k_);
    for (std::size_t j = 0; j < k_; ++j)
        t[j] = coordinate(x, j);
    return t;
}

PowerIndex PowerHandle::encode(std::span<const Element> coords) const
{
    if (coords.size() != k_)
        throw std::invalid_argument("coordinate vector length differs from exponent");
    PowerIndex x = 0;
    for (Element c : coords) {
        if (c >= base_.size())
            throw std::out_of_range("coordinate out of range");
        x = x * base_.size() + c;
    }
    return x;
}

bool PowerHandle::contains(std::size_t rel, std::span<const PowerIndex> t) const
{
    const RelationSet& r = base_.relation(rel);
    if (t.size() != r.arity())
        return false;
    Tuple column(r.arity());
    for (std::size_t j = 0; j < k_; ++j) {
        for (std::size_t i = 0; i < t.size(); ++i)
            column[i] = coordinate(t[i], j);
        if (!r.contains(column))
            return false;
    }
    return true;
}

bool PowerHandle::related(std::size_t rel, PowerIndex x, PowerIndex y) const
{
    const RelationSet& r = base_.relation(rel);
    for (std::size_t j = 0; j < k_; ++j)
        if (!r.contains_pair(coordinate(x, j), coordinate(y, j)))
            return false;
    return true;
}

bool PowerHandle::has_loop(std::size_t rel, PowerIndex x) const { return related(rel, x, x); }

bool PowerHandle::occurs_at(std::size_t rel, PowerIndex x, std::size_t position) const
{
    const RelationSet& r = base_.relation(rel);
    for (std::size_t j = 0; j < k_; ++j)
        if (r.with_entry_at(position, coordinate(x, j)).empty())
            return false;
    return true;
}

bool PowerHandle::has_successor(std::size_t rel, PowerIndex x) const { return occurs_at(rel, x, 0); }
bool PowerHandle::has_predecessor(std::size_t rel, PowerIndex x) const { return occurs_at(rel, x, 1); }

std::uint64_t PowerHandle::tuple_count(std::size_t rel) const
{
    const std::uint64_t c = base_.relation(rel).size();
    std::uint64_t total = 1;
    for (std::size_t j = 0; j < k_; ++j) {
        if (c != 0 && total > std::numeric_limits<std::uint64_t>::max() / c)
            return std::numeric_limits<std::uint64_t>::max();
        total *= c;
    }
    return total;
}

FiniteStructure PowerHandle::materialize() const
{
    if (size_ > materialize_limit)
        throw std::length_error("refusing to materialize a power with " + std::to_string(size_) + " elements");
    std::vector<RelationSet> rels;
    for (std::size_t r = 0; r < signature().size(); ++r) {
        std::vector<Tuple> ts;
        for_each_tuple(r, [&](std::span<const PowerIndex> t) {
            Tuple e;
            for (auto v : t)
                e.push_back(static_cast<Element>(v));
            ts.push_back(std::move(e));
        });
        rels.emplace_back(base_.relation(r).arity(), static_cast<std::size_t>(size_), std::move(ts));
    }
    return FiniteStructure(base_.name() + "^" + std::to_string(k_), static_cast<std::size_t>(size_), signature(),
                           std::move(rels));
}

Substructure induced_substructure(const PowerHandle& p, std::span<const PowerIndex> elements)
{
    if (elements.empty())
        throw std::invalid_argument("induced substructure needs a nonempty element set");
    std::vector<PowerIndex> s(elements.begin(), elements.end());
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    if (s.back() >= p.size())
        throw std::out_of_range("element outside the power's carrier");
    auto index_of = [&](PowerIndex x) -> std::optional<Element> {
        auto it = std::lower_bound(s.begin(), s.end(), x);
        if (it == s.end() || *it != x)
            return std::nullopt;
        return static_cast<Element>(it - s.begin());
    };

    std::vector<RelationSet> rels;
    for (std::size_t r = 0; r < p.signature().size(); ++r) {
        std::vector<Tuple> kept;
        for (PowerIndex x : s) {
            p.for_each_tuple_through(r, x, 0, [&](std::span<const PowerIndex> t) {
                Tuple mapped;
                for (auto v : t) {
                    auto i = index_of(v);
                    if (!i)
                        return;
                    mapped.push_back(*i);
                }
                kept.push_back(std::move(mapped));
            });
        }
        rels.emplace_back(p.signature()[r].arity, s.size(), std::move(kept));
    }
    Substructure out{FiniteStructure(p.base().name() + "^" + std::to_string(p.exponent()) + "_sub", s.size(),
                                     p.signature(), std::move(rels)),
                     std::move(s)};
    return out;
}

}  // namespace polyhom
