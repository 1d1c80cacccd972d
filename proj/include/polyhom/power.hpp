#pragma once

#include <polyhom/structure.hpp>

#include <limits>
#include <stdexcept>
#include <type_traits>

namespace polyhom {

namespace detail {
// Callbacks may return bool; false stops the enumeration.
template <class F, class... Args>
bool keep_going(F& fn, Args&&... args)
{
    if constexpr (std::is_same_v<std::invoke_result_t<F&, Args...>, bool>)
        return fn(std::forward<Args>(args)...);
    else {
        fn(std::forward<Args>(args)...);
        return true;
    }
}
}  // namespace detail

/// Lazy view of the direct power A^k. Relation membership is decided
/// coordinatewise; tuples are generated on demand from per-coordinate base
/// tuple lists and never stored.
class PowerHandle
{
public:
    static constexpr PowerIndex materialize_limit = PowerIndex{1} << 20;

    PowerHandle(FiniteStructure base, std::size_t exponent);

    const FiniteStructure& base() const noexcept { return base_; }
    std::size_t exponent() const noexcept { return k_; }
    std::size_t carrier() const noexcept { return base_.size(); }
    PowerIndex size() const noexcept { return size_; }
    const Signature& signature() const noexcept { return base_.signature(); }

    Tuple decode(PowerIndex x) const;
    PowerIndex encode(std::span<const Element> coords) const;
    Element coordinate(PowerIndex x, std::size_t j) const
    {
        return static_cast<Element>((x / place_[j]) % base_.size());
    }

    bool contains(std::size_t rel, std::span<const PowerIndex> t) const;
    bool related(std::size_t rel, PowerIndex x, PowerIndex y) const;
    bool has_loop(std::size_t rel, PowerIndex x) const;
    bool has_successor(std::size_t rel, PowerIndex x) const;
    bool has_predecessor(std::size_t rel, PowerIndex x) const;
    /// True if x occurs at `position` in some tuple of relation `rel`.
    bool occurs_at(std::size_t rel, PowerIndex x, std::size_t position) const;

    /// fn(y) for every y with (x, y) in the binary relation `rel`.
    template <class F>
    void for_each_successor(std::size_t rel, PowerIndex x, F&& fn) const
    {
        for_each_neighbor(rel, x, 0, 1, fn);
    }
    template <class F>
    void for_each_predecessor(std::size_t rel, PowerIndex x, F&& fn) const
    {
        for_each_neighbor(rel, x, 1, 0, fn);
    }

    /// fn(span<const PowerIndex>) for every tuple of `rel` holding x at
    /// `position`.
    template <class F>
    void for_each_tuple_through(std::size_t rel, PowerIndex x, std::size_t position, F&& fn) const;

    /// fn(span<const PowerIndex>) for every tuple of `rel`.
    template <class F>
    void for_each_tuple(std::size_t rel, F&& fn) const;

    /// Number of tuples of `rel` in the power: |rel|^k (saturating).
    std::uint64_t tuple_count(std::size_t rel) const;

    /// Explicit structure on 0..n^k-1; refuses above materialize_limit.
    FiniteStructure materialize() const;

private:
    template <class F>
    void for_each_neighbor(std::size_t rel, PowerIndex x, std::size_t from, std::size_t to, F& fn) const;

    FiniteStructure base_;
    std::size_t k_;
    PowerIndex size_;
    std::vector<PowerIndex> place_;  // place_[j] = n^(k-1-j)
};

PowerHandle power(const FiniteStructure& a, std::size_t k);

Substructure induced_substructure(const PowerHandle& p, std::span<const PowerIndex> elements);

template <class F>
void PowerHandle::for_each_neighbor(std::size_t rel, PowerIndex x, std::size_t from, std::size_t to, F& fn) const
{
    const RelationSet& r = base_.relation(rel);
    const std::size_t k = k_;
    // lists[j]: ids of base tuples whose `from` entry is coordinate j of x
    std::vector<std::span<const std::uint32_t>> lists(k);
    for (std::size_t j = 0; j < k; ++j) {
        lists[j] = r.with_entry_at(from, coordinate(x, j));
        if (lists[j].empty())
            return;
    }
    std::vector<std::size_t> pos(k, 0);
    std::vector<PowerIndex> acc(k + 1, 0);
    std::size_t level = 0;
    while (true) {
        if (level == k) {
            if (!detail::keep_going(fn, acc[k]))
                return;
            // advance odometer
            while (level > 0) {
                --level;
                if (++pos[level] < lists[level].size())
                    break;
                pos[level] = 0;
                if (level == 0)
                    return;
            }
        }
        acc[level + 1] = acc[level] + r.tuple(lists[level][pos[level]])[to] * place_[level];
        ++level;
    }
}

template <class F>
void PowerHandle::for_each_tuple_through(std::size_t rel, PowerIndex x, std::size_t position, F&& fn) const
{
    const RelationSet& r = base_.relation(rel);
    const std::size_t k = k_, ar = r.arity();
    std::vector<std::span<const std::uint32_t>> lists(k);
    for (std::size_t j = 0; j < k; ++j) {
        lists[j] = r.with_entry_at(position, coordinate(x, j));
        if (lists[j].empty())
            return;
    }
    std::vector<std::size_t> pos(k, 0);
    std::vector<PowerIndex> acc((k + 1) * ar, 0);
    std::size_t level = 0;
    while (true) {
        if (level == k) {
            if (!detail::keep_going(fn, std::span<const PowerIndex>(acc.data() + k * ar, ar)))
                return;
            while (level > 0) {
                --level;
                if (++pos[level] < lists[level].size())
                    break;
                pos[level] = 0;
                if (level == 0)
                    return;
            }
        }
        auto t = r.tuple(lists[level][pos[level]]);
        for (std::size_t i = 0; i < ar; ++i)
            acc[(level + 1) * ar + i] = acc[level * ar + i] + t[i] * place_[level];
        ++level;
    }
}

template <class F>
void PowerHandle::for_each_tuple(std::size_t rel, F&& fn) const
{
    const RelationSet& r = base_.relation(rel);
    const std::size_t k = k_, ar = r.arity(), count = r.size();
    if (count == 0)
        return;
    std::vector<std::size_t> pos(k, 0);
    std::vector<PowerIndex> acc((k + 1) * ar, 0);
    std::size_t level = 0;
    while (true) {
        if (level == k) {
            if (!detail::keep_going(fn, std::span<const PowerIndex>(acc.data() + k * ar, ar)))
                return;
            while (level > 0) {
                --level;
                if (++pos[level] < count)
                    break;
                pos[level] = 0;
                if (level == 0)
                    return;
            }
        }
        auto t = r.tuple(pos[level]);
        for (std::size_t i = 0; i < ar; ++i)
            acc[(level + 1) * ar + i] = acc[level * ar + i] + t[i] * place_[level];
        ++level;
    }
}

}  // namespace polyhom
