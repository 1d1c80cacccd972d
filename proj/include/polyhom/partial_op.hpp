#pragma once

#include <polyhom/structure.hpp>

#include <memory>
#include <optional>
#include <utility>

namespace polyhom {

/// A k-ary partial operation on 0..n-1 with finite domain: the local
/// polymorphisms f: A^k -> A (partial) and their certificates.
class PartialOpMap
{
public:
    using Entry = std::pair<Tuple, Element>;

    PartialOpMap(std::size_t arity, std::size_t carrier, std::vector<Entry> entries);

    std::size_t arity() const noexcept { return arity_; }
    std::size_t carrier() const noexcept { return carrier_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    /// Entries sorted by domain row.
    const std::vector<Entry>& entries() const noexcept { return entries_; }
    const Tuple& row(std::size_t i) const { return entries_[i].first; }
    Element value(std::size_t i) const { return entries_[i].second; }
    std::optional<Element> lookup(std::span<const Element> row) const;

    bool operator==(const PartialOpMap&) const = default;

private:
    std::size_t arity_;
    std::size_t carrier_;
    std::vector<Entry> entries_;
};

struct ColumnReduction
{
    PartialOpMap reduced;
    /// column_map[j] is the kept column that original column j duplicates.
    std::vector<std::size_t> column_map;
};

/// Removes duplicate columns of the domain matrix, keeping first occurrences
/// in order. f extends to a polymorphism iff the reduced map does.
ColumnReduction reduce_columns(const PartialOpMap& f);

/// Total k-ary operation A^k -> A, indexed by the power encoding of its
/// argument vector.
class FunctionTable
{
public:
    FunctionTable(std::size_t arity, std::size_t carrier, std::vector<Element> table);

    std::size_t arity() const noexcept { return arity_; }
    std::size_t carrier() const noexcept { return carrier_; }
    Element operator()(std::span<const Element> args) const;
    Element at(PowerIndex x) const { return (*table_)[x]; }
    const std::vector<Element>& table() const noexcept { return *table_; }

    bool operator==(const FunctionTable& o) const
    {
        return arity_ == o.arity_ && carrier_ == o.carrier_ && *table_ == *o.table_;
    }

private:
    std::size_t arity_;
    std::size_t carrier_;
    std::shared_ptr<const std::vector<Element>> table_;
};

}  // namespace polyhom
