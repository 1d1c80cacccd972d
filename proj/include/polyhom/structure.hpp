#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace polyhom {

/// Carrier elements are dense integers 0..n-1.
using Element = std::uint32_t;
/// Element of a direct power A^k: the base-n integer of its index vector,
/// most significant coordinate first, so numeric order is lexicographic order.
using PowerIndex = std::uint64_t;
using Tuple = std::vector<Element>;

struct Symbol
{
    std::string name;
    std::size_t arity = 0;

    bool operator==(const Symbol&) const = default;
};

struct Violation
{
    std::string symbol;
    std::size_t tuple_index = 0;
    std::string rule;

    std::string message() const;
};

class StructureError : public std::runtime_error
{
public:
    explicit StructureError(std::vector<Violation> violations);
    const std::vector<Violation>& violations() const noexcept { return violations_; }

private:
    std::vector<Violation> violations_;
};

class Signature
{
public:
    Signature() = default;
    explicit Signature(std::vector<Symbol> symbols);

    std::size_t size() const noexcept { return symbols_.size(); }
    bool empty() const noexcept { return symbols_.empty(); }
    const Symbol& operator[](std::size_t i) const { return symbols_.at(i); }
    const std::vector<Symbol>& symbols() const noexcept { return symbols_; }
    std::optional<std::size_t> index_of(const std::string& name) const;
    std::size_t max_arity() const noexcept;

    bool operator==(const Signature&) const = default;

private:
    std::vector<Symbol> symbols_;
};

/// An m-ary relation over 0..carrier-1, stored as a sorted duplicate-free
/// flat tuple list. Membership is O(1) through a dense bitset when
/// carrier^arity is small, and binary relations over at most 64 elements also
/// keep successor/predecessor masks for the search engine.
class RelationSet
{
public:
    RelationSet() = default;
    RelationSet(std::size_t arity, std::size_t carrier, std::vector<Tuple> tuples);

    static RelationSet full(std::size_t arity, std::size_t carrier);
    static RelationSet diagonal(std::size_t arity, std::size_t carrier);

    std::size_t arity() const noexcept { return arity_; }
    std::size_t carrier() const noexcept { return carrier_; }
    std::size_t size() const noexcept { return arity_ == 0 ? 0 : flat_.size() / arity_; }
    bool empty() const noexcept { return flat_.empty(); }

    std::span<const Element> tuple(std::size_t i) const
    {
        return {flat_.data() + i * arity_, arity_};
    }
    std::vector<Tuple> tuples() const;
    const std::vector<Element>& flat() const noexcept { return flat_; }

    bool contains(std::span<const Element> t) const;
    bool contains_pair(Element a, Element b) const;
    bool is_subset_of(const RelationSet& other) const;
    bool is_full() const noexcept;

    /// Binary relations with carrier <= 64 only.
    std::uint64_t successors(Element a) const { return succ_[a]; }
    std::uint64_t predecessors(Element a) const { return pred_[a]; }
    bool has_masks() const noexcept { return !succ_.empty(); }

    /// Ids of the tuples whose entry at `position` equals `a`.
    std::span<const std::uint32_t> with_entry_at(std::size_t position, Element a) const;

    /// Base-carrier code of a tuple (most significant entry first).
    std::uint64_t code(std::span<const Element> t) const;

    bool operator==(const RelationSet& o) const
    {
        return arity_ == o.arity_ && carrier_ == o.carrier_ && flat_ == o.flat_;
    }

private:
    void build_indexes();

    std::size_t arity_ = 0;
    std::size_t carrier_ = 0;
    std::vector<Element> flat_;
    std::vector<std::uint64_t> dense_;
    std::vector<std::uint64_t> succ_;
    std::vector<std::uint64_t> pred_;
    // position-major: index_offsets_[p * (carrier + 1) + a] .. next
    std::vector<std::uint32_t> index_offsets_;
    std::vector<std::uint32_t> index_ids_;
};

class FiniteStructure
{
public:
    FiniteStructure();
    FiniteStructure(std::string name, std::size_t n, Signature signature, std::vector<RelationSet> relations);

    const std::string& name() const noexcept;
    std::size_t size() const noexcept;
    const Signature& signature() const noexcept;
    const RelationSet& relation(std::size_t i) const;
    const RelationSet& relation(const std::string& name) const;
    const std::vector<RelationSet>& relations() const noexcept;
    std::size_t max_arity() const noexcept { return signature().max_arity(); }

    FiniteStructure renamed(std::string name) const;

    bool operator==(const FiniteStructure& o) const;

private:
    struct Data
    {
        std::string name;
        std::size_t n = 1;
        Signature signature;
        std::vector<RelationSet> relations;
    };
    std::shared_ptr<const Data> data_;
};

/// Unvalidated parser output; entries may be out of range or negative.
struct RawRelation
{
    std::string name;
    long long arity = 0;
    std::vector<std::vector<long long>> tuples;
};

struct RawStructure
{
    std::string name;
    long long n = 0;
    std::vector<RawRelation> relations;
};

/// Canonicalizes (sorts, dedupes) or throws StructureError naming every
/// violation found.
FiniteStructure validate_structure(const RawStructure& raw);

struct Substructure
{
    FiniteStructure structure;
    std::vector<PowerIndex> embedding;  // new element i is embedding[i] in the source
};

Substructure induced_substructure(const FiniteStructure& a, std::span<const Element> elements);

}  // namespace polyhom
