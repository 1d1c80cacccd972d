#pragma once

#include <polyhom/families.hpp>
#include <polyhom/homogeneity.hpp>

#include <array>
#include <functional>

namespace polyhom {

struct Reason
{
    std::string name;
    bool value = false;
    std::string detail;
};

struct ClassReport
{
    Family family = Family::Graph;
    PHStatus verdict = PHStatus::PH;
    std::vector<Reason> reasons;
    std::optional<PartialOpMap> witness;
    /// Element tuple behind the witness (star a,b,c; X5 configuration; ...).
    std::optional<Tuple> witness_tuple;
    std::optional<SearchStatus> witness_check;

    std::optional<bool> reason(const std::string& name) const;
};

ClassReport classify_graph(const FiniteStructure& g, const SearchLimits& limits = {});

struct StarWitness
{
    std::size_t k = 0;
    Element a = 0, b = 0, c = 0;
    std::vector<Element> neighborless;
    PartialOpMap map;
    /// (b, ..., b): adjacent to every leaf, so it has no admissible image.
    PowerIndex center = 0;
    SearchStatus check = SearchStatus::Unsat;
};

/// Star construction for a graph without property (star): leaves
/// (a,..,c at position i,..,a) of arity k+1 mapped onto a smallest vertex set
/// with no common neighbor. Returns nothing when a precondition fails.
std::optional<StarWitness> graph_star_witness(const FiniteStructure& g, const SearchLimits& limits = {});

ClassReport classify_poset(const FiniteStructure& p, const SearchLimits& limits = {});

/// Linear extensions (each listed bottom to top) whose intersection is the order.
std::vector<std::vector<Element>> realizer(const FiniteStructure& p);

ClassReport classify_strict_poset(const FiniteStructure& s, const SearchLimits& limits = {});

/// Restricted growth form: first occurrences of block labels are 0, 1, 2, ...
Partition normalize(const Partition& p);
std::vector<Partition> all_partitions(std::size_t n);
Partition meet(const Partition& x, const Partition& y);
Partition join(const Partition& x, const Partition& y);
bool leq(const Partition& x, const Partition& y);
bool permute(const Partition& x, const Partition& y);
Partition discrete_partition(std::size_t n);
Partition full_partition(std::size_t n);

using PartitionFamily = std::vector<Partition>;

struct LatticeEnumeration
{
    std::vector<PartitionFamily> lattices;
    bool capped = false;
};

/// Nonempty families of partitions of 0..n-1 closed under pairwise meets and
/// joins, each sorted, listed by (size, lexicographic). n <= 4.
LatticeEnumeration enumerate_meet_complete_sublattices(std::size_t n, std::size_t cap = 1u << 20);

struct ArithmeticalCheck
{
    bool ok = true;
    std::optional<std::array<std::size_t, 2>> non_permuting;
    /// x, y, z with x meet (y join z) != (x meet y) join (x meet z)
    std::optional<std::array<std::size_t, 3>> non_distributive;
};

ArithmeticalCheck is_arithmetical(const PartitionFamily& lattice);

struct KaarliEntry
{
    PartitionFamily lattice;
    ArithmeticalCheck arithmetical;
    std::optional<PHStatus> decided;
    std::optional<std::size_t> refutation_arity;
    std::optional<PartialOpMap> refutation;
    /// False for arithmetical lattices on 4 points, which are not searched.
    bool checked = true;
    bool agrees = true;
    bool inconclusive = false;
};

struct KaarliReport
{
    std::size_t n = 0;
    std::vector<KaarliEntry> entries;
    std::size_t agreements = 0;
    std::size_t disagreements = 0;
    std::size_t inconclusive = 0;
    std::size_t unchecked = 0;
};

struct KaarliOptions
{
    SearchLimits limits;
    /// Highest arity tried by the escalating search at n = 4.
    std::size_t max_k = 4;
    /// Only lattices accepted by the filter are checked.
    std::function<bool(const PartitionFamily&)> filter;
    Backend backend = Backend::OpenMP;
};

KaarliReport kaarli_cross_check(std::size_t n, const KaarliOptions& options = {});

FiniteStructure lattice_structure(const PartitionFamily& lattice, std::string name = {});

/// Structure whose relations are equivalences forming a meet-complete
/// sublattice; the verdict follows arithmeticity. Throws std::invalid_argument
/// when the relations are not closed under meets and joins.
ClassReport classify_eq_lattice(const FiniteStructure& a, const SearchLimits& limits = {});

}  // namespace polyhom
