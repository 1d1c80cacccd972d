#pragma once

#include <polyhom/engine.hpp>
#include <polyhom/kernels.hpp>
#include <polyhom/partial_op.hpp>

namespace polyhom {

/// m-ary relations on a common carrier, ordered by (size, lexicographic).
struct RelationFamily
{
    std::size_t arity = 0;
    std::size_t carrier = 0;
    std::vector<RelationSet> members;

    bool contains(const RelationSet& r) const;
    bool operator==(const RelationFamily&) const = default;
};

void sort_family(RelationFamily& f);

struct PolymorphismList
{
    std::vector<FunctionTable> functions;
    bool complete = false;
    bool capped = false;
    bool budget_exhausted = false;
    SearchStats stats;
};

/// Every k-ary polymorphism of `a` in ascending table order, up to cap.
PolymorphismList enumerate_polymorphisms(const FiniteStructure& a, std::size_t k, std::size_t cap,
                                         const SearchLimits& limits = {});

/// Rows of the matrix whose columns are the tuples of tau: row i lists the
/// i-th entries of tau's tuples in order.
std::vector<Tuple> row_matrix(const RelationSet& tau);

struct QfOptions
{
    /// Identical rows force equal entries of b.
    bool equality_atoms = true;
};

/// Tuples b of arity m satisfying every atomic constraint that holds on all
/// of tau. Always contains tau.
RelationSet qf_type_closure(const FiniteStructure& a, const RelationSet& tau, const QfOptions& options = {});

/// b belongs to Gamma(tau) iff the row map of tau's matrix into b extends to a
/// |tau|-ary polymorphism.
struct GammaResult
{
    bool complete = true;
    /// The closure when complete; the proven part otherwise.
    RelationSet closure;
    /// Candidates whose extension search ran out of budget.
    std::vector<Tuple> undecided;
    SearchStats stats;
};

GammaResult gamma_closure(const FiniteStructure& a, const RelationSet& tau, const SearchLimits& limits = {},
                          Backend backend = Backend::OpenMP);

enum class PpStatus { Yes, No, Inconclusive };
const char* to_string(PpStatus s);

struct PpOptions
{
    /// The empty relation counts as the unsatisfiable conjunction.
    bool empty_is_definable = true;
};

struct PpResult
{
    PpStatus status = PpStatus::Yes;
    std::optional<Tuple> witness;
    std::vector<Tuple> undecided;
};

PpResult is_pp_definable(const FiniteStructure& a, const RelationSet& sigma, const SearchLimits& limits = {},
                         const PpOptions& options = {});

struct InvOptions
{
    bool include_empty = true;
    Backend backend = Backend::OpenMP;
};

/// Every subset of A^m closed under all of `functions` (coordinatewise).
/// Requires n^m <= 24.
RelationFamily invariant_relations(std::span<const FunctionTable> functions, std::size_t carrier, std::size_t m,
                                   const InvOptions& options = {});

/// Subuniverse of A^m generated by `seed` under `functions`.
RelationSet generated_relation(std::span<const FunctionTable> functions, std::size_t carrier, const RelationSet& seed);
RelationFamily invariant_relations_generated(std::span<const FunctionTable> functions, std::size_t carrier,
                                             std::size_t m, std::span<const RelationSet> seeds);

enum class PolylocalStatus { Holds, Fails, Inconclusive };
const char* to_string(PolylocalStatus s);

struct PolylocalResult
{
    PolylocalStatus status = PolylocalStatus::Holds;
    std::optional<RelationSet> tau;
    std::optional<Tuple> b;
    std::size_t checked = 0;
};

/// Compares gamma_closure and qf_type_closure on every nonempty tau of A^m,
/// ordered by (|tau|, lexicographic). Requires n^m <= 16.
PolylocalResult check_finite_polylocal(const FiniteStructure& a, std::size_t m, const SearchLimits& limits = {},
                                       Backend backend = Backend::OpenMP);

struct InvPolReport
{
    std::size_t m = 0;
    std::size_t max_arity = 0;
    /// invariant_relations(Pol^(<=K'), m) for K' = 1..K.
    std::vector<RelationFamily> by_arity;
    /// Smallest K' after which the family stops shrinking within 1..K.
    std::size_t stabilization = 0;
    RelationFamily gamma_closed;
    bool gamma_subset = false;
    bool equal = false;
    bool complete = true;
    bool polymorphisms_capped = false;
};

/// Requires n^m <= 16 and n^K small enough to enumerate Pol^(K).
InvPolReport cross_check_inv_pol(const FiniteStructure& a, std::size_t m, std::size_t max_arity,
                                 const SearchLimits& limits = {}, Backend backend = Backend::OpenMP);

}  // namespace polyhom
