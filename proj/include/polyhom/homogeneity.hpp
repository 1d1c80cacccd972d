#pragma once

#include <polyhom/engine.hpp>
#include <polyhom/kernels.hpp>
#include <polyhom/partial_op.hpp>

namespace polyhom {

struct RowViolation
{
    std::string symbol;
    /// Indices of the selected domain rows, one per relation position.
    std::vector<std::size_t> rows;
    Tuple image;
};

struct RowCheck
{
    bool ok = true;
    std::optional<RowViolation> violation;
    explicit operator bool() const noexcept { return ok; }
};

/// Does rows[i] -> values[i] preserve every relation of `a`? Selections are
/// scanned relation by relation in lexicographic order, so the reported
/// violation is the first one.
RowCheck check_row_map(const FiniteStructure& a, std::span<const Tuple> rows, std::span<const Element> values);
RowCheck is_partial_polymorphism(const FiniteStructure& a, const PartialOpMap& f);

struct Extension
{
    SearchStatus status = SearchStatus::Unsat;
    std::optional<FunctionTable> polymorphism;
    SearchStats stats;
};

/// Searches for a polymorphism of `a` extending f. Throws
/// std::invalid_argument if f is not a partial polymorphism.
Extension extendable(const FiniteStructure& a, const PartialOpMap& f, const SearchLimits& limits = {});

/// A local homomorphism domain -> values with no one-point extension to
/// `missing`.
struct LocalCounterexample
{
    std::vector<PowerIndex> domain;
    std::vector<Element> values;
    PowerIndex missing = 0;
};

enum class HomogeneityStatus { Holds, Counterexample, Exhausted };
const char* to_string(HomogeneityStatus s);

struct HomogeneityResult
{
    HomogeneityStatus status = HomogeneityStatus::Holds;
    std::optional<LocalCounterexample> counterexample;
    /// Status of the full extension problem for the counterexample (Unsat
    /// once re-verified).
    std::optional<SearchStatus> recheck;
    SearchStats stats;
};

/// Looks for a local homomorphism from `source` to `target` and a point with
/// no one-point extension. Domains grow by iterative deepening; at the first
/// size that admits a counterexample, the lexicographically smallest
/// (domain, values, missing) is reported and then re-checked with solve().
HomogeneityResult find_one_point_obstruction(const PowerHandle& source, const FiniteStructure& target,
                                             const SearchLimits& limits = {});

HomogeneityResult is_hom_homogeneous(const FiniteStructure& a, const SearchLimits& limits = {});
/// The power is materialized as the target, so n^k <= 64.
HomogeneityResult is_hom_homogeneous(const PowerHandle& a, const SearchLimits& limits = {});
HomogeneityResult is_k_ph(const FiniteStructure& a, std::size_t k, const SearchLimits& limits = {});

/// Counterexample of a k-ary search as a partial operation on `a`.
PartialOpMap as_partial_op(const PowerHandle& source, const LocalCounterexample& c);

/// All r-tuples with at most one deviant coordinate, sent to the majority
/// value. Throws std::domain_error if the map is not a partial polymorphism.
PartialOpMap canonical_partial_nu(const FiniteStructure& a, std::size_t r);
Extension find_nu_polymorphism(const FiniteStructure& a, std::size_t r, const SearchLimits& limits = {});

enum class PHStatus { PH, NotPH, Inconclusive };
const char* to_string(PHStatus s);

struct PHCertificate
{
    /// "nu" or "local"
    std::string stage;
    PartialOpMap map;
    std::size_t m = 0;
    std::optional<RelationSet> tau;
    Tuple b;
    SearchStats stats;
};

struct PipelineTrace
{
    std::size_t d = 0;
    bool within_envelope = true;
    std::optional<SearchStatus> nu_status;
    std::optional<FunctionTable> nu;
    std::uint64_t column_sets = 0;
    std::uint64_t candidates = 0;
    std::uint64_t by_projection = 0;
    std::uint64_t by_pool = 0;
    std::uint64_t by_monotonicity = 0;
    std::uint64_t by_search = 0;
    std::uint64_t refuted = 0;
    std::uint64_t exhausted = 0;
    SearchStats stats;
};

struct Verdict
{
    PHStatus status = PHStatus::PH;
    std::optional<PHCertificate> certificate;
    PipelineTrace trace;
    /// Inconclusive only: what stopped the pipeline.
    std::string reason;
    std::optional<PHCertificate> blocking;
};

struct DecideOptions
{
    SearchLimits limits;
    Backend backend = Backend::OpenMP;
    /// Skip column sets whose quantifier-free closure is the set itself.
    bool skip_locally_closed = false;
};

/// Certified decision of polymorphism-homogeneity. Within the envelope
/// (n^(n^d) <= 2^20) the answer is PH or NotPH unless a budget runs out.
/// Outside it only refutations are attempted.
Verdict decide_ph(const FiniteStructure& a, const DecideOptions& options = {});

/// Re-checks a NotPH certificate: partial polymorphism and Unsat extension.
bool verify_certificate(const FiniteStructure& a, const PHCertificate& c, const SearchLimits& limits = {});

}  // namespace polyhom
