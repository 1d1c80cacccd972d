#pragma once

#include <polyhom/power.hpp>

#include <chrono>
#include <optional>

namespace polyhom {

enum class Propagation { ForwardCheck, ArcConsistency };

struct SearchLimits
{
    std::uint64_t node_budget = 10'000'000;
    std::chrono::milliseconds wall_budget{600'000};
    Propagation propagation = Propagation::ArcConsistency;
};

struct SearchStats
{
    std::uint64_t nodes = 0;
    std::uint64_t propagations = 0;
    std::chrono::nanoseconds elapsed{0};

    SearchStats& operator+=(const SearchStats& o)
    {
        nodes += o.nodes;
        propagations += o.propagations;
        elapsed += o.elapsed;
        return *this;
    }
};

enum class SearchStatus { Found, Unsat, Exhausted };

const char* to_string(SearchStatus s);

struct SearchOutcome
{
    SearchStatus status = SearchStatus::Unsat;
    /// Found only: the total map, indexed by source element.
    std::vector<Element> assignment;
    SearchStats stats;
};

/// Homomorphism search from a (possibly implicit power) source into a finite
/// target. Pins fix the images of chosen source elements.
struct ExtensionProblem
{
    PowerHandle source;
    FiniteStructure target;
    std::vector<std::pair<PowerIndex, Element>> pins;
    SearchLimits limits;
};

struct HomViolation
{
    std::string symbol;
    std::vector<PowerIndex> source_tuple;
    std::vector<Element> image;
};

struct HomCheck
{
    bool ok = true;
    std::optional<HomViolation> violation;
    explicit operator bool() const noexcept { return ok; }
};

/// Independent checker: walks every source tuple and tests its image.
HomCheck check_is_homomorphism(const PowerHandle& source, const FiniteStructure& target,
                               std::span<const Element> map);
HomCheck check_is_homomorphism(const FiniteStructure& source, const FiniteStructure& target,
                               std::span<const Element> map);

/// Variable order: smallest domain, ties by element index. Value order:
/// ascending. Found maps are re-checked with check_is_homomorphism before
/// returning; Unsat is only returned after exhaustive refutation.
/// Throws std::invalid_argument on signature mismatch or inconsistent pins.
SearchOutcome solve(const ExtensionProblem& problem);

struct Enumeration
{
    std::vector<std::vector<Element>> solutions;
    /// True when every solution was produced (search space exhausted below cap).
    bool complete = false;
    bool capped = false;
    bool budget_exhausted = false;
    SearchStats stats;
};

Enumeration enumerate_solutions(const ExtensionProblem& problem, std::size_t cap);

/// True if pinned elements violate no constraint whose elements are all pinned.
bool pins_consistent(const PowerHandle& source, const FiniteStructure& target,
                     std::span<const std::pair<PowerIndex, Element>> pins);

}  // namespace polyhom
