#pragma once

#include <polyhom/structure.hpp>

#include <optional>
#include <stdexcept>
#include <utility>

namespace polyhom {

enum class Family { Graph, Poset, StrictPoset, EqLattice };

const char* to_string(Family f);
std::optional<Family> parse_family(const std::string& s);

struct AxiomViolation
{
    std::string axiom;
    Tuple witness;
    std::string message() const;
};

class FamilyError : public std::runtime_error
{
public:
    explicit FamilyError(AxiomViolation v);
    const AxiomViolation& violation() const noexcept { return violation_; }

private:
    AxiomViolation violation_;
};

/// First axiom violation of `a` read as a member of `family`, if any.
/// Graph: one symmetric irreflexive binary relation. Poset: one reflexive,
/// antisymmetric, transitive relation. Strict poset: one asymmetric transitive
/// relation. EqLattice: every relation an equivalence.
std::optional<AxiomViolation> family_violation(Family family, const FiniteStructure& a);
void require_family(Family family, const FiniteStructure& a);

using Pairs = std::vector<std::pair<Element, Element>>;

/// Block label of each element; labels are arbitrary.
using Partition = std::vector<Element>;

RelationSet equivalence_of(const Partition& p);

/// Graph, poset or strict poset from its relation; axioms verified.
FiniteStructure canonical_structure(Family family, std::size_t n, const Pairs& relation, std::string name = {});
/// One binary relation per partition, named theta0, theta1, ...
FiniteStructure canonical_structure(std::size_t n, const std::vector<Partition>& partitions, std::string name = {});

/// Symmetric closure of an undirected edge list.
FiniteStructure graph_from_edges(std::size_t n, const Pairs& edges, std::string name = {});

}  // namespace polyhom
