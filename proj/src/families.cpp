#include <polyhom/families.hpp>

#include <sstream>

namespace polyhom {

const char* to_string(Family f)
{
    switch (f) {
    case Family::Graph: return "graph";
    case Family::Poset: return "poset";
    case Family::StrictPoset: return "strict";
    case Family::EqLattice: return "eqlattice";
    }
    return "?";
}

std::optional<Family> parse_family(const std::string& s)
{
    if (s == "graph")
        return Family::Graph;
    if (s == "poset")
        return Family::Poset;
    if (s == "strict" || s == "strict_poset" || s == "strict-poset")
        return Family::StrictPoset;
    if (s == "eqlattice" || s == "eq_lattice" || s == "eq-lattice")
        return Family::EqLattice;
    return std::nullopt;
}

std::string AxiomViolation::message() const
{
    std::ostringstream out;
    out << axiom << " violated by (";
    for (std::size_t i = 0; i < witness.size(); ++i)
        out << (i ? "," : "") << witness[i];
    out << ")";
    return out.str();
}

FamilyError::FamilyError(AxiomViolation v) : std::runtime_error(v.message()), violation_(std::move(v)) {}

namespace {

std::optional<AxiomViolation> check_reflexive(const RelationSet& r, std::size_t n)
{
    for (Element a = 0; a < n; ++a)
        if (!r.contains_pair(a, a))
            return AxiomViolation{"reflexivity", {a, a}};
    return std::nullopt;
}

std::optional<AxiomViolation> check_irreflexive(const RelationSet& r, std::size_t n)
{
    for (Element a = 0; a < n; ++a)
        if (r.contains_pair(a, a))
            return AxiomViolation{"irreflexivity", {a, a}};
    return std::nullopt;
}

std::optional<AxiomViolation> check_symmetric(const RelationSet& r)
{
    for (std::size_t i = 0; i < r.size(); ++i) {
        auto t = r.tuple(i);
        if (!r.contains_pair(t[1], t[0]))
            return AxiomViolation{"symmetry", {t[0], t[1]}};
    }
    return std::nullopt;
}

std::optional<AxiomViolation> check_antisymmetric(const RelationSet& r)
{
    for (std::size_t i = 0; i < r.size(); ++i) {
        auto t = r.tuple(i);
        if (t[0] != t[1] && r.contains_pair(t[1], t[0]))
            return AxiomViolation{"antisymmetry", {t[0], t[1]}};
    }
    return std::nullopt;
}

std::optional<AxiomViolation> check_asymmetric(const RelationSet& r)
{
    for (std::size_t i = 0; i < r.size(); ++i) {
        auto t = r.tuple(i);
        if (r.contains_pair(t[1], t[0]))
            return AxiomViolation{"asymmetry", {t[0], t[1]}};
    }
    return std::nullopt;
}

std::optional<AxiomViolation> check_transitive(const RelationSet& r)
{
    for (std::size_t i = 0; i < r.size(); ++i) {
        auto ab = r.tuple(i);
        for (auto id : r.with_entry_at(0, ab[1])) {
            auto bc = r.tuple(id);
            if (!r.contains_pair(ab[0], bc[1]))
                return AxiomViolation{"transitivity", {ab[0], ab[1], bc[1]}};
        }
    }
    return std::nullopt;
}

std::optional<AxiomViolation> check_single_binary(const FiniteStructure& a)
{
    if (a.signature().size() != 1 || a.signature()[0].arity != 2)
        return AxiomViolation{"exactly one binary relation", {}};
    return std::nullopt;
}

template <class... Checks>
std::optional<AxiomViolation> first_of(Checks&&... checks)
{
    std::optional<AxiomViolation> v;
    ((v ? void() : void(v = checks())), ...);
    return v;
}

}  // namespace

std::optional<AxiomViolation> family_violation(Family family, const FiniteStructure& a)
{
    const std::size_t n = a.size();
    if (family == Family::EqLattice) {
        for (const auto& r : a.relations()) {
            if (r.arity() != 2)
                return AxiomViolation{"every relation binary", {}};
            if (auto v = first_of([&] { return check_reflexive(r, n); }, [&] { return check_symmetric(r); },
                                  [&] { return check_transitive(r); }))
                return v;
        }
        return std::nullopt;
    }
    if (auto v = check_single_binary(a))
        return v;
    const RelationSet& r = a.relation(0);
    switch (family) {
    case Family::Graph:
        return first_of([&] { return check_irreflexive(r, n); }, [&] { return check_symmetric(r); });
    case Family::Poset:
        return first_of([&] { return check_reflexive(r, n); }, [&] { return check_antisymmetric(r); },
                        [&] { return check_transitive(r); });
    case Family::StrictPoset:
        return first_of([&] { return check_asymmetric(r); }, [&] { return check_transitive(r); });
    case Family::EqLattice: break;
    }
    return std::nullopt;
}

void require_family(Family family, const FiniteStructure& a)
{
    if (auto v = family_violation(family, a))
        throw FamilyError(*v);
}

RelationSet equivalence_of(const Partition& p)
{
    std::vector<Tuple> ts;
    for (Element a = 0; a < p.size(); ++a)
        for (Element b = 0; b < p.size(); ++b)
            if (p[a] == p[b])
                ts.push_back({a, b});
    return RelationSet(2, p.size(), std::move(ts));
}

FiniteStructure canonical_structure(Family family, std::size_t n, const Pairs& relation, std::string name)
{
    if (family == Family::EqLattice)
        throw std::invalid_argument("equivalence lattices are built from partitions");
    std::vector<Tuple> ts;
    for (auto [a, b] : relation)
        ts.push_back({a, b});
    const char* symbol = family == Family::Graph ? "edge" : family == Family::Poset ? "le" : "lt";
    if (name.empty())
        name = to_string(family);
    FiniteStructure s(std::move(name), n, Signature({{symbol, 2}}), {RelationSet(2, n, std::move(ts))});
    require_family(family, s);
    return s;
}

FiniteStructure canonical_structure(std::size_t n, const std::vector<Partition>& partitions, std::string name)
{
    std::vector<Symbol> symbols;
    std::vector<RelationSet> rels;
    for (std::size_t i = 0; i < partitions.size(); ++i) {
        if (partitions[i].size() != n)
            throw std::invalid_argument("partition " + std::to_string(i) + " does not cover 0.." +
                                        std::to_string(n - 1));
        symbols.push_back({"theta" + std::to_string(i), 2});
        rels.push_back(equivalence_of(partitions[i]));
    }
    if (name.empty())
        name = "eqlattice";
    return FiniteStructure(std::move(name), n, Signature(std::move(symbols)), std::move(rels));
}

FiniteStructure graph_from_edges(std::size_t n, const Pairs& edges, std::string name)
{
    Pairs sym;
    for (auto [a, b] : edges) {
        sym.emplace_back(a, b);
        sym.emplace_back(b, a);
    }
    return canonical_structure(Family::Graph, n, sym, std::move(name));
}

}  // namespace polyhom
