#pragma once

#include <polyhom/families.hpp>

#include <cstdint>

namespace polyhom {

enum class GenFamily { Graph, Poset, StrictPoset, N2Binary };

std::optional<GenFamily> parse_gen_family(const std::string& s);
const char* to_string(GenFamily f);

/// Every labeled instance on 0..n-1 exactly once. Graphs are listed by edge
/// mask over the pairs i<j in lexicographic order; orders by the mask of
/// their off-diagonal pairs. N2Binary ignores n (always 2).
std::vector<FiniteStructure> all_labeled(GenFamily family, std::size_t n);

/// Seed-deterministic random instances.
std::vector<FiniteStructure> random_labeled(GenFamily family, std::size_t n, std::size_t count, std::uint64_t seed);

}  // namespace polyhom
