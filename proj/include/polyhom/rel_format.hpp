#pragma once

#include <polyhom/structure.hpp>

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace polyhom {

class ParseError : public std::runtime_error
{
public:
    ParseError(std::size_t line, const std::string& what) :
        std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line)
    {
    }
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// .rel text format:
//   structure <name> <n>
//   relation <name> <arity>
//   <tuple entries separated by whitespace, one tuple per line>
// '#' starts a comment. A stream may hold several structures.
std::vector<RawStructure> parse_rel(std::istream& in);
std::vector<RawStructure> parse_rel(const std::string& text);
std::vector<FiniteStructure> read_structures(const std::filesystem::path& path);
FiniteStructure read_structure(const std::filesystem::path& path);

/// Canonical form: tuples sorted lexicographically, single spaces, '\n' line ends.
std::string serialize_rel(const FiniteStructure& a);
/// A bare relation block (`relation <name> <arity>` plus tuples).
std::string serialize_relation(const std::string& name, const RelationSet& r);

/// Tuple files for `gamma --tuples` / `pp --relation`: optional `relation`
/// header, then one tuple per line. Arity is taken from the header or the
/// first tuple.
RelationSet read_tuple_file(const std::filesystem::path& path, std::size_t carrier);
RelationSet parse_tuples(std::istream& in, std::size_t carrier);

}  // namespace polyhom
