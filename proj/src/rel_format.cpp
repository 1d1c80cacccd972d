#include <polyhom/rel_format.hpp>

#include <fstream>
#include <sstream>

namespace polyhom {

namespace {

std::string strip_comment(const std::string& line)
{
    auto hash = line.find('#');
    return hash == std::string::npos ? line : line.substr(0, hash);
}

long long to_integer(const std::string& token, std::size_t line_no)
{
    try {
        std::size_t used = 0;
        long long v = std::stoll(token, &used);
        if (used != token.size())
            throw ParseError(line_no, "malformed integer '" + token + "'");
        return v;
    }
    catch (const std::logic_error&) {
        throw ParseError(line_no, "malformed integer '" + token + "'");
    }
}

std::vector<std::string> tokens_of(const std::string& line)
{
    std::istringstream in(line);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok)
        out.push_back(tok);
    return out;
}

}  // namespace

std::vector<RawStructure> parse_rel(std::istream& in)
{
    std::vector<RawStructure> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto toks = tokens_of(strip_comment(line));
        if (toks.empty())
            continue;
        if (toks[0] == "structure") {
            if (toks.size() != 3)
                throw ParseError(line_no, "expected 'structure <name> <n>'");
            out.push_back(RawStructure{toks[1], to_integer(toks[2], line_no), {}});
        }
        else if (toks[0] == "relation") {
            if (out.empty())
                throw ParseError(line_no, "'relation' before any 'structure' line");
            if (toks.size() != 3)
                throw ParseError(line_no, "expected 'relation <name> <arity>'");
            out.back().relations.push_back(RawRelation{toks[1], to_integer(toks[2], line_no), {}});
        }
        else {
            if (out.empty() || out.back().relations.empty())
                throw ParseError(line_no, "tuple outside a relation block");
            std::vector<long long> t;
            for (const auto& tok : toks)
                t.push_back(to_integer(tok, line_no));
            out.back().relations.back().tuples.push_back(std::move(t));
        }
    }
    return out;
}

std::vector<RawStructure> parse_rel(const std::string& text)
{
    std::istringstream in(text);
    return parse_rel(in);
}

std::vector<FiniteStructure> read_structures(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    std::vector<FiniteStructure> out;
    for (const auto& raw : parse_rel(in))
        out.push_back(validate_structure(raw));
    return out;
}

FiniteStructure read_structure(const std::filesystem::path& path)
{
    auto all = read_structures(path);
    if (all.size() != 1)
        throw std::runtime_error(path.string() + ": expected exactly one structure, found " +
                                 std::to_string(all.size()));
    return all.front();
}

std::string serialize_relation(const std::string& name, const RelationSet& r)
{
    std::ostringstream out;
    out << "relation " << name << ' ' << r.arity() << '\n';
    for (std::size_t i = 0; i < r.size(); ++i) {
        auto t = r.tuple(i);
        for (std::size_t j = 0; j < t.size(); ++j)
            out << (j ? " " : "") << t[j];
        out << '\n';
    }
    return out.str();
}

std::string serialize_rel(const FiniteStructure& a)
{
    std::ostringstream out;
    out << "structure " << a.name() << ' ' << a.size() << '\n';
    for (std::size_t i = 0; i < a.signature().size(); ++i)
        out << serialize_relation(a.signature()[i].name, a.relation(i));
    return out.str();
}

RelationSet parse_tuples(std::istream& in, std::size_t carrier)
{
    std::string line;
    std::size_t line_no = 0;
    std::optional<std::size_t> arity;
    std::vector<Tuple> tuples;
    while (std::getline(in, line)) {
        ++line_no;
        auto toks = tokens_of(strip_comment(line));
        if (toks.empty())
            continue;
        if (toks[0] == "relation") {
            if (toks.size() != 3 || arity)
                throw ParseError(line_no, "expected a single 'relation <name> <arity>' header");
            auto a = to_integer(toks[2], line_no);
            if (a < 1)
                throw ParseError(line_no, "arity must be at least 1");
            arity = static_cast<std::size_t>(a);
            continue;
        }
        if (!arity)
            arity = toks.size();
        if (toks.size() != *arity)
            throw ParseError(line_no, "tuple length " + std::to_string(toks.size()) + " differs from arity " +
                                          std::to_string(*arity));
        Tuple t;
        for (const auto& tok : toks) {
            auto v = to_integer(tok, line_no);
            if (v < 0 || static_cast<std::size_t>(v) >= carrier)
                throw ParseError(line_no, "entry " + std::to_string(v) + " out of range");
            t.push_back(static_cast<Element>(v));
        }
        tuples.push_back(std::move(t));
    }
    if (!arity)
        throw ParseError(line_no, "no tuples and no header: arity unknown");
    return RelationSet(*arity, carrier, std::move(tuples));
}

RelationSet read_tuple_file(const std::filesystem::path& path, std::size_t carrier)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    return parse_tuples(in, carrier);
}

}  // namespace polyhom
