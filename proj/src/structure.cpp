#include <polyhom/structure.hpp>

#include <algorithm>
#include <set>
#include <sstream>

namespace polyhom {

namespace {

constexpr std::uint64_t dense_limit = std::uint64_t{1} << 22;

std::string join_violations(const std::vector<Violation>& vs)
{
    std::ostringstream out;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (i)
            out << "; ";
        out << vs[i].message();
    }
    return out.str();
}

// carrier^arity, or nullopt past dense_limit
std::optional<std::uint64_t> small_power(std::size_t base, std::size_t exp)
{
    std::uint64_t r = 1;
    for (std::size_t i = 0; i < exp; ++i) {
        r *= base;
        if (r > dense_limit)
            return std::nullopt;
    }
    return r;
}

}  // namespace

std::string Violation::message() const
{
    std::ostringstream out;
    if (!symbol.empty())
        out << "relation '" << symbol << "'";
    else
        out << "structure";
    out << " tuple " << tuple_index << ": " << rule;
    return out.str();
}

StructureError::StructureError(std::vector<Violation> violations) :
    std::runtime_error(join_violations(violations)), violations_(std::move(violations))
{
}

Signature::Signature(std::vector<Symbol> symbols) : symbols_(std::move(symbols))
{
    std::vector<Violation> bad;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
        if (symbols_[i].arity == 0)
            bad.push_back({symbols_[i].name, i, "arity must be at least 1"});
        if (!seen.insert(symbols_[i].name).second)
            bad.push_back({symbols_[i].name, i, "duplicate symbol"});
    }
    if (!bad.empty())
        throw StructureError(std::move(bad));
}

std::optional<std::size_t> Signature::index_of(const std::string& name) const
{
    for (std::size_t i = 0; i < symbols_.size(); ++i)
        if (symbols_[i].name == name)
            return i;
    return std::nullopt;
}

std::size_t Signature::max_arity() const noexcept
{
    std::size_t r = 0;
    for (const auto& s : symbols_)
        r = std::max(r, s.arity);
    return r;
}

RelationSet::RelationSet(std::size_t arity, std::size_t carrier, std::vector<Tuple> tuples) :
    arity_(arity), carrier_(carrier)
{
    if (arity == 0)
        throw std::invalid_argument("relation arity must be at least 1");
    for (auto& t : tuples) {
        if (t.size() != arity)
            throw std::invalid_argument("tuple length differs from relation arity");
        for (Element e : t)
            if (e >= carrier)
                throw std::out_of_range("entry " + std::to_string(e) + " out of range");
    }
    std::sort(tuples.begin(), tuples.end());
    tuples.erase(std::unique(tuples.begin(), tuples.end()), tuples.end());
    flat_.reserve(tuples.size() * arity);
    for (auto& t : tuples)
        flat_.insert(flat_.end(), t.begin(), t.end());
    build_indexes();
}

RelationSet RelationSet::full(std::size_t arity, std::size_t carrier)
{
    std::vector<Tuple> ts;
    Tuple t(arity, 0);
    if (carrier == 0)
        return RelationSet(arity, carrier, {});
    while (true) {
        ts.push_back(t);
        std::size_t i = arity;
        while (i > 0) {
            --i;
            if (++t[i] < carrier)
                break;
            t[i] = 0;
            if (i == 0)
                return RelationSet(arity, carrier, std::move(ts));
        }
    }
}

RelationSet RelationSet::diagonal(std::size_t arity, std::size_t carrier)
{
    std::vector<Tuple> ts;
    for (Element a = 0; a < carrier; ++a)
        ts.emplace_back(arity, a);
    return RelationSet(arity, carrier, std::move(ts));
}

void RelationSet::build_indexes()
{
    const std::size_t count = size();
    if (auto cells = small_power(carrier_, arity_)) {
        dense_.assign((*cells + 63) / 64, 0);
        for (std::size_t i = 0; i < count; ++i) {
            auto c = code(tuple(i));
            dense_[c / 64] |= std::uint64_t{1} << (c % 64);
        }
    }
    if (arity_ == 2 && carrier_ <= 64) {
        succ_.assign(carrier_, 0);
        pred_.assign(carrier_, 0);
        for (std::size_t i = 0; i < count; ++i) {
            auto t = tuple(i);
            succ_[t[0]] |= std::uint64_t{1} << t[1];
            pred_[t[1]] |= std::uint64_t{1} << t[0];
        }
    }
    index_offsets_.assign(arity_ * (carrier_ + 1), 0);
    for (std::size_t i = 0; i < count; ++i) {
        auto t = tuple(i);
        for (std::size_t p = 0; p < arity_; ++p)
            ++index_offsets_[p * (carrier_ + 1) + t[p] + 1];
    }
    for (std::size_t p = 0; p < arity_; ++p)
        for (std::size_t a = 0; a < carrier_; ++a)
            index_offsets_[p * (carrier_ + 1) + a + 1] += index_offsets_[p * (carrier_ + 1) + a];
    // offsets are per position; ids are laid out position after position
    index_ids_.assign(count * arity_, 0);
    std::vector<std::uint32_t> fill(arity_ * (carrier_ + 1));
    for (std::size_t p = 0; p < arity_; ++p)
        for (std::size_t a = 0; a <= carrier_; ++a)
            fill[p * (carrier_ + 1) + a] = index_offsets_[p * (carrier_ + 1) + a];
    for (std::size_t i = 0; i < count; ++i) {
        auto t = tuple(i);
        for (std::size_t p = 0; p < arity_; ++p)
            index_ids_[p * count + fill[p * (carrier_ + 1) + t[p]]++] = static_cast<std::uint32_t>(i);
    }
}

std::span<const std::uint32_t> RelationSet::with_entry_at(std::size_t position, Element a) const
{
    const std::size_t base = position * (carrier_ + 1);
    const std::size_t from = index_offsets_[base + a];
    const std::size_t to = index_offsets_[base + a + 1];
    return {index_ids_.data() + position * size() + from, to - from};
}

std::uint64_t RelationSet::code(std::span<const Element> t) const
{
    std::uint64_t c = 0;
    for (Element e : t)
        c = c * carrier_ + e;
    return c;
}

std::vector<Tuple> RelationSet::tuples() const
{
    std::vector<Tuple> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) {
        auto t = tuple(i);
        out.emplace_back(t.begin(), t.end());
    }
    return out;
}

bool RelationSet::contains(std::span<const Element> t) const
{
    if (t.size() != arity_)
        return false;
    if (!dense_.empty()) {
        for (Element e : t)
            if (e >= carrier_)
                return false;
        auto c = code(t);
        return (dense_[c / 64] >> (c % 64)) & 1;
    }
    std::size_t lo = 0, hi = size();
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        auto m = tuple(mid);
        if (std::lexicographical_compare(m.begin(), m.end(), t.begin(), t.end()))
            lo = mid + 1;
        else
            hi = mid;
    }
    return lo < size() && std::equal(t.begin(), t.end(), tuple(lo).begin());
}

bool RelationSet::contains_pair(Element a, Element b) const
{
    if (!succ_.empty())
        return a < carrier_ && b < carrier_ && ((succ_[a] >> b) & 1);
    const Element t[2] = {a, b};
    return contains(t);
}

bool RelationSet::is_subset_of(const RelationSet& other) const
{
    if (arity_ != other.arity_)
        return false;
    for (std::size_t i = 0; i < size(); ++i)
        if (!other.contains(tuple(i)))
            return false;
    return true;
}

bool RelationSet::is_full() const noexcept
{
    std::uint64_t cells = 1;
    for (std::size_t i = 0; i < arity_; ++i) {
        cells *= carrier_;
        if (cells > flat_.size())
            return false;
    }
    return size() == cells;
}

FiniteStructure::FiniteStructure() : FiniteStructure("empty", 1, Signature{}, {}) {}

FiniteStructure::FiniteStructure(std::string name, std::size_t n, Signature signature,
                                 std::vector<RelationSet> relations)
{
    if (n == 0)
        throw StructureError({{"", 0, "carrier must be nonempty"}});
    if (relations.size() != signature.size())
        throw std::invalid_argument("relation count differs from signature");
    for (std::size_t i = 0; i < relations.size(); ++i) {
        if (relations[i].arity() != signature[i].arity)
            throw StructureError({{signature[i].name, 0, "arity mismatch with signature"}});
        if (relations[i].carrier() != n)
            throw std::invalid_argument("relation carrier differs from structure");
    }
    data_ = std::make_shared<const Data>(Data{std::move(name), n, std::move(signature), std::move(relations)});
}

const std::string& FiniteStructure::name() const noexcept { return data_->name; }
std::size_t FiniteStructure::size() const noexcept { return data_->n; }
const Signature& FiniteStructure::signature() const noexcept { return data_->signature; }
const RelationSet& FiniteStructure::relation(std::size_t i) const { return data_->relations.at(i); }
const std::vector<RelationSet>& FiniteStructure::relations() const noexcept { return data_->relations; }

const RelationSet& FiniteStructure::relation(const std::string& name) const
{
    auto i = signature().index_of(name);
    if (!i)
        throw std::out_of_range("no relation named '" + name + "'");
    return relation(*i);
}

FiniteStructure FiniteStructure::renamed(std::string name) const
{
    FiniteStructure copy = *this;
    auto d = std::make_shared<Data>(*data_);
    d->name = std::move(name);
    copy.data_ = std::move(d);
    return copy;
}

bool FiniteStructure::operator==(const FiniteStructure& o) const
{
    return size() == o.size() && signature() == o.signature() && relations() == o.relations();
}

FiniteStructure validate_structure(const RawStructure& raw)
{
    std::vector<Violation> bad;
    if (raw.n < 1)
        bad.push_back({"", 0, "carrier size must be at least 1"});
    std::set<std::string> seen;
    std::vector<Symbol> symbols;
    std::vector<std::vector<Tuple>> tuples(raw.relations.size());
    for (std::size_t r = 0; r < raw.relations.size(); ++r) {
        const auto& rel = raw.relations[r];
        if (!seen.insert(rel.name).second)
            bad.push_back({rel.name, 0, "duplicate symbol"});
        if (rel.arity < 1)
            bad.push_back({rel.name, 0, "arity must be at least 1"});
        for (std::size_t i = 0; i < rel.tuples.size(); ++i) {
            const auto& t = rel.tuples[i];
            if (static_cast<long long>(t.size()) != rel.arity) {
                bad.push_back({rel.name, i,
                               "arity mismatch: tuple has " + std::to_string(t.size()) + " entries, expected " +
                                   std::to_string(rel.arity)});
                continue;
            }
            bool ok = true;
            for (long long e : t)
                if (e < 0 || e >= raw.n) {
                    bad.push_back({rel.name, i, "entry " + std::to_string(e) + " out of range"});
                    ok = false;
                }
            if (ok)
                tuples[r].emplace_back(t.begin(), t.end());
        }
        symbols.push_back({rel.name, static_cast<std::size_t>(std::max<long long>(rel.arity, 1))});
    }
    if (!bad.empty())
        throw StructureError(std::move(bad));

    const auto n = static_cast<std::size_t>(raw.n);
    std::vector<RelationSet> rels;
    for (std::size_t r = 0; r < symbols.size(); ++r)
        rels.emplace_back(symbols[r].arity, n, std::move(tuples[r]));
    return FiniteStructure(raw.name, n, Signature(std::move(symbols)), std::move(rels));
}

Substructure induced_substructure(const FiniteStructure& a, std::span<const Element> elements)
{
    if (elements.empty())
        throw std::invalid_argument("induced substructure needs a nonempty element set");
    std::vector<Element> s(elements.begin(), elements.end());
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    if (s.back() >= a.size())
        throw std::out_of_range("element " + std::to_string(s.back()) + " outside carrier");
    std::vector<std::int64_t> position(a.size(), -1);
    for (std::size_t i = 0; i < s.size(); ++i)
        position[s[i]] = static_cast<std::int64_t>(i);

    std::vector<RelationSet> rels;
    for (const auto& rel : a.relations()) {
        std::vector<Tuple> kept;
        for (std::size_t i = 0; i < rel.size(); ++i) {
            auto t = rel.tuple(i);
            Tuple mapped;
            bool inside = true;
            for (Element e : t) {
                if (position[e] < 0) {
                    inside = false;
                    break;
                }
                mapped.push_back(static_cast<Element>(position[e]));
            }
            if (inside)
                kept.push_back(std::move(mapped));
        }
        rels.emplace_back(rel.arity(), s.size(), std::move(kept));
    }
    Substructure out{FiniteStructure(a.name() + "_sub", s.size(), a.signature(), std::move(rels)), {}};
    out.embedding.assign(s.begin(), s.end());
    return out;
}

}  // namespace polyhom
