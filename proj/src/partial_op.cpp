#include <polyhom/partial_op.hpp>

#include <algorithm>
#include <stdexcept>

namespace polyhom {

PartialOpMap::PartialOpMap(std::size_t arity, std::size_t carrier, std::vector<Entry> entries) :
    arity_(arity), carrier_(carrier), entries_(std::move(entries))
{
    if (arity_ == 0)
        throw std::invalid_argument("partial operation arity must be at least 1");
    for (const auto& [row, v] : entries_) {
        if (row.size() != arity_)
            throw std::invalid_argument("domain row length differs from arity");
        if (v >= carrier_)
            throw std::out_of_range("value " + std::to_string(v) + " out of range");
        for (Element e : row)
            if (e >= carrier_)
                throw std::out_of_range("domain entry " + std::to_string(e) + " out of range");
    }
    std::sort(entries_.begin(), entries_.end());
    for (std::size_t i = 1; i < entries_.size(); ++i)
        if (entries_[i].first == entries_[i - 1].first) {
            if (entries_[i].second != entries_[i - 1].second)
                throw std::invalid_argument("partial operation is not functional");
        }
    entries_.erase(std::unique(entries_.begin(), entries_.end()), entries_.end());
}

std::optional<Element> PartialOpMap::lookup(std::span<const Element> row) const
{
    auto it = std::lower_bound(entries_.begin(), entries_.end(), row, [](const Entry& e, std::span<const Element> r) {
        return std::lexicographical_compare(e.first.begin(), e.first.end(), r.begin(), r.end());
    });
    if (it == entries_.end() || !std::equal(it->first.begin(), it->first.end(), row.begin(), row.end()))
        return std::nullopt;
    return it->second;
}

ColumnReduction reduce_columns(const PartialOpMap& f)
{
    if (f.empty())
        throw std::invalid_argument("reduce_columns needs a nonempty partial operation");
    const std::size_t k = f.arity(), rows = f.size();
    auto column = [&](std::size_t j) {
        Tuple c(rows);
        for (std::size_t i = 0; i < rows; ++i)
            c[i] = f.row(i)[j];
        return c;
    };
    std::vector<Tuple> kept;
    std::vector<std::size_t> kept_index;
    std::vector<std::size_t> map(k);
    for (std::size_t j = 0; j < k; ++j) {
        auto c = column(j);
        auto it = std::find(kept.begin(), kept.end(), c);
        if (it == kept.end()) {
            map[j] = kept.size();
            kept.push_back(std::move(c));
            kept_index.push_back(j);
        }
        else
            map[j] = static_cast<std::size_t>(it - kept.begin());
    }
    std::vector<PartialOpMap::Entry> entries;
    for (std::size_t i = 0; i < rows; ++i) {
        Tuple r;
        for (std::size_t j : kept_index)
            r.push_back(f.row(i)[j]);
        entries.emplace_back(std::move(r), f.value(i));
    }
    return {PartialOpMap(kept.size(), f.carrier(), std::move(entries)), std::move(map)};
}

FunctionTable::FunctionTable(std::size_t arity, std::size_t carrier, std::vector<Element> table) :
    arity_(arity), carrier_(carrier)
{
    std::uint64_t expected = 1;
    for (std::size_t i = 0; i < arity; ++i)
        expected *= carrier;
    if (table.size() != expected)
        throw std::invalid_argument("function table size differs from carrier^arity");
    for (Element v : table)
        if (v >= carrier)
            throw std::out_of_range("function value out of range");
    table_ = std::make_shared<const std::vector<Element>>(std::move(table));
}

Element FunctionTable::operator()(std::span<const Element> args) const
{
    if (args.size() != arity_)
        throw std::invalid_argument("argument count differs from arity");
    PowerIndex x = 0;
    for (Element a : args)
        x = x * carrier_ + a;
    return (*table_)[x];
}

}  // namespace polyhom
