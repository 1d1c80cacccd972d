#include <polyhom/kernels.hpp>

#include <bit>
#include <stdexcept>

#include <omp.h>

namespace polyhom {

const char* to_string(Backend b) { return b == Backend::Serial ? "serial" : "openmp"; }

int max_threads() { return omp_get_max_threads(); }

namespace {

bool closed_under(std::uint32_t s, std::size_t universe, const std::vector<std::uint32_t>& op, std::size_t arity,
                  std::vector<std::uint32_t>& members, std::vector<std::size_t>& pick)
{
    members.clear();
    for (std::uint32_t rest = s; rest; rest &= rest - 1)
        members.push_back(static_cast<std::uint32_t>(std::countr_zero(rest)));
    if (members.empty())
        return true;
    if (arity == 1) {
        for (auto u : members)
            if (!(s >> op[u] & 1))
                return false;
        return true;
    }
    if (arity == 2) {
        for (auto u : members) {
            const std::uint32_t* row = op.data() + u * universe;
            for (auto v : members)
                if (!(s >> row[v] & 1))
                    return false;
        }
        return true;
    }
    pick.assign(arity, 0);
    while (true) {
        std::size_t cell = 0;
        for (std::size_t i = 0; i < arity; ++i)
            cell = cell * universe + members[pick[i]];
        if (!(s >> op[cell] & 1))
            return false;
        std::size_t p = arity;
        while (p > 0 && ++pick[p - 1] == members.size())
            pick[--p] = 0;
        if (p == 0)
            return true;
    }
}

}  // namespace

std::vector<std::uint8_t> closed_subsets(std::size_t universe, std::span<const std::vector<std::uint32_t>> ops,
                                         std::span<const std::size_t> arities, Backend backend)
{
    if (universe > 24)
        throw std::length_error("subset enumeration is limited to 24 points");
    if (ops.size() != arities.size())
        throw std::invalid_argument("one arity per operation");
    const std::uint64_t count = std::uint64_t{1} << universe;
    std::vector<std::uint8_t> out(count, 0);
    auto check = [&](std::uint64_t s, std::vector<std::uint32_t>& members, std::vector<std::size_t>& pick) {
        for (std::size_t f = 0; f < ops.size(); ++f)
            if (!closed_under(static_cast<std::uint32_t>(s), universe, ops[f], arities[f], members, pick))
                return false;
        return true;
    };
    if (backend == Backend::Serial) {
        std::vector<std::uint32_t> members;
        std::vector<std::size_t> pick;
        for (std::uint64_t s = 0; s < count; ++s)
            out[s] = check(s, members, pick);
        return out;
    }
    const auto total = static_cast<std::int64_t>(count);
#pragma omp parallel
    {
        std::vector<std::uint32_t> members;
        std::vector<std::size_t> pick;
#pragma omp for schedule(static, 4096)
        for (std::int64_t s = 0; s < total; ++s)
            out[static_cast<std::size_t>(s)] = check(static_cast<std::uint64_t>(s), members, pick);
    }
    return out;
}

}  // namespace polyhom
