#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <span>
#include <vector>

namespace polyhom {

/// Serial is the reference implementation of every parallel loop; tests
/// compare the two backends result for result.
enum class Backend { Serial, OpenMP };

const char* to_string(Backend b);

/// Calls fn(i) for i in [0, count). Results must be written to per-index
/// slots; scheduling order is unspecified under OpenMP. The first exception
/// (by index) is rethrown after the loop.
template <class F>
void for_each_index(std::size_t count, Backend backend, F&& fn)
{
    std::vector<std::exception_ptr> errors(count);
    if (backend == Backend::Serial) {
        for (std::size_t i = 0; i < count; ++i) {
            try {
                fn(i);
            }
            catch (...) {
                errors[i] = std::current_exception();
            }
        }
    }
    else {
        const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic, 1)
        for (std::int64_t i = 0; i < n; ++i) {
            try {
                fn(static_cast<std::size_t>(i));
            }
            catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

int max_threads();

/// Bit s of the result says whether the subset with mask s of a universe of
/// `universe` points (encoded 0..universe-1) is closed under every operation.
/// ops[f] is a flat table over universe^arity[f]; universe <= 24.
std::vector<std::uint8_t> closed_subsets(std::size_t universe, std::span<const std::vector<std::uint32_t>> ops,
                                         std::span<const std::size_t> arities, Backend backend);

}  // namespace polyhom
