#pragma once

#include <atomic>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace regspline {

/// Input violates a documented precondition (bad base, malformed file, ...).
struct usage_error : std::runtime_error {
    explicit usage_error(const std::string& what) : std::runtime_error(what) {}
};

/// A value cannot be represented in the requested numeration system.
struct representation_error : std::runtime_error {
    explicit representation_error(const std::string& what) : std::runtime_error(what) {}
};

/// A construction exceeded the configured state budget.
struct resource_error : std::runtime_error {
    explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed text input (automaton files, mesh specs, formulas, numbers).
struct parse_error : std::runtime_error {
    explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

/// Global cap on states allocated by any single automaton construction.
inline std::atomic<std::size_t>& state_budget() {
    static std::atomic<std::size_t> budget{1'000'000};
    return budget;
}

inline void check_state_budget(std::size_t states, const char* where) {
    if (states > state_budget().load(std::memory_order_relaxed))
        throw resource_error(std::string(where) + ": state budget exceeded (" +
                             std::to_string(states) + " states)");
}

} // namespace regspline
