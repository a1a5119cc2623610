#pragma once

#include <chrono>
#include <cstdint>

namespace imm {

/// Node-expansion count plus wall-clock ceiling. Replaces astronomically
/// large theoretical bound functions with explicit, CLI-configurable limits.
class SearchBudget {
public:
    SearchBudget(std::int64_t max_nodes, std::int64_t max_millis)
        : max_nodes_(max_nodes), max_millis_(max_millis),
          start_(std::chrono::steady_clock::now()) {}

    static SearchBudget unlimited() { return SearchBudget(-1, -1); }

    /// Count one expansion; returns false once a limit is hit.
    bool tick() {
        ++nodes_;
        if (max_nodes_ >= 0 && nodes_ > max_nodes_) exhausted_ = true;
        // Clock checks are amortized; steady_clock calls are not free.
        if (!exhausted_ && max_millis_ >= 0 && (nodes_ & 0x3ff) == 0 && elapsed_ms() > max_millis_)
            exhausted_ = true;
        return !exhausted_;
    }

    bool exhausted() const { return exhausted_; }
    std::int64_t nodes_used() const { return nodes_; }
    std::int64_t elapsed_ms() const {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::int64_t max_nodes_;
    std::int64_t max_millis_;
    std::int64_t nodes_ = 0;
    bool exhausted_ = false;
    std::chrono::steady_clock::time_point start_;
};

}  // namespace imm
