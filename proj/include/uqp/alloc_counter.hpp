#pragma once

#include <cstddef>

// Per-thread heap accounting backed by replacements of the global
// operator new/delete (linked in through the uqp_bench library).

namespace uqp::alloc {

std::size_t current_bytes();

/// Records the peak of live heap bytes allocated by this thread while alive,
/// relative to the live bytes at construction.
class PeakScope {
  public:
    PeakScope();
    ~PeakScope();
    PeakScope(const PeakScope&) = delete;
    PeakScope& operator=(const PeakScope&) = delete;

    std::size_t peak() const;

  private:
    std::size_t baseline_;
    std::size_t saved_peak_;
};

}  // namespace uqp::alloc
