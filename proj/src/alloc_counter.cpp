#include "uqp/alloc_counter.hpp"

#include <cstdlib>
#include <new>

namespace {

// Keeps the user pointer aligned for any fundamental type.
constexpr std::size_t kHeader = alignof(std::max_align_t);

thread_local std::size_t t_current = 0;
thread_local std::size_t t_peak = 0;

void* counted_alloc(std::size_t size) {
    auto* raw = static_cast<unsigned char*>(std::malloc(size + kHeader));
    if (raw == nullptr) return nullptr;
    *reinterpret_cast<std::size_t*>(raw) = size;
    t_current += size;
    if (t_current > t_peak) t_peak = t_current;
    return raw + kHeader;
}

void counted_free(void* p) noexcept {
    if (p == nullptr) return;
    auto* raw = static_cast<unsigned char*>(p) - kHeader;
    const auto size = *reinterpret_cast<std::size_t*>(raw);
    // memory freed on a different thread than it was allocated on
    t_current = t_current >= size ? t_current - size : 0;
    std::free(raw);
}

void* checked_alloc(std::size_t size) {
    if (void* p = counted_alloc(size == 0 ? 1 : size)) return p;
    throw std::bad_alloc();
}

}  // namespace

void* operator new(std::size_t size) { return checked_alloc(size); }
void* operator new[](std::size_t size) { return checked_alloc(size); }
void* operator new(std::size_t size, const std::nothrow_t&) noexcept { return counted_alloc(size == 0 ? 1 : size); }
void* operator new[](std::size_t size, const std::nothrow_t&) noexcept { return counted_alloc(size == 0 ? 1 : size); }
void operator delete(void* p) noexcept { counted_free(p); }
void operator delete[](void* p) noexcept { counted_free(p); }
void operator delete(void* p, std::size_t) noexcept { counted_free(p); }
void operator delete[](void* p, std::size_t) noexcept { counted_free(p); }
void operator delete(void* p, const std::nothrow_t&) noexcept { counted_free(p); }
void operator delete[](void* p, const std::nothrow_t&) noexcept { counted_free(p); }

namespace uqp::alloc {

std::size_t current_bytes() { return t_current; }

PeakScope::PeakScope() : baseline_(t_current), saved_peak_(t_peak) { t_peak = t_current; }

PeakScope::~PeakScope() {
    if (saved_peak_ > t_peak) t_peak = saved_peak_;
}

std::size_t PeakScope::peak() const { return t_peak - baseline_; }

}  // namespace uqp::alloc
