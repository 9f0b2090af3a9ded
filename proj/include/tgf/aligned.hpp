#pragma once

#include <cstdlib>
#include <new>
#include <vector>

// 64-byte-aligned storage for every buffer that may be handed to the FFT
// backend. Plans are created once on aligned scratch and re-executed on
// other arrays; keeping a single alignment class for all transform buffers
// makes that re-execution unconditionally valid.

namespace tgf {

template <class T>
struct AlignedAllocator {
    using value_type = T;
    static constexpr std::size_t alignment = 64;

    AlignedAllocator() = default;
    template <class U>
    AlignedAllocator(const AlignedAllocator<U>&) {}

    T* allocate(std::size_t n) {
        std::size_t bytes = n * sizeof(T);
        bytes = (bytes + alignment - 1) / alignment * alignment;
        void* p = std::aligned_alloc(alignment, bytes);
        if (p == nullptr) throw std::bad_alloc();
        return static_cast<T*>(p);
    }
    void deallocate(T* p, std::size_t) noexcept { std::free(p); }

    template <class U>
    bool operator==(const AlignedAllocator<U>&) const { return true; }
    template <class U>
    bool operator!=(const AlignedAllocator<U>&) const { return false; }
};

using AVec = std::vector<double, AlignedAllocator<double>>;

}  // namespace tgf
