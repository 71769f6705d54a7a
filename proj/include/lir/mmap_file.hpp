#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>

namespace lir {

// Read-only memory mapping of a whole file. Move-only RAII.
class MmapFile {
public:
    MmapFile() = default;
    MmapFile(const MmapFile&) = delete;
    MmapFile& operator=(const MmapFile&) = delete;
    MmapFile(MmapFile&& other) noexcept { swap(other); }
    MmapFile& operator=(MmapFile&& other) noexcept {
        if (this != &other) {
            reset();
            swap(other);
        }
        return *this;
    }
    ~MmapFile() { reset(); }

    static MmapFile open(const std::filesystem::path& path);

    std::span<const std::uint8_t> view() const {
        return {static_cast<const std::uint8_t*>(addr_), size_};
    }
    bool valid() const { return opened_; }

private:
    void reset();
    void swap(MmapFile& other) noexcept {
        std::swap(addr_, other.addr_);
        std::swap(size_, other.size_);
        std::swap(opened_, other.opened_);
    }

    void* addr_ = nullptr;
    std::size_t size_ = 0;
    bool opened_ = false;
};

} // namespace lir
