#include "lir/mmap_file.hpp"

#include <fcntl.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <unistd.h>

#include "lir/error.hpp"

namespace lir {

MmapFile MmapFile::open(const std::filesystem::path& path) {
    int fd = ::open(path.c_str(), O_RDONLY);
    if (fd < 0) throw_error(ErrorCode::IoError, "cannot open " + path.string());
    struct stat st{};
    if (fstat(fd, &st) != 0) {
        ::close(fd);
        throw_error(ErrorCode::IoError, "cannot stat " + path.string());
    }
    MmapFile file;
    file.size_ = static_cast<std::size_t>(st.st_size);
    if (file.size_ > 0) {
        void* addr = ::mmap(nullptr, file.size_, PROT_READ, MAP_PRIVATE, fd, 0);
        if (addr == MAP_FAILED) {
            ::close(fd);
            throw_error(ErrorCode::IoError, "cannot mmap " + path.string());
        }
        file.addr_ = addr;
    }
    file.opened_ = true;
    ::close(fd);
    return file;
}

void MmapFile::reset() {
    if (addr_ != nullptr && size_ > 0) {
        ::munmap(addr_, size_);
    }
    addr_ = nullptr;
    size_ = 0;
    opened_ = false;
}

} // namespace lir
