#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "guireplay/types.hpp"

namespace guireplay::proc {

/// Child process with piped stdin/stdout. Stderr passes through.
class ChildProcess {
public:
    ChildProcess() = default;
    explicit ChildProcess(const std::vector<std::string>& argv);
    ~ChildProcess();

    ChildProcess(const ChildProcess&) = delete;
    ChildProcess& operator=(const ChildProcess&) = delete;
    ChildProcess(ChildProcess&& o) noexcept;
    ChildProcess& operator=(ChildProcess&& o) noexcept;

    bool running() const { return pid_ > 0; }

    /// Blocking write of the whole buffer; throws DeviceIOError on failure.
    void write_all(const std::uint8_t* data, size_t size);
    void close_stdin();

    /// Reads exactly `size` bytes within `timeout_ms`; throws DeviceIOError
    /// on EOF or deadline.
    void read_exact(std::uint8_t* out, size_t size, int timeout_ms);

    /// Reads until EOF (bounded by timeout per chunk).
    std::vector<std::uint8_t> read_to_end(int timeout_ms);

    /// Waits for exit and returns the status code (-1 on signal).
    int wait();
    void kill_now();

private:
    void reset();
    long pid_ = -1;
    int stdin_fd_ = -1;
    int stdout_fd_ = -1;
};

}  // namespace guireplay::proc
