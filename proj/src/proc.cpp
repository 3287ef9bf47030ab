#include "guireplay/proc.hpp"

#include <errno.h>
#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstring>

namespace guireplay::proc {

namespace {
using Clock = std::chrono::steady_clock;

int remaining_ms(Clock::time_point deadline) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    return static_cast<int>(std::max<long long>(0, left.count()));
}
}  // namespace

ChildProcess::ChildProcess(const std::vector<std::string>& argv) {
    if (argv.empty()) throw ContractError("ChildProcess: empty argv");
    int in_pipe[2];   // parent writes -> child stdin
    int out_pipe[2];  // child stdout -> parent reads
    if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0)
        throw DeviceIOError("ChildProcess: pipe() failed");

    pid_t pid = fork();
    if (pid < 0) throw DeviceIOError("ChildProcess: fork() failed");
    if (pid == 0) {
        dup2(in_pipe[0], STDIN_FILENO);
        dup2(out_pipe[1], STDOUT_FILENO);
        close(in_pipe[0]);
        close(in_pipe[1]);
        close(out_pipe[0]);
        close(out_pipe[1]);
        std::vector<char*> args;
        args.reserve(argv.size() + 1);
        for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
        args.push_back(nullptr);
        execvp(args[0], args.data());
        _exit(127);
    }
    close(in_pipe[0]);
    close(out_pipe[1]);
    pid_ = pid;
    stdin_fd_ = in_pipe[1];
    stdout_fd_ = out_pipe[0];
}

ChildProcess::~ChildProcess() { reset(); }

ChildProcess::ChildProcess(ChildProcess&& o) noexcept
    : pid_(o.pid_), stdin_fd_(o.stdin_fd_), stdout_fd_(o.stdout_fd_) {
    o.pid_ = -1;
    o.stdin_fd_ = -1;
    o.stdout_fd_ = -1;
}

ChildProcess& ChildProcess::operator=(ChildProcess&& o) noexcept {
    if (this != &o) {
        reset();
        pid_ = o.pid_;
        stdin_fd_ = o.stdin_fd_;
        stdout_fd_ = o.stdout_fd_;
        o.pid_ = -1;
        o.stdin_fd_ = -1;
        o.stdout_fd_ = -1;
    }
    return *this;
}

void ChildProcess::reset() {
    if (stdin_fd_ >= 0) close(stdin_fd_);
    if (stdout_fd_ >= 0) close(stdout_fd_);
    stdin_fd_ = stdout_fd_ = -1;
    if (pid_ > 0) {
        ::kill(static_cast<pid_t>(pid_), SIGKILL);
        int status = 0;
        waitpid(static_cast<pid_t>(pid_), &status, 0);
        pid_ = -1;
    }
}

void ChildProcess::write_all(const std::uint8_t* data, size_t size) {
    if (stdin_fd_ < 0) throw DeviceIOError("ChildProcess: stdin closed");
    // A dead child raises EPIPE instead of SIGPIPE.
    signal(SIGPIPE, SIG_IGN);
    size_t off = 0;
    while (off < size) {
        ssize_t n = ::write(stdin_fd_, data + off, size - off);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw DeviceIOError(std::string("ChildProcess: write failed: ") + strerror(errno));
        }
        off += static_cast<size_t>(n);
    }
}

void ChildProcess::close_stdin() {
    if (stdin_fd_ >= 0) {
        close(stdin_fd_);
        stdin_fd_ = -1;
    }
}

void ChildProcess::read_exact(std::uint8_t* out, size_t size, int timeout_ms) {
    auto deadline = Clock::now() + std::chrono::milliseconds(timeout_ms);
    size_t off = 0;
    while (off < size) {
        struct pollfd pfd {
            stdout_fd_, POLLIN, 0
        };
        int pr = ::poll(&pfd, 1, remaining_ms(deadline));
        if (pr == 0) throw DeviceIOError("ChildProcess: read timeout");
        if (pr < 0) {
            if (errno == EINTR) continue;
            throw DeviceIOError("ChildProcess: poll failed");
        }
        ssize_t n = ::read(stdout_fd_, out + off, size - off);
        if (n == 0) throw DeviceIOError("ChildProcess: unexpected EOF");
        if (n < 0) {
            if (errno == EINTR) continue;
            throw DeviceIOError(std::string("ChildProcess: read failed: ") + strerror(errno));
        }
        off += static_cast<size_t>(n);
    }
}

std::vector<std::uint8_t> ChildProcess::read_to_end(int timeout_ms) {
    std::vector<std::uint8_t> out;
    std::uint8_t buf[65536];
    auto deadline = Clock::now() + std::chrono::milliseconds(timeout_ms);
    for (;;) {
        struct pollfd pfd {
            stdout_fd_, POLLIN, 0
        };
        int pr = ::poll(&pfd, 1, remaining_ms(deadline));
        if (pr == 0) throw DeviceIOError("ChildProcess: read timeout");
        if (pr < 0) {
            if (errno == EINTR) continue;
            throw DeviceIOError("ChildProcess: poll failed");
        }
        ssize_t n = ::read(stdout_fd_, buf, sizeof(buf));
        if (n == 0) return out;
        if (n < 0) {
            if (errno == EINTR) continue;
            throw DeviceIOError("ChildProcess: read failed");
        }
        out.insert(out.end(), buf, buf + n);
    }
}

int ChildProcess::wait() {
    if (pid_ <= 0) return -1;
    int status = 0;
    waitpid(static_cast<pid_t>(pid_), &status, 0);
    pid_ = -1;
    if (WIFEXITED(status)) return WEXITSTATUS(status);
    return -1;
}

void ChildProcess::kill_now() { reset(); }

}  // namespace guireplay::proc
