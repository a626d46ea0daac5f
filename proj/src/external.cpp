#include "perfstop/external.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/syscall.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "perfstop/error.hpp"

namespace perfstop {
namespace {

using Clock = std::chrono::steady_clock;

constexpr std::size_t kDiagnosticsLimit = 2048;

class Fd {
public:
    explicit Fd(int fd = -1) noexcept : fd_(fd) {}
    Fd(const Fd&) = delete;
    Fd& operator=(const Fd&) = delete;
    ~Fd() { reset(); }
    int get() const noexcept { return fd_; }
    void reset(int fd = -1) noexcept {
        if (fd_ >= 0) ::close(fd_);
        fd_ = fd;
    }

private:
    int fd_;
};

void append_tail(std::string& out, const char* data, std::size_t len) {
    out.append(data, len);
    if (out.size() > kDiagnosticsLimit) out.erase(0, out.size() - kDiagnosticsLimit);
}

void drain(int fd, std::string& diagnostics) {
    char buf[1024];
    while (true) {
        const ssize_t got = ::read(fd, buf, sizeof buf);
        if (got <= 0) return;
        append_tail(diagnostics, buf, static_cast<std::size_t>(got));
    }
}

// One run; returns elapsed milliseconds.
double run_once(const std::string& command, std::chrono::milliseconds timeout) {
    int pipefd[2];
    if (::pipe2(pipefd, O_CLOEXEC) != 0) throw InputError(std::string("pipe failed: ") + std::strerror(errno));
    Fd read_end(pipefd[0]);
    Fd write_end(pipefd[1]);

    const auto start = Clock::now();
    const pid_t pid = ::fork();
    if (pid < 0) throw InputError(std::string("fork failed: ") + std::strerror(errno));
    if (pid == 0) {
        ::setpgid(0, 0);
        ::dup2(pipefd[1], STDOUT_FILENO);
        ::dup2(pipefd[1], STDERR_FILENO);
        ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    write_end.reset();
    ::fcntl(read_end.get(), F_SETFL, O_NONBLOCK);

    // pidfd wakes us exactly when the child exits; without it fall back to 1 ms polling.
    Fd pidfd(static_cast<int>(::syscall(SYS_pidfd_open, pid, 0)));
    std::string diagnostics;
    int status = 0;
    bool pipe_open = true;
    while (true) {
        const pid_t done = ::waitpid(pid, &status, WNOHANG);
        if (done == pid) break;
        const auto elapsed = Clock::now() - start;
        if (elapsed > timeout) {
            ::kill(-pid, SIGKILL);
            ::kill(pid, SIGKILL);
            ::waitpid(pid, &status, 0);
            drain(read_end.get(), diagnostics);
            throw InputError("command timed out after " + std::to_string(timeout.count()) + " ms: " + command +
                             (diagnostics.empty() ? "" : "\n" + diagnostics));
        }
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(timeout - elapsed).count() + 1;
        pollfd fds[2];
        nfds_t nfds = 0;
        if (pipe_open) fds[nfds++] = {read_end.get(), POLLIN, 0};
        if (pidfd.get() >= 0) fds[nfds++] = {pidfd.get(), POLLIN, 0};
        ::poll(fds, nfds, pidfd.get() >= 0 ? static_cast<int>(left) : 1);
        if (pipe_open && fds[0].revents != 0) {
            drain(read_end.get(), diagnostics);
            if (fds[0].revents & (POLLHUP | POLLERR)) pipe_open = false;
        }
    }
    const auto end = Clock::now();
    drain(read_end.get(), diagnostics);

    if (WIFEXITED(status) && WEXITSTATUS(status) == 0) {
        return std::chrono::duration<double, std::milli>(end - start).count();
    }
    std::string why = WIFEXITED(status) ? "exit status " + std::to_string(WEXITSTATUS(status))
                                        : "signal " + std::to_string(WTERMSIG(status));
    if (WIFEXITED(status) && WEXITSTATUS(status) == 127) why += " (command not found?)";
    throw InputError("command failed with " + why + ": " + command + (diagnostics.empty() ? "" : "\n" + diagnostics));
}

}  // namespace

SampleSeries invoke_external(const std::string& command, std::size_t batch, std::chrono::milliseconds timeout) {
    if (batch < 1) throw PreconditionError("batch must be >= 1");
    if (command.empty()) throw PreconditionError("empty command");
    std::vector<double> out;
    out.reserve(batch);
    for (std::size_t i = 0; i < batch; ++i) out.push_back(run_once(command, timeout));
    return SampleSeries(std::move(out));
}

std::vector<double> ExternalCommandSource::next_batch(std::size_t max_count) {
    const auto s = invoke_external(command_, max_count, timeout_);
    return {s.begin(), s.end()};
}

}  // namespace perfstop
