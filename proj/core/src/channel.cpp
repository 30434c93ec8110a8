#include "orderbench/channel.hpp"

#include "orderbench/error.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <mutex>

extern char** environ;

namespace orderbench {

namespace {

std::string errno_message(std::string_view what)
{
    return std::string(what) + ": " + std::strerror(errno);
}

void ignore_sigpipe()
{
    static std::once_flag once;
    std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

/// Buffered line reader/writer over a pair of file descriptors.
class FdChannel : public LineChannel {
public:
    FdChannel(int read_fd, int write_fd, bool owns) : read_fd_(read_fd), write_fd_(write_fd), owns_(owns) {}

    ~FdChannel() override { close_fds(); }

    void write_line(std::string_view line) override
    {
        std::string data(line);
        data += '\n';
        std::size_t written = 0;
        while (written < data.size()) {
            const ssize_t rc = ::write(write_fd_, data.data() + written, data.size() - written);
            if (rc < 0) {
                if (errno == EINTR) {
                    continue;
                }
                throw ProtocolError(errno_message("write to endpoint failed"));
            }
            written += static_cast<std::size_t>(rc);
        }
    }

    std::optional<std::string> read_line(std::chrono::milliseconds timeout) override
    {
        const auto deadline = std::chrono::steady_clock::now() + timeout;
        while (true) {
            if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
                std::string line = buffer_.substr(0, nl);
                buffer_.erase(0, nl + 1);
                if (!line.empty() && line.back() == '\r') {
                    line.pop_back();
                }
                return line;
            }
            if (eof_) {
                throw ProtocolError("endpoint closed the connection");
            }
            const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
            if (left.count() <= 0) {
                return std::nullopt;
            }
            pollfd pfd{read_fd_, POLLIN, 0};
            const int ready = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(left.count(), 1 << 30)));
            if (ready < 0) {
                if (errno == EINTR) {
                    continue;
                }
                throw ProtocolError(errno_message("poll on endpoint failed"));
            }
            if (ready == 0) {
                continue;
            }
            char chunk[4096];
            const ssize_t rc = ::read(read_fd_, chunk, sizeof chunk);
            if (rc < 0) {
                if (errno == EINTR || errno == EAGAIN) {
                    continue;
                }
                throw ProtocolError(errno_message("read from endpoint failed"));
            }
            if (rc == 0) {
                eof_ = true;
                continue;
            }
            buffer_.append(chunk, static_cast<std::size_t>(rc));
        }
    }

protected:
    void close_fds()
    {
        if (!owns_) {
            return;
        }
        if (read_fd_ >= 0) {
            ::close(read_fd_);
        }
        if (write_fd_ >= 0 && write_fd_ != read_fd_) {
            ::close(write_fd_);
        }
        read_fd_ = write_fd_ = -1;
    }

private:
    int read_fd_;
    int write_fd_;
    bool owns_;
    bool eof_ = false;
    std::string buffer_;
};

class ProcessChannel final : public FdChannel {
public:
    ProcessChannel(int read_fd, int write_fd, pid_t pid) : FdChannel(read_fd, write_fd, true), pid_(pid) {}

    ~ProcessChannel() override
    {
        // Closing stdin lets a well-behaved endpoint exit on its own.
        close_fds();
        int status = 0;
        for (int i = 0; i < 50; ++i) {
            if (::waitpid(pid_, &status, WNOHANG) != 0) {
                return;
            }
            ::usleep(10000);
        }
        ::kill(pid_, SIGTERM);
        ::waitpid(pid_, &status, 0);
    }

private:
    pid_t pid_;
};

std::unique_ptr<LineChannel> spawn_process(const std::string& command)
{
    ignore_sigpipe();
    int to_child[2];
    int from_child[2];
    if (::pipe2(to_child, O_CLOEXEC) != 0) {
        throw ProtocolError(errno_message("pipe"));
    }
    if (::pipe2(from_child, O_CLOEXEC) != 0) {
        ::close(to_child[0]);
        ::close(to_child[1]);
        throw ProtocolError(errno_message("pipe"));
    }
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, to_child[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, from_child[1], STDOUT_FILENO);

    const char* argv[] = {"sh", "-c", command.c_str(), nullptr};
    pid_t pid = 0;
    const int rc = ::posix_spawn(&pid, "/bin/sh", &actions, nullptr, const_cast<char* const*>(argv), environ);
    posix_spawn_file_actions_destroy(&actions);
    ::close(to_child[0]);
    ::close(from_child[1]);
    if (rc != 0) {
        ::close(to_child[1]);
        ::close(from_child[0]);
        throw ProtocolError("cannot spawn '" + command + "': " + std::strerror(rc));
    }
    return std::make_unique<ProcessChannel>(from_child[0], to_child[1], pid);
}

std::unique_ptr<LineChannel> connect_tcp(std::string_view address)
{
    ignore_sigpipe();
    const auto colon = address.rfind(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 == address.size()) {
        throw UsageError("tcp endpoint must look like tcp://host:port, got '" + std::string(address) + "'");
    }
    const std::string host(address.substr(0, colon));
    const std::string port(address.substr(colon + 1));

    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* found = nullptr;
    if (const int rc = ::getaddrinfo(host.c_str(), port.c_str(), &hints, &found); rc != 0) {
        throw ProtocolError("cannot resolve '" + std::string(address) + "': " + ::gai_strerror(rc));
    }
    int fd = -1;
    std::string last_error = "no addresses";
    for (addrinfo* ai = found; ai != nullptr; ai = ai->ai_next) {
        fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
        if (fd < 0) {
            last_error = std::strerror(errno);
            continue;
        }
        if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
            break;
        }
        last_error = std::strerror(errno);
        ::close(fd);
        fd = -1;
    }
    ::freeaddrinfo(found);
    if (fd < 0) {
        throw ProtocolError("cannot connect to '" + std::string(address) + "': " + last_error);
    }
    return std::make_unique<FdChannel>(fd, fd, true);
}

} // namespace

std::unique_ptr<LineChannel> open_channel(std::string_view uri)
{
    constexpr std::string_view stdio_scheme = "stdio:";
    constexpr std::string_view tcp_scheme = "tcp://";
    if (uri.starts_with(stdio_scheme)) {
        const std::string command(uri.substr(stdio_scheme.size()));
        if (command.empty()) {
            throw UsageError("stdio endpoint needs a command, e.g. stdio:python serve.py");
        }
        return spawn_process(command);
    }
    if (uri.starts_with(tcp_scheme)) {
        return connect_tcp(uri.substr(tcp_scheme.size()));
    }
    throw UsageError("unknown endpoint scheme in '" + std::string(uri) + "' (expected stdio:<cmd> or tcp://host:port)");
}

std::unique_ptr<LineChannel> stdio_channel()
{
    ignore_sigpipe();
    return std::make_unique<FdChannel>(STDIN_FILENO, STDOUT_FILENO, false);
}

TcpListener::TcpListener(std::uint16_t port)
{
    ignore_sigpipe();
    fd_ = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
    if (fd_ < 0) {
        throw ProtocolError(errno_message("socket"));
    }
    const int yes = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(port);
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(fd_, 64) != 0) {
        const auto message = errno_message("cannot listen on port " + std::to_string(port));
        ::close(fd_);
        throw ProtocolError(message);
    }
    socklen_t len = sizeof addr;
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener()
{
    if (fd_ >= 0) {
        ::close(fd_);
    }
}

std::unique_ptr<LineChannel> TcpListener::accept()
{
    while (true) {
        const int client = ::accept4(fd_, nullptr, nullptr, SOCK_CLOEXEC);
        if (client >= 0) {
            return std::make_unique<FdChannel>(client, client, true);
        }
        if (errno != EINTR) {
            throw ProtocolError(errno_message("accept"));
        }
    }
}

} // namespace orderbench
