#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace orderbench {

/// A bidirectional stream of newline-terminated text lines.
class LineChannel {
public:
    virtual ~LineChannel() = default;

    /// Appends '\n'. Throws ProtocolError if the peer is gone.
    virtual void write_line(std::string_view line) = 0;

    /// Next line without its terminator, or nullopt if none arrived within
    /// timeout. Throws ProtocolError on end of stream or a read failure.
    virtual std::optional<std::string> read_line(std::chrono::milliseconds timeout) = 0;
};

/// Connects to an endpoint URI:
///   stdio:<shell command>   spawn the command and talk over its stdin/stdout
///   tcp://<host>:<port>     connect a TCP socket
/// Throws UsageError for an unknown scheme and ProtocolError when the
/// endpoint cannot be reached.
std::unique_ptr<LineChannel> open_channel(std::string_view uri);

/// Channel over this process's own stdin and stdout.
std::unique_ptr<LineChannel> stdio_channel();

/// Listening TCP socket bound to the loopback interface.
class TcpListener {
public:
    /// Port 0 picks a free port.
    explicit TcpListener(std::uint16_t port);
    ~TcpListener();
    TcpListener(const TcpListener&) = delete;
    TcpListener& operator=(const TcpListener&) = delete;

    std::uint16_t port() const { return port_; }

    /// Blocks until a peer connects.
    std::unique_ptr<LineChannel> accept();

private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

} // namespace orderbench
