// Copyright 2026 The HSE-QKD Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hse/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <thread>

#include "hse/error.hpp"

namespace hse {
namespace {

constexpr std::size_t kMaxLine = 1 << 20;

std::string errno_text(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

struct LineQueue {
    std::mutex mutex;
    std::condition_variable ready;
    std::deque<std::string> lines;
    bool closed = false;

    void push(std::string line) {
        {
            std::lock_guard lock(mutex);
            if (closed) throw SessionError("send on a closed in-process transport");
            lines.push_back(std::move(line));
        }
        ready.notify_one();
    }

    std::optional<std::string> pop() {
        std::unique_lock lock(mutex);
        ready.wait(lock, [this] { return !lines.empty() || closed; });
        if (lines.empty()) return std::nullopt;
        std::string line = std::move(lines.front());
        lines.pop_front();
        return line;
    }

    void close() {
        {
            std::lock_guard lock(mutex);
            closed = true;
        }
        ready.notify_all();
    }
};

class InProcessTransport final : public Transport {
public:
    InProcessTransport(std::shared_ptr<LineQueue> out, std::shared_ptr<LineQueue> in)
        : out_(std::move(out)), in_(std::move(in)) {}
    ~InProcessTransport() override { close(); }

    void send_line(std::string_view line) override { out_->push(std::string(line)); }

    std::optional<std::string> receive_line() override {
        auto line = in_->pop();
        if (line) ++received_;
        return line;
    }

    void close() override {
        out_->close();
        in_->close();
    }

private:
    std::shared_ptr<LineQueue> out_;
    std::shared_ptr<LineQueue> in_;
};

void set_nodelay(int fd) {
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

}  // namespace

void send(Transport& t, const Message& msg) { t.send_line(encode(msg)); }

std::optional<Message> receive(Transport& t) {
    auto line = t.receive_line();
    if (!line) return std::nullopt;
    return decode(*line, t.lines_received());
}

std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> make_in_process_pair() {
    auto a_to_b = std::make_shared<LineQueue>();
    auto b_to_a = std::make_shared<LineQueue>();
    return {std::make_unique<InProcessTransport>(a_to_b, b_to_a), std::make_unique<InProcessTransport>(b_to_a, a_to_b)};
}

void WireLog::record(std::string_view endpoint, bool outgoing, std::string_view line) {
    std::lock_guard lock(mutex_);
    entries_.push_back({std::string(endpoint), outgoing, std::string(line)});
}

std::vector<WireLog::Entry> WireLog::entries() const {
    std::lock_guard lock(mutex_);
    return entries_;
}

void LoggingTransport::send_line(std::string_view line) {
    log_.record(endpoint_, true, line);
    inner_.send_line(line);
}

std::optional<std::string> LoggingTransport::receive_line() {
    auto line = inner_.receive_line();
    if (line) {
        ++received_;
        log_.record(endpoint_, false, *line);
    }
    return line;
}

TcpTransport::TcpTransport(int fd) : fd_(fd) { set_nodelay(fd_); }

TcpTransport::~TcpTransport() {
    if (fd_ >= 0) ::close(fd_);
}

void TcpTransport::send_line(std::string_view line) {
    if (fd_ < 0) throw SessionError("send on a closed TCP transport");
    std::string framed(line);
    framed.push_back('\n');
    std::size_t sent = 0;
    while (sent < framed.size()) {
        const ssize_t n = ::send(fd_, framed.data() + sent, framed.size() - sent, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw SessionError(errno_text("send"));
        }
        sent += static_cast<std::size_t>(n);
    }
}

std::optional<std::string> TcpTransport::receive_line() {
    if (fd_ < 0) return std::nullopt;
    for (;;) {
        const auto newline = buffer_.find('\n', scan_);
        if (newline != std::string::npos) {
            std::string line = buffer_.substr(0, newline);
            buffer_.erase(0, newline + 1);
            scan_ = 0;
            ++received_;
            return line;
        }
        scan_ = buffer_.size();
        if (buffer_.size() > kMaxLine) throw SessionError("incoming line exceeds 1 MiB");
        char chunk[8192];
        const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
        if (n < 0) {
            if (errno == EINTR) continue;
            // A local close() while blocked surfaces as an error; treat as EOF.
            if (errno == EBADF || errno == ECONNRESET) return std::nullopt;
            throw SessionError(errno_text("recv"));
        }
        if (n == 0) {
            if (!buffer_.empty()) throw SessionError("peer closed mid-line");
            return std::nullopt;
        }
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

void TcpTransport::close() {
    if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

TcpListener::TcpListener(std::uint16_t port, const std::string& host) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw SessionError(errno_text("socket"));
    int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(fd_);
        throw SessionError("invalid listen address " + host);
    }
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(fd_, 4) < 0) {
        const std::string why = errno_text("bind/listen");
        ::close(fd_);
        throw SessionError(why + " (" + host + ":" + std::to_string(port) + ")");
    }
    socklen_t len = sizeof addr;
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() {
    if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<TcpTransport> TcpListener::accept() {
    for (;;) {
        const int fd = ::accept(fd_, nullptr, nullptr);
        if (fd >= 0) return std::make_unique<TcpTransport>(fd);
        if (errno != EINTR) throw SessionError(errno_text("accept"));
    }
}

std::unique_ptr<TcpTransport> tcp_connect(const std::string& host, std::uint16_t port,
                                          std::chrono::milliseconds retry_for) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* found = nullptr;
    const std::string service = std::to_string(port);
    if (const int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &found); rc != 0)
        throw SessionError("cannot resolve " + host + ": " + ::gai_strerror(rc));
    std::unique_ptr<addrinfo, decltype(&::freeaddrinfo)> guard(found, &::freeaddrinfo);

    const auto deadline = std::chrono::steady_clock::now() + retry_for;
    for (;;) {
        const int fd = ::socket(found->ai_family, found->ai_socktype, found->ai_protocol);
        if (fd < 0) throw SessionError(errno_text("socket"));
        if (::connect(fd, found->ai_addr, found->ai_addrlen) == 0) return std::make_unique<TcpTransport>(fd);
        const int err = errno;
        ::close(fd);
        if (err != ECONNREFUSED || std::chrono::steady_clock::now() >= deadline) {
            errno = err;
            throw SessionError(errno_text("connect") + " (" + host + ":" + service + ")");
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
}

}  // namespace hse
