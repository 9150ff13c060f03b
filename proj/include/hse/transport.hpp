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

#pragma once

// Ordered, reliable, bidirectional line transports. Lines are opaque here;
// encoding lives in codec.hpp.

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hse/codec.hpp"

namespace hse {

class Transport {
public:
    virtual ~Transport() = default;

    /// Sends one line; a newline is appended.
    virtual void send_line(std::string_view line) = 0;
    /// Next line without its newline, or nullopt once the peer has closed.
    virtual std::optional<std::string> receive_line() = 0;
    /// Closes both directions; a blocked receive_line on the peer returns nullopt.
    virtual void close() = 0;

    std::size_t lines_received() const noexcept { return received_; }

protected:
    std::size_t received_ = 0;
};

void send(Transport& t, const Message& msg);
/// Receives and decodes the next message; nullopt on orderly close.
std::optional<Message> receive(Transport& t);

/// Two connected endpoints backed by in-memory queues.
std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> make_in_process_pair();

/// Thread-safe record of every line crossing a LoggingTransport.
class WireLog {
public:
    struct Entry {
        std::string endpoint;
        bool outgoing = false;
        std::string line;
    };

    void record(std::string_view endpoint, bool outgoing, std::string_view line);
    std::vector<Entry> entries() const;

private:
    mutable std::mutex mutex_;
    std::vector<Entry> entries_;
};

/// Forwards to an inner transport and records each line in a WireLog.
class LoggingTransport final : public Transport {
public:
    LoggingTransport(Transport& inner, WireLog& log, std::string endpoint)
        : inner_(inner), log_(log), endpoint_(std::move(endpoint)) {}

    void send_line(std::string_view line) override;
    std::optional<std::string> receive_line() override;
    void close() override { inner_.close(); }

private:
    Transport& inner_;
    WireLog& log_;
    std::string endpoint_;
};

class TcpTransport final : public Transport {
public:
    explicit TcpTransport(int fd);
    ~TcpTransport() override;
    TcpTransport(const TcpTransport&) = delete;
    TcpTransport& operator=(const TcpTransport&) = delete;

    void send_line(std::string_view line) override;
    std::optional<std::string> receive_line() override;
    void close() override;

private:
    int fd_;
    std::string buffer_;
    std::size_t scan_ = 0;
};

class TcpListener {
public:
    /// Binds and listens; port 0 picks an ephemeral port.
    explicit TcpListener(std::uint16_t port, const std::string& host = "127.0.0.1");
    ~TcpListener();
    TcpListener(const TcpListener&) = delete;
    TcpListener& operator=(const TcpListener&) = delete;

    std::uint16_t port() const noexcept { return port_; }
    std::unique_ptr<TcpTransport> accept();

private:
    int fd_;
    std::uint16_t port_;
};

/// Connects to host:port, retrying refused connections for up to retry_for.
std::unique_ptr<TcpTransport> tcp_connect(const std::string& host, std::uint16_t port,
                                          std::chrono::milliseconds retry_for = std::chrono::milliseconds(0));

}  // namespace hse
