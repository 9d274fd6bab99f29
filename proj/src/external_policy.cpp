// SPDX-License-Identifier: Apache-2.0
#include <cerrno>
#include <csignal>
#include <cstring>
#include <mutex>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include <fmt/format.h>

#include "hlsdse/design_json.hpp"
#include "hlsdse/errors.hpp"
#include "hlsdse/policies.hpp"

namespace hlsdse::agent {

using nlohmann::json;

namespace {

constexpr std::size_t kMaxLine = 1 << 20;

void close_fd(int& fd) {
    if (fd >= 0) {
        ::close(fd);
        fd = -1;
    }
}

} // namespace

ExternalPolicy::ExternalPolicy(std::string command, std::chrono::milliseconds timeout)
    : command_(std::move(command)), timeout_(timeout) {}

ExternalPolicy::~ExternalPolicy() {
    stop();
}

void ExternalPolicy::start() {
    // A child that exits early must surface as EPIPE, not kill the process.
    static std::once_flag ignore_sigpipe;
    std::call_once(ignore_sigpipe, [] { std::signal(SIGPIPE, SIG_IGN); });

    int in_pipe[2];  // engine -> child
    int out_pipe[2]; // child -> engine
    if (::pipe2(in_pipe, O_CLOEXEC) != 0) {
        throw PolicyError(fmt::format("pipe: {}", std::strerror(errno)));
    }
    if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        throw PolicyError(fmt::format("pipe: {}", std::strerror(errno)));
    }
    const pid_t pid = ::fork();
    if (pid < 0) {
        for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) {
            ::close(fd);
        }
        throw PolicyError(fmt::format("fork: {}", std::strerror(errno)));
    }
    if (pid == 0) {
        ::dup2(in_pipe[0], STDIN_FILENO);
        ::dup2(out_pipe[1], STDOUT_FILENO);
        ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
        ::_exit(127);
    }
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    pid_ = pid;
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
}

void ExternalPolicy::stop() {
    close_fd(to_child_);
    close_fd(from_child_);
    if (pid_ > 0) {
        // Closing stdin is the polite request; give it a moment, then insist.
        int status = 0;
        for (int i = 0; i < 20; ++i) {
            if (::waitpid(pid_, &status, WNOHANG) == pid_) {
                pid_ = -1;
                return;
            }
            ::usleep(5000);
        }
        ::kill(pid_, SIGKILL);
        ::waitpid(pid_, &status, 0);
        pid_ = -1;
    }
    buffer_.clear();
}

void ExternalPolicy::send(const json& message) {
    const auto line = message.dump() + "\n";
    std::size_t written = 0;
    while (written < line.size()) {
        const auto n = ::write(to_child_, line.data() + written, line.size() - written);
        if (n < 0 && errno == EINTR) {
            continue;
        }
        if (n <= 0) {
            throw PolicyError(fmt::format("external policy stopped reading: {}", std::strerror(errno)));
        }
        written += static_cast<std::size_t>(n);
    }
}

std::string ExternalPolicy::read_line() {
    const auto deadline = std::chrono::steady_clock::now() + timeout_;
    for (;;) {
        if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
            auto line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            return line;
        }
        if (buffer_.size() > kMaxLine) {
            throw PolicyError("external policy sent an over-long line");
        }
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
            deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) {
            throw PolicyError(fmt::format("external policy timed out after {} ms", timeout_.count()));
        }
        pollfd pfd{from_child_, POLLIN, 0};
        const int ready = ::poll(&pfd, 1, static_cast<int>(left.count()));
        if (ready < 0 && errno == EINTR) {
            continue;
        }
        if (ready <= 0) {
            continue; // the deadline check above reports the timeout
        }
        char chunk[4096];
        const auto n = ::read(from_child_, chunk, sizeof chunk);
        if (n < 0 && errno == EINTR) {
            continue;
        }
        if (n <= 0) {
            throw PolicyError("external policy closed its output");
        }
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

void ExternalPolicy::begin(const Task& task) {
    stop();
    start();
    sent_entries_ = 0;
    target_ = task.area_target;
    send(task_message(task));
}

Action ExternalPolicy::next_action(const Transcript& transcript) {
    for (; sent_entries_ < transcript.entries.size(); ++sent_entries_) {
        const auto& entry = transcript.entries[sent_entries_];
        send(json{{"type", "observation"}, {"step", entry.step}, {"payload", to_json(entry.observation)}});
    }
    const auto line = read_line();
    json message;
    try {
        message = json::parse(line);
    } catch (const json::parse_error&) {
        throw InvalidAction("malformed JSON line from external policy");
    }
    try {
        if (!message.is_object() || message.value("type", "") != "action" || !message.contains("action")) {
            throw ParseError("expected {\"type\": \"action\", \"action\": {...}}");
        }
        return action_from_json(message["action"], target_);
    } catch (const ParseError& e) {
        throw InvalidAction(e.what());
    } catch (const json::exception& e) {
        throw InvalidAction(fmt::format("malformed action: {}", e.what()));
    }
}

void ExternalPolicy::notify_invalid(const std::string& reason) {
    try {
        send(json{{"type", "error"}, {"message", reason}});
    } catch (const PolicyError&) {
        // The next read reports the broken pipe.
    }
}

} // namespace hlsdse::agent
