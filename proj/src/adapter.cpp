#include "qlab/errors.hpp"
#include "qlab/probe.hpp"

#include <json.hpp>

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
#include <future>
#include <set>
#include <sstream>
#include <thread>

extern char** environ;

namespace qlab {

namespace {

using Clock = std::chrono::steady_clock;

void close_fd(int& fd) {
  if (fd >= 0) ::close(fd);
  fd = -1;
}

// A line-oriented duplex stream over file descriptors: a child process's
// stdin/stdout pair or a connected socket.
class Channel {
 public:
  Channel() = default;
  Channel(const Channel&) = delete;
  Channel& operator=(const Channel&) = delete;
  ~Channel() { shutdown(); }

  static std::unique_ptr<Channel> spawn(const std::string& command) {
    int to_child[2], from_child[2];
    if (::pipe2(to_child, O_CLOEXEC) != 0) return nullptr;
    if (::pipe2(from_child, O_CLOEXEC) != 0) {
      ::close(to_child[0]);
      ::close(to_child[1]);
      return nullptr;
    }
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, to_child[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, from_child[1], STDOUT_FILENO);
    // own process group, so shutdown also reaches whatever the shell started
    posix_spawnattr_t attr;
    posix_spawnattr_init(&attr);
    posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
    posix_spawnattr_setpgroup(&attr, 0);
    std::string sh = "/bin/sh", dash_c = "-c", cmd = command;
    char* argv[] = {sh.data(), dash_c.data(), cmd.data(), nullptr};
    pid_t pid = -1;
    const int rc = ::posix_spawn(&pid, "/bin/sh", &actions, &attr, argv, environ);
    posix_spawn_file_actions_destroy(&actions);
    posix_spawnattr_destroy(&attr);
    ::close(to_child[0]);
    ::close(from_child[1]);
    if (rc != 0) {
      ::close(to_child[1]);
      ::close(from_child[0]);
      return nullptr;
    }
    auto ch = std::make_unique<Channel>();
    ch->write_fd_ = to_child[1];
    ch->read_fd_ = from_child[0];
    ch->pid_ = pid;
    return ch;
  }

  static std::unique_ptr<Channel> connect(const std::string& host, const std::string& port) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (::getaddrinfo(host.c_str(), port.c_str(), &hints, &res) != 0) return nullptr;
    int fd = -1;
    for (auto* ai = res; ai; ai = ai->ai_next) {
      fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
      if (fd < 0) continue;
      if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
      close_fd(fd);
    }
    ::freeaddrinfo(res);
    if (fd < 0) return nullptr;
    auto ch = std::make_unique<Channel>();
    ch->write_fd_ = fd;
    ch->read_fd_ = ::dup(fd);
    ch->socket_ = true;
    return ch;
  }

  bool send_line(const std::string& line) {
    std::string data = line + "\n";
    std::size_t off = 0;
    while (off < data.size()) {
      const ssize_t n = socket_ ? ::send(write_fd_, data.data() + off, data.size() - off,
                                         MSG_NOSIGNAL)
                                : ::write(write_fd_, data.data() + off, data.size() - off);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) return false;
      off += static_cast<std::size_t>(n);
    }
    return true;
  }

  enum class Status { line, timeout, closed };

  Status recv_line(std::chrono::milliseconds timeout, std::string& line) {
    const auto deadline = Clock::now() + timeout;
    while (true) {
      const auto nl = buffer_.find('\n');
      if (nl != std::string::npos) {
        line = buffer_.substr(0, nl);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        buffer_.erase(0, nl + 1);
        return Status::line;
      }
      if (eof_) return Status::closed;
      const auto left =
          std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
      if (left <= 0) return Status::timeout;
      pollfd p{read_fd_, POLLIN, 0};
      const int rc = ::poll(&p, 1, static_cast<int>(left));
      if (rc < 0 && errno == EINTR) continue;
      if (rc == 0) return Status::timeout;
      char buf[4096];
      const ssize_t n = ::read(read_fd_, buf, sizeof buf);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) {
        eof_ = true;
        continue;
      }
      buffer_.append(buf, static_cast<std::size_t>(n));
    }
  }

  void shutdown() {
    close_fd(write_fd_);
    close_fd(read_fd_);
    if (pid_ > 0) {
      int status = 0;
      const bool running = ::waitpid(pid_, &status, WNOHANG) == 0;
      ::kill(-pid_, SIGTERM);
      if (running) ::waitpid(pid_, &status, 0);
      pid_ = -1;
    }
  }

 private:
  int write_fd_ = -1;
  int read_fd_ = -1;
  pid_t pid_ = -1;
  bool socket_ = false;
  bool eof_ = false;
  std::string buffer_;
};

struct Endpoint {
  enum class Kind { stub, command, tcp } kind;
  std::string target;  // stub spec or shell command
  std::string host, port;
};

Endpoint parse_endpoint(const std::string& endpoint) {
  const auto colon = endpoint.find(':');
  const std::string scheme = endpoint.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : endpoint.substr(colon + 1);
  if (scheme == "stub") return {Endpoint::Kind::stub, rest, {}, {}};
  if (scheme == "command" && !rest.empty()) return {Endpoint::Kind::command, rest, {}, {}};
  if (scheme == "tcp") {
    const auto sep = rest.rfind(':');
    if (sep != std::string::npos && sep > 0 && sep + 1 < rest.size())
      return {Endpoint::Kind::tcp, {}, rest.substr(0, sep), rest.substr(sep + 1)};
  }
  throw ConfigError("endpoint '" + endpoint + "' (stub:<kind> | command:<cmd> | tcp:<host>:<port>)");
}

std::unique_ptr<Channel> open_channel(const Endpoint& ep) {
  return ep.kind == Endpoint::Kind::command ? Channel::spawn(ep.target)
                                            : Channel::connect(ep.host, ep.port);
}

std::string describe(const Endpoint& ep) {
  return ep.kind == Endpoint::Kind::command ? "command '" + ep.target + "'"
                                            : "tcp " + ep.host + ":" + ep.port;
}

// Serves the cases at indices idx, idx + stride, ... over one channel.
void run_worker(std::span<const ProbeCase> cases, std::size_t first, std::size_t stride,
                const Endpoint& ep, const AdapterOptions& options,
                std::vector<ProbeResponse>& out) {
  std::unique_ptr<Channel> ch;
  bool answered_any = false;
  std::set<std::string> abandoned;

  auto connect = [&] {
    for (unsigned attempt = 0; attempt <= options.retries; ++attempt) {
      ch = open_channel(ep);
      if (ch) return;
    }
    throw AdapterUnreachable(describe(ep));
  };
  connect();

  for (std::size_t i = first; i < cases.size(); i += stride) {
    const auto& c = cases[i];
    nlohmann::ordered_json req;
    req["id"] = c.id;
    req["context"] = c.context;
    req["question"] = c.question;
    const std::string request = req.dump();

    ProbeResponse resp{c.id, "", Answer::unparseable};
    bool done = false;
    for (unsigned attempt = 0; attempt <= options.retries && !done; ++attempt) {
      if (!ch) connect();
      if (!ch->send_line(request)) {
        ch.reset();
        if (!answered_any && attempt == options.retries)
          throw AdapterUnreachable(describe(ep) + ": closed before answering");
        continue;
      }
      std::string line;
      while (!done) {
        const auto st = ch->recv_line(options.timeout, line);
        if (st == Channel::Status::timeout) break;
        if (st == Channel::Status::closed) {
          ch.reset();
          if (!answered_any && attempt == options.retries)
            throw AdapterUnreachable(describe(ep) + ": closed before answering");
          break;
        }
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("id") || !j["id"].is_string() ||
            !j.contains("answer") || !j["answer"].is_string())
          throw ProtocolViolation("malformed response: " + line);
        const auto id = j["id"].get<std::string>();
        if (id != c.id) {
          if (abandoned.count(id)) continue;
          throw ProtocolViolation("response for '" + id + "' while waiting for '" + c.id + "'");
        }
        resp.raw = j["answer"].get<std::string>();
        resp.normalized = normalize_answer(resp.raw);
        answered_any = true;
        done = true;
      }
    }
    if (!done) abandoned.insert(c.id);
    out[i] = std::move(resp);
  }
}

}  // namespace

std::vector<ProbeResponse> run_adapter(std::span<const ProbeCase> cases,
                                       const std::string& endpoint,
                                       const AdapterOptions& options, const Vocabulary& vocab) {
  const auto ep = parse_endpoint(endpoint);
  std::vector<ProbeResponse> out(cases.size());
  if (ep.kind == Endpoint::Kind::stub) {
    const auto stub = StubSpec::parse(ep.target);
    for (std::size_t i = 0; i < cases.size(); ++i) {
      const auto raw = stub_answer(stub, cases[i].context, cases[i].question, vocab);
      out[i] = {cases[i].id, raw, normalize_answer(raw)};
    }
    return out;
  }
  if (cases.empty()) return out;
  // A child that exits early must surface as a closed stream, not a signal.
  if (ep.kind == Endpoint::Kind::command) ::signal(SIGPIPE, SIG_IGN);

  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(options.concurrency, cases.size()));
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w)
    jobs.push_back(std::async(std::launch::async, [&, w] {
      run_worker(cases, w, workers, ep, options, out);
    }));
  std::exception_ptr failure;
  for (auto& j : jobs) {
    try {
      j.get();
    } catch (...) {
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

void serve_stub_tcp(const StubSpec& stub, std::uint16_t port, std::size_t max_connections,
                    const std::function<void(std::uint16_t)>& ready, const Vocabulary& vocab) {
  const int server = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (server < 0) throw AdapterUnreachable(std::string("socket: ") + std::strerror(errno));
  const int yes = 1;
  ::setsockopt(server, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  if (::bind(server, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
      ::listen(server, 8) != 0) {
    const std::string err = std::strerror(errno);
    ::close(server);
    throw AdapterUnreachable("listen on port " + std::to_string(port) + ": " + err);
  }
  socklen_t len = sizeof addr;
  ::getsockname(server, reinterpret_cast<sockaddr*>(&addr), &len);
  if (ready) ready(ntohs(addr.sin_port));

  for (std::size_t served = 0; max_connections == 0 || served < max_connections; ++served) {
    const int client = ::accept4(server, nullptr, nullptr, SOCK_CLOEXEC);
    if (client < 0) {
      if (errno == EINTR) continue;
      break;
    }
    std::string buffer;
    char buf[4096];
    ssize_t n;
    while ((n = ::read(client, buf, sizeof buf)) > 0) {
      buffer.append(buf, static_cast<std::size_t>(n));
      std::size_t nl;
      std::string replies;
      while ((nl = buffer.find('\n')) != std::string::npos) {
        std::istringstream in(buffer.substr(0, nl + 1));
        buffer.erase(0, nl + 1);
        std::ostringstream reply;
        serve_stub(stub, in, reply, vocab);
        replies += reply.str();
      }
      if (!replies.empty()) ::send(client, replies.data(), replies.size(), MSG_NOSIGNAL);
    }
    ::close(client);
  }
  ::close(server);
}

}  // namespace qlab
