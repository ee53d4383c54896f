// TCP world: star rendezvous at rank 0, then a direct full mesh. One reader
// thread per peer link feeds the endpoint's mailbox.
#include "tmpc/tcp.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cstring>
#include <map>
#include <stdexcept>
#include <thread>
#include <vector>

#include "mailbox.hpp"

namespace tmpc {

namespace {

using Clock = std::chrono::steady_clock;
using Deadline = Clock::time_point;

constexpr std::uint64_t max_payload_length = 1ull << 30;

// Rendezvous / mesh bootstrap messages (distinct from the frame layer).
constexpr char join_magic[4] = {'T', 'M', 'P', 'J'};   // + u32 rank + u16 port
constexpr char table_magic[4] = {'T', 'M', 'P', 'T'};  // + u32 n + n * (ip4 + u16 port)
constexpr char error_magic[4] = {'T', 'M', 'P', 'E'};  // + u8 cause + u32 rank
constexpr char hello_magic[4] = {'T', 'M', 'P', 'H'};  // + u32 rank

constexpr std::uint8_t cause_timeout = 0;
constexpr std::uint8_t cause_duplicate_rank = 1;

int remaining_ms(Deadline deadline) {
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
      deadline - Clock::now());
  return left.count() > 0 ? static_cast<int>(left.count()) : 0;
}

class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  ~Socket() { reset(); }

  Socket(Socket&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }
  Socket& operator=(Socket&& other) noexcept {
    if (this != &other) {
      reset();
      fd_ = other.fd_;
      other.fd_ = -1;
    }
    return *this;
  }
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;

  int fd() const { return fd_; }
  bool valid() const { return fd_ >= 0; }

  void reset() {
    if (fd_ >= 0) {
      ::close(fd_);
      fd_ = -1;
    }
  }

  // Wakes any thread blocked in recv/send on this socket.
  void shutdown_rw() {
    if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
  }

 private:
  int fd_ = -1;
};

void set_nodelay(int fd) {
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

void write_all(const Socket& s, const void* data, std::size_t len) {
  const char* p = static_cast<const char*>(data);
  while (len > 0) {
    const ssize_t n = ::send(s.fd(), p, len, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ConnectionLostError(std::strerror(errno));
    }
    p += n;
    len -= static_cast<std::size_t>(n);
  }
}

// Blocking read of exactly len bytes; returns false on clean EOF at offset 0.
bool read_exact(const Socket& s, void* data, std::size_t len) {
  char* p = static_cast<char*>(data);
  std::size_t got = 0;
  while (got < len) {
    const ssize_t n = ::recv(s.fd(), p + got, len - got, 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ConnectionLostError(std::strerror(errno));
    }
    if (n == 0) {
      if (got == 0) return false;
      throw ConnectionLostError("peer closed mid-message");
    }
    got += static_cast<std::size_t>(n);
  }
  return true;
}

// read_exact with a deadline, for the bootstrap phase only.
void read_exact_deadline(const Socket& s, void* data, std::size_t len,
                         Deadline deadline, const char* what) {
  char* p = static_cast<char*>(data);
  std::size_t got = 0;
  while (got < len) {
    pollfd pfd{s.fd(), POLLIN, 0};
    const int ready = ::poll(&pfd, 1, remaining_ms(deadline));
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw ConnectionLostError(std::strerror(errno));
    }
    if (ready == 0) throw TimeoutError(what);
    const ssize_t n = ::recv(s.fd(), p + got, len - got, 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ConnectionLostError(std::strerror(errno));
    }
    if (n == 0) throw ConnectionLostError("peer closed during setup");
    got += static_cast<std::size_t>(n);
  }
}

struct HostPort {
  std::string host;
  std::uint16_t port;
};

HostPort parse_host_port(const std::string& address) {
  const auto colon = address.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == address.size()) {
    throw std::invalid_argument("rendezvous address must be host:port, got '" +
                                address + "'");
  }
  const std::string port_str = address.substr(colon + 1);
  unsigned long port = 0;
  try {
    port = std::stoul(port_str);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad port in rendezvous address '" + address +
                                "'");
  }
  if (port == 0 || port > 65535) {
    throw std::invalid_argument("port out of range in '" + address + "'");
  }
  return {address.substr(0, colon), static_cast<std::uint16_t>(port)};
}

sockaddr_in resolve_ipv4(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* result = nullptr;
  if (::getaddrinfo(host.c_str(), nullptr, &hints, &result) != 0 || !result) {
    throw std::invalid_argument("cannot resolve host '" + host + "'");
  }
  sockaddr_in addr{};
  std::memcpy(&addr, result->ai_addr, sizeof(addr));
  addr.sin_port = htons(port);
  ::freeaddrinfo(result);
  return addr;
}

Socket listen_on(const sockaddr_in& addr, int backlog) {
  Socket s(::socket(AF_INET, SOCK_STREAM, 0));
  if (!s.valid()) throw ConnectionLostError(std::strerror(errno));
  int one = 1;
  ::setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  if (::bind(s.fd(), reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) <
      0) {
    throw ConnectionLostError("bind failed: " + std::string(std::strerror(errno)));
  }
  if (::listen(s.fd(), backlog) < 0) {
    throw ConnectionLostError("listen failed: " +
                              std::string(std::strerror(errno)));
  }
  return s;
}

std::uint16_t local_port(const Socket& s) {
  sockaddr_in addr{};
  socklen_t len = sizeof(addr);
  ::getsockname(s.fd(), reinterpret_cast<sockaddr*>(&addr), &len);
  return ntohs(addr.sin_port);
}

Socket accept_deadline(const Socket& listener, Deadline deadline,
                       const char* what) {
  for (;;) {
    pollfd pfd{listener.fd(), POLLIN, 0};
    const int ready = ::poll(&pfd, 1, remaining_ms(deadline));
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw ConnectionLostError(std::strerror(errno));
    }
    if (ready == 0) throw TimeoutError(what);
    const int fd = ::accept(listener.fd(), nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR || errno == ECONNABORTED) continue;
      throw ConnectionLostError(std::strerror(errno));
    }
    set_nodelay(fd);
    return Socket(fd);
  }
}

// Retries until the deadline; the target listener may not be up yet.
Socket connect_deadline(const sockaddr_in& addr, Deadline deadline,
                        const char* what) {
  for (;;) {
    Socket s(::socket(AF_INET, SOCK_STREAM, 0));
    if (!s.valid()) throw ConnectionLostError(std::strerror(errno));
    if (::connect(s.fd(), reinterpret_cast<const sockaddr*>(&addr),
                  sizeof(addr)) == 0) {
      set_nodelay(s.fd());
      return s;
    }
    if (Clock::now() >= deadline) throw TimeoutError(what);
    std::this_thread::sleep_for(std::chrono::milliseconds(25));
  }
}

template <typename U>
void put_le(std::vector<char>& out, U value) {
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
  }
}

template <typename U>
U get_le(const char* p) {
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    value |= static_cast<U>(static_cast<unsigned char>(p[i])) << (8 * i);
  }
  return value;
}

struct PeerAddress {
  std::uint32_t ip_be = 0;  // network byte order, as observed by rank 0
  std::uint16_t port = 0;
};

[[noreturn]] void throw_rendezvous_error(std::uint8_t cause,
                                         std::uint32_t rank) {
  if (cause == cause_duplicate_rank) throw DuplicateRankError(rank);
  throw TimeoutError("rendezvous aborted: not all ranks joined");
}

void send_error_reply(const Socket& s, std::uint8_t cause, std::uint32_t rank) {
  std::vector<char> msg(error_magic, error_magic + 4);
  msg.push_back(static_cast<char>(cause));
  put_le<std::uint32_t>(msg, rank);
  try {
    write_all(s, msg.data(), msg.size());
  } catch (const ConnectionLostError&) {
    // best effort; the joiner will observe the closed connection instead
  }
}

}  // namespace

namespace {

class TcpEndpoint final : public Endpoint {
 public:
  TcpEndpoint(std::uint32_t rank, std::uint32_t world_size)
      : Endpoint(rank, world_size), peers_(world_size) {
    mailbox_ = &inbox_;
  }

  ~TcpEndpoint() override {
    closing_.store(true);
    for (auto& p : peers_) p.shutdown_rw();
    for (auto& t : readers_) {
      if (t.joinable()) t.join();
    }
  }

  void adopt_peer(std::uint32_t peer_rank, Socket s) {
    peers_[peer_rank] = std::move(s);
  }

  void start_readers() {
    for (std::uint32_t r = 0; r < peers_.size(); ++r) {
      if (peers_[r].valid()) {
        readers_.emplace_back([this, r] { read_loop(r, peers_[r]); });
      }
    }
  }

  void shutdown() override {
    closing_.store(true);
    for (auto& p : peers_) p.shutdown_rw();
    inbox_.fail(detail::Mailbox::FailReason::Shutdown);
  }

 protected:
  void do_send(std::uint32_t dest, Frame f) override {
    if (dest == rank()) {
      inbox_.push(std::move(f));
      return;
    }
    const auto bytes = encode_frame(f);
    try {
      write_all(peers_[dest], bytes.data(), bytes.size());
    } catch (const ConnectionLostError&) {
      // fail-stop: a dead link kills the world
      inbox_.fail(detail::Mailbox::FailReason::ConnectionLost);
      throw;
    }
  }

 private:
  void read_loop(std::uint32_t peer_rank, const Socket& s) {
    try {
      for (;;) {
        std::vector<std::byte> buf(frame_header_size);
        if (!read_exact(s, buf.data(), frame_header_size)) break;  // clean EOF
        const auto payload_length = [&] {
          std::uint64_t v = 0;
          for (std::size_t i = 0; i < 8; ++i) {
            v |= std::to_integer<std::uint64_t>(buf[35 + i]) << (8 * i);
          }
          return v;
        }();
        if (payload_length > max_payload_length) {
          throw ConnectionLostError("peer declared an oversized payload");
        }
        buf.resize(frame_header_size + payload_length);
        if (payload_length > 0 &&
            !read_exact(s, buf.data() + frame_header_size, payload_length)) {
          throw ConnectionLostError("peer closed mid-frame");
        }
        inbox_.push(decode_frame(buf));
      }
      // EOF on a frame boundary is an orderly close: a rank that finished
      // its work and exited. Everything it sent stays receivable; only a
      // receive that now can never complete will fail.
      if (!closing_.load()) {
        inbox_.close_source(peer_rank);
      }
    } catch (const std::exception&) {
      // Mid-frame EOF, socket error or malformed frame: fatal for the whole
      // world unless we are tearing down ourselves.
      if (!closing_.load()) {
        inbox_.fail(detail::Mailbox::FailReason::ConnectionLost);
      }
    }
  }

  detail::Mailbox inbox_;
  std::vector<Socket> peers_;
  std::vector<std::thread> readers_;
  std::atomic<bool> closing_{false};
};

}  // namespace

std::unique_ptr<Endpoint> connect_tcp_world(const std::string& rendezvous,
                                            std::uint32_t rank,
                                            std::uint32_t world_size,
                                            const TcpOptions& options) {
  if (world_size == 0) throw std::invalid_argument("world size must be >= 1");
  if (rank >= world_size) {
    throw std::invalid_argument("rank must be < world_size");
  }
  auto endpoint = std::make_unique<TcpEndpoint>(rank, world_size);
  if (world_size == 1) return endpoint;

  const Deadline deadline = Clock::now() + options.connect_timeout;
  const HostPort hp = parse_host_port(rendezvous);

  std::vector<PeerAddress> table(world_size);
  Socket data_listener;
  if (rank > 0) {
    sockaddr_in any{};
    any.sin_family = AF_INET;
    any.sin_addr.s_addr = htonl(INADDR_ANY);
    any.sin_port = 0;
    data_listener = listen_on(any, static_cast<int>(world_size));
  }

  if (rank == 0) {
    const sockaddr_in bind_addr = resolve_ipv4(hp.host, hp.port);
    Socket listener = listen_on(bind_addr, static_cast<int>(world_size));
    std::map<std::uint32_t, Socket> joiners;
    auto abort_with = [&](std::uint8_t cause, std::uint32_t bad_rank) {
      for (auto& [r, sock] : joiners) send_error_reply(sock, cause, bad_rank);
      throw_rendezvous_error(cause, bad_rank);
    };
    while (joiners.size() < world_size - 1) {
      Socket joiner;
      try {
        joiner =
            accept_deadline(listener, deadline, "waiting for ranks to join");
      } catch (const TimeoutError&) {
        abort_with(cause_timeout, 0);
      }
      char msg[10];
      read_exact_deadline(joiner, msg, sizeof(msg), deadline, "reading join");
      if (std::memcmp(msg, join_magic, 4) != 0) {
        throw ProtocolError("bad join message at rendezvous");
      }
      const auto join_rank = get_le<std::uint32_t>(msg + 4);
      const auto join_port = get_le<std::uint16_t>(msg + 8);
      if (join_rank == 0 || join_rank >= world_size) {
        throw ProtocolError("join claimed out-of-range rank " +
                            std::to_string(join_rank));
      }
      if (joiners.count(join_rank)) {
        send_error_reply(joiner, cause_duplicate_rank, join_rank);
        abort_with(cause_duplicate_rank, join_rank);
      }
      sockaddr_in peer{};
      socklen_t len = sizeof(peer);
      ::getpeername(joiner.fd(), reinterpret_cast<sockaddr*>(&peer), &len);
      table[join_rank].ip_be = peer.sin_addr.s_addr;
      table[join_rank].port = join_port;
      joiners.emplace(join_rank, std::move(joiner));
    }
    std::vector<char> reply(table_magic, table_magic + 4);
    put_le<std::uint32_t>(reply, world_size);
    for (const auto& entry : table) {
      for (int i = 0; i < 4; ++i) {
        reply.push_back(static_cast<char>((entry.ip_be >> (8 * i)) & 0xff));
      }
      put_le<std::uint16_t>(reply, entry.port);
    }
    for (auto& [r, sock] : joiners) {
      write_all(sock, reply.data(), reply.size());
    }
  } else {
    const sockaddr_in root = resolve_ipv4(hp.host, hp.port);
    Socket to_root =
        connect_deadline(root, deadline, "connecting to rendezvous");
    std::vector<char> join(join_magic, join_magic + 4);
    put_le<std::uint32_t>(join, rank);
    put_le<std::uint16_t>(join, local_port(data_listener));
    write_all(to_root, join.data(), join.size());
    char head[4];
    read_exact_deadline(to_root, head, 4, deadline, "waiting for peer table");
    if (std::memcmp(head, error_magic, 4) == 0) {
      char rest[5];
      read_exact_deadline(to_root, rest, 5, deadline, "reading error reply");
      throw_rendezvous_error(static_cast<std::uint8_t>(rest[0]),
                             get_le<std::uint32_t>(rest + 1));
    }
    if (std::memcmp(head, table_magic, 4) != 0) {
      throw ProtocolError("unexpected rendezvous reply");
    }
    char count_buf[4];
    read_exact_deadline(to_root, count_buf, 4, deadline, "reading peer table");
    if (get_le<std::uint32_t>(count_buf) != world_size) {
      throw ProtocolError("peer table size disagrees with world size");
    }
    std::vector<char> body(world_size * 6);
    read_exact_deadline(to_root, body.data(), body.size(), deadline,
                        "reading peer table");
    for (std::uint32_t r = 0; r < world_size; ++r) {
      const char* p = body.data() + r * 6;
      std::uint32_t ip = 0;
      for (int i = 0; i < 4; ++i) {
        ip |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[i]))
              << (8 * i);
      }
      table[r].ip_be = ip;
      table[r].port = get_le<std::uint16_t>(p + 4);
    }
  }

  // Mesh: lower rank dials the higher rank's listener and says hello.
  for (std::uint32_t peer = rank + 1; peer < world_size; ++peer) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = table[peer].ip_be;
    addr.sin_port = htons(table[peer].port);
    Socket s = connect_deadline(addr, deadline, "connecting to peer");
    std::vector<char> hello(hello_magic, hello_magic + 4);
    put_le<std::uint32_t>(hello, rank);
    write_all(s, hello.data(), hello.size());
    endpoint->adopt_peer(peer, std::move(s));
  }
  std::uint32_t pending_inbound = rank;
  std::vector<bool> seen(rank, false);
  while (pending_inbound > 0) {
    Socket s =
        accept_deadline(data_listener, deadline, "waiting for peer links");
    char hello[8];
    read_exact_deadline(s, hello, sizeof(hello), deadline, "reading peer hello");
    if (std::memcmp(hello, hello_magic, 4) != 0) {
      throw ProtocolError("bad peer hello");
    }
    const auto peer_rank = get_le<std::uint32_t>(hello + 4);
    if (peer_rank >= rank || seen[peer_rank]) {
      throw ProtocolError("unexpected peer hello from rank " +
                          std::to_string(peer_rank));
    }
    seen[peer_rank] = true;
    endpoint->adopt_peer(peer_rank, std::move(s));
    --pending_inbound;
  }

  endpoint->start_readers();
  return endpoint;
}

}  // namespace tmpc
