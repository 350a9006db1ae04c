// Copyright 2026 The mbus Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>
#include <thread>

#include "mbus/core/config.hpp"
#include "mbus/core/link.hpp"

namespace mbus::core {

std::string Locator::str() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%u.%u.%u.%u:%u", (ip >> 24) & 0xff, (ip >> 16) & 0xff,
                (ip >> 8) & 0xff, ip & 0xff, port);
  return buf;
}

std::optional<Locator> Locator::parse(const std::string& host_port) {
  auto colon = host_port.rfind(':');
  if (colon == std::string::npos) return std::nullopt;
  std::string host = host_port.substr(0, colon);
  int port = std::atoi(host_port.c_str() + colon + 1);
  if (port <= 0 || port > 0xFFFF) return std::nullopt;
  in_addr addr{};
  if (inet_pton(AF_INET, host.c_str(), &addr) != 1) return std::nullopt;
  Locator loc;
  loc.ip = ntohl(addr.s_addr);
  loc.port = static_cast<uint16_t>(port);
  return loc;
}

namespace {

sockaddr_in to_sockaddr(const Locator& loc) {
  sockaddr_in sa{};
  sa.sin_family = AF_INET;
  sa.sin_addr.s_addr = htonl(loc.ip);
  sa.sin_port = htons(loc.port);
  return sa;
}

/// One unicast socket (data + discovery replies) plus an optional multicast
/// membership socket for the discovery group. A single receive thread drains
/// both and hands datagrams to the sink.
class UdpLink final : public DatagramLink {
 public:
  static Result<std::unique_ptr<UdpLink>> open(const ContextConfig& cfg) {
    auto link = std::unique_ptr<UdpLink>(new UdpLink());
    link->group_port_ = discovery_port(cfg.domain_id);

    link->fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
    if (link->fd_ < 0) return Error{Errc::io_error, "socket() failed"};
    int buf = static_cast<int>(cfg.socket_buffer_bytes);
    setsockopt(link->fd_, SOL_SOCKET, SO_RCVBUF, &buf, sizeof buf);
    setsockopt(link->fd_, SOL_SOCKET, SO_SNDBUF, &buf, sizeof buf);

    sockaddr_in bind_addr{};
    bind_addr.sin_family = AF_INET;
    bind_addr.sin_addr.s_addr = htonl(INADDR_ANY);
    bind_addr.sin_port = htons(cfg.bind_port);
    if (::bind(link->fd_, reinterpret_cast<sockaddr*>(&bind_addr), sizeof bind_addr) != 0)
      return Error{Errc::io_error, "bind() failed"};
    sockaddr_in bound{};
    socklen_t blen = sizeof bound;
    getsockname(link->fd_, reinterpret_cast<sockaddr*>(&bound), &blen);

    auto adv = Locator::parse(cfg.advertise_address + ":1");
    link->local_.ip = adv ? adv->ip : 0x7f000001;
    link->local_.port = ntohs(bound.sin_port);

    if (cfg.multicast) link->join_multicast();
    return link;
  }

  ~UdpLink() override { close(); }

  Locator local() const override { return local_; }

  void send(const Locator& to, BytesView datagram) override {
    auto sa = to_sockaddr(to);
    (void)::sendto(fd_, datagram.data(), datagram.size(), 0,
                   reinterpret_cast<sockaddr*>(&sa), sizeof sa);
  }

  void send_batch(const Locator& to, const std::vector<Frame>& frames) override {
    auto sa = to_sockaddr(to);
    constexpr size_t kChunk = 64;
    std::array<mmsghdr, kChunk> msgs{};
    std::array<std::array<iovec, 2>, kChunk> iovs{};
    size_t offset = 0;
    while (offset < frames.size()) {
      size_t n = std::min(kChunk, frames.size() - offset);
      for (size_t i = 0; i < n; ++i) {
        const auto& [header, payload] = frames[offset + i];
        iovs[i][0] = {const_cast<uint8_t*>(header.data()), header.size()};
        iovs[i][1] = {const_cast<uint8_t*>(payload.data()), payload.size()};
        msgs[i].msg_hdr = msghdr{};
        msgs[i].msg_hdr.msg_name = &sa;
        msgs[i].msg_hdr.msg_namelen = sizeof sa;
        msgs[i].msg_hdr.msg_iov = iovs[i].data();
        msgs[i].msg_hdr.msg_iovlen = payload.empty() ? 1 : 2;
      }
      int sent = ::sendmmsg(fd_, msgs.data(), static_cast<unsigned>(n), 0);
      if (sent < 0) sent = 0;
      offset += static_cast<size_t>(sent);
      if (static_cast<size_t>(sent) < n) ++offset;  // skip one on persistent error
    }
  }

  bool multicast_available() const override { return mcast_fd_ >= 0; }

  void send_multicast(BytesView datagram) override {
    if (mcast_fd_ < 0) return;
    Locator group{ntohl(inet_addr(kDiscoveryGroup)), group_port_};
    auto sa = to_sockaddr(group);
    (void)::sendto(fd_, datagram.data(), datagram.size(), 0,
                   reinterpret_cast<sockaddr*>(&sa), sizeof sa);
  }

  void set_sink(Sink sink) override {
    sink_ = std::move(sink);
    rx_thread_ = std::thread([this] { receive_loop(); });
  }

  void close() override {
    if (stopping_.exchange(true)) return;
    ::shutdown(fd_, SHUT_RDWR);
    if (rx_thread_.joinable()) rx_thread_.join();
    if (fd_ >= 0) ::close(fd_);
    if (mcast_fd_ >= 0) ::close(mcast_fd_);
    fd_ = mcast_fd_ = -1;
  }

 private:
  UdpLink() = default;

  void join_multicast() {
    mcast_fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
    if (mcast_fd_ < 0) return;
    int yes = 1;
    setsockopt(mcast_fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
#ifdef SO_REUSEPORT
    setsockopt(mcast_fd_, SOL_SOCKET, SO_REUSEPORT, &yes, sizeof yes);
#endif
    sockaddr_in sa{};
    sa.sin_family = AF_INET;
    sa.sin_addr.s_addr = htonl(INADDR_ANY);
    sa.sin_port = htons(group_port_);
    if (::bind(mcast_fd_, reinterpret_cast<sockaddr*>(&sa), sizeof sa) != 0) {
      ::close(mcast_fd_);
      mcast_fd_ = -1;
      return;
    }
    ip_mreq mreq{};
    mreq.imr_multiaddr.s_addr = inet_addr(kDiscoveryGroup);
    mreq.imr_interface.s_addr = htonl(INADDR_LOOPBACK);
    if (setsockopt(mcast_fd_, IPPROTO_IP, IP_ADD_MEMBERSHIP, &mreq, sizeof mreq) != 0) {
      ::close(mcast_fd_);
      mcast_fd_ = -1;
      return;
    }
    int loop = 1;
    setsockopt(fd_, IPPROTO_IP, IP_MULTICAST_LOOP, &loop, sizeof loop);
    in_addr ifa{};
    ifa.s_addr = htonl(INADDR_LOOPBACK);
    setsockopt(fd_, IPPROTO_IP, IP_MULTICAST_IF, &ifa, sizeof ifa);
  }

  void receive_loop() {
    constexpr size_t kBatch = 64;
    constexpr size_t kBufSize = 65536;
    std::vector<uint8_t> buffers(kBatch * kBufSize);
    std::array<mmsghdr, kBatch> msgs{};
    std::array<iovec, kBatch> iovs{};
    std::array<sockaddr_in, kBatch> froms{};
    for (size_t i = 0; i < kBatch; ++i) {
      iovs[i] = {buffers.data() + i * kBufSize, kBufSize};
      msgs[i].msg_hdr.msg_iov = &iovs[i];
      msgs[i].msg_hdr.msg_iovlen = 1;
      msgs[i].msg_hdr.msg_name = &froms[i];
      msgs[i].msg_hdr.msg_namelen = sizeof(sockaddr_in);
    }
    pollfd fds[2];
    fds[0] = {fd_, POLLIN, 0};
    fds[1] = {mcast_fd_, POLLIN, 0};
    nfds_t nfds = mcast_fd_ >= 0 ? 2 : 1;
    while (!stopping_.load(std::memory_order_relaxed)) {
      int rc = ::poll(fds, nfds, 100);
      if (rc <= 0) continue;
      for (nfds_t i = 0; i < nfds; ++i) {
        if (!(fds[i].revents & POLLIN)) continue;
        for (;;) {  // drain in batches
          for (size_t m = 0; m < kBatch; ++m)
            msgs[m].msg_hdr.msg_namelen = sizeof(sockaddr_in);
          int n = ::recvmmsg(fds[i].fd, msgs.data(), kBatch, MSG_DONTWAIT, nullptr);
          if (n <= 0) break;
          for (int m = 0; m < n; ++m) {
            Locator src{ntohl(froms[static_cast<size_t>(m)].sin_addr.s_addr),
                        ntohs(froms[static_cast<size_t>(m)].sin_port)};
            if (src.ip == local_.ip && src.port == local_.port && fds[i].fd == mcast_fd_)
              continue;  // own multicast loopback
            const uint8_t* base = buffers.data() + static_cast<size_t>(m) * kBufSize;
            sink_(Bytes(base, base + msgs[static_cast<size_t>(m)].msg_len), src);
          }
          if (static_cast<size_t>(n) < kBatch) break;
        }
      }
    }
  }

  int fd_ = -1;
  int mcast_fd_ = -1;
  uint16_t group_port_ = 0;
  Locator local_{};
  Sink sink_;
  std::thread rx_thread_;
  std::atomic<bool> stopping_{false};
};

}  // namespace

Result<std::unique_ptr<DatagramLink>> open_udp_link(const ContextConfig& cfg) {
  auto link = UdpLink::open(cfg);
  if (!link.ok()) return link.error();
  return std::unique_ptr<DatagramLink>(std::move(link.value()));
}

}  // namespace mbus::core
