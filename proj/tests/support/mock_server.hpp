#pragma once

#include <httplib.h>

#include <string>
#include <thread>

namespace testing {

// httplib server on an ephemeral localhost port for the lifetime of the object.
class MockServer {
 public:
  httplib::Server& server() { return svr_; }

  void start() {
    port_ = svr_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { svr_.listen_after_bind(); });
    svr_.wait_until_ready();
  }
  ~MockServer() {
    svr_.stop();
    if (thread_.joinable()) thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  httplib::Server svr_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace testing
