#pragma once

#include <chrono>
#include <string>
#include <thread>

#include "httplib.h"
#include "kgre/error.hpp"

namespace kgre {

struct Endpoint {
  std::string origin;       // scheme://host:port
  std::string path_prefix;  // "" or "/something", never a trailing slash
};

inline Endpoint parse_endpoint(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw ConfigError("endpoint must look like http://host:port, got '" + url + "'");
  auto path_start = url.find('/', scheme_end + 3);
  Endpoint ep;
  ep.origin = url.substr(0, path_start);
  if (path_start != std::string::npos) ep.path_prefix = url.substr(path_start);
  while (!ep.path_prefix.empty() && ep.path_prefix.back() == '/')
    ep.path_prefix.pop_back();
  return ep;
}

// Runs `request` until it yields a response below HTTP 500, sleeping
// initial_backoff * 2^k between attempts. Throws TransportError once
// `max_attempts` are spent.
template <typename Fn>
httplib::Result with_retries(int max_attempts,
                             std::chrono::milliseconds initial_backoff,
                             Fn&& request) {
  auto backoff = initial_backoff;
  std::string last_error;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    httplib::Result res = request();
    if (res && res->status < 500) return res;
    last_error = res ? "HTTP " + std::to_string(res->status)
                     : httplib::to_string(res.error());
    if (attempt < max_attempts) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  throw TransportError("request failed after " + std::to_string(max_attempts) +
                       " attempts: " + last_error);
}

}  // namespace kgre
