#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rcourt/errors.hpp"

namespace rcourt {

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;

struct HttpResponse {
  int status = 0;
  std::string body;
};

// Connection-level failure: DNS, connect, TLS, timeout.
class TransportError : public Error {
 public:
  using Error::Error;
};

struct UrlParts {
  std::string origin;  // scheme://host[:port]
  std::string path;    // begins with '/', may be "/"
};

// Throws std::invalid_argument for anything that is not http(s)://...
UrlParts split_url(std::string_view url);

std::string url_encode(std::string_view text);

// Thin blocking client. One underlying connection per call so instances can be
// shared across threads.
class HttpClient {
 public:
  explicit HttpClient(std::string origin, double timeout_seconds = 60.0);

  HttpResponse get(const std::string& path_and_query, const HttpHeaders& headers = {}) const;
  HttpResponse post(const std::string& path, const std::string& body,
                    const std::string& content_type, const HttpHeaders& headers = {}) const;

 private:
  std::string origin_;
  double timeout_seconds_;
};

}  // namespace rcourt
