#include "rcourt/http.hpp"

#include <httplib.h>

#include <cctype>
#include <stdexcept>

namespace rcourt {

namespace {

httplib::Headers to_httplib(const HttpHeaders& headers) {
  httplib::Headers out;
  for (const auto& [k, v] : headers) out.emplace(k, v);
  return out;
}

httplib::Client make_client(const std::string& origin, double timeout_seconds) {
  httplib::Client client(origin);
  auto secs = static_cast<time_t>(timeout_seconds);
  auto usecs = static_cast<time_t>((timeout_seconds - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  client.set_follow_location(true);
  return client;
}

HttpResponse finish(const httplib::Result& result, const std::string& what) {
  if (!result) {
    throw TransportError(what + ": " + httplib::to_string(result.error()));
  }
  return HttpResponse{result->status, result->body};
}

}  // namespace

UrlParts split_url(std::string_view url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) {
    throw std::invalid_argument("not an absolute URL: " + std::string(url));
  }
  auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw std::invalid_argument("unsupported URL scheme: " + std::string(url));
  }
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string_view::npos) return {std::string(url), "/"};
  return {std::string(url.substr(0, path_start)), std::string(url.substr(path_start))};
}

std::string url_encode(std::string_view text) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xF]);
    }
  }
  return out;
}

HttpClient::HttpClient(std::string origin, double timeout_seconds)
    : origin_(std::move(origin)), timeout_seconds_(timeout_seconds) {}

HttpResponse HttpClient::get(const std::string& path_and_query, const HttpHeaders& headers) const {
  auto client = make_client(origin_, timeout_seconds_);
  return finish(client.Get(path_and_query, to_httplib(headers)), "GET " + origin_ + path_and_query);
}

HttpResponse HttpClient::post(const std::string& path, const std::string& body,
                              const std::string& content_type, const HttpHeaders& headers) const {
  auto client = make_client(origin_, timeout_seconds_);
  return finish(client.Post(path, to_httplib(headers), body, content_type),
                "POST " + origin_ + path);
}

}  // namespace rcourt
