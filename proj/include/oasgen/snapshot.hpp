// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <fstream>
#include <sstream>
#include <string>

#include <httplib.h>

#include "oasgen/errors.hpp"
#include "oasgen/text.hpp"

namespace oasgen::ingest {

struct DocumentSnapshot {
  std::string source_uri;  // recorded verbatim
  std::chrono::system_clock::time_point fetched_at;
  std::string raw_html;  // UTF-8, lossy-decoded
};

inline bool looks_like_url(const std::string& source) {
  return text::istarts_with(source, "http://") || text::istarts_with(source, "https://");
}

namespace detail {

// scheme://host[:port]/path?query -> (origin, path-and-query)
inline std::pair<std::string, std::string> split_origin(const std::string& url) {
  size_t scheme_end = url.find("://");
  size_t path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

inline std::string fetch_url(const std::string& url, int timeout_secs) {
  auto [origin, path] = split_origin(url);
  httplib::Client client(origin);
  client.set_connection_timeout(timeout_secs, 0);
  client.set_read_timeout(timeout_secs, 0);
  client.set_follow_location(true);
  auto res = client.Get(path);
  if (!res)
    throw Error(errc::source_unreachable,
                url + " (" + httplib::to_string(res.error()) + ")");
  if (res->status >= 400)
    throw Error(errc::source_unreachable,
                url + " (HTTP " + std::to_string(res->status) + ")");
  return res->body;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(errc::source_unreachable, "cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace detail

// Loads a documentation snapshot from a local file or an http(s) URL. The raw
// bytes are decoded as UTF-8 with lossy replacement. No script execution
// happens for URLs; pages that need rendering must be supplied pre-rendered.
inline DocumentSnapshot load_snapshot(const std::string& source, int fetch_timeout_secs = 30) {
  std::string bytes = looks_like_url(source) ? detail::fetch_url(source, fetch_timeout_secs)
                                             : detail::read_file(source);
  if (bytes.empty()) throw Error(errc::empty_document, source);
  DocumentSnapshot snap;
  snap.source_uri = source;
  snap.fetched_at = std::chrono::system_clock::now();
  snap.raw_html = text::utf8_lossy(bytes);
  return snap;
}

}  // namespace oasgen::ingest
