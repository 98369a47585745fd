#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace rcourt {

struct CacheStats {
  std::uint64_t entries = 0;
  std::uint64_t bytes = 0;
};

// Content-addressed directory of JSON documents: <root>/<key[0:2]>/<key>.json.
// Shared by the completion cache and the Wikipedia response cache. Writes go
// through a temporary file and a rename, so a reader never sees a partial
// entry. Safe for concurrent use by multiple threads and processes.
class DiskCache {
 public:
  explicit DiskCache(std::filesystem::path root);

  std::optional<nlohmann::json> get(const std::string& key) const;
  void put(const std::string& key, const nlohmann::json& value) const;

  std::filesystem::path path_for(const std::string& key) const;
  const std::filesystem::path& root() const { return root_; }

  CacheStats stats() const;
  std::uint64_t clear() const;  // returns the number of entries removed

 private:
  std::filesystem::path root_;
};

}  // namespace rcourt
