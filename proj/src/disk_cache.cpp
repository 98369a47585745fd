#include "rcourt/disk_cache.hpp"

#include <spdlog/spdlog.h>

#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;

namespace rcourt {

DiskCache::DiskCache(fs::path root) : root_(std::move(root)) {}

fs::path DiskCache::path_for(const std::string& key) const {
  auto shard = key.size() >= 2 ? key.substr(0, 2) : std::string("__");
  return root_ / shard / (key + ".json");
}

std::optional<nlohmann::json> DiskCache::get(const std::string& key) const {
  auto path = path_for(key);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return nlohmann::json::parse(buffer.str());
  } catch (const nlohmann::json::exception& e) {
    spdlog::warn("ignoring unreadable cache entry {}: {}", path.string(), e.what());
    return std::nullopt;
  }
}

void DiskCache::put(const std::string& key, const nlohmann::json& value) const {
  static std::atomic<std::uint64_t> counter{0};
  auto path = path_for(key);
  fs::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp." + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())) + "." +
         std::to_string(counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << value.dump();
    out.flush();
    if (!out) throw std::runtime_error("failed to write cache entry " + tmp.string());
  }
  fs::rename(tmp, path);
}

CacheStats DiskCache::stats() const {
  CacheStats stats;
  if (!fs::exists(root_)) return stats;
  for (const auto& entry : fs::recursive_directory_iterator(root_)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      ++stats.entries;
      stats.bytes += entry.file_size();
    }
  }
  return stats;
}

std::uint64_t DiskCache::clear() const {
  std::uint64_t removed = 0;
  if (!fs::exists(root_)) return removed;
  for (const auto& shard : fs::directory_iterator(root_)) {
    if (!shard.is_directory() || shard.path().filename().string().size() != 2) continue;
    for (const auto& entry : fs::directory_iterator(shard.path())) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") {
        fs::remove(entry.path());
        ++removed;
      }
    }
    if (fs::is_empty(shard.path())) fs::remove(shard.path());
  }
  return removed;
}

}  // namespace rcourt
