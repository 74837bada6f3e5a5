#include "sentgrid/cache.hpp"

#include <json.hpp>

#include <unistd.h>

#include <atomic>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace sentgrid::gen {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

CacheRecord parse_record(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read cache entry: " + path.string());
  json rec = json::parse(in, nullptr, false);
  if (rec.is_discarded() || !rec.is_object()) {
    throw std::runtime_error("corrupt cache entry: " + path.string());
  }
  CacheRecord out;
  out.completion = rec.at("completion").get<std::string>();
  out.backend_id = rec.value("backend_id", "");
  out.prompt_digest = rec.value("prompt_digest", "");
  out.sampling = rec.value("sampling", "");
  out.sample_index = rec.value("sample_index", 0);
  return out;
}

}  // namespace

GenerationCache::GenerationCache(fs::path root) : root_(std::move(root)) {
  fs::create_directories(root_);
}

fs::path GenerationCache::entry_path(const std::string& key) const {
  if (key.size() < 3) throw std::invalid_argument("cache key too short: " + key);
  return root_ / key.substr(0, 2) / (key + ".json");
}

std::optional<CacheRecord> GenerationCache::lookup(const std::string& key) const {
  const fs::path path = entry_path(key);
  std::error_code ec;
  if (!fs::exists(path, ec)) return std::nullopt;
  return parse_record(path);
}

CacheRecord GenerationCache::store(const std::string& key, const CacheRecord& record) {
  static std::atomic<unsigned long> counter{0};
  const fs::path path = entry_path(key);
  fs::create_directories(path.parent_path());

  json rec = {
      {"completion", record.completion},     {"backend_id", record.backend_id},
      {"prompt_digest", record.prompt_digest}, {"sampling", record.sampling},
      {"sample_index", record.sample_index},
  };
  const fs::path temp = path.parent_path() / (key + ".tmp" + std::to_string(::getpid()) + "." +
                                              std::to_string(counter.fetch_add(1)));
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    out << rec.dump(2) << '\n';
    if (!out) {
      std::error_code ignore;
      fs::remove(temp, ignore);
      throw std::runtime_error("cannot write cache entry: " + temp.string());
    }
  }

  std::error_code ec;
  fs::create_hard_link(temp, path, ec);
  std::error_code ignore;
  fs::remove(temp, ignore);
  if (!ec) return record;
  if (fs::exists(path, ignore)) return parse_record(path);  // lost the race; adopt the winner
  throw std::runtime_error("cannot publish cache entry " + path.string() + ": " + ec.message());
}

long GenerationCache::count() const {
  long n = 0;
  std::error_code ec;
  for (auto it = fs::recursive_directory_iterator(root_, ec);
       it != fs::recursive_directory_iterator(); ++it) {
    if (it->is_regular_file() && it->path().extension() == ".json") ++n;
  }
  return n;
}

}  // namespace sentgrid::gen
