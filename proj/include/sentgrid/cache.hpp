#pragma once

#include <filesystem>
#include <optional>
#include <string>

namespace sentgrid::gen {

// One cached generation. The prompt itself is not stored (the key already
// commits to its digest); the record keeps enough provenance to audit a
// cache hit without re-deriving the key.
struct CacheRecord {
  std::string completion;
  std::string backend_id;
  std::string prompt_digest;
  std::string sampling;  // canonical sampling string
  int sample_index = 0;
};

// Content-addressed, filesystem-backed store of generations. Records are
// keyed by a hex digest and live under <root>/<first two hex chars>/<key>.json.
// Writes are first-write-wins: concurrent writers race to hard-link a private
// temp file into place, and losers adopt the winner's bytes. Safe to share
// across threads and processes pointed at the same root.
class GenerationCache {
 public:
  explicit GenerationCache(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  std::optional<CacheRecord> lookup(const std::string& key) const;

  // Stores the record unless some record already won the key; returns the
  // record that ended up in the cache.
  CacheRecord store(const std::string& key, const CacheRecord& record);

  // Number of records currently on disk (walks the tree; test helper).
  long count() const;

 private:
  std::filesystem::path entry_path(const std::string& key) const;

  std::filesystem::path root_;
};

}  // namespace sentgrid::gen
