#pragma once

// Small helpers shared by the test binaries. SENTGRID_REPO_DIR is injected
// by the build so tests can find checked-in fixtures and goldens.

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace testutil {

inline std::filesystem::path repo_dir() { return SENTGRID_REPO_DIR; }

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

// Compares against a checked-in golden file. Set SENTGRID_UPDATE_GOLDENS=1
// to rewrite the goldens instead of failing.
inline bool matches_golden(const std::string& actual, const std::string& relative_path,
                           std::string* diff_message) {
  const std::filesystem::path path = repo_dir() / relative_path;
  if (std::getenv("SENTGRID_UPDATE_GOLDENS")) {
    write_file(path, actual);
    return true;
  }
  if (!std::filesystem::exists(path)) {
    *diff_message = "golden missing: " + path.string() +
                    " (run with SENTGRID_UPDATE_GOLDENS=1 to create)";
    return false;
  }
  const std::string expected = read_file(path);
  if (expected == actual) return true;
  *diff_message = "golden mismatch: " + path.string() + "\n--- expected ---\n" + expected +
                  "\n--- actual ---\n" + actual;
  return false;
}

// Scratch directory unique to this process, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    root_ = std::filesystem::temp_directory_path() /
            ("sentgrid-" + tag + "-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter_++));
    std::filesystem::create_directories(root_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(root_, ec);
  }
  const std::filesystem::path& path() const { return root_; }

 private:
  static inline int counter_ = 0;
  std::filesystem::path root_;
};

}  // namespace testutil
