#pragma once

#include <filesystem>
#include <iosfwd>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace dssc {

// Ordered `key=value` lines: run manifests and diagnostics blocks.
class KeyValueBlock {
 public:
  template <typename T>
  KeyValueBlock& set(const std::string& key, const T& value) {
    std::ostringstream os;
    os.precision(17);
    os << value;
    return set_text(key, os.str());
  }
  KeyValueBlock& set(const std::string& key, bool value) {
    return set_text(key, value ? "true" : "false");
  }
  KeyValueBlock& set(const std::string& key, const char* value) {
    return set_text(key, value);
  }
  KeyValueBlock& set_text(const std::string& key, std::string value);

  // Value for `key`, or an empty string.
  std::string get(const std::string& key) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }

  void write(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;
  static KeyValueBlock read(std::istream& in);
  static KeyValueBlock load(const std::filesystem::path& path);

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace dssc
