#include "dssc/keyvalue.hpp"

#include "dssc/error.hpp"

#include <fstream>
#include <istream>
#include <ostream>

namespace dssc {

KeyValueBlock& KeyValueBlock::set_text(const std::string& key, std::string value) {
  if (key.empty() || key.find_first_of("=\n") != std::string::npos) {
    throw ParameterError("key-value: invalid key '" + key + "'");
  }
  if (value.find('\n') != std::string::npos) {
    throw ParameterError("key-value: value for '" + key + "' spans lines");
  }
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = std::move(value);
      return *this;
    }
  }
  entries_.emplace_back(key, std::move(value));
  return *this;
}

std::string KeyValueBlock::get(const std::string& key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return v;
  return {};
}

void KeyValueBlock::write(std::ostream& out) const {
  for (const auto& [k, v] : entries_) out << k << '=' << v << '\n';
}

void KeyValueBlock::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
  write(out);
}

KeyValueBlock KeyValueBlock::read(std::istream& in) {
  KeyValueBlock block;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ParseError("key-value: expected key=value", line_no, 1);
    }
    block.set_text(line.substr(0, eq), line.substr(eq + 1));
  }
  return block;
}

KeyValueBlock KeyValueBlock::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "' for reading");
  return read(in);
}

}  // namespace dssc
