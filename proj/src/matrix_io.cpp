#include "dssc/matrix_io.hpp"

#include "dssc/error.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace dssc {
namespace {

constexpr std::array<char, 4> kMagic = {'S', 'D', 'M', '1'};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view token, std::size_t line,
                    std::size_t column) {
  token = trim(token);
  double value = 0.0;
  const char* begin = token.data();
  const char* end = token.data() + token.size();
  // from_chars rejects a leading '+', which other writers emit.
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (token.empty() || ec != std::errc() || ptr != end) {
    throw ParseError("not a number: '" + std::string(token) + "'", line,
                     column);
  }
  if (!std::isfinite(value)) {
    throw ParseError("non-finite value: '" + std::string(token) + "'", line,
                     column);
  }
  return value;
}

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<unsigned char, 8> bytes{};
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
    throw FormatError("binary matrix: truncated header");
  }
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t{bytes[i]} << (8 * i);
  return v;
}

MatrixXd read_csv(std::istream& in) {
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = trim(line);
    if (body.empty()) continue;
    std::size_t count = 0;
    std::size_t start = 0;
    while (true) {
      const auto comma = body.find(',', start);
      const auto token = body.substr(start, comma == std::string_view::npos
                                                ? std::string_view::npos
                                                : comma - start);
      values.push_back(parse_double(token, line_no, count + 1));
      ++count;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (rows == 0) {
      cols = count;
    } else if (count != cols) {
      throw FormatError("csv: line " + std::to_string(line_no) + " has " +
                        std::to_string(count) + " fields, expected " +
                        std::to_string(cols));
    }
    ++rows;
  }
  if (rows == 0) throw FormatError("csv: no data rows");
  MatrixXd m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = values[r * cols + c];
  return m;
}

MatrixXd read_binary(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size())) {
    throw FormatError("binary matrix: file shorter than magic");
  }
  if (magic != kMagic) throw FormatError("binary matrix: bad magic");
  const std::uint64_t rows = get_u64(in);
  const std::uint64_t cols = get_u64(in);
  if (rows == 0 || cols == 0) throw FormatError("binary matrix: zero dimension");
  if (rows > (std::uint64_t{1} << 31) || cols > (std::uint64_t{1} << 31)) {
    throw FormatError("binary matrix: implausible dimensions");
  }
  MatrixXd m(rows, cols);
  for (std::uint64_t r = 0; r < rows; ++r) {
    for (std::uint64_t c = 0; c < cols; ++c) {
      const std::uint64_t bits = [&] {
        try {
          return get_u64(in);
        } catch (const FormatError&) {
          throw FormatError("binary matrix: truncated payload at entry (" +
                            std::to_string(r) + ", " + std::to_string(c) + ")");
        }
      }();
      m(r, c) = std::bit_cast<double>(bits);
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw FormatError("binary matrix: trailing bytes after payload");
  }
  return m;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

MatrixFormat format_for_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  return (ext == ".bin" || ext == ".sdm") ? MatrixFormat::kBinary
                                          : MatrixFormat::kCsv;
}

MatrixXd read_matrix(std::istream& in, MatrixFormat format) {
  return format == MatrixFormat::kCsv ? read_csv(in) : read_binary(in);
}

void write_matrix(std::ostream& out, const MatrixXd& m, MatrixFormat format) {
  if (format == MatrixFormat::kBinary) {
    out.write(kMagic.data(), kMagic.size());
    put_u64(out, static_cast<std::uint64_t>(m.rows()));
    put_u64(out, static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c)
        put_u64(out, std::bit_cast<std::uint64_t>(m(r, c)));
    return;
  }
  std::array<char, 32> buf{};
  std::string line;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    line.clear();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) line.push_back(',');
      const auto res = std::to_chars(buf.data(), buf.data() + buf.size(),
                                     m(r, c), std::chars_format::general, 17);
      line.append(buf.data(), res.ptr);
    }
    line.push_back('\n');
    out << line;
  }
}

MatrixXd load_matrix(const std::filesystem::path& path, MatrixFormat format) {
  auto in = open_in(path);
  return read_matrix(in, format);
}

void save_matrix(const std::filesystem::path& path, const MatrixXd& m,
                 MatrixFormat format) {
  auto out = open_out(path);
  write_matrix(out, m, format);
  if (!out) throw InputError("write failed for '" + path.string() + "'");
}

Labels read_labels(std::istream& in) {
  Labels labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty()) continue;
    int value = 0;
    const auto [ptr, ec] =
        std::from_chars(body.data(), body.data() + body.size(), value);
    if (ec != std::errc() || ptr != body.data() + body.size()) {
      throw ParseError("not an integer label: '" + std::string(body) + "'",
                       line_no, 1);
    }
    labels.push_back(value);
  }
  if (labels.empty()) throw FormatError("label file: no labels");
  return labels;
}

void write_labels(std::ostream& out, const Labels& labels) {
  for (const int l : labels) out << l << '\n';
}

Labels load_labels(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_labels(in);
}

void save_labels(const std::filesystem::path& path, const Labels& labels) {
  auto out = open_out(path);
  write_labels(out, labels);
  if (!out) throw InputError("write failed for '" + path.string() + "'");
}

}  // namespace dssc
