#include "skemb/io.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <utility>
#include <vector>

#include "skemb/error.hpp"

namespace skemb {
namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

bool next_line(std::istream& in, std::string& line, std::uint64_t& line_no) {
  if (!std::getline(in, line)) return false;
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

std::string at(std::string_view source, std::uint64_t line_no) {
  return std::string(source) + ":" + std::to_string(line_no);
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputFormatError("cannot open " + path + " for reading");
  return in;
}

template <typename WriteFn>
void to_file(const std::string& path, WriteFn&& write) {
  std::ofstream out(path);
  if (!out) throw InputFormatError("cannot open " + path + " for writing");
  write(out);
  out.flush();
  if (!out) throw InputFormatError("failed while writing " + path);
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::uint64_t parse_u64(std::string_view token, std::string_view context) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw InputFormatError(std::string(context) + ": expected unsigned integer, got '" +
                           std::string(token) + "'");
  return value;
}

double parse_double(std::string_view token, std::string_view context) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw InputFormatError(std::string(context) + ": expected real number, got '" +
                           std::string(token) + "'");
  return value;
}

void for_each_update(std::istream& in, std::string_view source,
                     const std::function<void(const EdgeUpdate&)>& fn) {
  std::string line;
  std::uint64_t line_no = 0;
  while (next_line(in, line, line_no)) {
    auto tokens = split_ws(line);
    if (tokens.empty() || tokens[0].front() == '#') continue;
    std::int64_t delta = 1;
    std::size_t first = 0;
    if (tokens[0] == "+") {
      first = 1;
    } else if (tokens[0] == "-") {
      delta = -1;
      first = 1;
    }
    if (tokens.size() != first + 2)
      throw InputFormatError(at(source, line_no) +
                             ": expected 'u v', '+ u v', or '- u v'");
    std::uint64_t u = parse_u64(tokens[first], at(source, line_no));
    std::uint64_t v = parse_u64(tokens[first + 1], at(source, line_no));
    if (u == v)
      throw InputFormatError(at(source, line_no) + ": self-loop on vertex " +
                             std::to_string(u));
    fn({u, v, delta});
  }
}

UpdateStream read_update_stream(std::istream& in, std::string_view source) {
  UpdateStream stream;
  for_each_update(in, source, [&](const EdgeUpdate& u) { stream.push_back(u); });
  return stream;
}

UpdateStream read_update_stream_file(const std::string& path) {
  std::ifstream in = open_input(path);
  return read_update_stream(in, path);
}

void write_update_stream(std::ostream& out, const UpdateStream& stream) {
  for (const EdgeUpdate& u : stream) {
    if (u.delta == 1) {
      out << u.u << ' ' << u.v << '\n';
    } else if (u.delta == -1) {
      out << "- " << u.u << ' ' << u.v << '\n';
    } else {
      throw ParameterError("write_update_stream: text format carries unit deltas, got " +
                           std::to_string(u.delta));
    }
  }
}

void write_update_stream_file(const std::string& path, const UpdateStream& stream) {
  to_file(path, [&](std::ostream& out) { write_update_stream(out, stream); });
}

Partition read_labels(std::istream& in, std::string_view source) {
  struct Entry {
    std::uint64_t vertex;
    std::uint32_t label;
    std::uint64_t line_no;
  };
  std::vector<Entry> entries;
  std::string line;
  std::uint64_t line_no = 0;
  while (next_line(in, line, line_no)) {
    auto tokens = split_ws(line);
    if (tokens.empty() || tokens[0].front() == '#') continue;
    if (tokens.size() != 2)
      throw InputFormatError(at(source, line_no) + ": expected 'vertex label'");
    std::uint64_t vertex = parse_u64(tokens[0], at(source, line_no));
    std::uint64_t label = parse_u64(tokens[1], at(source, line_no));
    if (label > std::numeric_limits<std::uint32_t>::max())
      throw InputFormatError(at(source, line_no) + ": label too large");
    entries.push_back({vertex, static_cast<std::uint32_t>(label), line_no});
  }

  if (entries.empty())
    throw InputFormatError(std::string(source) + ": no label lines");
  std::uint64_t n = entries.size();
  Partition partition;
  partition.labels.resize(n);
  std::vector<char> seen(n, 0);
  for (const Entry& e : entries) {
    if (e.vertex >= n)
      throw InputFormatError(at(source, e.line_no) + ": vertex " +
                             std::to_string(e.vertex) + " outside [0, " +
                             std::to_string(n) + ") implied by the line count");
    if (seen[e.vertex])
      throw InputFormatError(at(source, e.line_no) + ": duplicate vertex " +
                             std::to_string(e.vertex));
    seen[e.vertex] = 1;
    partition.labels[e.vertex] = e.label;
  }
  return partition;
}

Partition read_labels_file(const std::string& path) {
  std::ifstream in = open_input(path);
  return read_labels(in, path);
}

void write_labels(std::ostream& out, const Partition& partition) {
  for (std::uint64_t v = 0; v < partition.size(); ++v)
    out << v << ' ' << partition.labels[v] << '\n';
}

void write_labels_file(const std::string& path, const Partition& partition) {
  to_file(path, [&](std::ostream& out) { write_labels(out, partition); });
}

void write_embedding(std::ostream& out, const EmbeddingHeader& header,
                     const EmbeddingMatrix& matrix) {
  if (matrix.rows != header.n || matrix.cols != header.s)
    throw ParameterError("write_embedding: header shape (" +
                         std::to_string(header.n) + " x " + std::to_string(header.s) +
                         ") does not match matrix (" + std::to_string(matrix.rows) +
                         " x " + std::to_string(matrix.cols) + ")");
  out << "skemb-embedding 1\n";
  out << "kind " << to_string(header.kind) << '\n';
  out << "n " << header.n << '\n';
  out << "s " << header.s << '\n';
  out << "epsilon " << format_double(header.epsilon) << '\n';
  out << "c_const " << format_double(header.c_const) << '\n';
  out << "seed " << header.seed << '\n';
  for (std::uint64_t i = 0; i < matrix.rows; ++i) {
    auto row = matrix.row(i);
    for (std::uint32_t j = 0; j < matrix.cols; ++j) {
      if (j != 0) out << ' ';
      out << format_double(row[j]);
    }
    out << '\n';
  }
}

void write_embedding_file(const std::string& path, const EmbeddingHeader& header,
                          const EmbeddingMatrix& matrix) {
  to_file(path, [&](std::ostream& out) { write_embedding(out, header, matrix); });
}

namespace {

std::string_view expect_field(const std::vector<std::string_view>& tokens,
                              std::string_view key, std::string_view source,
                              std::uint64_t line_no) {
  if (tokens.size() != 2 || tokens[0] != key)
    throw InputFormatError(at(source, line_no) + ": expected '" +
                           std::string(key) + " <value>'");
  return tokens[1];
}

}  // namespace

EmbeddingFile read_embedding(std::istream& in, std::string_view source) {
  std::string line;
  std::uint64_t line_no = 0;

  auto read_tokens = [&]() {
    if (!next_line(in, line, line_no))
      throw InputFormatError(at(source, line_no + 1) + ": unexpected end of file");
    return split_ws(line);
  };

  auto magic = read_tokens();
  if (magic.size() != 2 || magic[0] != "skemb-embedding" || magic[1] != "1")
    throw InputFormatError(at(source, line_no) +
                           ": not a skemb embedding file (bad magic line)");

  EmbeddingFile file;
  std::string_view kind = expect_field(read_tokens(), "kind", source, line_no);
  file.header.kind = sketch_kind_from_string(kind);
  file.header.n = parse_u64(expect_field(read_tokens(), "n", source, line_no),
                            at(source, line_no));
  std::uint64_t s = parse_u64(expect_field(read_tokens(), "s", source, line_no),
                              at(source, line_no));
  if (s > std::numeric_limits<std::uint32_t>::max())
    throw InputFormatError(at(source, line_no) + ": sketch dimension too large");
  file.header.s = static_cast<std::uint32_t>(s);
  file.header.epsilon = parse_double(
      expect_field(read_tokens(), "epsilon", source, line_no), at(source, line_no));
  file.header.c_const = parse_double(
      expect_field(read_tokens(), "c_const", source, line_no), at(source, line_no));
  file.header.seed = parse_u64(expect_field(read_tokens(), "seed", source, line_no),
                               at(source, line_no));

  file.matrix = EmbeddingMatrix(file.header.n, file.header.s);
  for (std::uint64_t i = 0; i < file.header.n; ++i) {
    auto tokens = read_tokens();
    if (tokens.size() != file.header.s)
      throw InputFormatError(at(source, line_no) + ": expected " +
                             std::to_string(file.header.s) + " values, got " +
                             std::to_string(tokens.size()));
    auto row = file.matrix.row(i);
    for (std::uint32_t j = 0; j < file.header.s; ++j)
      row[j] = parse_double(tokens[j], at(source, line_no));
  }
  while (next_line(in, line, line_no)) {
    if (!split_ws(line).empty())
      throw InputFormatError(at(source, line_no) + ": trailing data after " +
                             std::to_string(file.header.n) + " rows");
  }
  return file;
}

EmbeddingFile read_embedding_file(const std::string& path) {
  std::ifstream in = open_input(path);
  return read_embedding(in, path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in = open_input(path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, std::string_view content) {
  to_file(path, [&](std::ostream& out) { out << content; });
}

}  // namespace skemb
