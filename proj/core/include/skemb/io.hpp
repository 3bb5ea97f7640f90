#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>

#include "skemb/sketch.hpp"
#include "skemb/types.hpp"

namespace skemb {

// Shortest decimal form that round-trips (std::to_chars): parsing the text
// recovers the identical bits, and identical doubles print identical bytes,
// which is what makes file-level determinism contracts testable.
std::string format_double(double value);

// Strict parsing: the whole token must be consumed. `context` prefixes the
// InputFormatError message (callers pass "file:line").
std::uint64_t parse_u64(std::string_view token, std::string_view context);
double parse_double(std::string_view token, std::string_view context);

// Update-stream text format, one update per line:
//   "u v"     insert {u, v}
//   "+ u v"   insert
//   "- u v"   delete
// Blank lines and lines whose first token starts with '#' are skipped.
// Self-loops are rejected here, with the offending line number.
void for_each_update(std::istream& in, std::string_view source,
                     const std::function<void(const EdgeUpdate&)>& fn);
UpdateStream read_update_stream(std::istream& in,
                                std::string_view source = "<stream>");
UpdateStream read_update_stream_file(const std::string& path);

// Inserts print as "u v", deletes as "- u v". The text format carries unit
// deltas only; any other delta throws ParameterError.
void write_update_stream(std::ostream& out, const UpdateStream& stream);
void write_update_stream_file(const std::string& path, const UpdateStream& stream);

// Label files: one "vertex label" line per vertex. A valid file lists every
// vertex of [0, n) exactly once, in any order.
Partition read_labels(std::istream& in, std::string_view source = "<labels>");
Partition read_labels_file(const std::string& path);
void write_labels(std::ostream& out, const Partition& partition);
void write_labels_file(const std::string& path, const Partition& partition);

struct EmbeddingHeader {
  SketchKind kind = SketchKind::cst;
  std::uint64_t n = 0;
  std::uint32_t s = 0;
  double epsilon = 0.0;
  double c_const = 1.0;
  std::uint64_t seed = 0;
};

struct EmbeddingFile {
  EmbeddingHeader header;
  EmbeddingMatrix matrix;
};

// Embedding text format: magic line "skemb-embedding 1", the six header
// fields as "key value" lines in fixed order (kind, n, s, epsilon, c_const,
// seed), then n rows of s space-separated values.
void write_embedding(std::ostream& out, const EmbeddingHeader& header,
                     const EmbeddingMatrix& matrix);
void write_embedding_file(const std::string& path, const EmbeddingHeader& header,
                          const EmbeddingMatrix& matrix);
EmbeddingFile read_embedding(std::istream& in,
                             std::string_view source = "<embedding>");
EmbeddingFile read_embedding_file(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

}  // namespace skemb
