#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace grushin {

// Shortest round-trip decimal for a double (printf %.17g).
std::string format_double(double x);

// FNV-1a 64-bit over the bytes of a string; used to stamp outputs with a
// hash of the canonical configuration they were produced from.
std::uint64_t fnv1a(const std::string& bytes);

std::string hex64(std::uint64_t v);

// A CSV table with '#'-prefixed metadata lines before the header row.
struct CsvTable {
  std::vector<std::string> meta;    // written as "# key=value"
  std::vector<std::string> header;  // column names
  std::vector<std::vector<std::string>> rows;

  void add_meta(const std::string& key, const std::string& value);
  void add_row(const std::vector<double>& values);
  std::string to_string() const;
};

// Writes to a temp file in the same directory, then renames over the
// target, so readers never observe a partial file.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace grushin
