#pragma once

#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "commutekit/util.hpp"

namespace commutekit {

// Minimal header-mapped CSV reader for the fixed schemas this toolkit consumes.
// Fields are plain (no quoting); ids are opaque strings without commas.
class CsvReader {
 public:
  explicit CsvReader(const std::string& path);

  // Resolves required column names against the header; throws if any is missing.
  void require(const std::vector<std::string>& columns);

  // Returns false at EOF. Blank lines are skipped. `row` holds the
  // required columns in the order given to require().
  bool next(std::vector<std::string>& row);

  int line_number() const { return line_; }
  const std::string& path() const { return path_; }
  // Raw access for optional columns.
  bool has_column(const std::string& name) const;

 private:
  std::string path_;
  std::ifstream in_;
  std::vector<std::string> header_;
  std::vector<int> indices_;
  int line_ = 0;
};

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& fields);
  void close();

 private:
  std::ofstream out_;
  std::string path_;
  std::size_t width_;
};

}  // namespace commutekit
