#include "commutekit/csv.hpp"

namespace commutekit {

CsvReader::CsvReader(const std::string& path) : path_(path), in_(path) {
  if (!in_) throw std::runtime_error("cannot open csv file: " + path);
  std::string line;
  if (!std::getline(in_, line)) throw std::runtime_error("empty csv file: " + path);
  ++line_;
  for (auto& f : split(line, ',')) header_.push_back(trim(f));
}

void CsvReader::require(const std::vector<std::string>& columns) {
  indices_.clear();
  for (const auto& c : columns) {
    int idx = -1;
    for (std::size_t i = 0; i < header_.size(); ++i)
      if (header_[i] == c) {
        idx = static_cast<int>(i);
        break;
      }
    if (idx < 0) throw std::runtime_error(path_ + ": missing required column '" + c + "'");
    indices_.push_back(idx);
  }
}

bool CsvReader::has_column(const std::string& name) const {
  for (const auto& h : header_)
    if (h == name) return true;
  return false;
}

bool CsvReader::next(std::vector<std::string>& row) {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto fields = split(t, ',');
    row.clear();
    for (int idx : indices_) {
      if (idx >= static_cast<int>(fields.size()))
        throw std::runtime_error(path_ + ":" + std::to_string(line_) + ": too few fields");
      row.push_back(trim(fields[idx]));
    }
    return true;
  }
  return false;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary), path_(path), width_(header.size()) {
  if (!out_) throw std::runtime_error("cannot write csv file: " + path);
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out_ << ',';
    out_ << header[i];
  }
  out_ << '\n';
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != width_)
    throw std::logic_error(path_ + ": row width mismatch");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << fields[i];
  }
  out_ << '\n';
}

void CsvWriter::close() {
  out_.flush();
  if (!out_) throw std::runtime_error("write failed: " + path_);
  out_.close();
}

}  // namespace commutekit
