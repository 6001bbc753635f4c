#include "evspike/csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace evspike {

CsvWriter::CsvWriter(const std::string& path,
                     std::span<const std::string> columns,
                     const std::string& config_hash_hex)
    : out_(path, std::ios::trunc), columns_(columns.size()) {
  if (!out_) throw std::runtime_error("cannot open CSV file " + path);
  out_ << "# config=" << config_hash_hex << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out_ << ",";
    out_ << columns[i];
  }
  out_ << "\n";
}

std::string CsvWriter::format_value(const CsvValue& v) {
  if (std::holds_alternative<long long>(v)) {
    return std::to_string(std::get<long long>(v));
  }
  if (std::holds_alternative<double>(v)) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", std::get<double>(v));
    return buf;
  }
  return std::get<std::string>(v);
}

void CsvWriter::row(std::span<const CsvValue> values) {
  if (values.size() != columns_) {
    throw std::runtime_error("CSV row has " + std::to_string(values.size()) +
                             " cells, header has " + std::to_string(columns_));
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out_ << ",";
    out_ << format_value(values[i]);
  }
  out_ << "\n";
  out_.flush();
}

void CsvWriter::row(std::initializer_list<CsvValue> values) {
  row(std::span<const CsvValue>(values.begin(), values.size()));
}

}  // namespace evspike
