#pragma once

#include <fstream>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace evspike {

using CsvValue = std::variant<long long, double, std::string>;

// CSV with a leading `# config=<hash>` comment, a column-name line, and
// numeric cells printed to 9 significant digits.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, std::span<const std::string> columns,
            const std::string& config_hash_hex);

  void row(std::span<const CsvValue> values);
  void row(std::initializer_list<CsvValue> values);

  static std::string format_value(const CsvValue& v);

 private:
  std::ofstream out_;
  std::size_t columns_ = 0;
};

}  // namespace evspike
