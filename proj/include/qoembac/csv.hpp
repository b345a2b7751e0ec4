#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace qoembac::csv {

/// Shortest round-trip decimal form, independent of the global locale.
std::string num(double value);
std::string num(std::uint64_t value);
/// Fixed-point with `digits` decimals, locale independent.
std::string fixed(double value, int digits);

/// Writes comma-separated rows with a header; fields containing commas or quotes are quoted.
class Writer {
  public:
    Writer(const std::filesystem::path& path, std::initializer_list<std::string_view> header);
    Writer(const std::filesystem::path& path, const std::vector<std::string>& header);

    void row(const std::vector<std::string>& fields);
    void close();

  private:
    std::ofstream out_;
    std::size_t columns_;
};

/// Splits one CSV line on commas (no quoting support), trimming blanks around fields.
std::vector<std::string> split_line(std::string_view line);

}  // namespace qoembac::csv
