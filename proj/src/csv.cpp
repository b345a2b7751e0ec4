#include "qoembac/csv.hpp"

#include "qoembac/error.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace qoembac::csv {

std::string num(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), end);
}

std::string num(std::uint64_t value) { return std::to_string(value); }

std::string fixed(double value, int digits) {
    if (!std::isfinite(value)) return num(value);
    std::array<char, 128> buf{};
    auto [end, ec] =
        std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::fixed, digits);
    return std::string(buf.data(), end);
}

Writer::Writer(const std::filesystem::path& path, std::initializer_list<std::string_view> header)
    : out_(path, std::ios::binary | std::ios::trunc), columns_(header.size()) {
    if (!out_) throw Error("cannot write '" + path.string() + "'");
    bool first = true;
    for (auto h : header) {
        if (!first) out_ << ',';
        out_ << h;
        first = false;
    }
    out_ << '\n';
}

Writer::Writer(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary | std::ios::trunc), columns_(header.size()) {
    if (!out_) throw Error("cannot write '" + path.string() + "'");
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
}

void Writer::row(const std::vector<std::string>& fields) {
    if (fields.size() != columns_) throw Error("CSV row has the wrong number of fields");
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << ',';
        const auto& f = fields[i];
        if (f.find_first_of(",\"\n") == std::string::npos) {
            out_ << f;
        } else {
            out_ << '"';
            for (char c : f) {
                if (c == '"') out_ << '"';
                out_ << c;
            }
            out_ << '"';
        }
    }
    out_ << '\n';
}

void Writer::close() { out_.close(); }

std::vector<std::string> split_line(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        auto field = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
        const auto b = field.find_first_not_of(" \t\r");
        const auto e = field.find_last_not_of(" \t\r");
        out.emplace_back(b == std::string_view::npos ? std::string_view{} : field.substr(b, e - b + 1));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace qoembac::csv
