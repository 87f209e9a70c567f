#include "shmcva/csv.hpp"

#include "shmcva/error.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace shmcva::csv {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string> split(std::string_view line)
{
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        fields.emplace_back(trim(line.substr(start, pos - start)));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return fields;
}

std::string where(const Table& t, std::size_t line)
{
    return t.label + " (" + t.path.string() + ") line " + std::to_string(line);
}

} // namespace

std::string format_double(double value)
{
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), res.ptr);
}

std::string format_scaled(double value, int shift)
{
    if (!std::isfinite(value) || value == 0.0)
        return format_double(value);

    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                   std::chars_format::scientific);
    std::string_view sci(buf.data(), static_cast<std::size_t>(res.ptr - buf.data()));

    std::string out;
    if (sci.front() == '-') {
        out.push_back('-');
        sci.remove_prefix(1);
    }
    const auto e_pos = sci.find('e');
    std::string digits;
    for (char c : sci.substr(0, e_pos))
        if (c != '.')
            digits.push_back(c);
    int exponent = 0;
    const auto exp_text = sci.substr(e_pos + 1);
    std::from_chars(exp_text.data() + (exp_text.front() == '+' ? 1 : 0),
                    exp_text.data() + exp_text.size(), exponent);

    // value = d1.d2d3... x 10^exponent; integer part has `lead` digits
    const int lead = exponent + shift + 1;
    const int n = static_cast<int>(digits.size());
    if (lead <= 0) {
        out += "0.";
        out.append(static_cast<std::size_t>(-lead), '0');
        out += digits;
    } else if (lead >= n) {
        out += digits;
        out.append(static_cast<std::size_t>(lead - n), '0');
    } else {
        out += digits.substr(0, static_cast<std::size_t>(lead));
        out += '.';
        out += digits.substr(static_cast<std::size_t>(lead));
    }
    return out;
}

std::optional<double> parse_scaled(std::string_view text, int shift)
{
    text = trim(text);
    if (!text.empty() && text.front() == '+')
        text.remove_prefix(1);
    if (text.empty())
        return std::nullopt;

    std::string mantissa;
    long exponent = 0;
    const auto e_pos = text.find_first_of("eE");
    if (e_pos == std::string_view::npos) {
        mantissa = std::string(text);
    } else {
        mantissa = std::string(text.substr(0, e_pos));
        auto exp_text = text.substr(e_pos + 1);
        if (!exp_text.empty() && exp_text.front() == '+')
            exp_text.remove_prefix(1);
        const auto r = std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), exponent);
        if (r.ec != std::errc{} || r.ptr != exp_text.data() + exp_text.size())
            return std::nullopt;
    }
    if (mantissa.empty() || mantissa.find_first_of("0123456789") == std::string::npos)
        return std::nullopt;
    for (char c : mantissa)
        if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-'))
            return std::nullopt;

    const std::string full = mantissa + "e" + std::to_string(exponent - shift);
    double value = 0.0;
    const auto r = std::from_chars(full.data(), full.data() + full.size(), value);
    if (r.ec != std::errc{} || r.ptr != full.data() + full.size())
        return std::nullopt;
    return value;
}

Table read(const std::filesystem::path& path, const std::vector<std::string>& expected_header,
           std::string_view label)
{
    Table table;
    table.label = std::string(label);
    table.path = path;

    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::MissingFile,
                    table.label + ": cannot open '" + path.string() + "'");

    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty())
            continue;
        auto fields = split(line);
        if (!have_header) {
            if (line_no == 1 && !fields.empty() && fields[0].rfind("\xEF\xBB\xBF", 0) == 0)
                fields[0].erase(0, 3);
            if (fields != expected_header) {
                std::string expected;
                for (const auto& h : expected_header)
                    expected += (expected.empty() ? "" : ",") + h;
                throw Error(ErrorCode::SchemaViolation,
                            where(table, line_no) + ": header must be '" + expected + "'");
            }
            table.header = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != expected_header.size())
            throw Error(ErrorCode::SchemaViolation,
                        where(table, line_no) + ": expected " +
                            std::to_string(expected_header.size()) + " fields, got " +
                            std::to_string(fields.size()));
        table.rows.push_back(std::move(fields));
        table.line_numbers.push_back(line_no);
    }
    if (!have_header)
        throw Error(ErrorCode::SchemaViolation, table.label + " (" + path.string() + "): empty file");
    return table;
}

double number(const Table& table, std::size_t row, std::size_t col, int shift)
{
    const auto value = parse_scaled(table.rows.at(row).at(col), shift);
    if (!value || !std::isfinite(*value))
        throw Error(ErrorCode::SchemaViolation,
                    where(table, table.line_numbers.at(row)) + ": column '" + table.header.at(col) +
                        "' is not a finite number: '" + table.rows[row][col] + "'");
    return *value;
}

void write(const std::filesystem::path& path, const std::vector<std::string>& header,
           const std::vector<std::vector<std::string>>& rows)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::InvalidConfig, "cannot write '" + path.string() + "'");
    auto emit = [&out](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i)
            out << (i ? "," : "") << fields[i];
        out << '\n';
    };
    emit(header);
    for (const auto& r : rows)
        emit(r);
}

} // namespace shmcva::csv
