#include "pulsefal/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pulsefal::csv {

std::string escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string join_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += escape(fields[i]);
    }
    return out + "\n";
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw std::runtime_error("number formatting failed");
    return std::string(buf, end);
}

std::vector<std::vector<std::string>> parse(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false, any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"': quoted = true; any = true; break;
            case ',':
                row.push_back(std::move(field));
                field.clear();
                any = true;
                break;
            case '\r': break;
            case '\n':
                if (any || !field.empty()) {
                    row.push_back(std::move(field));
                    rows.push_back(std::move(row));
                }
                row.clear();
                field.clear();
                any = false;
                break;
            default: field += c; any = true;
        }
    }
    if (quoted) throw std::runtime_error("unterminated quoted CSV field");
    if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

double to_number(const std::string& s, std::size_t row, std::size_t col) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
    if (s.empty() || used != s.size())
        throw std::runtime_error("trace row " + std::to_string(row) + ", column " + std::to_string(col) +
                                 ": '" + s + "' is not a number");
    return v;
}

}  // namespace

Signal read_trace(const std::string& text) {
    const auto rows = parse(text);
    if (rows.empty()) throw std::runtime_error("trace file is empty");
    const auto& header = rows.front();
    if (header.empty() || header.front() != "time") throw std::runtime_error("trace header must start with 'time'");
    std::vector<double> times;
    std::vector<std::vector<double>> channels(header.size() - 1);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != header.size())
            throw std::runtime_error("trace row " + std::to_string(r + 1) + " has the wrong number of fields");
        times.push_back(to_number(rows[r][0], r + 1, 1));
        for (std::size_t c = 1; c < header.size(); ++c) channels[c - 1].push_back(to_number(rows[r][c], r + 1, c + 1));
    }
    return Signal(std::move(times), std::move(channels), {header.begin() + 1, header.end()});
}

Signal read_trace_file(const std::string& path) { return read_trace(read_file(path)); }

std::string write_trace(const Signal& signal) {
    std::vector<std::string> header{"time"};
    for (const auto& n : signal.channel_names()) header.push_back(n);
    std::string out = join_row(header);
    for (std::size_t k = 0; k < signal.size(); ++k) {
        std::vector<std::string> row{format_double(signal.times()[k])};
        for (std::size_t c = 0; c < signal.channel_count(); ++c) row.push_back(format_double(signal.channel(c)[k]));
        out += join_row(row);
    }
    return out;
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << contents;
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace pulsefal::csv
