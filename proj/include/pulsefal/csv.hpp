#pragma once

#include <string>
#include <vector>

#include "pulsefal/signal.hpp"

namespace pulsefal::csv {

/// RFC 4180 field quoting: fields containing comma, quote, CR or LF are quoted.
std::string escape(const std::string& field);
std::string join_row(const std::vector<std::string>& fields);

/// Shortest round-trippable decimal; "inf", "-inf", "nan" for non-finite values.
std::string format_double(double v);

/// Splits CSV text into rows of fields (quoted fields supported).
std::vector<std::vector<std::string>> parse(const std::string& text);

/// Trace files: header `time,<channel>,...`, one row per grid instant.
Signal read_trace(const std::string& text);
Signal read_trace_file(const std::string& path);
std::string write_trace(const Signal& signal);

void write_file(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace pulsefal::csv
