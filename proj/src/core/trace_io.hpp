#pragma once

#include <iosfwd>
#include <string>

#include "core/echo.hpp"

namespace loschmidt {

// CSV layout: '# key=value' provenance lines, then a 't,m11' header row and
// one row per sample. The JSON document carries the same content.
void save_trace_csv(const LETrace& trace, std::ostream& out);
void save_trace_csv(const LETrace& trace, const std::string& path);
LETrace load_trace_csv(std::istream& in);
LETrace load_trace_csv(const std::string& path);

void save_trace_json(const LETrace& trace, std::ostream& out);
void save_trace_json(const LETrace& trace, const std::string& path);
LETrace load_trace_json(std::istream& in);
LETrace load_trace_json(const std::string& path);

std::string format_double(double v); // %.17g, shared by all writers

} // namespace loschmidt
