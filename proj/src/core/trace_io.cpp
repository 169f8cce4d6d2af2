#include "core/trace_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace loschmidt {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void save_trace_csv(const LETrace& trace, std::ostream& out) {
    for (const auto& [k, v] : trace.params) out << "# " << k << "=" << v << "\n";
    out << "t,m11\n";
    for (std::size_t i = 0; i < trace.times.size(); ++i)
        out << format_double(trace.times[i]) << "," << format_double(trace.m11[i]) << "\n";
}

void save_trace_csv(const LETrace& trace, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("save_trace_csv: cannot open " + path);
    save_trace_csv(trace, f);
}

LETrace load_trace_csv(std::istream& in) {
    LETrace trace;
    std::string line;
    bool saw_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string body = line.substr(1);
            const auto start = body.find_first_not_of(' ');
            if (start == std::string::npos) continue;
            body = body.substr(start);
            const auto eq = body.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error("load_trace_csv: malformed provenance line: " + line);
            trace.params.emplace_back(body.substr(0, eq), body.substr(eq + 1));
            continue;
        }
        if (!saw_header) {
            if (line != "t,m11") throw std::runtime_error("load_trace_csv: missing t,m11 header");
            saw_header = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("load_trace_csv: malformed data row: " + line);
        trace.times.push_back(std::stod(line.substr(0, comma)));
        trace.m11.push_back(std::stod(line.substr(comma + 1)));
    }
    if (!saw_header) throw std::runtime_error("load_trace_csv: no data header found");
    if (!trace.has_param("kind") || !trace.has_param("n_spins"))
        throw std::runtime_error("load_trace_csv: provenance header incomplete");
    trace.kind = trace.param("kind") == "forward" ? TraceKind::forward : TraceKind::echo;
    trace.complete = !trace.has_param("status") || trace.param("status") != "partial";
    return trace;
}

LETrace load_trace_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("load_trace_csv: cannot open " + path);
    return load_trace_csv(f);
}

void save_trace_json(const LETrace& trace, std::ostream& out) {
    nlohmann::ordered_json doc;
    nlohmann::ordered_json params;
    for (const auto& [k, v] : trace.params) params[k] = v;
    doc["params"] = params;
    doc["t"] = trace.times;
    doc["m11"] = trace.m11;
    out << doc.dump(2) << "\n";
}

void save_trace_json(const LETrace& trace, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("save_trace_json: cannot open " + path);
    save_trace_json(trace, f);
}

LETrace load_trace_json(std::istream& in) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::parse(in);
    LETrace trace;
    for (const auto& [k, v] : doc.at("params").items())
        trace.params.emplace_back(k, v.get<std::string>());
    trace.times = doc.at("t").get<std::vector<double>>();
    trace.m11 = doc.at("m11").get<std::vector<double>>();
    if (!trace.has_param("kind") || !trace.has_param("n_spins"))
        throw std::runtime_error("load_trace_json: provenance incomplete");
    trace.kind = trace.param("kind") == "forward" ? TraceKind::forward : TraceKind::echo;
    trace.complete = !trace.has_param("status") || trace.param("status") != "partial";
    return trace;
}

LETrace load_trace_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("load_trace_json: cannot open " + path);
    return load_trace_json(f);
}

} // namespace loschmidt
