#include "flatcrit/report.hpp"

#include <cstdio>
#include <sstream>

namespace flatcrit {

std::string format_double17(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

std::string report_to_json(const RunReport& r) {
    std::ostringstream out;
    out << "{\n";
    out << "  \"command\": \"" << json_escape(r.command) << "\",\n";
    out << "  \"inputs_digest\": \"" << json_escape(r.inputs_digest) << "\",\n";
    out << "  \"outputs\": [";
    for (size_t i = 0; i < r.outputs.size(); ++i) {
        const auto& o = r.outputs[i];
        out << (i ? ",\n    " : "\n    ");
        out << "{\"name\": \"" << json_escape(o.name) << "\", \"value\": "
            << format_double17(o.value) << ", \"unit\": \"" << json_escape(o.unit) << "\"";
        if (!o.context.empty()) out << ", \"context\": \"" << json_escape(o.context) << "\"";
        out << "}";
    }
    out << (r.outputs.empty() ? "],\n" : "\n  ],\n");
    out << "  \"notes\": {";
    for (size_t i = 0; i < r.notes.size(); ++i) {
        out << (i ? ",\n    " : "\n    ");
        out << "\"" << json_escape(r.notes[i].first) << "\": \""
            << json_escape(r.notes[i].second) << "\"";
    }
    out << (r.notes.empty() ? "},\n" : "\n  },\n");
    out << "  \"warnings\": [";
    for (size_t i = 0; i < r.warnings.size(); ++i)
        out << (i ? ", " : "") << "\"" << json_escape(r.warnings[i]) << "\"";
    out << "]\n}\n";
    return out.str();
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace flatcrit
