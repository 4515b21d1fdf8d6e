#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace flatcrit {

/// Machine-readable run report, emitted next to the human-readable text.
/// Every numeric output carries its unit and, where relevant, the horizon or
/// tolerance it was computed with. Floats are serialized with 17 significant
/// digits; key order is fixed so reports are diffable.
struct RunReport {
    struct Output {
        std::string name;
        double value = 0;
        std::string unit;     // "flat-length", "dimensionless", ...
        std::string context;  // e.g. "T=5", "tol=1e-12"
    };

    std::string command;
    std::string inputs_digest;
    std::vector<Output> outputs;
    std::vector<std::pair<std::string, std::string>> notes;  // qualitative outputs
    std::vector<std::string> warnings;

    void add(const std::string& name, double value, const std::string& unit,
             const std::string& context = "") {
        outputs.push_back({name, value, unit, context});
    }
};

std::string report_to_json(const RunReport& report);

/// FNV-1a digest of the raw inputs (files + flags), for citable runs.
std::string fnv1a_hex(const std::string& bytes);

std::string json_escape(const std::string& s);
std::string format_double17(double v);

}  // namespace flatcrit
