#include "cv32rt/report.hpp"

namespace cv32rt {

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string md_field(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '|') out += '\\';
        out += c == '\n' ? ' ' : c;
    }
    return out;
}

std::vector<std::string> row(const ScenarioReport& r) {
    return {r.scenario,
            controller_name(r.controller),
            abi_name(r.abi),
            measurement_name(r.measurement),
            r.ok ? std::to_string(r.cycles) : "",
            r.ok ? format_breakdown(r.breakdown) : "error: " + r.error};
}

const std::vector<std::string> kHeader = {"scenario", "controller", "abi", "metric", "cycles", "breakdown"};

} // namespace

std::string format_breakdown(const std::vector<Phase>& phases) {
    std::string out;
    for (const auto& p : phases) {
        if (!out.empty()) out += ';';
        out += p.name + "=" + std::to_string(p.cycles);
    }
    return out;
}

std::string emit_report(const std::vector<ScenarioReport>& reports, ReportFormat format) {
    std::string out;
    if (format == ReportFormat::Csv) {
        auto line = [&](const std::vector<std::string>& f) {
            for (size_t i = 0; i < f.size(); ++i) {
                if (i) out += ',';
                out += csv_field(f[i]);
            }
            out += '\n';
        };
        line(kHeader);
        for (const auto& r : reports) line(row(r));
        return out;
    }
    auto line = [&](const std::vector<std::string>& f) {
        out += '|';
        for (const auto& x : f) out += ' ' + md_field(x) + " |";
        out += '\n';
    };
    line(kHeader);
    out += "|:---|:---|:---|:---|---:|:---|\n";
    for (const auto& r : reports) line(row(r));
    return out;
}

} // namespace cv32rt
