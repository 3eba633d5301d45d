#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "cv32rt/clic.hpp"
#include "cv32rt/fastirq.hpp"
#include "cv32rt/memory.hpp"
#include "cv32rt/report.hpp"
#include "cv32rt/scenario.hpp"
#include "cv32rt/sweep.hpp"

namespace fs = std::filesystem;
using namespace cv32rt;

namespace {

struct CliError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CliConfig {
    std::string scenario;
    std::string out;
    std::string trace = "events";
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    bool force = false;
    std::string abi = "I";
    std::string kind = "caller-save";
};

TraceLevel trace_level(const std::string& s) {
    if (s == "off") return TraceLevel::Off;
    if (s == "events") return TraceLevel::Events;
    return TraceLevel::Full;
}

std::vector<TraceEvent> filter_trace(const std::vector<TraceEvent>& t, TraceLevel level) {
    if (level == TraceLevel::Full) return t;
    std::vector<TraceEvent> out;
    if (level == TraceLevel::Off) return out;
    for (const auto& e : t)
        if (!is_pipeline_event(e.kind)) out.push_back(e);
    return out;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw CliError("cannot create output directory " + dir.string());
}

// Refuses to replace an existing file unless forced.
void write_file(const fs::path& path, const std::string& text, bool force) {
    if (fs::exists(path) && !force) throw CliError(path.string() + " exists; pass --force to overwrite");
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw CliError("cannot write " + path.string());
    f << text;
    if (!f) throw CliError("write failed: " + path.string());
}

std::vector<Scenario> load_scenarios(const std::string& where) {
    if (where.empty()) return acceptance_scenarios();
    fs::path p(where);
    if (!fs::exists(p)) throw CliError("scenario path not found: " + where);
    if (!fs::is_directory(p)) return {load_scenario_file(where)};
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(p))
        if (e.is_regular_file() && e.path().extension() == ".cfg") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<Scenario> out;
    for (const auto& f : files) out.push_back(load_scenario_file(f.string()));
    return out;
}

void write_traces(const fs::path& dir, const std::vector<ScenarioReport>& reports, TraceLevel level, bool force) {
    if (level == TraceLevel::Off) return;
    ensure_dir(dir);
    for (const auto& r : reports)
        write_file(dir / (r.scenario + ".trace"), format_trace(filter_trace(r.trace, level)), force);
}

int cmd_run(const CliConfig& c) {
    if (c.scenario.empty()) throw CliError("run needs --scenario");
    Scenario s = load_scenario_file(c.scenario);
    ScenarioReport r = run_scenario(s);
    std::string csv = emit_report({r}, ReportFormat::Csv);
    std::cout << csv;
    if (!c.out.empty()) {
        fs::path dir(c.out);
        ensure_dir(dir);
        write_file(dir / (s.name + ".csv"), csv, c.force);
        write_traces(dir, {r}, trace_level(c.trace), c.force);
    }
    if (!r.ok) {
        std::cerr << "error: " << s.name << ": " << r.error << "\n";
        return 1;
    }
    return 0;
}

int cmd_sweep(const CliConfig& c) {
    std::vector<Scenario> scenarios = load_scenarios(c.scenario);
    std::vector<ScenarioReport> reports = run_sweep(scenarios, c.jobs);
    std::string csv = emit_report(reports, ReportFormat::Csv);
    fs::path dir(c.out.empty() ? "results" : c.out);
    ensure_dir(dir);
    write_file(dir / "results.csv", csv, c.force);
    write_file(dir / "results.md", emit_report(reports, ReportFormat::Markdown), c.force);
    write_traces(dir / "traces", reports, trace_level(c.trace), c.force);

    int rc = 0;
    for (const auto& r : reports) {
        if (!r.ok) {
            std::cerr << "error: " << r.scenario << ": " << r.error << "\n";
            rc = 1;
        }
    }
    auto bands = evaluate_bands(reports);
    std::cout << format_bands(bands);
    std::cout << reports.size() << " scenarios, results in " << dir.string() << "\n";
    if (!all_pass(bands)) rc = 1;
    return rc;
}

int cmd_dump_map(const CliConfig& c) {
    char base[16];
    std::snprintf(base, sizeof base, "0x%08x", map::kClicBase);
    std::string text = "# Address map\n\n" + address_map_table(AddressMap::default_map(WaitStates{})) +
                       "\n# Interrupt controller registers\n\nOffsets are relative to the controller base " + base +
                       ". Shown for 64 lines.\n\n" + clic_register_table(64);
    if (c.out.empty()) std::cout << text;
    else write_file(c.out, text, c.force);
    return 0;
}

int cmd_dump_frame(const CliConfig& c) {
    Abi abi = c.abi == "E" ? Abi::E : Abi::I;
    FrameKind kind = c.kind == "full" ? FrameKind::Full : FrameKind::CallerSave;
    std::string text = frame_table(abi, kind);
    if (c.out.empty()) std::cout << text;
    else write_file(c.out, text, c.force);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cv32rt: cycle-level interrupt latency simulator"};
    app.require_subcommand(1);
    CliConfig c;
    auto trace_check = CLI::IsMember({"off", "events", "full"});

    auto* run = app.add_subcommand("run", "Run one scenario file and print its CSV row");
    run->add_option("--scenario", c.scenario, "Scenario file (.cfg)")->required();
    run->add_option("--out", c.out, "Directory for the CSV row and trace");
    run->add_option("--trace", c.trace, "Trace verbosity")->check(trace_check);
    run->add_flag("--force", c.force, "Overwrite existing outputs");

    auto* sweep = app.add_subcommand("sweep", "Run the acceptance sweep and check the bands");
    sweep->add_option("--scenario", c.scenario, "Scenario file or directory of .cfg files (default: built-in set)");
    sweep->add_option("--out", c.out, "Output directory (default: results)");
    sweep->add_option("--trace", c.trace, "Trace verbosity")->check(trace_check);
    sweep->add_option("--jobs", c.jobs, "Parallel simulators")->check(CLI::Range(1u, 256u));
    sweep->add_flag("--force", c.force, "Overwrite existing outputs");

    auto* dmap = app.add_subcommand("dump-map", "Print the address map and controller registers");
    dmap->add_option("--out", c.out, "Output file");
    dmap->add_flag("--force", c.force, "Overwrite an existing file");

    auto* dframe = app.add_subcommand("dump-frame", "Print the hardware save frame layout");
    dframe->add_option("--abi", c.abi, "I or E")->check(CLI::IsMember({"I", "E"}));
    dframe->add_option("--kind", c.kind, "caller-save or full")->check(CLI::IsMember({"caller-save", "full"}));
    dframe->add_option("--out", c.out, "Output file");
    dframe->add_flag("--force", c.force, "Overwrite an existing file");

    CLI11_PARSE(app, argc, argv);
    try {
        if (run->parsed()) return cmd_run(c);
        if (sweep->parsed()) return cmd_sweep(c);
        if (dmap->parsed()) return cmd_dump_map(c);
        return cmd_dump_frame(c);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
    } catch (const CliError& e) {
        std::cerr << "error: " << e.what() << "\n";
    }
    return 2;
}
