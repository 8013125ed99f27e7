// Command-line front end: run the pipeline, generate scenarios, check rule
// packs and inspect snapshots.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fatigue/fatigue.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kInternalError = 2;

// Missing or unreadable input files are input errors, like malformed content.
class FileError : public fatigue::Error {
 public:
  using Error::Error;
};

std::string read_file(const fs::path& path, const char* what) {
  if (!fs::exists(path)) throw FileError(std::string(what) + " '" + path.string() + "': file not found");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError(std::string("cannot read ") + what + " '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fatigue::TraceFormat format_for(const fs::path& path) {
  const auto ext = path.extension().string();
  return ext == ".jsonl" || ext == ".json" ? fatigue::TraceFormat::jsonl : fatigue::TraceFormat::csv;
}

// Writes to `path`, or to stdout when the path is empty.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty()) return;
    if (const fs::path parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
    file_.open(path, std::ios::binary);
    if (!file_) throw FileError("cannot open '" + path + "' for writing");
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
  void finish() {
    stream().flush();
    if (!stream()) throw fatigue::Error("write failed");
  }

 private:
  std::ofstream file_;
};

struct RunArgs {
  std::string trace;
  std::string config;
  std::string out;
  std::string snapshots;
  std::string trace_id;
  bool verbatim = false;
};

int cmd_run(const RunArgs& a) {
  fatigue::PipelineConfig cfg;
  if (!a.config.empty()) cfg = fatigue::load_config(read_file(a.config, "config"), fs::path(a.config).parent_path());
  if (a.verbatim) cfg.verbatim_table1 = true;
  if (!a.snapshots.empty()) cfg.snapshots.directory = fs::path(a.snapshots);

  const auto frames = fatigue::parse_trace(read_file(a.trace, "trace"), format_for(a.trace));
  const fatigue::Pipeline pipeline(cfg);
  const std::string id = a.trace_id.empty() ? fs::path(a.trace).stem().string() : a.trace_id;

  Output out(a.out);
  std::size_t alerts = 0;
  const std::size_t windows = pipeline.run(
      frames,
      [&](const fatigue::WindowReport& r) {
        out.stream() << fatigue::report_to_json(r) << '\n';
        alerts += r.alert ? 1 : 0;
      },
      id);
  out.finish();
  std::cerr << windows << " windows, " << alerts << " alerts\n";
  return kOk;
}

int cmd_gen(const std::string& spec_path, const std::string& out_path) {
  const auto spec = fatigue::load_scenario(read_file(spec_path, "scenario spec"));
  const auto frames = fatigue::generate_scenario(spec);
  Output out(out_path);
  out.stream() << fatigue::serialize_trace(frames, format_for(out_path));
  out.finish();
  return kOk;
}

int cmd_rules_check(const std::string& pack_path) {
  const auto pack = fatigue::parse_rules(read_file(pack_path, "rule pack"));
  std::cout << pack.size() << (pack.size() == 1 ? " rule OK\n" : " rules OK\n");
  return kOk;
}

int cmd_snapshot_dump(const std::string& path) {
  std::cout << fatigue::describe_snapshot(fatigue::load_snapshot(read_file(path, "snapshot")));
  return kOk;
}

int cmd_config_show(const std::string& path) {
  fatigue::PipelineConfig cfg;
  if (!path.empty()) cfg = fatigue::load_config(read_file(path, "config"), fs::path(path).parent_path());
  std::cout << fatigue::config_to_json(cfg);
  return kOk;
}

int cmd_scheme_show(const std::string& path) {
  const auto scheme = path.empty() ? fatigue::default_scheme() : fatigue::load_scheme(read_file(path, "scheme"));
  std::cout << fatigue::scheme_to_json(scheme);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Knowledge-based driver fatigue detection"};
  app.set_version_flag("--version", std::string(fatigue::engine_version()));
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Process a trace and emit one JSONL report record per window");
  run_cmd->add_option("trace", run.trace, "Trace file (.csv or .jsonl)")->required();
  run_cmd->add_option("--config", run.config, "Pipeline config JSON");
  run_cmd->add_option("--out", run.out, "Report path (default: stdout)");
  run_cmd->add_option("--snapshots", run.snapshots, "Directory for knowledge snapshots");
  run_cmd->add_option("--trace-id", run.trace_id, "Name used in snapshot files (default: trace file stem)");
  run_cmd->add_flag("--verbatim-table1", run.verbatim, "Use the rule pack exactly as printed (MeanSWA in yaw rows)");

  std::string spec_path, gen_out;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic trace from a scenario spec");
  gen_cmd->add_option("spec", spec_path, "Scenario spec JSON")->required();
  gen_cmd->add_option("--out", gen_out, "Trace path, .csv or .jsonl (default: CSV on stdout)");

  std::string pack_path;
  auto* rules_cmd = app.add_subcommand("rules", "Rule pack tools");
  rules_cmd->require_subcommand(1);
  auto* check_cmd = rules_cmd->add_subcommand("check", "Parse and validate a rule pack");
  check_cmd->add_option("pack", pack_path, "Rule pack file")->required();

  std::string snapshot_path;
  auto* snap_cmd = app.add_subcommand("snapshot", "Knowledge snapshot tools");
  snap_cmd->require_subcommand(1);
  auto* dump_cmd = snap_cmd->add_subcommand("dump", "Pretty-print a snapshot");
  dump_cmd->add_option("file", snapshot_path, "Snapshot JSON")->required();

  std::string show_config, show_scheme;
  auto* config_cmd = app.add_subcommand("config", "Print the effective pipeline config");
  config_cmd->add_option("file", show_config, "Config JSON (default: built-in defaults)");
  auto* scheme_cmd = app.add_subcommand("scheme", "Print the effective qualification scheme");
  scheme_cmd->add_option("file", show_scheme, "Scheme JSON (default: built-in bands)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*gen_cmd) return cmd_gen(spec_path, gen_out);
    if (*check_cmd) return cmd_rules_check(pack_path);
    if (*dump_cmd) return cmd_snapshot_dump(snapshot_path);
    if (*config_cmd) return cmd_config_show(show_config);
    if (*scheme_cmd) return cmd_scheme_show(show_scheme);
  } catch (const fatigue::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
  return kInternalError;
}
