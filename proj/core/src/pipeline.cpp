#include "fatigue/pipeline.hpp"

#include <algorithm>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "text_util.hpp"

namespace fatigue {

namespace fs = std::filesystem;

AlertTracker::AlertTracker(AlertPolicy policy) : policy_(policy) {
  if (policy_.consecutive < 1) throw ArgumentError("alert policy needs at least one window");
}

bool AlertTracker::push(std::optional<Level> overall) {
  if (!overall || encode(*overall) < encode(policy_.threshold)) {
    run_ = 0;
    armed_ = true;
    return false;
  }
  ++run_;
  if (armed_ && run_ >= policy_.consecutive) {
    armed_ = false;
    return true;
  }
  return false;
}

std::vector<std::size_t> decide(std::span<const std::optional<Level>> overall, const AlertPolicy& policy) {
  AlertTracker tracker(policy);
  std::vector<std::size_t> alerts;
  for (std::size_t i = 0; i < overall.size(); ++i) {
    if (tracker.push(overall[i])) alerts.push_back(i);
  }
  return alerts;
}

std::vector<std::size_t> decide(std::span<const Level> overall, const AlertPolicy& policy) {
  std::vector<std::optional<Level>> wrapped(overall.begin(), overall.end());
  return decide(std::span<const std::optional<Level>>(wrapped), policy);
}

namespace {

std::string read_file(const fs::path& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DecodeError(std::string("cannot open ") + what + " '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

QualificationScheme scheme_for(const PipelineConfig& cfg) {
  return cfg.scheme_path ? load_scheme(read_file(*cfg.scheme_path, "scheme")) : default_scheme();
}

RulePack pack_for(const PipelineConfig& cfg) {
  return cfg.rules_path ? parse_rules(read_file(*cfg.rules_path, "rule pack")) : table1_pack(cfg.verbatim_table1);
}

struct Extracted {
  ExtractionResult result;
  std::exception_ptr failure;
};

Extracted extract_window(std::span<const SignalFrame> frames, const Window& w, const PipelineConfig& cfg) {
  Extracted out;
  try {
    out.result = extract_features(w, cfg.features);
    // PERCLOS uses its own longer trailing window ending with this one.
    out.result.features.perclos80.reset();
    const Window trailing = slice_window(frames, w.end_t - cfg.perclos_window, w.end_t);
    try {
      out.result.features.perclos80 = perclos(trailing, cfg.features.eye_closed_threshold);
    } catch (const MissingChannel&) {
    } catch (const Error& e) {
      out.result.issues.push_back(std::string("perclos: ") + e.what());
    }
  } catch (...) {
    out.failure = std::current_exception();
  }
  return out;
}

std::vector<Extracted> extract_all(std::span<const SignalFrame> frames, const std::vector<Window>& windows,
                                   const PipelineConfig& cfg) {
  std::vector<Extracted> out(windows.size());
  const std::size_t workers = std::min(cfg.threads, windows.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < windows.size(); ++i) out[i] = extract_window(frames, windows[i], cfg);
    return out;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t k = 0; k < workers; ++k) {
    pool.emplace_back([&, k] {
      for (std::size_t i = k; i < windows.size(); i += workers) out[i] = extract_window(frames, windows[i], cfg);
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

void write_snapshot(const fs::path& dir, std::string_view trace_id, const WindowReport& r, const FactBase& history,
                    const std::shared_ptr<const Taxonomy>& taxonomy) {
  FactBase fb(taxonomy, r.end);
  for (const auto& m : history.memberships()) fb.insert(m);
  for (const auto& [key, value] : history.data_properties()) fb.insert(DataProperty{key.first, key.second, value});
  const KnowledgeSnapshot snap{fb, {std::string(trace_id), r.start, r.end, std::string(engine_version())}};

  fs::create_directories(dir);
  const fs::path path = dir / (std::string(trace_id) + "_w" + std::to_string(r.index) + ".snapshot.json");
  std::ofstream out(path, std::ios::binary);
  out << save_snapshot(snap);
  if (!out) throw Error("cannot write snapshot '" + path.string() + "'");
}

}  // namespace

Pipeline::Pipeline(PipelineConfig cfg) : Pipeline(cfg, scheme_for(cfg), pack_for(cfg)) {}

Pipeline::Pipeline(PipelineConfig cfg, QualificationScheme scheme, RulePack pack)
    : cfg_(std::move(cfg)),
      scheme_(std::move(scheme)),
      pack_(std::move(pack)),
      taxonomy_(std::make_shared<const Taxonomy>(default_taxonomy())) {
  cfg_.validate();
  check_labels(scheme_, *taxonomy_);
}

std::size_t Pipeline::run(std::span<const SignalFrame> frames, const Sink& sink, std::string_view trace_id) const {
  const std::vector<Window> windows = make_windows(frames, cfg_.window_length, cfg_.window_stride);
  if (windows.empty()) return 0;
  std::vector<Extracted> extracted = extract_all(frames, windows, cfg_);

  AlertTracker tracker(cfg_.alert);
  FactBase history(taxonomy_);
  const auto& sources = default_fatigue_sources();

  for (std::size_t i = 0; i < windows.size(); ++i) {
    const Window& w = windows[i];
    if (extracted[i].failure) {
      try {
        std::rethrow_exception(extracted[i].failure);
      } catch (const Error& e) {
        throw WindowError(i, w.start_t, w.end_t, e.what());
      }
    }
    WindowReport r;
    r.index = i;
    r.start = w.start_t;
    r.end = w.end_t;
    r.features = std::move(extracted[i].result.features);
    r.degraded = std::move(extracted[i].result.issues);

    // Qualify feature by feature so one bad value only drops its own fact.
    for (const auto& field : feature_fields()) {
      if (!(r.features.*field.member)) continue;
      FeatureVector single;
      single.window_start = r.features.window_start;
      single.window_end = r.features.window_end;
      single.*field.member = r.features.*field.member;
      try {
        for (auto& f : qualify(single, scheme_, cfg_.profile)) r.facts.push_back(std::move(f));
      } catch (const Error& e) {
        r.degraded.push_back(std::string("qualify: ") + e.what());
      }
    }

    try {
      FactBase fb(taxonomy_, w.end_t);
      const std::string stamp = "@" + text_util::format_double(w.start_t);
      for (const auto& s : sources) fb.insert(Membership{s.name + stamp, s.anchor_class});
      for (const auto& f : r.facts) {
        fb.insert(Membership{f.individual, f.class_label});
        if (!f.property.empty()) fb.insert(DataProperty{f.individual, f.property, f.value});
      }
      InferenceResult inferred = infer(fb, pack_);
      r.fired_rules = std::move(inferred.log);
      r.levels = read_fatigue(inferred.facts, sources);
      if (!r.levels.empty()) {
        try {
          r.overall = fuse(r.levels, cfg_.fusion_weights, cfg_.fusion_cutoffs).level;
        } catch (const ArgumentError& e) {
          r.degraded.push_back(std::string("fusion: ") + e.what());
        }
      }
      for (const auto& m : inferred.facts.memberships()) history.insert(m);
      for (const auto& [key, value] : inferred.facts.data_properties()) {
        history.insert(DataProperty{key.first, key.second, value});
      }
    } catch (const Error& e) {
      throw WindowError(i, w.start_t, w.end_t, e.what());
    }
    r.alert = tracker.push(r.overall);

    if (cfg_.snapshots.directory && (i + 1) % cfg_.snapshots.cadence == 0) {
      write_snapshot(*cfg_.snapshots.directory, trace_id, r, history, taxonomy_);
    }
    sink(r);
  }
  return windows.size();
}

std::vector<WindowReport> Pipeline::run(std::span<const SignalFrame> frames, std::string_view trace_id) const {
  std::vector<WindowReport> out;
  run(frames, [&](const WindowReport& r) { out.push_back(r); }, trace_id);
  return out;
}

}  // namespace fatigue
