#include <sstream>

#include <json.hpp>

#include "fatigue/error.hpp"
#include "fatigue/kstore.hpp"
#include "text_util.hpp"

namespace fatigue {

namespace {

using nlohmann::json;

const json& field(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw DecodeError(path + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw DecodeError(path + ": missing key '" + key + "'");
  return *it;
}

std::string string_at(const json& v, const std::string& path) {
  if (!v.is_string()) throw DecodeError(path + ": expected a string");
  return v.get<std::string>();
}

double number_at(const json& v, const std::string& path) {
  if (!v.is_number()) throw DecodeError(path + ": expected a number");
  return v.get<double>();
}

const json& array_at(const json& v, const std::string& path, std::size_t arity = 0) {
  if (!v.is_array()) throw DecodeError(path + ": expected an array");
  if (arity != 0 && v.size() != arity) {
    throw DecodeError(path + ": expected " + std::to_string(arity) + " elements");
  }
  return v;
}

}  // namespace

std::string save_snapshot(const KnowledgeSnapshot& s) {
  const Taxonomy& tax = s.facts.taxonomy();

  json classes = json::array();
  for (const auto& c : tax.classes()) classes.push_back(c);
  json edges = json::array();
  for (const auto& [child, parent] : tax.edges()) edges.push_back({child, parent});

  json memberships = json::array();
  for (const auto& m : s.facts.memberships()) memberships.push_back({m.individual, m.class_label});
  json properties = json::array();
  for (const auto& [key, value] : s.facts.data_properties()) properties.push_back({key.first, key.second, value});

  json doc;
  doc["taxonomy"] = {{"classes", std::move(classes)}, {"subclass_of", std::move(edges)}};
  doc["memberships"] = std::move(memberships);
  doc["data_properties"] = std::move(properties);
  doc["meta"] = {
      {"trace_id", s.meta.trace_id},
      {"window", {s.meta.window_start, s.meta.window_end}},
      {"engine_version", s.meta.engine_version},
      {"timestamp", s.facts.timestamp()},
  };
  return doc.dump(2) + "\n";
}

KnowledgeSnapshot load_snapshot(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw DecodeError("snapshot parse error at byte " + std::to_string(e.byte) + ": " + e.what());
  }

  try {
    const json& tax_json = field(doc, "taxonomy", "$");
    auto taxonomy = std::make_shared<Taxonomy>();
    const json& classes = array_at(field(tax_json, "classes", "$.taxonomy"), "$.taxonomy.classes");
    for (std::size_t i = 0; i < classes.size(); ++i) {
      taxonomy->add_class(string_at(classes[i], "$.taxonomy.classes[" + std::to_string(i) + "]"));
    }
    const json& edges = array_at(field(tax_json, "subclass_of", "$.taxonomy"), "$.taxonomy.subclass_of");
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const std::string path = "$.taxonomy.subclass_of[" + std::to_string(i) + "]";
      const json& e = array_at(edges[i], path, 2);
      try {
        taxonomy->add_subclass(string_at(e[0], path), string_at(e[1], path));
      } catch (const Error& err) {
        throw DecodeError(path + ": " + err.what());
      }
    }

    const json& meta_json = field(doc, "meta", "$");
    SnapshotMeta meta;
    meta.trace_id = string_at(field(meta_json, "trace_id", "$.meta"), "$.meta.trace_id");
    meta.engine_version = string_at(field(meta_json, "engine_version", "$.meta"), "$.meta.engine_version");
    const json& window = array_at(field(meta_json, "window", "$.meta"), "$.meta.window", 2);
    meta.window_start = number_at(window[0], "$.meta.window[0]");
    meta.window_end = number_at(window[1], "$.meta.window[1]");
    const double timestamp = number_at(field(meta_json, "timestamp", "$.meta"), "$.meta.timestamp");

    FactBase facts(std::move(taxonomy), timestamp);
    const json& memberships = array_at(field(doc, "memberships", "$"), "$.memberships");
    for (std::size_t i = 0; i < memberships.size(); ++i) {
      const std::string path = "$.memberships[" + std::to_string(i) + "]";
      const json& m = array_at(memberships[i], path, 2);
      try {
        facts.insert(Membership{string_at(m[0], path), string_at(m[1], path)});
      } catch (const DecodeError&) {
        throw;
      } catch (const Error& err) {
        throw DecodeError(path + ": " + err.what());
      }
    }
    const json& properties = array_at(field(doc, "data_properties", "$"), "$.data_properties");
    for (std::size_t i = 0; i < properties.size(); ++i) {
      const std::string path = "$.data_properties[" + std::to_string(i) + "]";
      const json& p = array_at(properties[i], path, 3);
      try {
        facts.insert(DataProperty{string_at(p[0], path), string_at(p[1], path), number_at(p[2], path)});
      } catch (const DecodeError&) {
        throw;
      } catch (const Error& err) {
        throw DecodeError(path + ": " + err.what());
      }
    }
    return KnowledgeSnapshot{std::move(facts), std::move(meta)};
  } catch (const DecodeError&) {
    throw;
  } catch (const Error& err) {
    throw DecodeError(std::string("snapshot: ") + err.what());
  }
}

std::string describe_snapshot(const KnowledgeSnapshot& s) {
  std::ostringstream out;
  out << "trace:     " << s.meta.trace_id << "\n"
      << "window:    [" << text_util::format_double(s.meta.window_start) << ", "
      << text_util::format_double(s.meta.window_end) << ")\n"
      << "timestamp: " << text_util::format_double(s.facts.timestamp()) << "\n"
      << "engine:    " << s.meta.engine_version << "\n"
      << "taxonomy:  " << s.facts.taxonomy().classes().size() << " classes, "
      << s.facts.taxonomy().edges().size() << " subclass edges\n";
  out << "memberships (" << s.facts.memberships().size() << "):\n";
  for (const auto& m : s.facts.memberships()) out << "  " << m.individual << " : " << m.class_label << "\n";
  out << "data properties (" << s.facts.data_properties().size() << "):\n";
  for (const auto& [key, value] : s.facts.data_properties()) {
    out << "  " << key.first << "." << key.second << " = " << text_util::format_double(value) << "\n";
  }
  return out.str();
}

}  // namespace fatigue
