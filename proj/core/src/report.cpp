#include <json.hpp>

#include "fatigue/pipeline.hpp"

namespace fatigue {

std::string report_to_json(const WindowReport& r) {
  using json = nlohmann::json;

  json facts = json::array();
  for (const auto& f : r.facts) {
    facts.push_back({{"individual", f.individual}, {"class", f.class_label}, {"value", f.value},
                     {"feature", f.source_feature}});
  }
  json fired = json::array();
  for (const auto& f : r.fired_rules) {
    fired.push_back({{"rule", f.rule}, {"individual", f.individual}, {"iteration", f.iteration}});
  }
  json levels = json::object();
  for (const auto& l : r.levels) levels[l.source] = std::string(level_name(l.level));

  json doc = {
      {"window", {{"index", r.index}, {"start", r.start}, {"end", r.end}, {"degraded", r.degraded}}},
      {"features", json::parse(to_json(r.features))},
      {"facts", std::move(facts)},
      {"fired_rules", std::move(fired)},
      {"levels", std::move(levels)},
      {"overall", r.overall ? json(std::string(level_name(*r.overall))) : json(nullptr)},
      {"alert", r.alert},
  };
  return doc.dump();
}

}  // namespace fatigue
