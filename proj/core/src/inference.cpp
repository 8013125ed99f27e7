#include <algorithm>
#include <numeric>
#include <random>

#include "fatigue/rules.hpp"

namespace fatigue {

namespace {

bool any_member(const FactBase& fb, const std::string& class_label) {
  const auto& below = fb.taxonomy().descendants(class_label);
  for (const auto& m : fb.memberships()) {
    if (below.count(m.class_label)) return true;
  }
  return false;
}

}  // namespace

InferenceResult infer(const FactBase& fb, const RulePack& pack, InferenceOrder order) {
  InferenceResult result{fb, {}, 0};
  FactBase& facts = result.facts;

  std::vector<std::size_t> rule_order(pack.rules.size());
  std::iota(rule_order.begin(), rule_order.end(), std::size_t{0});
  std::mt19937_64 rng(order.shuffle_seed.value_or(0));

  for (std::size_t pass = 1;; ++pass) {
    if (order.shuffle_seed) std::shuffle(rule_order.begin(), rule_order.end(), rng);
    bool changed = false;
    for (std::size_t ri : rule_order) {
      const Rule& rule = pack.rules[ri];
      const bool enabled = std::all_of(rule.required_classes.begin(), rule.required_classes.end(),
                                       [&](const std::string& c) { return any_member(facts, c); });
      if (!enabled) continue;

      const auto anchors = facts.query_class(rule.anchor_class);
      std::vector<std::string> individuals(anchors.begin(), anchors.end());
      if (order.shuffle_seed) std::shuffle(individuals.begin(), individuals.end(), rng);
      for (const auto& ind : individuals) {
        if (facts.insert(Membership{ind, rule.conclusion_class})) {
          result.log.push_back({rule.name, ind, pass});
          changed = true;
        }
      }
    }
    if (!changed) break;
    ++result.rounds;
  }
  return result;
}

}  // namespace fatigue
