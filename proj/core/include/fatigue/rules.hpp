#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fatigue/error.hpp"
#include "fatigue/kstore.hpp"

namespace fatigue {

/// `rule NAME: when instance(?x, Anchor), exists(C1), ... then classify(?x, Out)`
///
/// Fires for every individual entailed in the anchor class once some
/// individual is entailed in each required class.
struct Rule {
  std::string name;
  std::string variable;  // without the leading '?'
  std::string anchor_class;
  std::vector<std::string> required_classes;
  std::string conclusion_class;
  SourceLocation location;

  friend bool operator==(const Rule&, const Rule&) = default;
};

struct RulePack {
  std::vector<Rule> rules;

  std::size_t size() const noexcept { return rules.size(); }
  const Rule* find(std::string_view name) const noexcept;

  friend bool operator==(const RulePack&, const RulePack&) = default;
};

/// Parses and validates against `taxonomy`. Throws SyntaxError, UnknownClass
/// (with rule and location) or DuplicateRuleName.
RulePack parse_rules(std::string_view text, const Taxonomy& taxonomy = default_taxonomy());

/// Source text of the built-in steering/yaw pack. The corrected variant names
/// MeanYaw in the yaw rows; the verbatim one keeps MeanSWA there.
std::string_view table1_pack_text(bool verbatim = false) noexcept;
const RulePack& table1_pack(bool verbatim = false);

struct FiredRule {
  std::string rule;
  std::string individual;
  std::size_t iteration = 0;  // 1-based pass number
  friend bool operator==(const FiredRule&, const FiredRule&) = default;
};

struct InferenceResult {
  FactBase facts;
  std::vector<FiredRule> log;
  /// Passes that produced at least one new membership.
  std::size_t rounds = 0;
};

/// Iteration order for rules and individuals. The fixpoint is the same for
/// every order; a seed only changes the order of the log.
struct InferenceOrder {
  std::optional<std::uint64_t> shuffle_seed;
};

/// Forward chaining to fixpoint. Never retracts; always terminates.
InferenceResult infer(const FactBase& fb, const RulePack& pack, InferenceOrder order = {});

enum class Level : int { Low = 0, Medium = 1, High = 2 };

std::string_view level_name(Level l) noexcept;
Level level_from_name(std::string_view name);
constexpr int encode(Level l) noexcept { return static_cast<int>(l); }

/// A rule-derived fatigue verdict for one source (or the fused "Overall").
struct FatigueLevel {
  std::string source;
  Level level = Level::Low;
  friend bool operator==(const FatigueLevel&, const FatigueLevel&) = default;
};

inline constexpr std::string_view kOverallSource = "Overall";

/// Where a source's verdicts live in the taxonomy.
struct FatigueSource {
  std::string name;
  std::string anchor_class;
  std::map<Level, std::string> level_classes;
};

const std::vector<FatigueSource>& default_fatigue_sources();

/// Highest level per source over the source's anchor individuals. When one
/// individual is entailed in several levels, the most specific class wins;
/// unrelated level classes raise AmbiguityError.
std::vector<FatigueLevel> read_fatigue(const FactBase& fb,
                                       const std::vector<FatigueSource>& sources = default_fatigue_sources());

/// Non-negative per-source weights; at least one must be positive.
class FusionWeights {
 public:
  FusionWeights();  // SteeringWheel = YawAngle = 1
  explicit FusionWeights(std::map<std::string, double> weights);

  /// Weight of `source`; 0 when not listed.
  double weight(std::string_view source) const noexcept;
  const std::map<std::string, double, std::less<>>& values() const noexcept { return weights_; }

  friend bool operator==(const FusionWeights&, const FusionWeights&) = default;

 private:
  std::map<std::string, double, std::less<>> weights_;
};

/// Score cut-offs: Low below `medium`, High at or above `high`.
struct FusionCutoffs {
  double medium = 0.5;
  double high = 1.5;
  friend bool operator==(const FusionCutoffs&, const FusionCutoffs&) = default;
};

/// Weighted mean of the encoded levels. Throws EmptyInput for no levels and
/// ArgumentError when the present sources carry no weight.
double fusion_score(std::span<const FatigueLevel> levels, const FusionWeights& w);
FatigueLevel fuse(std::span<const FatigueLevel> levels, const FusionWeights& w, FusionCutoffs cutoffs = {});

}  // namespace fatigue
