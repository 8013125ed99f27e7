#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "fatigue/error.hpp"
#include "fatigue/rules.hpp"
#include "table1.hpp"

using namespace fatigue;

namespace {

std::string read_source(const std::string& rel) {
  std::ifstream in(std::string(FATIGUE_SOURCE_DIR) + "/" + rel);
  REQUIRE(in);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::shared_ptr<const Taxonomy> shared_default() { return std::make_shared<const Taxonomy>(default_taxonomy()); }

}  // namespace

TEST_CASE("shipped packs parse to six rules") {
  for (bool verbatim : {false, true}) {
    const auto text = read_source(verbatim ? "rules/table1_verbatim.rules" : "rules/table1_corrected.rules");
    CHECK(text == table1_pack_text(verbatim));
    const auto pack = parse_rules(text);
    CHECK(pack.size() == 6);
    CHECK(pack == table1_pack(verbatim));
  }
  const Rule* r = table1_pack().find("yaw_fatigue_high");
  REQUIRE(r != nullptr);
  CHECK(r->variable == "f");
  CHECK(r->anchor_class == "YawAngleMeasurementFatigue");
  CHECK(r->required_classes ==
        std::vector<std::string>{"MeanYaw_Small", "VarYaw_Extreme", "AccelerationYawRate_High", "Yaw_Extreme"});
  CHECK(r->conclusion_class == "YawAngleMeasurmentFatigue_High");
  CHECK(table1_pack().find("nope") == nullptr);
}

TEST_CASE("a minimal rule") {
  const auto pack = parse_rules("rule r1: when instance(?x, SWA_measure), exists(SWA_Extreme) then classify(?x, SWA_Large)");
  REQUIRE(pack.size() == 1);
  CHECK(pack.rules[0].name == "r1");
  CHECK(pack.rules[0].location == SourceLocation{1, 1});
  CHECK(parse_rules("# nothing here\n\n").size() == 0);
}

TEST_CASE("missing 'then' points at the next token") {
  const std::string text =
      "rule r1:\n"
      "  when instance(?x, SWA_measure), exists(SWA_Extreme)\n"
      "  classify(?x, SWA_Large)\n";
  try {
    parse_rules(text);
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.where() == SourceLocation{3, 3});
    CHECK(e.expected().find("then") != std::string::npos);
  }
}

TEST_CASE("syntax errors") {
  CHECK_THROWS_AS(parse_rules("rule r: when exists(SWA_Small) then classify(?x, SWA_Large)"), SyntaxError);
  CHECK_THROWS_AS(parse_rules("rule r: when instance(?x, SWA_measure) then classify(?y, SWA_Large)"), SyntaxError);
  CHECK_THROWS_AS(parse_rules("rule r: when instance(?x, SWA_measure), instance(?x, SWA_Small) then classify(?x, SWA_Large)"),
                  SyntaxError);
  CHECK_THROWS_AS(parse_rules("rule r: when instance(? x, SWA_measure) then classify(?x, SWA_Large)"), SyntaxError);
  CHECK_THROWS_AS(parse_rules("rule r: when instance(?x, SWA_measure) then classify(?x, SWA_Large) $"), SyntaxError);
  try {
    parse_rules("rule r: when instance(?x, SWA_measure)\n  then classify(?x SWA_Large)");
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.where() == SourceLocation{2, 20});
  }
}

TEST_CASE("unknown classes and duplicate names") {
  try {
    parse_rules("rule r1: when instance(?x, SWA_measure),\n    exists(SWA_Gigantic) then classify(?x, SWA_Large)");
    FAIL("expected UnknownClass");
  } catch (const UnknownClass& e) {
    CHECK(e.class_label() == "SWA_Gigantic");
    CHECK(e.rule() == "r1");
    CHECK(e.where() == SourceLocation{2, 12});
  }
  try {
    parse_rules(
        "rule a: when instance(?x, SWA_measure) then classify(?x, SWA_Large)\n"
        "rule a: when instance(?x, SWA_measure) then classify(?x, SWA_Small)\n");
    FAIL("expected DuplicateRuleName");
  } catch (const DuplicateRuleName& e) {
    CHECK(e.rule() == "a");
    CHECK(e.where() == SourceLocation{2, 6});
  }
}

TEST_CASE("each vehicular row yields exactly its output") {
  for (bool verbatim : {false, true}) {
    for (const auto& row : table1::rows(verbatim)) {
      CAPTURE(row.output);
      CHECK(table1::derived_levels(row, table1_pack(verbatim)) == std::set<std::string>{row.output});
    }
  }
}

TEST_CASE("corrected and verbatim packs differ on the yaw rows") {
  // With MeanYaw inputs the verbatim pack cannot fire the yaw rows.
  const auto rows = table1::rows(false);
  for (std::size_t i = 3; i < 6; ++i) CHECK(table1::derived_levels(rows[i], table1_pack(true)).empty());
  for (std::size_t i = 0; i < 3; ++i) CHECK(table1::derived_levels(rows[i], table1_pack(true)).size() == 1);
}

TEST_CASE("inference on an empty fact base does nothing") {
  const FactBase empty(shared_default());
  const auto r = infer(empty, table1_pack());
  CHECK(r.facts == empty);
  CHECK(r.log.empty());
  CHECK(r.rounds == 0);
}

TEST_CASE("the log records each new fact once") {
  const auto row = table1::rows(false)[2];
  const auto r = infer(table1::facts_for(row), table1_pack());
  REQUIRE(r.log.size() == 1);
  CHECK(r.log[0] == FiredRule{"steering_fatigue_high", "anchor", 1});
  CHECK(r.rounds == 1);
}

TEST_CASE("chained rules reach a fixpoint") {
  Taxonomy t;
  for (const char* c : {"A", "B", "C", "D"}) t.add_class(c);
  const auto pack = parse_rules(
      "rule r3: when instance(?x, A), exists(C) then classify(?x, D)\n"
      "rule r2: when instance(?x, A), exists(B) then classify(?x, C)\n"
      "rule r1: when instance(?x, A) then classify(?x, B)\n",
      t);
  FactBase fb(std::make_shared<const Taxonomy>(t));
  fb.insert(Membership{"i", "A"});
  fb.insert(Membership{"j", "A"});
  const auto base = infer(fb, pack);
  for (const char* c : {"B", "C", "D"}) {
    CHECK(base.facts.entails("i", c));
    CHECK(base.facts.entails("j", c));
  }
  CHECK(base.log.size() == 6);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto shuffled = infer(fb, pack, {seed});
    CHECK(shuffled.facts == base.facts);
    CHECK(shuffled.log.size() == base.log.size());
  }
  // Re-running on the fixpoint adds nothing.
  CHECK(infer(base.facts, pack).log.empty());
}

TEST_CASE("inference is monotone") {
  std::mt19937_64 rng(6);
  std::vector<std::string> classes(default_taxonomy().classes().begin(), default_taxonomy().classes().end());
  for (int trial = 0; trial < 100; ++trial) {
    FactBase small(shared_default());
    small.insert(Membership{"sw", "SteeringWheelMeasurementFatigue"});
    small.insert(Membership{"yaw", "YawAngleMeasurementFatigue"});
    for (int i = 0; i < 6; ++i) small.insert(Membership{"p" + std::to_string(i), classes[rng() % classes.size()]});
    FactBase large = small;
    for (int i = 0; i < 6; ++i) large.insert(Membership{"q" + std::to_string(i), classes[rng() % classes.size()]});
    const auto a = infer(small, table1_pack());
    const auto b = infer(large, table1_pack());
    for (const auto& m : a.facts.memberships()) CHECK(b.facts.memberships().count(m) == 1);
  }
}

TEST_CASE("reading fatigue levels") {
  FactBase fb(shared_default());
  CHECK(read_fatigue(fb).empty());
  fb.insert(Membership{"sw@0", "SteeringWheelMeasurementFatigue"});
  fb.insert(Membership{"sw@10", "SteeringWheelMeasurementFatigue"});
  fb.insert(Membership{"sw@0", "SteeringWheelMeasurmentFatigue_Low"});
  fb.insert(Membership{"sw@10", "SteeringWheelMeasurmentFatigue_Medium"});
  const auto levels = read_fatigue(fb);
  REQUIRE(levels.size() == 1);
  CHECK(levels[0] == FatigueLevel{"SteeringWheel", Level::Medium});

  FactBase ambiguous = fb;
  ambiguous.insert(Membership{"sw@0", "SteeringWheelMeasurmentFatigue_High"});
  CHECK_THROWS_AS(read_fatigue(ambiguous), AmbiguityError);
}

TEST_CASE("level names") {
  for (Level l : {Level::Low, Level::Medium, Level::High}) CHECK(level_from_name(level_name(l)) == l);
  CHECK(encode(Level::High) == 2);
  CHECK_THROWS_AS(level_from_name("Severe"), ArgumentError);
}

TEST_CASE("fusion examples") {
  const FusionWeights equal;
  const std::vector<FatigueLevel> high_low{{"SteeringWheel", Level::High}, {"YawAngle", Level::Low}};
  CHECK(fusion_score(high_low, equal) == 1.0);
  CHECK(fuse(high_low, equal).level == Level::Medium);
  CHECK(fuse(high_low, equal).source == kOverallSource);
  const FusionWeights steering_heavy({{"SteeringWheel", 3.0}, {"YawAngle", 1.0}});
  CHECK(fusion_score(high_low, steering_heavy) == 1.5);
  CHECK(fuse(high_low, steering_heavy).level == Level::High);
  const std::vector<FatigueLevel> one{{"YawAngle", Level::Medium}};
  CHECK(fuse(one, equal).level == Level::Medium);
  CHECK_THROWS_AS(fusion_score({}, equal), EmptyInput);
  CHECK_THROWS_AS(fusion_score(one, FusionWeights({{"SteeringWheel", 1.0}})), ArgumentError);
  CHECK_THROWS_AS(FusionWeights({{"SteeringWheel", -1.0}}), ArgumentError);
  CHECK_THROWS_AS(FusionWeights({{"SteeringWheel", 0.0}}), ArgumentError);
  CHECK(FusionWeights({{"SteeringWheel", 2.0}}).weight("Other") == 0.0);
}

TEST_CASE("fusion is scale invariant and unanimous") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> w(0.01, 10.0);
  std::uniform_real_distribution<double> scale(0.001, 1000.0);
  const char* sources[] = {"SteeringWheel", "YawAngle", "Eye", "Heart"};
  for (int trial = 0; trial < 500; ++trial) {
    std::map<std::string, double> weights;
    std::vector<FatigueLevel> levels;
    for (const char* s : sources) {
      weights[s] = w(rng);
      if (rng() % 3 != 0 || levels.empty()) levels.push_back({s, static_cast<Level>(rng() % 3)});
    }
    const double c = scale(rng);
    std::map<std::string, double> scaled = weights;
    for (auto& [k, v] : scaled) v *= c;
    CHECK(fuse(levels, FusionWeights(weights)).level == fuse(levels, FusionWeights(scaled)).level);
    for (auto& l : levels) l.level = levels.front().level;
    CHECK(fuse(levels, FusionWeights(weights)).level == levels.front().level);
  }
}
