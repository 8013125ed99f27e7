#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fatigue {

/// Class labels with a subclass DAG (a class may have several parents).
///
/// The descendant closure is maintained on every edit, so subclass queries are
/// lookups. Adding an edge that would close a cycle throws ArgumentError;
/// referencing an undeclared class throws UnknownClass.
class Taxonomy {
 public:
  Taxonomy() = default;

  /// Declares `label` (idempotent) and links it under each parent.
  void add_class(const std::string& label, const std::vector<std::string>& parents = {});
  void add_subclass(const std::string& child, const std::string& parent);

  bool contains(std::string_view label) const;
  const std::set<std::string>& classes() const noexcept { return classes_; }
  /// (child, parent) pairs, sorted.
  const std::set<std::pair<std::string, std::string>>& edges() const noexcept { return edges_; }

  /// Reflexive-transitive: `label` and every class below it.
  const std::set<std::string>& descendants(std::string_view label) const;
  bool is_subclass_of(std::string_view child, std::string_view ancestor) const;

  friend bool operator==(const Taxonomy& a, const Taxonomy& b) {
    return a.classes_ == b.classes_ && a.edges_ == b.edges_;
  }

 private:
  void require(std::string_view label) const;

  std::set<std::string> classes_;
  std::set<std::pair<std::string, std::string>> edges_;
  std::map<std::string, std::set<std::string>, std::less<>> descendants_;
  std::map<std::string, std::set<std::string>, std::less<>> ancestors_;
};

/// The driver-fatigue class hierarchy: measurement families, their
/// qualification classes and the fatigue-level classes used by the rules.
const Taxonomy& default_taxonomy();

struct Membership {
  std::string individual;
  std::string class_label;
  auto operator<=>(const Membership&) const = default;
};

struct DataProperty {
  std::string individual;
  std::string property;
  double value = 0.0;
  friend bool operator==(const DataProperty&, const DataProperty&) = default;
};

/// A qualification result: `individual` is a member of `class_label` because
/// feature `source_feature` had value `value` over the window.
struct QualifiedFact {
  std::string individual;
  std::string class_label;
  double value = 0.0;
  double window_start = 0.0;
  double window_end = 0.0;
  std::string source_feature;
  /// Data property that records `value` on the individual.
  std::string property;

  friend bool operator==(const QualifiedFact&, const QualifiedFact&) = default;
};

/// Class memberships and numeric data properties over a shared taxonomy.
/// Values are persistent: every `with_*` call returns a new FactBase and
/// leaves the receiver untouched.
class FactBase {
 public:
  explicit FactBase(std::shared_ptr<const Taxonomy> taxonomy, double timestamp = 0.0);

  const Taxonomy& taxonomy() const noexcept { return *taxonomy_; }
  const std::shared_ptr<const Taxonomy>& taxonomy_ptr() const noexcept { return taxonomy_; }
  double timestamp() const noexcept { return timestamp_; }

  const std::set<Membership>& memberships() const noexcept { return memberships_; }
  const std::map<std::pair<std::string, std::string>, double>& data_properties() const noexcept {
    return data_properties_;
  }
  std::size_t size() const noexcept { return memberships_.size() + data_properties_.size(); }

  [[nodiscard]] FactBase with(const Membership& m) const;
  [[nodiscard]] FactBase with(const DataProperty& p) const;
  /// Membership plus the data property carrying the measured value.
  [[nodiscard]] FactBase with(const QualifiedFact& f) const;

  bool entails(std::string_view individual, std::string_view class_label) const;
  /// Individuals asserted in `class_label` or any of its subclasses.
  std::set<std::string> query_class(std::string_view class_label) const;
  std::optional<double> get_value(std::string_view individual, std::string_view property) const;
  /// Every individual mentioned by a membership or data property.
  std::set<std::string> individuals() const;

  /// In-place insertion; returns true when the membership is new. Used by
  /// inference on its private working copy.
  bool insert(const Membership& m);
  bool insert(const DataProperty& p);

  friend bool operator==(const FactBase& a, const FactBase& b);

 private:
  std::shared_ptr<const Taxonomy> taxonomy_;
  double timestamp_ = 0.0;
  std::set<Membership> memberships_;
  std::map<std::pair<std::string, std::string>, double> data_properties_;
};

FactBase assert_fact(const FactBase& fb, const Membership& m);
FactBase assert_fact(const FactBase& fb, const DataProperty& p);
FactBase assert_fact(const FactBase& fb, const QualifiedFact& f);

struct SnapshotMeta {
  std::string trace_id;
  double window_start = 0.0;
  double window_end = 0.0;
  std::string engine_version;
  friend bool operator==(const SnapshotMeta&, const SnapshotMeta&) = default;
};

/// Self-contained saved state of a fact base (taxonomy included).
struct KnowledgeSnapshot {
  FactBase facts;
  SnapshotMeta meta;

  friend bool operator==(const KnowledgeSnapshot&, const KnowledgeSnapshot&) = default;
};

/// Canonical JSON: sorted keys and sorted arrays, so equal snapshots save to
/// identical bytes.
std::string save_snapshot(const KnowledgeSnapshot& s);
/// Throws DecodeError (with byte offset or path) on malformed input.
KnowledgeSnapshot load_snapshot(std::string_view bytes);

/// Human-readable rendering used by `fatigue snapshot dump`.
std::string describe_snapshot(const KnowledgeSnapshot& s);

std::string_view engine_version() noexcept;

}  // namespace fatigue
