#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "graspwise/error.hpp"
#include "graspwise/scene.hpp"
#include "graspwise/vocabulary.hpp"

namespace graspwise {

struct RelationTriple {
  std::string subject_class;
  Predicate predicate = Predicate::kOn;
  std::string object_class;
  std::optional<int> subject_id;
  std::optional<int> object_id;

  /// Same classes and predicate; ids are ignored.
  bool same_statement(const RelationTriple& other) const {
    return subject_class == other.subject_class &&
           predicate == other.predicate && object_class == other.object_class;
  }

  friend bool operator==(const RelationTriple&, const RelationTriple&) = default;
};

enum class DescriptionSource { kSelfExplanation, kHuman };

std::string_view to_string(DescriptionSource s);
std::optional<DescriptionSource> source_from_string(std::string_view s);

struct Description {
  RelationTriple triple;
  std::string text;
  DescriptionSource source = DescriptionSource::kSelfExplanation;
  /// Template the text was rendered from; empty for typed text.
  std::optional<int> template_index;
  /// Set by the noise model. Evaluation metadata only: nothing in the
  /// grasping pipeline reads it.
  bool corrupted = false;

  friend bool operator==(const Description&, const Description&) = default;
};

/// Phrase tables for the description language. Entries map a phrase to a
/// predicate, to an object class, or mark it as a stopword. Loaded from a
/// UTF-8 TSV file:
///
///   phrase<TAB>ON|UNDER|LEFT|RIGHT
///   phrase<TAB>CLASS[<TAB>canonical class]
///   phrase<TAB>STOP
///
/// Blank lines and lines starting with '#' are ignored.
class Lexicon {
 public:
  enum class Kind { kPredicate, kClass, kStop };
  struct Entry {
    Kind kind = Kind::kStop;
    Predicate predicate = Predicate::kOn;
    std::string class_name;
  };

  /// Built-in lexicon; identical to data/lexicon.tsv.
  static const Lexicon& default_lexicon();
  static std::string_view default_text();
  static Lexicon parse(std::string_view tsv);
  static Lexicon load(const std::filesystem::path& path);

  void add(std::string_view phrase, Entry entry);
  /// Longest phrase starting at tokens[pos]; returns the entry and its length.
  std::optional<std::pair<const Entry*, std::size_t>> match(
      const std::vector<std::string>& tokens, std::size_t pos) const;

  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::vector<std::string>, Entry> entries_;
  std::size_t max_len_ = 0;
};

/// Lower-cases ASCII, turns punctuation into spaces and splits on spaces.
std::vector<std::string> tokenize(std::string_view text);

struct TokenDiagnostic {
  std::string token;
  std::string role;  // "class", "predicate", "stopword" or "unknown"
};

struct ParseOutcome {
  std::optional<RelationTriple> triple;
  std::optional<ErrorCode> error;
  std::string message;
  std::vector<TokenDiagnostic> tokens;
  /// Unknown words; reported but never fatal.
  std::vector<std::string> warnings;

  bool ok() const { return triple.has_value(); }
};

/// Total parser: never throws, always returns a triple or an error code
/// (kUnparseable or kArity) with per-token diagnostics.
ParseOutcome try_parse(std::string_view text,
                       const Lexicon& lexicon = Lexicon::default_lexicon());
/// Throws Error(kUnparseable | kArity) with token diagnostics as details.
RelationTriple parse(std::string_view text,
                     const Lexicon& lexicon = Lexicon::default_lexicon());

/// Sentence templates per predicate; "{s}" and "{o}" are the class slots.
const std::vector<std::string>& templates(Predicate p);

std::string render(const RelationTriple& triple, int template_index);

/// Renders the triple with template (template_seed mod #templates).
/// Throws Error(kVocabulary) for classes outside the vocabulary.
Description generate(const RelationTriple& triple, std::uint64_t template_seed,
                     const Vocabulary& vocabulary = Vocabulary::default_vocabulary());

/// Samples up to `count` distinct object pairs, stacking pairs first, and
/// states each with a relation from the scene-graph closure.
std::vector<RelationTriple> sample_pairs(const Scene& scene, std::uint64_t seed,
                                         std::size_t count);

/// Picks the object a human would grasp next: a collision-free object,
/// preferring ones that sit on top of a stack. `graspable` must be non-empty.
int select_target(const std::set<int>& graspable,
                  const std::set<int>& stacked_on_something, std::uint64_t seed);

struct TargetDescription {
  int target_id = 0;
  std::optional<Description> description;
  bool operator==(const TargetDescription&) const = default;
};

/// Oracle self-explanation: selects the target and describes it as the
/// subject of a true relation. Single-object scenes have no relation to
/// state, so `description` is empty there.
TargetDescription describe_target(const Scene& scene, std::uint64_t seed);

}  // namespace graspwise
