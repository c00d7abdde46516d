#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "graspwise/codec.hpp"
#include "graspwise/events.hpp"
#include "graspwise/lang.hpp"
#include "graspwise/scene.hpp"
#include "graspwise/vocabulary.hpp"

namespace graspwise {

inline constexpr std::string_view kCorpusSchema = "lvmrd-sim/1";

/// One annotated sample: image metadata, scene (objects, relationship tree,
/// grasps with surface flags), language descriptions and, for samples
/// collected from sessions, the object the description was grounded to.
struct SampleRecord {
  Scene scene;
  std::optional<std::string> image_path;
  std::vector<Description> descriptions;
  std::optional<int> grounded_object_id;

  friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

struct Corpus {
  std::vector<SampleRecord> records;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

Json encode(const SampleRecord& r);
Json encode(const Corpus& c);
SampleRecord decode_record(const Json& j, const std::string& where);

/// Corpus document as text. Key order is fixed, so equal corpora serialize
/// to identical bytes.
std::string serialize(const Corpus& corpus);

/// Parses a corpus document. Syntax errors throw Error(kParse) with the line
/// and column; schema errors name the record. With `validate_records`, every
/// record is validated and all violations are reported together as
/// Error(kValidation) whose details list one issue each.
Corpus parse_corpus(std::string_view text, bool validate_records = true,
                    const Vocabulary* vocabulary = &Vocabulary::default_vocabulary());

Corpus load_corpus(const std::filesystem::path& path, bool validate_records = true,
                   const Vocabulary* vocabulary = &Vocabulary::default_vocabulary());
/// Writes through a temporary file and renames it into place.
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

/// Scene invariants plus: every description's triple holds in the closure,
/// description classes are in the vocabulary, and the grounded object exists.
std::vector<ValidationIssue> validate_record(
    const SampleRecord& record,
    const Vocabulary* vocabulary = &Vocabulary::default_vocabulary());
/// Issues of all records; messages are prefixed with "records[i]".
std::vector<ValidationIssue> validate_corpus(
    const Corpus& corpus,
    const Vocabulary* vocabulary = &Vocabulary::default_vocabulary());

struct GenOptions {
  int min_objects = 2;
  int max_objects = 6;
  int width = 640;
  int height = 480;
  /// Every scene gets at least one stacked pair.
  bool require_stack = false;
  /// Layout attempts per scene before giving up.
  int max_attempts = 200;
  const Vocabulary* vocabulary = &Vocabulary::default_vocabulary();

  /// Throws Error(kConfig).
  void validate() const;
};

/// Random tabletop scenes: object count uniform in [min, max], distinct
/// classes, random stacks of height at most 3, each child lying inside one
/// half of the object below it. Every object gets 1 to 3 grasps inside its
/// visible part, so grasps of different objects never overlap. Surface flags
/// come from the tree and each record carries the oracle self-explanation.
/// Scene i depends only on (seed, i). Throws Error(kGeneration) when a layout
/// cannot be found.
Corpus gen_synthetic(std::size_t n, std::uint64_t seed, const GenOptions& options = {});

/// Nominal footprint (w, h) in px for a class; unknown classes get a default.
std::array<double, 2> class_size_prior(std::string_view class_name);

struct CorpusSplit {
  Corpus train;
  Corpus val;
  Corpus test;
};

/// Seeded shuffle, then sizes proportional to `ratios` with largest-remainder
/// rounding (ties to the earlier part). The default mirrors 3740/468/468.
CorpusSplit split_corpus(const Corpus& corpus, std::uint64_t seed,
                         std::array<double, 3> ratios = {3740, 468, 468});

/// Part sizes used by split_corpus.
std::array<std::size_t, 3> split_sizes(std::size_t n, std::array<double, 3> ratios);

/// Fine-tuning records from session logs: one record per "grounded" event,
/// holding the scene from the session's "created" event, the description
/// that was grounded (its source tells self-explanation from human
/// correction) and the grounded object. Events that cannot be turned into a
/// record are skipped with a message appended to `warnings`.
Corpus export_session_samples(const std::vector<SessionEvent>& events,
                              std::vector<std::string>* warnings = nullptr);

}  // namespace graspwise
