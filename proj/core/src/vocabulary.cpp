#include "graspwise/vocabulary.hpp"

#include "graspwise/error.hpp"

namespace graspwise {

Vocabulary::Vocabulary(std::vector<std::string> classes)
    : classes_(std::move(classes)) {
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    if (!index_.emplace(classes_[i], i).second) {
      throw Error(ErrorCode::kVocabulary,
                  "duplicate class in vocabulary: " + classes_[i]);
    }
  }
}

const Vocabulary& Vocabulary::default_vocabulary() {
  static const Vocabulary vocab({
      "apple",      "badminton",       "banana",  "bottle",      "box",
      "cans",       "card",            "charger", "cup",         "glasses",
      "headset",    "knife",           "mobile phone", "mouse",  "notebook",
      "paper",      "pen",             "pliers",  "remote controller",
      "screwdriver", "shaver",         "socks",   "stapler",     "tape",
      "toothbrush", "toothpaste",      "towel",   "umbrella",    "wallet",
      "wrench",     "wrist developer",
  });
  return vocab;
}

bool Vocabulary::contains(std::string_view class_name) const {
  return index_.find(class_name) != index_.end();
}

std::optional<std::size_t> Vocabulary::index_of(std::string_view class_name) const {
  auto it = index_.find(class_name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void Vocabulary::require(std::string_view class_name) const {
  if (!contains(class_name)) {
    throw Error(ErrorCode::kVocabulary,
                "unknown object class '" + std::string(class_name) + "'");
  }
}

}  // namespace graspwise
