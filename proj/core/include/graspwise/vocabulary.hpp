#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace graspwise {

/// Closed set of object class names. Class names are lower-case and may
/// contain spaces ("mobile phone").
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> classes);

  /// The 31 object categories of the default vocabulary.
  static const Vocabulary& default_vocabulary();

  bool contains(std::string_view class_name) const;
  const std::vector<std::string>& classes() const { return classes_; }
  std::size_t size() const { return classes_.size(); }
  std::optional<std::size_t> index_of(std::string_view class_name) const;

  /// Throws Error(kVocabulary) for names outside the set.
  void require(std::string_view class_name) const;

 private:
  std::vector<std::string> classes_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

}  // namespace graspwise
