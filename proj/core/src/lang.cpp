#include "graspwise/lang.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <random>
#include <sstream>

#include "graspwise/random.hpp"

namespace graspwise {

namespace {

#include "default_lexicon.inc"

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    fields.emplace_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

}  // namespace

std::string_view to_string(DescriptionSource s) {
  return s == DescriptionSource::kHuman ? "HUMAN" : "SELF_EXPLANATION";
}

std::optional<DescriptionSource> source_from_string(std::string_view s) {
  if (s == "HUMAN") return DescriptionSource::kHuman;
  if (s == "SELF_EXPLANATION") return DescriptionSource::kSelfExplanation;
  return std::nullopt;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    const auto uc = static_cast<unsigned char>(ch);
    if (uc >= 0x80 || std::isalnum(uc)) {
      current += static_cast<char>(std::tolower(uc));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::string_view Lexicon::default_text() { return kDefaultLexiconText; }

const Lexicon& Lexicon::default_lexicon() {
  static const Lexicon lexicon = Lexicon::parse(kDefaultLexiconText);
  return lexicon;
}

void Lexicon::add(std::string_view phrase, Entry entry) {
  auto tokens = tokenize(phrase);
  if (tokens.empty()) {
    throw Error(ErrorCode::kParse, "lexicon phrase is empty");
  }
  max_len_ = std::max(max_len_, tokens.size());
  entries_[std::move(tokens)] = std::move(entry);
}

Lexicon Lexicon::parse(std::string_view tsv) {
  Lexicon lex;
  std::istringstream in{std::string(tsv)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split_tabs(line);
    auto fail = [&](const std::string& why) {
      return Error(ErrorCode::kParse,
                   "lexicon line " + std::to_string(line_no) + ": " + why);
    };
    if (fields.size() < 2 || fields.size() > 3) {
      throw fail("expected 2 or 3 tab-separated fields");
    }
    Entry entry;
    const std::string& tag = fields[1];
    if (auto p = predicate_from_string(tag)) {
      if (fields.size() != 2) throw fail("predicate entries take 2 fields");
      entry.kind = Kind::kPredicate;
      entry.predicate = *p;
    } else if (tag == "CLASS") {
      entry.kind = Kind::kClass;
      entry.class_name = join(tokenize(fields.size() == 3 ? fields[2] : fields[0]));
    } else if (tag == "STOP") {
      entry.kind = Kind::kStop;
    } else {
      throw fail("unknown tag '" + tag + "'");
    }
    lex.add(fields[0], std::move(entry));
  }
  return lex;
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open lexicon file " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::optional<std::pair<const Lexicon::Entry*, std::size_t>> Lexicon::match(
    const std::vector<std::string>& tokens, std::size_t pos) const {
  const std::size_t longest = std::min(max_len_, tokens.size() - pos);
  for (std::size_t len = longest; len >= 1; --len) {
    std::vector<std::string> key(tokens.begin() + pos, tokens.begin() + pos + len);
    auto it = entries_.find(key);
    if (it != entries_.end()) return std::make_pair(&it->second, len);
  }
  return std::nullopt;
}

ParseOutcome try_parse(std::string_view text, const Lexicon& lexicon) {
  ParseOutcome out;
  const auto tokens = tokenize(text);
  std::vector<std::string> classes;
  std::vector<Predicate> predicates;

  for (std::size_t pos = 0; pos < tokens.size();) {
    auto hit = lexicon.match(tokens, pos);
    if (!hit) {
      out.tokens.push_back({tokens[pos], "unknown"});
      out.warnings.push_back(tokens[pos]);
      ++pos;
      continue;
    }
    const auto& [entry, len] = *hit;
    std::vector<std::string> phrase(tokens.begin() + pos, tokens.begin() + pos + len);
    switch (entry->kind) {
      case Lexicon::Kind::kClass:
        out.tokens.push_back({join(phrase), "class"});
        classes.push_back(entry->class_name);
        break;
      case Lexicon::Kind::kPredicate:
        out.tokens.push_back({join(phrase), "predicate"});
        predicates.push_back(entry->predicate);
        break;
      case Lexicon::Kind::kStop:
        out.tokens.push_back({join(phrase), "stopword"});
        break;
    }
    pos += len;
  }

  if (predicates.empty()) {
    out.error = ErrorCode::kUnparseable;
    out.message = "no relation word found";
    return out;
  }
  if (std::any_of(predicates.begin(), predicates.end(),
                  [&](Predicate p) { return p != predicates.front(); })) {
    out.error = ErrorCode::kUnparseable;
    out.message = "conflicting relation words";
    return out;
  }
  if (classes.size() != 2) {
    out.error = ErrorCode::kArity;
    out.message = "expected exactly 2 object mentions, found " +
                  std::to_string(classes.size());
    return out;
  }
  out.triple = RelationTriple{classes[0], predicates.front(), classes[1],
                              std::nullopt, std::nullopt};
  return out;
}

RelationTriple parse(std::string_view text, const Lexicon& lexicon) {
  auto outcome = try_parse(text, lexicon);
  if (outcome.ok()) return *outcome.triple;
  std::vector<std::string> details;
  for (const auto& t : outcome.tokens) details.push_back(t.token + ":" + t.role);
  throw Error(*outcome.error, outcome.message, std::move(details));
}

const std::vector<std::string>& templates(Predicate p) {
  static const std::vector<std::string> kOn = {"{s} on {o}", "{s} put above {o}",
                                               "{s} placed on {o}"};
  static const std::vector<std::string> kUnder = {"{s} placed under {o}",
                                                  "{s} sitting under {o}"};
  static const std::vector<std::string> kLeft = {"{s} on the left of {o}",
                                                 "{s} left of {o}"};
  static const std::vector<std::string> kRight = {"{s} on the right of {o}",
                                                  "{s} right of {o}"};
  switch (p) {
    case Predicate::kOn: return kOn;
    case Predicate::kUnder: return kUnder;
    case Predicate::kLeft: return kLeft;
    case Predicate::kRight: return kRight;
  }
  return kOn;
}

std::string render(const RelationTriple& triple, int template_index) {
  const auto& set = templates(triple.predicate);
  const auto& tmpl = set.at(static_cast<std::size_t>(template_index) % set.size());
  std::string out;
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    if (tmpl.compare(i, 3, "{s}") == 0) {
      out += triple.subject_class;
      i += 2;
    } else if (tmpl.compare(i, 3, "{o}") == 0) {
      out += triple.object_class;
      i += 2;
    } else {
      out += tmpl[i];
    }
  }
  return out;
}

Description generate(const RelationTriple& triple, std::uint64_t template_seed,
                     const Vocabulary& vocabulary) {
  vocabulary.require(triple.subject_class);
  vocabulary.require(triple.object_class);
  const int index =
      static_cast<int>(template_seed % templates(triple.predicate).size());
  return Description{triple, render(triple, index),
                     DescriptionSource::kSelfExplanation, index, false};
}

std::vector<RelationTriple> sample_pairs(const Scene& scene, std::uint64_t seed,
                                         std::size_t count) {
  if (scene.objects.size() < 2 || count == 0) return {};
  const SceneGraph graph = closure(scene);
  std::vector<Relation> stacking;
  std::vector<Relation> horizontal;
  for (const auto& r : graph.relations()) {
    (is_stacking(r.predicate) ? stacking : horizontal).push_back(r);
  }
  Rng rng(seed);
  std::shuffle(stacking.begin(), stacking.end(), rng);
  std::shuffle(horizontal.begin(), horizontal.end(), rng);

  std::vector<RelationTriple> out;
  auto emit = [&](const Relation& r) {
    // Either orientation of the pair is a true statement.
    Relation stated = r;
    if (std::bernoulli_distribution(0.5)(rng)) {
      stated = Relation{r.object, inverse(r.predicate), r.subject};
    }
    out.push_back(RelationTriple{scene.object(stated.subject).class_name,
                                 stated.predicate,
                                 scene.object(stated.object).class_name,
                                 stated.subject, stated.object});
  };
  for (const auto& r : stacking) {
    if (out.size() == count) return out;
    emit(r);
  }
  for (const auto& r : horizontal) {
    if (out.size() == count) return out;
    emit(r);
  }
  return out;
}

int select_target(const std::set<int>& graspable,
                  const std::set<int>& stacked_on_something, std::uint64_t seed) {
  if (graspable.empty()) {
    throw Error(ErrorCode::kInvalidScene, "no graspable object to select");
  }
  std::vector<int> pool;
  std::set_intersection(graspable.begin(), graspable.end(),
                        stacked_on_something.begin(), stacked_on_something.end(),
                        std::back_inserter(pool));
  if (pool.empty()) pool.assign(graspable.begin(), graspable.end());
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  return pool[pick(rng)];
}

TargetDescription describe_target(const Scene& scene, std::uint64_t seed) {
  const SceneGraph graph = closure(scene);
  std::set<int> graspable;
  std::set<int> on_something;
  for (int id : graph.object_ids()) {
    if (surface_label(graph, id)) graspable.insert(id);
    if (!graph.objects_below(id).empty()) on_something.insert(id);
  }
  TargetDescription out;
  out.target_id = select_target(graspable, on_something,
                                derive_seed(seed, streams::kDescribe, 0));

  std::vector<int> partners = graph.objects_below(out.target_id);
  if (partners.empty()) {
    for (int id : graph.object_ids()) {
      if (id != out.target_id && graph.relation(out.target_id, id)) {
        partners.push_back(id);
      }
    }
  }
  if (partners.empty()) return out;

  Rng rng(derive_seed(seed, streams::kDescribe, 1));
  std::uniform_int_distribution<std::size_t> pick(0, partners.size() - 1);
  const int partner = partners[pick(rng)];
  const Predicate p = *graph.relation(out.target_id, partner);
  RelationTriple triple{scene.object(out.target_id).class_name, p,
                        scene.object(partner).class_name, out.target_id, partner};
  out.description = Description{
      triple, "", DescriptionSource::kSelfExplanation, std::nullopt, false};
  const auto tseed = derive_seed(seed, streams::kTemplate);
  const int index = static_cast<int>(tseed % templates(p).size());
  out.description->template_index = index;
  out.description->text = render(triple, index);
  return out;
}

}  // namespace graspwise
