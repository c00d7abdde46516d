#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "graspwise/error.hpp"
#include "graspwise/lang.hpp"
#include "graspwise/vocabulary.hpp"

using namespace graspwise;

TEST(Tokenize, LowercasesAndSplitsPunctuation) {
  EXPECT_EQ(tokenize("  The Apple, ON the notebook!  "),
            (std::vector<std::string>{"the", "apple", "on", "the", "notebook"}));
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_TRUE(tokenize(" ,.; ").empty());
}

TEST(Parse, PredicatesAndMultiwordClasses) {
  const auto t = parse("box on mobile phone");
  EXPECT_EQ(t.subject_class, "box");
  EXPECT_EQ(t.predicate, Predicate::kOn);
  EXPECT_EQ(t.object_class, "mobile phone");
  EXPECT_EQ(parse("the apple is to the left of the notebook").predicate, Predicate::kLeft);
  EXPECT_EQ(parse("pen on the right side of cup").predicate, Predicate::kRight);
  EXPECT_EQ(parse("towel lying under the wallet").predicate, Predicate::kUnder);
}

TEST(Parse, AliasesMapToCanonicalClass) {
  const auto t = parse("phone on the remote");
  EXPECT_EQ(t.subject_class, "mobile phone");
  EXPECT_EQ(t.object_class, "remote controller");
}

TEST(Parse, UnknownWordsAreWarnings) {
  const auto out = try_parse("the shiny apple on the notebook");
  ASSERT_TRUE(out.ok());
  EXPECT_EQ(out.warnings, (std::vector<std::string>{"shiny"}));
  EXPECT_EQ(out.tokens[1].role, "unknown");
  EXPECT_EQ(out.tokens[2].role, "class");
}

TEST(Parse, Errors) {
  auto expect_code = [](std::string_view text, ErrorCode code) {
    const auto out = try_parse(text);
    EXPECT_FALSE(out.ok()) << text;
    EXPECT_EQ(out.error, code) << text;
    try {
      parse(text);
      ADD_FAILURE() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), code);
      EXPECT_EQ(e.details().size(), out.tokens.size());
    }
  };
  expect_code("", ErrorCode::kUnparseable);
  expect_code("apple notebook", ErrorCode::kUnparseable);
  expect_code("apple on notebook left of cup", ErrorCode::kUnparseable);
  expect_code("apple on", ErrorCode::kArity);
  expect_code("apple on notebook cup", ErrorCode::kArity);
}

TEST(Generate, RoundTripEveryTemplate) {
  const auto& classes = Vocabulary::default_vocabulary().classes();
  for (auto p : {Predicate::kOn, Predicate::kUnder, Predicate::kLeft, Predicate::kRight}) {
    ASSERT_GE(templates(p).size(), 2u);
    for (std::size_t t = 0; t < templates(p).size(); ++t) {
      for (std::size_t i = 0; i < classes.size(); ++i) {
        const RelationTriple triple{classes[i], p, classes[(i + 7) % classes.size()], {}, {}};
        const Description d = generate(triple, t);
        EXPECT_EQ(d.template_index, static_cast<int>(t));
        EXPECT_TRUE(parse(d.text).same_statement(triple)) << d.text;
      }
    }
  }
}

TEST(Generate, RejectsUnknownClass) {
  try {
    generate({"spaceship", Predicate::kOn, "box", {}, {}}, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kVocabulary);
  }
}

TEST(Lexicon, ParsesCustomTables) {
  const Lexicon lex = Lexicon::parse("# custom\natop\tON\nmug\tCLASS\tcup\ndesk\tCLASS\n");
  EXPECT_EQ(lex.size(), 3u);
  const auto t = parse("mug atop desk", lex);
  EXPECT_EQ(t.subject_class, "cup");
  EXPECT_EQ(t.object_class, "desk");
  EXPECT_THROW(Lexicon::parse("atop\tSIDEWAYS\n"), Error);
  EXPECT_GT(Lexicon::default_lexicon().size(), 60u);
  EXPECT_FALSE(Lexicon::default_text().empty());
}

TEST(DescribeTarget, PrefersObjectsOnTopOfStacks) {
  const Scene s = fixtures::apple_notebook();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto d = describe_target(s, seed);
    // apple and pliers sit on the notebook; toothpaste does not.
    EXPECT_TRUE(d.target_id == 2 || d.target_id == 3);
    ASSERT_TRUE(d.description);
    EXPECT_EQ(d.description->triple.predicate, Predicate::kOn);
    EXPECT_EQ(d.description->triple.object_class, "notebook");
    EXPECT_EQ(d.description->triple.subject_id, d.target_id);
    EXPECT_TRUE(parse(d.description->text).same_statement(d.description->triple));
    EXPECT_EQ(describe_target(s, seed), d);
  }
}

TEST(DescribeTarget, ChainTopAndSingleObject) {
  const auto d = describe_target(fixtures::phone_box_notebook(), 3);
  EXPECT_EQ(d.target_id, 3);
  EXPECT_FALSE(describe_target(fixtures::single_cup(), 0).description.has_value());
}

TEST(SamplePairs, StackingFirstAndTrue) {
  const Scene s = fixtures::apple_notebook();
  const SceneGraph g = closure(s);
  const auto pairs = sample_pairs(s, 4, 3);
  ASSERT_EQ(pairs.size(), 3u);
  EXPECT_TRUE(is_stacking(pairs[0].predicate));
  EXPECT_TRUE(is_stacking(pairs[1].predicate));
  for (const auto& p : pairs) {
    EXPECT_TRUE(g.holds(*p.subject_id, p.predicate, *p.object_id));
  }
  EXPECT_TRUE(sample_pairs(fixtures::single_cup(), 0, 5).empty());
}

TEST(Source, Names) {
  EXPECT_EQ(to_string(DescriptionSource::kHuman), "HUMAN");
  EXPECT_EQ(source_from_string("HUMAN"), DescriptionSource::kHuman);
  EXPECT_EQ(source_from_string(to_string(DescriptionSource::kSelfExplanation)),
            DescriptionSource::kSelfExplanation);
}
