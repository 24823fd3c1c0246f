#include <gtest/gtest.h>

#include "agsyn/io.hpp"
#include "agsyn/ops.hpp"
#include "test_util.hpp"

using namespace agsyn;
using agsyn::testing::random_dfa;
using agsyn::testing::words_up_to;

namespace {

Dfa ab_star_prefixes() {
  return DfaBuilder(EventAlphabet({"a", "b"}))
      .initial("0")
      .mark("0")
      .mark("1")
      .edge("0", "a", "1")
      .edge("1", "b", "0")
      .build();
}

// Motion automaton over three regions and four doors.
Dfa motion_dfa() {
  return DfaBuilder(EventAlphabet({"D1l", "D1r", "D2", "D3"}))
      .initial("R1")
      .mark("R1")
      .mark("R2")
      .mark("R3")
      .edge("R1", "D1r", "R2")
      .edge("R1", "D2", "R2")
      .edge("R2", "D1r", "R1")
      .edge("R1", "D1l", "R3")
      .edge("R1", "D3", "R3")
      .edge("R3", "D1l", "R1")
      .edge("R3", "D3", "R1")
      .build();
}

}  // namespace

TEST(Run, EmptyWordReachesInitial) {
  auto d = ab_star_prefixes();
  EXPECT_EQ(d.run({}), std::optional<std::string>("0"));
}

TEST(Run, DoorLoopReturnsToStart) {
  EXPECT_EQ(motion_dfa().run({"D3", "D3"}), std::optional<std::string>("R1"));
}

TEST(Run, UndefinedStepIsAbsent) {
  auto d = DfaBuilder(EventAlphabet({"a"})).initial("0").edge("0", "a", "1").build();
  EXPECT_FALSE(d.run({"a", "a"}).has_value());
}

TEST(Run, ForeignSymbolIsInputError) { EXPECT_THROW((void)ab_star_prefixes().run({"z"}), InputError); }

TEST(Builder, RejectsNondeterminism) {
  DfaBuilder b(EventAlphabet({"a"}));
  b.edge("0", "a", "1");
  EXPECT_THROW(b.edge("0", "a", "2"), InputError);
}

TEST(Alphabet, RejectsDuplicatesAndForeignControllable) {
  EXPECT_THROW(EventAlphabet({"a", "a"}), InputError);
  EXPECT_THROW(EventAlphabet({"a"}, {"b"}), InputError);
  EXPECT_THROW(EventAlphabet({""}), InputError);
}

TEST(Compose, IdempotentOnMotionModel) {
  auto g = motion_dfa();
  auto gg = parallel_compose(g, g);
  for (const auto& w : words_up_to(g.alphabet(), 6)) EXPECT_EQ(g.generates(w), gg.generates(w)) << to_string(w);
}

TEST(Compose, DisjointSelfLoopsShuffle) {
  auto a = DfaBuilder(EventAlphabet({"a"})).initial("0").mark("0").edge("0", "a", "0").build();
  auto b = DfaBuilder(EventAlphabet({"b"})).initial("0").mark("0").edge("0", "b", "0").build();
  auto ab = parallel_compose(a, b);
  EXPECT_EQ(ab.alphabet().events(), (std::vector<std::string>{"a", "b"}));
  for (const auto& w : words_up_to(ab.alphabet(), 4)) EXPECT_TRUE(ab.generates(w));
}

TEST(Compose, ControllableUnion) {
  auto a = DfaBuilder(EventAlphabet({"a", "s"}, {"a"})).initial("0").build();
  auto b = DfaBuilder(EventAlphabet({"s", "b"}, {"s"})).initial("0").build();
  auto c = parallel_compose(a, b);
  EXPECT_EQ(c.alphabet().controllable(), (std::vector<std::string>{"a", "s"}));
}

TEST(Compose, ProjectionCharacterisationOnRandomPairs) {
  std::mt19937 rng(7);
  EventAlphabet sa({"a", "c"}), sb({"b", "c"});
  for (int round = 0; round < 30; ++round) {
    auto a = random_dfa(rng, sa, 1 + round % 4);
    auto b = random_dfa(rng, sb, 1 + (round / 4) % 4);
    auto ab = parallel_compose(a, b);
    for (const auto& w : words_up_to(ab.alphabet(), 6)) {
      bool expect = a.generates(project_word(w, sa)) && b.generates(project_word(w, sb));
      ASSERT_EQ(ab.generates(w), expect) << to_string(w);
      bool expect_m = a.accepts(project_word(w, sa)) && b.accepts(project_word(w, sb));
      ASSERT_EQ(ab.accepts(w), expect_m) << to_string(w);
    }
  }
}

TEST(Complete, TotalInputGainsUnreachableErrorState) {
  auto u = universal_dfa(EventAlphabet({"a", "b"}));
  auto c = complete(u);
  EXPECT_EQ(c.dfa.num_states(), 2);
  EXPECT_EQ(accessible(c.dfa).num_states(), 1);
}

TEST(Complete, ErrorReachableOnUndefinedMoves) {
  auto d = DfaBuilder(EventAlphabet({"a", "b"})).initial("0").edge("0", "a", "1").build();
  auto c = complete(d);
  EXPECT_TRUE(c.dfa.is_total());
  auto qe = c.dfa.name(c.error_state);
  EXPECT_EQ(c.dfa.run({"b"}), std::optional<std::string>(qe));
  EXPECT_EQ(c.dfa.run({"a", "a"}), std::optional<std::string>(qe));
  EXPECT_EQ(c.dfa.run({"a"}), std::optional<std::string>("1"));
}

TEST(Complete, AllMarkedCompletionAcceptsEverything) {
  auto c = complete(mark_all(ab_star_prefixes()), true);
  for (const auto& w : words_up_to(c.dfa.alphabet(), 5)) EXPECT_TRUE(c.dfa.accepts(w));
}

TEST(Complement, OfFullLanguageIsEmpty) {
  auto co = complement(universal_dfa(EventAlphabet({"a"})));
  EXPECT_TRUE(is_empty(co));
}

TEST(Complement, PointwiseAndInvolutive) {
  std::mt19937 rng(11);
  EventAlphabet s({"a", "b"});
  for (int i = 0; i < 40; ++i) {
    auto g = random_dfa(rng, s, 4);
    auto co = complement(g);
    auto coco = complement(co);
    for (const auto& w : words_up_to(s, 6)) {
      ASSERT_NE(co.accepts(w), g.accepts(w));
      ASSERT_EQ(coco.accepts(w), g.accepts(w));
    }
  }
}

TEST(Trim, FixpointAndUnreachableRemoval) {
  auto d = ab_star_prefixes();
  EXPECT_TRUE(structurally_equal(trim(d), trim(trim(d))));
  auto chain = DfaBuilder(EventAlphabet({"a"})).initial("0").mark("1").state("2", true).edge("0", "a", "1").build();
  EXPECT_EQ(trim(chain).num_states(), 2);
  EXPECT_EQ(trim(motion_dfa()).num_states(), 3);
}

TEST(Trim, DeadInitialGivesEmptyAutomaton) {
  auto d = DfaBuilder(EventAlphabet({"a"})).initial("0").edge("0", "a", "1").build();
  auto t = trim(d);
  EXPECT_EQ(t.num_states(), 1);
  EXPECT_FALSE(t.is_marked(0));
  EXPECT_EQ(t.num_transitions(), 0u);
}

TEST(Minimize, CollapsesDuplicateState) {
  auto d = DfaBuilder(EventAlphabet({"a", "b"}))
               .initial("0")
               .mark("0")
               .mark("1")
               .mark("2")
               .mark("3")
               .edge("0", "a", "1")
               .edge("1", "b", "2")
               .edge("2", "a", "3")
               .edge("3", "b", "0")
               .build();
  auto m = minimize(d);
  EXPECT_EQ(m.num_states(), 2);
  EXPECT_TRUE(structurally_equal(m, minimize(ab_star_prefixes())));
}

TEST(Minimize, IdempotentAndLanguagePreservingOnRandom) {
  std::mt19937 rng(3);
  EventAlphabet s({"a", "b", "c"});
  for (int i = 0; i < 50; ++i) {
    auto g = random_dfa(rng, s, 1 + i % 6);
    auto m = minimize(g);
    EXPECT_TRUE(structurally_equal(m, minimize(m)));
    EXPECT_TRUE(language_equal(m, g));
    for (const auto& w : words_up_to(s, 5)) ASSERT_EQ(m.accepts(w), g.accepts(w));
  }
}

TEST(Minimize, EmptyLanguageCanonicalForm) {
  auto m = minimize(empty_dfa(EventAlphabet({"a"})));
  EXPECT_EQ(m.num_states(), 1);
  EXPECT_FALSE(m.is_marked(0));
}

TEST(Language, SubsetCounterexampleIsShortestLex) {
  auto ab = DfaBuilder(EventAlphabet({"a", "b"}))
                .initial("0")
                .mark("0")
                .mark("1")
                .mark("2")
                .edge("0", "a", "1")
                .edge("1", "b", "2")
                .build();
  auto star = ab_star_prefixes();
  EXPECT_TRUE(language_subset(ab, ab));
  EXPECT_TRUE(language_subset(ab, star));
  auto ce = subset_counterexample(star, ab);
  ASSERT_TRUE(ce);
  EXPECT_EQ(*ce, (Word{"a", "b", "a"}));
}

TEST(Language, MarkedStarAgainstPrefixesOfAb) {
  // (ab)* marked only at its start state: the first word outside {ε,a,ab} is abab.
  auto star = DfaBuilder(EventAlphabet({"a", "b"})).initial("0").mark("0")
                  .edge("0", "a", "1").edge("1", "b", "0").build();
  auto ab = DfaBuilder(EventAlphabet({"a", "b"})).initial("0").mark("0").mark("1").mark("2")
                .edge("0", "a", "1").edge("1", "b", "2").build();
  EXPECT_FALSE(language_subset(ab, star));
  auto ce = subset_counterexample(star, ab);
  ASSERT_TRUE(ce);
  EXPECT_EQ(*ce, (Word{"a", "b", "a", "b"}));
  auto diff = difference_witness(ab, star);
  ASSERT_TRUE(diff);
  EXPECT_EQ(*diff, (Word{"a"}));
}

TEST(Io, RoundTripIsBitExact) {
  std::mt19937 rng(5);
  EventAlphabet s({"x", "y\"q", "z"}, {"x"});
  for (int i = 0; i < 20; ++i) {
    auto g = random_dfa(rng, s, 1 + i % 5);
    auto text = dfa_to_text(g);
    auto back = dfa_from_json(parse_json_text(text, "mem"), "mem");
    EXPECT_EQ(dfa_to_text(back), text);
    EXPECT_TRUE(language_equal(back, g));
    EXPECT_EQ(back.alphabet(), g.alphabet());
  }
}

TEST(Io, ParseErrorNamesLine) {
  try {
    (void)parse_json_text("{\n  \"states\": [\n  oops\n]}", "bad.json");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.json:3"), std::string::npos) << e.what();
  }
}

TEST(Io, RejectsUnknownEventInTransition) {
  auto j = json::parse(R"({"states":["0"],"alphabet":["a"],"initial":"0","transitions":[["0","b","0"]]})");
  EXPECT_THROW(dfa_from_json(j), InputError);
}
