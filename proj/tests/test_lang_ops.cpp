#include <gtest/gtest.h>

#include <set>

#include "agsyn/lang_ops.hpp"
#include "test_util.hpp"

using namespace agsyn;
using agsyn::testing::dfa_from_words;
using agsyn::testing::random_dfa;
using agsyn::testing::random_prune;
using agsyn::testing::words_up_to;

namespace {

Dfa ab_star_prefixes() {
  return DfaBuilder(EventAlphabet({"a", "b"})).initial("0").mark("0").mark("1").edge("0", "a", "1").edge("1", "b", "0").build();
}

// 0 -a-> 1 -u-> 2, u uncontrollable.
Dfa chain_plant() {
  return DfaBuilder(EventAlphabet({"a", "u"}, {"a"})).initial("0").mark("0").mark("1").mark("2")
      .edge("0", "a", "1").edge("1", "u", "2").build();
}

// Brute-force controllability on words up to length n.
bool controllable_upto(const Dfa& k, const Dfa& g, int n) {
  for (const auto& s : words_up_to(g.alphabet(), n - 1)) {
    if (!k.accepts(s)) continue;
    for (const auto& u : g.alphabet().uncontrollable()) {
      Word su = s;
      su.push_back(u);
      if (g.generates(su) && !k.accepts(su)) return false;
    }
  }
  return true;
}

}  // namespace

TEST(Project, FullTargetIsIdentity) {
  auto d = ab_star_prefixes();
  EXPECT_TRUE(language_equal(project(d, d.alphabet().events()), d));
}

TEST(Project, OntoSingleEvent) {
  auto p = project(ab_star_prefixes(), std::vector<std::string>{"a"});
  auto astar = DfaBuilder(EventAlphabet({"a"})).initial("0").mark("0").edge("0", "a", "0").build();
  EXPECT_TRUE(structurally_equal(p, minimize(astar)));
}

TEST(Project, RejectsForeignTarget) {
  EXPECT_THROW(project(ab_star_prefixes(), std::vector<std::string>{"z"}), InputError);
}

TEST(Project, InverseThenProjectIsIdentity) {
  std::mt19937 rng(21);
  EventAlphabet local({"a", "b"});
  EventAlphabet global({"a", "b", "c"});
  for (int i = 0; i < 40; ++i) {
    auto l = random_dfa(rng, local, 1 + i % 4);
    auto lifted = inverse_project_intersect({l}, global);
    auto back = project(lifted, local);
    for (const auto& w : words_up_to(local, 6)) ASSERT_EQ(back.accepts(w), l.accepts(w)) << to_string(w);
    EXPECT_TRUE(language_equal(back, l));
  }
}

TEST(InverseProjectIntersect, SingleOperandMembershipByProjection) {
  EventAlphabet global({"a", "b", "x"});
  auto l = ab_star_prefixes();
  auto lifted = inverse_project_intersect({l}, global);
  EXPECT_EQ(lifted.alphabet(), global);
  for (const auto& w : words_up_to(global, 5))
    ASSERT_EQ(lifted.accepts(w), l.accepts(project_word(w, l.alphabet())));
}

TEST(InverseProjectIntersect, DisjointSingletonsShuffle) {
  auto a = DfaBuilder(EventAlphabet({"a"})).initial("0").mark("0").edge("0", "a", "0").build();
  auto b = DfaBuilder(EventAlphabet({"b"})).initial("0").mark("0").edge("0", "b", "0").build();
  EventAlphabet global({"a", "b"});
  auto s = inverse_project_intersect({a, b}, global);
  for (const auto& w : words_up_to(global, 4)) EXPECT_TRUE(s.accepts(w));
}

TEST(Separable, SingleBlockAlwaysSeparable) {
  std::mt19937 rng(2);
  EventAlphabet s({"a", "b"});
  for (int i = 0; i < 10; ++i) EXPECT_TRUE(is_separable(random_dfa(rng, s, 3), {s}));
}

TEST(Separable, ShuffleOfTwoWordsIsNot) {
  EventAlphabet s({"a", "b"});
  auto l = dfa_from_words(s, {{}, {"a", "b"}, {"b", "a"}});
  auto ce = separability_counterexample(l, {EventAlphabet({"a"}), EventAlphabet({"b"})});
  ASSERT_TRUE(ce);
  EXPECT_EQ(*ce, (Word{"a"}));
}

TEST(Separable, AgreesWithBruteForceOnFiniteLanguages) {
  std::mt19937 rng(99);
  EventAlphabet s({"a", "b", "c"});
  EventAlphabet s1({"a", "c"}), s2({"b", "c"});
  auto all = words_up_to(s, 3);
  std::bernoulli_distribution pick(0.15);
  for (int round = 0; round < 60; ++round) {
    std::vector<Word> lang;
    for (const auto& w : all)
      if (pick(rng)) lang.push_back(w);
    auto l = dfa_from_words(s, lang);
    std::set<Word> in(lang.begin(), lang.end()), p1, p2;
    for (const auto& w : lang) {
      p1.insert(project_word(w, s1));
      p2.insert(project_word(w, s2));
    }
    bool brute = true;
    for (const auto& w : words_up_to(s, 6))
      if (p1.count(project_word(w, s1)) && p2.count(project_word(w, s2)) && !in.count(w)) brute = false;
    EXPECT_EQ(is_separable(l, {s1, s2}), brute) << "round " << round;
  }
}

TEST(Quotient, ByEmptyWordIsIdentity) {
  auto l = ab_star_prefixes();
  auto eps = DfaBuilder(l.alphabet()).initial("0").mark("0").build();
  EXPECT_TRUE(language_equal(quotient(l, eps), l));
}

TEST(Quotient, ByUncontrollableStar) {
  EventAlphabet s({"a", "u"});
  auto au = dfa_from_words(s, {{"a", "u"}});
  auto ustar = DfaBuilder(s).initial("0").mark("0").edge("0", "u", "0").build();
  auto q = quotient(au, ustar);
  EXPECT_TRUE(q.accepts(Word{"a"}));
  EXPECT_TRUE(q.accepts(Word{"a", "u"}));
  EXPECT_FALSE(q.accepts(Word{}));
}

TEST(Controllable, FullBehaviourIsControllable) {
  auto g = chain_plant();
  EXPECT_TRUE(is_controllable(g, g));
}

TEST(Controllable, ChainCounterexample) {
  auto g = chain_plant();
  auto k = dfa_from_words(g.alphabet(), {{}, {"a"}});
  auto ce = controllability_counterexample(k, g);
  ASSERT_TRUE(ce);
  EXPECT_EQ(*ce, (Word{"a", "u"}));
}

TEST(Controllable, SpecOutsidePlantIsInputError) {
  auto g = chain_plant();
  auto k = dfa_from_words(g.alphabet(), {{}, {"u"}});
  EXPECT_THROW((void)is_controllable(k, g), InputError);
}

TEST(SupC, AllControllableKeepsSpec) {
  auto g = with_alphabet_controllable(chain_plant(), {"a", "u"});
  auto k = dfa_from_words(g.alphabet(), {{}, {"a"}});
  EXPECT_TRUE(language_equal(sup_c(mark_all(k), g), mark_all(k)));
}

TEST(SupC, ChainShrinksToEpsilon) {
  auto g = chain_plant();
  auto k = mark_all(dfa_from_words(g.alphabet(), {{}, {"a"}}));
  auto s = sup_c(k, g);
  EXPECT_TRUE(language_equal(s, dfa_from_words(g.alphabet(), {{}})));
}

TEST(SupC, NotPrefixClosedIsInputError) {
  auto g = chain_plant();
  auto k = dfa_from_words(g.alphabet(), {{"a"}});
  EXPECT_THROW(sup_c(k, g), InputError);
}

TEST(SupC, EmptyWhenEpsilonUncontrollablyEscapes) {
  auto g = DfaBuilder(EventAlphabet({"u"})).initial("0").mark("0").mark("1").edge("0", "u", "1").build();
  auto k = dfa_from_words(g.alphabet(), {{}});
  EXPECT_TRUE(is_empty(sup_c(k, g)));
}

TEST(SupC, ControllableSupremalAndBothFormsAgree) {
  std::mt19937 rng(1234);
  EventAlphabet s({"a", "b", "u", "v"}, {"a", "b"});
  int checked_sub = 0;
  for (int round = 0; round < 60; ++round) {
    auto g = mark_all(random_dfa(rng, s, 2 + round % 4, 0.8));
    auto spec = mark_all(trim(mark_all(parallel_compose(g, mark_all(random_dfa(rng, s, 1 + round % 3, 0.8))))));
    auto a = sup_c_closed_form(spec, g);
    auto b = sup_c_fixed_point(spec, g);
    ASSERT_TRUE(language_equal(a, b)) << "round " << round;
    auto sc = sup_c(spec, g);
    EXPECT_TRUE(is_prefix_closed(sc));
    EXPECT_TRUE(language_subset(sc, spec));
    EXPECT_TRUE(is_controllable(sc, g));
    EXPECT_TRUE(controllable_upto(sc, g, 6));
    for (int t = 0; t < 5; ++t) {
      auto sub = mark_all(random_prune(rng, spec, 0.3));
      if (!controllable_upto(sub, g, 7) || !is_controllable(sub, g)) continue;
      ++checked_sub;
      EXPECT_TRUE(language_subset(trim(sub), sc)) << "round " << round;
    }
  }
  EXPECT_GT(checked_sub, 10);
}

TEST(SupC, SeparateControllabilityImpliesGlobal) {
  std::mt19937 rng(77);
  EventAlphabet s1({"a", "s", "u"}, {"a", "s"});
  EventAlphabet s2({"b", "s", "v"}, {"b", "s"});
  EventAlphabet global({"a", "s", "u", "b", "v"}, {"a", "s", "b"});
  for (int round = 0; round < 30; ++round) {
    auto g1 = mark_all(random_dfa(rng, s1, 3, 0.8));
    auto g2 = mark_all(random_dfa(rng, s2, 3, 0.8));
    auto l1 = sup_c(mark_all(parallel_compose(g1, mark_all(random_dfa(rng, s1, 2, 0.8)))), g1);
    auto l2 = sup_c(mark_all(parallel_compose(g2, mark_all(random_dfa(rng, s2, 2, 0.8)))), g2);
    auto l = inverse_project_intersect({l1, l2}, global);
    auto g = inverse_project_intersect({g1, g2}, global);
    EXPECT_TRUE(is_separable(l, {s1, s2}));
    if (!is_empty(trim(l))) {
      EXPECT_TRUE(is_controllable(l, g)) << "round " << round;
    }
  }
}

TEST(Satisfies, VacuousProperty) {
  auto p = universal_dfa(EventAlphabet({"b"}));
  auto m = dfa_from_words(EventAlphabet({"a", "b"}), {{"a", "b"}, {"b", "b"}});
  EXPECT_TRUE(satisfies(m, p));
}

TEST(Satisfies, ProjectionCounterexample) {
  auto m = dfa_from_words(EventAlphabet({"a", "b"}), {{"a", "b"}});
  auto p = dfa_from_words(EventAlphabet({"b"}), {{}});
  auto ce = satisfaction_counterexample(m, p);
  ASSERT_TRUE(ce);
  EXPECT_EQ(*ce, (Word{"a", "b"}));
}

TEST(Satisfies, AlphabetViolationIsInputError) {
  auto m = dfa_from_words(EventAlphabet({"a"}), {{"a"}});
  auto p = dfa_from_words(EventAlphabet({"z"}), {{}});
  EXPECT_THROW((void)satisfies(m, p), InputError);
}

TEST(PrefixCloseLargest, ClosedIsFixpoint) {
  auto l = ab_star_prefixes();
  EXPECT_TRUE(structurally_equal(prefix_close_largest(l), minimize(l)));
}

TEST(PrefixCloseLargest, DropsWordsWithMissingPrefix) {
  EventAlphabet s({"a", "b"});
  auto l = dfa_from_words(s, {{}, {"a", "b"}});
  EXPECT_TRUE(language_equal(prefix_close_largest(l), dfa_from_words(s, {{}})));
}

TEST(PrefixCloseLargest, BruteForceOnRandom) {
  std::mt19937 rng(8);
  EventAlphabet s({"a", "b"});
  for (int i = 0; i < 40; ++i) {
    auto l = random_dfa(rng, s, 4, 0.8, 0.7);
    auto pc = prefix_close_largest(l);
    for (const auto& w : words_up_to(s, 6))
      ASSERT_EQ(pc.accepts(w), agsyn::testing::all_prefixes(w, [&](const Word& v) { return l.accepts(v); }));
  }
}
