#include <gtest/gtest.h>

#include "agsyn/cv_verification.hpp"
#include "agsyn/io.hpp"
#include "test_util.hpp"

using namespace agsyn;
using agsyn::testing::dfa_from_words;
using agsyn::testing::random_dfa;
using agsyn::testing::words_up_to;

namespace {

const std::string kCase = std::string(AGSYN_FIXTURES) + "/case_study/";

Dfa closed(const Dfa& d) { return minimize(mark_all(accessible(mark_all(d)))); }

Dfa case_property() { return parallel_compose(load_dfa(kCase + "spe1.json"), load_dfa(kCase + "spe2.json")); }

// Every all-marked DFA over `sigma` with at most two states.
std::vector<Dfa> small_environments(const EventAlphabet& sigma) {
  std::vector<Dfa> out;
  for (int n = 1; n <= 2; ++n) {
    const std::size_t cells = static_cast<std::size_t>(n) * sigma.size();
    std::size_t total = 1;
    for (std::size_t k = 0; k < cells; ++k) total *= static_cast<std::size_t>(n + 1);
    for (std::size_t code = 0; code < total; ++code) {
      std::vector<std::vector<int>> delta(static_cast<std::size_t>(n), std::vector<int>(sigma.size()));
      std::size_t c = code;
      for (std::size_t k = 0; k < cells; ++k, c /= static_cast<std::size_t>(n + 1))
        delta[k / sigma.size()][k % sigma.size()] = static_cast<int>(c % static_cast<std::size_t>(n + 1)) - 1;
      std::vector<std::string> names;
      for (int q = 0; q < n; ++q) names.push_back("e" + std::to_string(q));
      out.emplace_back(sigma, names, 0, delta, std::vector<bool>(static_cast<std::size_t>(n), true));
    }
  }
  return out;
}

// Shared event s followed by a forbidden v; t is harmless.
struct Toy {
  EventAlphabet sigma = EventAlphabet({"s", "t", "v"});
  Dfa m = mark_all(dfa_from_words(sigma, {{"s", "v"}, {"t"}}));
  Dfa p = dfa_from_words(EventAlphabet({"v"}), {{}});
  EventAlphabet interface = EventAlphabet({"s", "t"});
};

}  // namespace

TEST(CheckTriple, UniversalPropertyHolds) {
  Toy toy;
  EXPECT_FALSE(check_triple(universal_dfa(toy.interface), toy.m, universal_dfa(EventAlphabet({"v"}))));
}

TEST(CheckTriple, ViolationOnShortestWord) {
  EventAlphabet s({"a", "b"});
  auto m = mark_all(dfa_from_words(s, {{"a", "b"}, {"b", "b"}}));
  auto p = mark_all(dfa_from_words(s, {{"a"}, {"b", "b"}}));
  auto ce = check_triple(universal_dfa(s), m, p);
  ASSERT_TRUE(ce);
  EXPECT_EQ(*ce, (Word{"a", "b"}));
}

TEST(CvMembership, EmptyWordWhenModuleAloneIsSafe) {
  Toy toy;
  EXPECT_TRUE(cv_membership({}, toy.m, toy.p, toy.interface));
  EXPECT_TRUE(cv_membership({"t"}, toy.m, toy.p, toy.interface));
  EXPECT_FALSE(cv_membership({"s"}, toy.m, toy.p, toy.interface));
}

TEST(CvMembership, CaseStudyBothOutOfR1Rejected) {
  Dfa l = case_property();
  Dfa m1 = load_dfa(kCase + "golden_mission_G1.json");
  EXPECT_FALSE(cv_membership({"h1", "h3", "G1inR3", "G3inR3"}, m1, l, l.alphabet()));
  EXPECT_TRUE(cv_membership({"h1", "h3", "G1inR3", "G3inR1"}, m1, l, l.alphabet()));
}

TEST(LearnAssumption, SafeModuleGetsUniversalAssumption) {
  EventAlphabet s({"a", "b"});
  auto m = mark_all(dfa_from_words(s, {{"a", "b"}}));
  auto r = learn_assumption(m, universal_dfa(s), s);
  EXPECT_TRUE(language_equal(r.assumption, universal_dfa(s)));
}

TEST(LearnAssumption, ToyExcludesSharedEvent) {
  Toy toy;
  auto a = learn_assumption(toy.m, toy.p, toy.interface).assumption;
  EXPECT_FALSE(a.accepts(Word{"s"}));
  EXPECT_TRUE(a.accepts(Word{"t"}));
  // Weakest: an environment keeps M safe iff its language lies inside A.
  for (const auto& env : small_environments(EventAlphabet({"s", "t"}))) {
    Dfa lifted = lift_to_alphabet(env, toy.interface);
    bool safe = satisfies(parallel_compose(lifted, toy.m), toy.p);
    EXPECT_EQ(safe, !check_triple(env, toy.m, toy.p));
    EXPECT_EQ(safe, language_subset(lift_to_alphabet(env, a.alphabet()), a));
  }
}

TEST(LearnAssumption, MatchesWeakestOnRandomModules) {
  std::mt19937 rng(77);
  EventAlphabet s({"a", "b", "c"});
  EventAlphabet iface({"a", "b"});
  for (int i = 0; i < 30; ++i) {
    auto m = closed(random_dfa(rng, s, 1 + i % 4, 0.7));
    auto p = closed(random_dfa(rng, EventAlphabet({"b", "c"}), 1 + i % 3, 0.8));
    auto a = learn_assumption(m, p, iface).assumption;
    ASSERT_TRUE(language_equal(a, weakest_assumption(m, p, iface))) << i;
    for (const auto& env : small_environments(iface))
      EXPECT_EQ(!check_triple(env, m, p), language_subset(env, a)) << i;
  }
}

TEST(LearnAssumption, WeakestOnCaseStudyWords) {
  Dfa l = case_property();
  Dfa m1 = load_dfa(kCase + "golden_mission_G1.json");
  auto a = learn_assumption(m1, l, l.alphabet()).assumption;
  for (const auto& t : words_up_to(l.alphabet(), 4)) ASSERT_EQ(a.accepts(t), cv_membership(t, m1, l, l.alphabet())) << to_string(t);
}

TEST(SymN, UniversalEverywhereHolds) {
  EventAlphabet s({"a"});
  EXPECT_FALSE(sym_n_check({universal_dfa(s), universal_dfa(s)}, universal_dfa(s)));
}

TEST(SymN, ComplementWordOutsideProperty) {
  EventAlphabet s({"a", "b"});
  auto a1 = complete(dfa_from_words(s, {{}, {"a"}})).dfa;
  auto ce = sym_n_check({a1}, dfa_from_words(s, {{}, {"a"}}));
  ASSERT_TRUE(ce);
  EXPECT_EQ(*ce, (Word{"b"}));
}

TEST(Analyze, FirstRejectingAgent) {
  EventAlphabet s({"a", "b"});
  auto p = mark_all(dfa_from_words(s, {{"a"}}));
  auto only_b = mark_all(dfa_from_words(s, {{"b"}}));
  auto any = universal_dfa(s);
  auto v = analyze_counterexample({"b"}, {only_b, any}, p);
  EXPECT_EQ(v.kind, Verdict::Kind::violated);
  v = analyze_counterexample({"b"}, {p, any}, p);
  EXPECT_EQ(v.kind, Verdict::Kind::refine);
  EXPECT_EQ(v.agent, 0);
  v = analyze_counterexample({"b"}, {any, p}, p);
  EXPECT_EQ(v.kind, Verdict::Kind::refine);
  EXPECT_EQ(v.agent, 1);
}

TEST(Analyze, CaseStudyFirstViolation) {
  Dfa l = case_property();
  std::vector<Dfa> specs;
  for (int i = 1; i <= 3; ++i) specs.push_back(load_dfa(kCase + "golden_mission_G" + std::to_string(i) + ".json"));
  auto v = analyze_counterexample({"h1", "h3", "G1inR1", "G3inR1"}, specs, l);
  EXPECT_EQ(v.kind, Verdict::Kind::violated);
}

TEST(Resynthesize, LiteralWordRemoval) {
  EventAlphabet s({"a", "b"});
  auto plan = mark_all(dfa_from_words(s, {{"a", "b"}}));
  auto out = resynthesize_specs({"a", "b"}, {plan});
  EXPECT_TRUE(language_equal(out[0], mark_all(dfa_from_words(s, {{"a"}}))));
  out = resynthesize_specs({"b"}, {plan});
  EXPECT_TRUE(language_equal(out[0], plan));
}

TEST(Resynthesize, ClassCutRemovesEveryRepetition) {
  EventAlphabet s({"a", "b"});
  auto plan = DfaBuilder(s).initial("0").mark("0").mark("1").edge("0", "a", "1").edge("1", "b", "0").edge("1", "a", "0").build();
  auto cut = cut_class(plan, {"a", "a", "a", "b"});
  EXPECT_FALSE(cut.accepts(Word{"a", "a", "a", "b"}));
  EXPECT_FALSE(cut.accepts(Word{"a", "b"}));
  EXPECT_TRUE(cut.accepts(Word{"a", "a", "a", "a"}));
  EXPECT_TRUE(language_subset(cut, plan));
}

TEST(ChooseCut, PrefersMostRecentWithoutDeadlock) {
  Dfa l = case_property();
  std::vector<Dfa> specs;
  for (int i = 1; i <= 3; ++i) specs.push_back(load_dfa(kCase + "golden_mission_G" + std::to_string(i) + ".json"));
  auto c = choose_cut({"h1", "h3", "G1inR1", "G3inR1"}, specs);
  ASSERT_TRUE(c);
  EXPECT_EQ(c->agent, 2);
  specs[2] = c->spec;
  c = choose_cut({"h1", "h3", "G1inR3", "G3inR3"}, specs);
  ASSERT_TRUE(c);
  EXPECT_EQ(c->agent, 0);
}

TEST(VerifyAndRefine, SeparableNeedsNoRounds) {
  EventAlphabet s1({"a", "c"}, {"a", "c"}), s2({"b", "c"}, {"b", "c"});
  auto l = mark_all(dfa_from_words(EventAlphabet({"a", "b", "c"}), {{"a", "b", "c"}, {"b", "a", "c"}}));
  auto r = verify_and_refine({{"A", s1, std::nullopt}, {"B", s2, std::nullopt}}, l);
  EXPECT_EQ(r.rounds, 0);
  EXPECT_TRUE(r.cuts.empty());
  for (std::size_t i = 0; i < 2; ++i) EXPECT_TRUE(language_equal(r.plans[i], r.initial_specs[i]));
  EXPECT_TRUE(satisfies(parallel_compose(r.plans[0], r.plans[1]), l));
}

TEST(VerifyAndRefine, ExclusiveChoiceRefines) {
  EventAlphabet s1({"a"}, {"a"}), s2({"b"}, {"b"});
  auto l = mark_all(dfa_from_words(EventAlphabet({"a", "b"}), {{"a"}, {"b"}}));
  auto r = verify_and_refine({{"A", s1, std::nullopt}, {"B", s2, std::nullopt}}, l);
  EXPECT_EQ(r.rounds, 1);
  ASSERT_EQ(r.cuts.size(), 1u);
  EXPECT_EQ(r.cuts[0].counterexample, (Word{"a", "b"}));
  EXPECT_TRUE(satisfies(parallel_compose(r.plans[0], r.plans[1]), l));
  for (std::size_t i = 0; i < 2; ++i) EXPECT_TRUE(language_subset(r.specs[i], r.initial_specs[i]));
}

TEST(VerifyAndRefine, UncontrollableDriftIsInfeasible) {
  EventAlphabet s1({"u"}), s2({"w"});
  Dfa g1 = universal_dfa(s1), g2 = universal_dfa(s2);
  auto l = mark_all(dfa_from_words(EventAlphabet({"u", "w"}), {{"u"}, {"w"}}));
  // No nonempty controllable sublanguage of {ε, u} exists under u*.
  EXPECT_TRUE(is_empty(sup_c(project(l, s1), g1)));
  EXPECT_THROW(verify_and_refine({{"A", s1, g1}, {"B", s2, g2}}, l), InfeasibleError);
}

TEST(VerifyAndRefine, RejectsEventOwnedByNoAgent) {
  EventAlphabet s1({"a"}, {"a"});
  auto l = mark_all(dfa_from_words(EventAlphabet({"a", "z"}), {{"a", "z"}}));
  EXPECT_THROW(verify_and_refine({{"A", s1, std::nullopt}}, l), InputError);
}

TEST(VerifyComposition, AgreesWithMonolithicCheck) {
  std::mt19937 rng(4242);
  EventAlphabet s1({"a", "s"}), s2({"b", "s"});
  EventAlphabet g({"a", "b", "s"});
  int violated = 0;
  for (int i = 0; i < 50; ++i) {
    std::vector<Dfa> ms{closed(random_dfa(rng, s1, 1 + i % 3, 0.8)), closed(random_dfa(rng, s2, 1 + i % 4, 0.8))};
    Dfa l = closed(random_dfa(rng, g, 2 + i % 4, 0.85));
    EventAlphabet iface = default_assumption_alphabet({s1, s2}, l, g);
    Verdict v = verify_composition(ms, l, {iface, iface});
    bool holds = satisfies(parallel_compose(ms[0], ms[1]), l);
    ASSERT_NE(v.kind, Verdict::Kind::refine) << i;
    ASSERT_EQ(v.kind == Verdict::Kind::holds, holds) << i;
    if (v.kind == Verdict::Kind::violated) {
      ++violated;
      EXPECT_TRUE(parallel_compose(ms[0], ms[1]).accepts(v.counterexample)) << i;
      EXPECT_FALSE(l.accepts(project_word(v.counterexample, l.alphabet()))) << i;
    }
  }
  EXPECT_GT(violated, 5);
  EXPECT_LT(violated, 45);
}

TEST(VerifyAndRefine, WarnsOnNonTransitiveIndependence) {
  EventAlphabet s1({"a", "c"}, {"a", "c"}), s2({"b"}, {"b"});
  auto l = universal_dfa(EventAlphabet({"a", "b", "c"}));
  auto r = verify_and_refine({{"A", s1, std::nullopt}, {"B", s2, std::nullopt}}, l);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_NE(r.warnings[0].find("not transitive"), std::string::npos);
}

TEST(GlobalControl, CaseStudyUncontrollableEvents) {
  std::vector<AgentModel> agents;
  for (int i = 1; i <= 3; ++i) {
    Dfa p = load_dfa(kCase + "plant_G" + std::to_string(i) + ".json");
    agents.push_back({"G" + std::to_string(i), p.alphabet(), p});
  }
  auto uc = global_uncontrollable({agents[0].alphabet, agents[1].alphabet, agents[2].alphabet}, case_property().alphabet());
  std::sort(uc.begin(), uc.end());
  EXPECT_EQ(uc, (std::vector<std::string>{"h1", "h2", "h3"}));
}
