#include <cmath>
#include <map>
#include <set>

#include <gtest/gtest.h>
#include <json.hpp>

#include <myopic/errors.hpp>
#include <myopic/numeric.hpp>
#include <myopic/belief_index.hpp>
#include <myopic/entropy.hpp>
#include <myopic/nonergodic.hpp>
#include <myopic/zoo.hpp>

using namespace myopic;

TEST(Zoo, RegistryNamesAreUnique) {
  std::set<std::string> names;
  for (const auto& e : zoo_registry()) EXPECT_TRUE(names.insert(e.name).second) << e.name;
  for (const char* n : {"biased-coin", "ncoins", "ncoins-inf", "golden-mean", "golden-mean-53",
                        "even", "sns", "teddy-bear", "parentheses", "two-coins",
                        "wonka-dursley"}) {
    EXPECT_TRUE(names.count(n)) << n;
  }
}

TEST(Zoo, EveryFiniteEntryBuildsAValidProcess) {
  for (const auto& e : zoo_registry()) {
    if (!e.has_hmm) continue;
    const auto z = build_zoo_process(e.name);
    EXPECT_TRUE(validate(z.process).valid()) << e.name << ": " << validate(z.process).summary();
    EXPECT_EQ(z.descriptor.name, e.name);
    if (z.mixture) EXPECT_TRUE(validate(*z.mixture).valid()) << e.name;
  }
}

TEST(Zoo, StationaryStartsExceptParentheses) {
  for (const auto& e : zoo_registry()) {
    if (!e.has_hmm) continue;
    const auto z = build_zoo_process(e.name);
    if (e.name == "parentheses") {
      EXPECT_FALSE(is_stationary(z.process));
    } else {
      EXPECT_TRUE(is_stationary(z.process, 1e-10)) << e.name;
    }
  }
}

TEST(Zoo, ParameterErrors) {
  EXPECT_THROW(build_zoo_process("nope"), ValidationError);
  EXPECT_THROW(build_zoo_process("golden-mean", {{"q", 0.2}}), ValidationError);
  EXPECT_THROW(build_zoo_process("golden-mean", {{"p", 1.5}}), ValidationError);
  EXPECT_THROW(build_zoo_process("ncoins", {{"n", 2.5}}), ValidationError);
  EXPECT_THROW(build_zoo_process("ncoins", {{"n", 0}}), ValidationError);
  EXPECT_THROW(build_zoo_process("ncoins-inf"), CapabilityError);
  EXPECT_THROW(teddy_bear(0.6, 0.5), ValidationError);
}

TEST(Zoo, MarkovOrders) {
  EXPECT_EQ(golden_mean().descriptor.markov_order.value, 1u);
  EXPECT_EQ(golden_mean_53().descriptor.markov_order.value, 5u);
  EXPECT_TRUE(golden_mean_53().descriptor.markov_order.is_finite());
  EXPECT_FALSE(even_process().descriptor.markov_order.is_finite());
  EXPECT_EQ(biased_coin(0.3).descriptor.markov_order.to_string(), "0");
}

TEST(Zoo, NCoinsBiasesAndWeights) {
  const auto z = n_biased_coins(4);
  ASSERT_TRUE(z.mixture);
  ASSERT_EQ(z.mixture->size(), 4u);
  double total = 0.0;
  for (std::size_t c = 0; c < 4; ++c) {
    const auto& comp = (*z.mixture)[c];
    total += comp.weight;
    EXPECT_NEAR(comp.process.transition(1)(0, 0), (c + 1) / 5.0, 1e-15);
  }
  EXPECT_NEAR(total, 1.0, 1e-15);
  ASSERT_EQ(z.descriptor.notes.size(), 1u);
  EXPECT_NE(z.descriptor.notes[0].find("even N"), std::string::npos);
  EXPECT_TRUE(n_biased_coins(3).descriptor.notes.empty());
}

TEST(Zoo, GoldenMeanForbidsDoubleOnes) {
  const auto z = golden_mean(0.5);
  EXPECT_EQ(sequence_probability(z.process, Word{1, 1}), 0.0);
  EXPECT_NEAR(sequence_probability(z.process, Word{1}), 1.0 / 3.0, 1e-12);
}

TEST(Zoo, GoldenMean53ForcesZeros) {
  const auto z = golden_mean_53(0.3, 5);
  EXPECT_EQ(sequence_probability(z.process, Word{1, 0, 0, 0, 0, 1}), 0.0);
  EXPECT_GT(sequence_probability(z.process, Word{1, 0, 0, 0, 0, 0, 1}), 0.0);
}

TEST(Zoo, EvenProcessRunsOfOnesAreEven) {
  const auto z = even_process(0.5);
  // 0 1 0 : a single 1 between zeros is impossible.
  EXPECT_EQ(sequence_probability(z.process, Word{0, 1, 0}), 0.0);
  EXPECT_GT(sequence_probability(z.process, Word{0, 1, 1, 0}), 0.0);
}

TEST(Zoo, ParenthesesOverflowMass) {
  EXPECT_EQ(parentheses_overflow_mass(0.5, 8, 8), 0.0);
  const double m = parentheses_overflow_mass(0.5, 8, 200);
  EXPECT_GT(m, 0.0);
  EXPECT_LE(m, 1.0);
  EXPECT_GE(parentheses_overflow_mass(0.5, 8, 400), m);
  const auto z = parentheses_matching(0.5, 8, 200);
  ASSERT_EQ(z.descriptor.diagnostics.size(), 1u);
  EXPECT_DOUBLE_EQ(z.descriptor.diagnostics[0].second, m);
  // Cannot close from the empty stack.
  EXPECT_EQ(sequence_probability(z.process, Word{1}), 0.0);
}

TEST(Zoo, WonkaNamesFollowMr) {
  const auto z = wonka_dursley();
  const auto& p = z.process;
  const auto w = p.encode(std::vector<std::string>{"Mr.", "Wonka", "blah", "Mr.", "Wonka"});
  EXPECT_GT(sequence_probability(p, w), 0.0);
  const auto mixed =
      p.encode(std::vector<std::string>{"Mr.", "Wonka", "blah", "Mr.", "Dursley"});
  EXPECT_EQ(sequence_probability(p, mixed), 0.0);
  const auto bare = p.encode(std::vector<std::string>{"blah", "Wonka"});
  EXPECT_EQ(sequence_probability(p, bare), 0.0);
}

TEST(Zoo, RegistryJson) {
  const auto doc = nlohmann::json::parse(zoo_registry_json());
  ASSERT_TRUE(doc.is_array());
  EXPECT_EQ(doc.size(), zoo_registry().size());
  bool saw_inf = false;
  for (const auto& item : doc) {
    EXPECT_TRUE(item.contains("parameters"));
    EXPECT_TRUE(item.contains("markov_order"));
    if (item["name"] == "ncoins-inf") {
      saw_inf = true;
      EXPECT_EQ(item["ergodic_components"], "infinite");
      EXPECT_FALSE(item["has_hmm"].get<bool>());
    }
  }
  EXPECT_TRUE(saw_inf);
}

TEST(Zoo, SnsZeroRunsKeepChangingTheBelief) {
  for (auto z : {simple_nonunifilar_source(), simple_nonunifilar_source(0.3, 0.3)}) {
    Belief b = Belief::initial(z.process);
    for (std::size_t k = 0; k <= 30; ++k) {
      const auto next = *belief_update(z.process, b, 0).next;
      EXPECT_GT(linf_distance(b.weights(), next.weights()), 1e-9) << k;
      b = next;
    }
  }
}

TEST(Zoo, TwoCoinsBeliefDependsOnlyOnCounts) {
  const auto z = two_biased_coins();
  std::map<std::size_t, RowVector> by_heads;
  for (unsigned mask = 0; mask < 64; ++mask) {
    Belief b = Belief::initial(z.process);
    std::size_t heads = 0;
    for (int t = 0; t < 6; ++t) {
      const Token x = (mask >> t) & 1u;
      heads += x;
      b = *belief_update(z.process, b, x).next;
    }
    auto [it, fresh] = by_heads.emplace(heads, b.weights());
    if (!fresh) EXPECT_LT(linf_distance(it->second, b.weights()), 1e-14) << mask;
  }
  EXPECT_EQ(by_heads.size(), 7u);
}

TEST(Zoo, WonkaPosteriorCollapsesOnFirstName) {
  const auto z = wonka_dursley();
  Belief b = Belief::initial(z.process);
  for (const char* label : {"blah", "Mr.", "Dursley"}) {
    b = *belief_update(z.process, b, *z.process.token_index(label)).next;
  }
  // States 0..1 belong to Wonka, 2..3 to Dursley.
  EXPECT_EQ(b[0] + b[1], 0.0);
  EXPECT_NEAR(b[2] + b[3], 1.0, 1e-15);
}

TEST(Zoo, DeclaredMarkovOrderMatchesFlattening) {
  for (auto z : {biased_coin(0.3), golden_mean(0.4), golden_mean_53(0.3, 5), golden_mean_53(0.5, 3)}) {
    const auto order = z.descriptor.markov_order.value;
    const auto c = myopic_entropy_curve(z, 40);
    for (std::size_t l = order + 2; l <= 40; ++l) EXPECT_NEAR(c.at(l), c.at(order + 1), 1e-10);
    if (order > 0) EXPECT_GT(c.at(order) - c.at(order + 1), 1e-10) << z.descriptor.name;
  }
}

TEST(Zoo, ParenthesesTailIsNotExponential) {
  // From the empty stack h_l = ln 2 * (1 - P(depth 0 after l-1 tokens)), and the
  // return probability decays like a power of l; only odd positions can
  // return.
  const auto paren = myopic_entropy_curve(parentheses_matching(0.5, 64), 64);
  std::vector<double> x, y;
  for (std::size_t l = 5; l <= 63; l += 2) {
    x.push_back(static_cast<double>(l));
    y.push_back(-paren.at(l));
  }
  const double ln2 = std::log(2.0);
  const auto ex = exponential_diagnostics(x, y, -ln2, 5, 63);
  const auto pw = power_law_diagnostics(x, y, -ln2, 5, 63);
  EXPECT_LT(ex.r_squared, 0.999);
  EXPECT_GT(pw.r_squared, ex.r_squared);
  EXPECT_NEAR(pw.slope, -0.5, 0.05);
}
