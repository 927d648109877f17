// Prints one PASS/FAIL line per check; exits 1 if any check fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <myopic/compare.hpp>
#include <myopic/dataset_io.hpp>
#include <myopic/entropy.hpp>
#include <myopic/losslog.hpp>
#include <myopic/msp.hpp>
#include <myopic/nonergodic.hpp>
#include <myopic/numeric.hpp>
#include <myopic/sampler.hpp>
#include <myopic/zoo.hpp>

#include "oracle/cases.hpp"
#include "oracle/enumeration.hpp"

using namespace myopic;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Outcome infinite_coin_asymptote() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto c = infinite_coins_myopic_entropy(16384);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double ell = 16384.0;
  const double err = std::abs(c.at(16384) - (0.5 + 1.0 / (2.0 * (ell + 1.0))));
  const bool analytic = c.asymptote && c.asymptote->value == 0.5 && c.asymptote->method == "analytic";
  return {analytic && err <= 5e-5 && secs < 10.0,
          "asymptote " + (c.asymptote ? fmt(c.asymptote->value) : std::string("none")) +
              ", |h - (1/2 + 1/(2(l+1)))| at l=16384 = " + fmt(err) + ", " + fmt(secs) + " s"};
}

Outcome infinite_coin_power_law() {
  const auto c = infinite_coins_myopic_entropy(16384);
  const auto fit = power_law_diagnostics(c, 0.5, 256, 16384);
  const bool ok = std::abs(fit.slope + 1.0) <= 0.02 && std::abs(fit.intercept + kLn2) <= 0.02;
  return {ok, "slope " + fmt(fit.slope) + ", intercept " + fmt(fit.intercept) + ", R^2 " +
                  fmt(fit.r_squared)};
}

Outcome large_n_matches_limit() {
  const auto n = ncoins_myopic_entropy(1001, 256);
  const auto inf = infinite_coins_myopic_entropy(256);
  double worst = 0.0;
  for (std::size_t l = 0; l <= 256; ++l) worst = std::max(worst, std::abs(n.at(l) - inf.at(l)));
  return {worst <= 2e-3, "max |h_N=1001 - h_inf| over l <= 256 = " + fmt(worst)};
}

Outcome averaging_identity() {
  double worst = 0.0;
  for (auto z : {n_biased_coins(3), n_biased_coins(5), two_biased_coins(), wonka_dursley()}) {
    const auto& mix = *z.mixture;
    const auto h = myopic_entropy_curve(z, 64);
    std::vector<double> avg(64, 0.0);
    for (std::size_t c = 0; c < mix.size(); ++c) {
      const auto loss = component_in_context_loss(mix, c, 63);
      for (std::size_t l = 0; l < 64; ++l) avg[l] += mix[c].weight * loss.at(l);
    }
    for (std::size_t l = 0; l < 64; ++l) worst = std::max(worst, std::abs(avg[l] - h.at(l + 1)));
  }
  return {worst <= 1e-10, "max |sum_c Q(c) loss_c - h| = " + fmt(worst)};
}

Outcome fair_coin_bump() {
  const auto c = ncoins_component_loss(3, 2, 4096);
  double peak = 0.0;
  for (std::size_t l = 1; l <= 32; ++l) peak = std::max(peak, c.at(l));
  const double late = std::abs(c.at(4096) - kLn2);
  return {peak > kLn2 && late <= 0.02,
          "peak - ln2 over [1,32] = " + fmt(peak - kLn2) + ", |loss(4096) - ln2| = " + fmt(late)};
}

Outcome markov_order_flattening() {
  const auto gm = myopic_entropy_curve(golden_mean(), 64);
  double gm_dev = 0.0;
  for (std::size_t l = 2; l <= 64; ++l) gm_dev = std::max(gm_dev, std::abs(gm.at(l) - gm.at(2)));
  const auto g53 = myopic_entropy_curve(golden_mean_53(), 64);
  double g53_dev = 0.0;
  for (std::size_t l = 7; l <= 64; ++l) g53_dev = std::max(g53_dev, std::abs(g53.at(l) - g53.at(6)));
  bool decreasing = false;
  for (std::size_t l = 1; l <= 5; ++l) decreasing = decreasing || g53.at(l + 1) < g53.at(l) - 1e-12;
  return {gm_dev <= 1e-12 && g53_dev <= 1e-12 && decreasing,
          "golden-mean spread after order 1: " + fmt(gm_dev) + "; golden-mean-53 after order 5: " +
              fmt(g53_dev) + (decreasing ? ", decreasing before" : ", NOT decreasing before")};
}

Outcome even_exponential_convergence() {
  const auto c = myopic_entropy_curve(even_process(), 30);
  const auto rate = entropy_rate(even_process());
  const auto fit = exponential_diagnostics(c, rate.value, 5, 30);
  return {fit.r_squared > 0.999, "R^2 of log(h_l - h) vs l on [5,30] = " + fmt(fit.r_squared) +
                                     ", slope " + fmt(fit.slope)};
}

Outcome oracle_equivalence() {
  double worst = 0.0;
  std::size_t cases = 0;
  for (const auto& zc : oracle::small_alphabet_cases()) {
    const auto z = build_zoo_process(zc.name, zc.params);
    const auto expected = oracle::entropy_curve(z.process, 11);
    for (auto method : {CurveMethod::layered_beliefs, CurveMethod::msp_operator}) {
      CurveOptions o;
      o.method = method;
      const auto c = myopic_entropy_curve(z, 11, o);
      for (std::size_t i = 0; i < 11; ++i) worst = std::max(worst, std::abs(c.values[i] - expected[i]));
    }
    ++cases;
  }
  return {worst <= 1e-9, std::to_string(cases) + " processes, both methods, l <= 10: max error " +
                             fmt(worst)};
}

Outcome msp_structure() {
  double worst_row = 0.0;
  bool deterministic = true;
  for (const auto& e : zoo_registry()) {
    if (!e.has_hmm) continue;
    const auto msp = build_msp(build_zoo_process(e.name).process, 12);
    for (const auto& n : msp.nodes()) {
      if (n.node_class == NodeClass::unresolved) continue;
      double sum = 0.0;
      std::vector<int> seen(msp.alphabet().size(), 0);
      for (const auto& edge : n.edges) {
        sum += edge.probability;
        deterministic = deterministic && ++seen[edge.token] == 1;
      }
      worst_row = std::max(worst_row, std::abs(sum - 1.0));
    }
  }
  const auto sns = build_msp(simple_nonunifilar_source().process, 20);
  const auto sizes = sns.layer_sizes();
  bool growing = sizes.size() == 21;
  std::size_t total = sizes.empty() ? 0 : sizes[0], prev = total;
  for (std::size_t d = 1; growing && d <= 20; ++d) {
    total += sizes[d];
    growing = total > prev;
    prev = total;
  }
  return {worst_row <= 1e-10 && deterministic && growing,
          "max |row sum - 1| = " + fmt(worst_row) + (deterministic ? ", deterministic" : ", NOT deterministic") +
              ", sns nodes through depth 20: " + std::to_string(total) +
              (growing ? " (strictly growing)" : " (NOT growing)")};
}

Outcome plugin_estimate() {
  DatasetSpec s;
  s.sequence_length = 64;
  s.sequence_count = 20000;
  s.seed = 2024;
  const auto z = even_process();
  const auto d1 = sample_dataset(z, s, 1);
  const auto d4 = sample_dataset(z, s, 4);
  const auto d7 = sample_dataset(z, s, 7);
  const bool identical = dataset_binary(d1) == dataset_binary(d4) && dataset_binary(d1) == dataset_binary(d7);
  const auto est = plugin_entropy_estimate(d1, z.process);
  const auto theory = myopic_entropy_curve(z, 64);
  double worst_z = 0.0, worst_sd = 0.0;
  bool within = true;
  for (std::size_t l = 0; l < 64; ++l) {
    const double gap = std::abs(est.curve.values[l] - theory.values[l]);
    within = within && gap <= 3.0 * est.sem[l] + 1e-12;
    if (est.sem[l] > 0.0) worst_z = std::max(worst_z, gap / est.sem[l]);
    worst_sd = std::max(worst_sd, est.stddev[l]);
  }
  const bool sd_ok = worst_sd <= std::log(2.0);
  return {within && identical && sd_ok,
          "max |gap|/SEM = " + fmt(worst_z) + ", max sd " + fmt(worst_sd) +
              (identical ? ", identical across 1/4/7 threads" : ", DIFFERS across threads")};
}

Outcome bound_flags() {
  const auto theory = heldout_loss_lower_bound(even_process(), 64);
  LossLog worse, equal;
  for (std::size_t l = 1; l <= 64; ++l) {
    worse.rows.push_back({0, l, theory.at(l) - 0.1, 0.001, 1000});
    equal.rows.push_back({0, l, theory.at(l), 0.001, 1000});
  }
  const auto bad = compare_to_theory(worse, theory);
  const auto good = compare_to_theory(equal, theory);
  return {bad.total_violations == 64 && good.total_violations == 0,
          "theory-0.1 flags " + std::to_string(bad.total_violations) + "/64, theory-equal flags " +
              std::to_string(good.total_violations)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"infinite-coins-asymptote", infinite_coin_asymptote},
      {"infinite-coins-power-law", infinite_coin_power_law},
      {"ncoins-1001-tracks-limit", large_n_matches_limit},
      {"averaging-identity", averaging_identity},
      {"fair-coin-bump", fair_coin_bump},
      {"markov-order-flattening", markov_order_flattening},
      {"even-exponential-convergence", even_exponential_convergence},
      {"oracle-equivalence", oracle_equivalence},
      {"msp-structure", msp_structure},
      {"plugin-estimate", plugin_estimate},
      {"loss-bound-flags", bound_flags},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << "\n";
    failures += o.pass ? 0 : 1;
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed\n";
  return failures == 0 ? 0 : 1;
}
