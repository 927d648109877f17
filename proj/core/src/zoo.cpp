#include "myopic/zoo.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "myopic/errors.hpp"

namespace myopic {

std::string MarkovOrder::to_string() const {
  switch (kind) {
    case Kind::finite:
      return std::to_string(value);
    case Kind::infinite:
      return "infinite";
    case Kind::unknown:
      break;
  }
  return "unknown";
}

namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void require_closed_unit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ValidationError(std::string(name) + " = " + num(v) + " must lie in [0,1]");
  }
}

void require_open_unit(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0)) {
    throw ValidationError(std::string(name) + " = " + num(v) + " must lie in (0,1)");
  }
}

std::vector<std::string> binary_alphabet() { return {"0", "1"}; }

HiddenMarkovProcess stationary_start(HiddenMarkovProcess process) {
  auto pi = stationary_distribution(process);
  if (!pi.converged) {
    throw CapabilityError("stationary distribution did not converge (residual " +
                          num(pi.residual) + ")");
  }
  return process.with_initial(std::move(pi.distribution));
}

HiddenMarkovProcess coin_hmm(double p) {
  Matrix tails(1, 1), heads(1, 1);
  tails(0, 0) = 1.0 - p;
  heads(0, 0) = p;
  RowVector init(1);
  init(0) = 1.0;
  return HiddenMarkovProcess(binary_alphabet(), {"C"}, std::move(init), {tails, heads});
}

ZooProcess from_mixture(ProcessDescriptor descriptor, MixtureProcess mixture) {
  require_valid(mixture);
  auto hmm = mixture_as_hmm(mixture);
  return ZooProcess{std::move(descriptor), std::move(hmm), std::move(mixture)};
}

}  // namespace

ZooProcess biased_coin(double p) {
  require_closed_unit(p, "p");
  ProcessDescriptor d{"biased-coin", {{"p", p}}, MarkovOrder::finite(0), 1, {}, {}};
  return ZooProcess{std::move(d), coin_hmm(p), std::nullopt};
}

ZooProcess n_biased_coins(std::size_t n) {
  if (n < 1) throw ValidationError("ncoins needs N >= 1");
  std::vector<MixtureComponent> comps;
  comps.reserve(n);
  const double w = 1.0 / static_cast<double>(n);
  for (std::size_t i = 1; i <= n; ++i) {
    comps.push_back({w, coin_hmm(static_cast<double>(i) / static_cast<double>(n + 1))});
  }
  // Equal weights may not sum to 1 exactly in floating point.
  double total = 0.0;
  for (const auto& c : comps) total += c.weight;
  comps.back().weight += 1.0 - total;

  ProcessDescriptor d{"ncoins",
                      {{"n", static_cast<double>(n)}},
                      n == 1 ? MarkovOrder::finite(0) : MarkovOrder::infinite(),
                      n,
                      {},
                      {}};
  if (n % 2 == 0) {
    d.notes.push_back("even N: the fair coin is not a component of this family");
  }
  return from_mixture(std::move(d), MixtureProcess(std::move(comps)));
}

ZooProcess golden_mean(double p) {
  require_open_unit(p, "p");
  Matrix t0 = Matrix::Zero(2, 2), t1 = Matrix::Zero(2, 2);
  t0(0, 0) = p;        // A -0-> A
  t1(0, 1) = 1.0 - p;  // A -1-> B
  t0(1, 0) = 1.0;      // B -0-> A
  HiddenMarkovProcess raw(binary_alphabet(), {"A", "B"}, RowVector::Constant(2, 0.5), {t0, t1});
  ProcessDescriptor d{"golden-mean", {{"p", p}}, MarkovOrder::finite(1), 1, {}, {}};
  return ZooProcess{std::move(d), stationary_start(std::move(raw)), std::nullopt};
}

ZooProcess golden_mean_53(double p, std::size_t zeros) {
  require_open_unit(p, "p");
  if (zeros < 1) throw ValidationError("golden-mean-53 needs at least one forced zero");
  const auto n = static_cast<Eigen::Index>(zeros + 1);
  // State 0 is free; state j >= 1 still owes j zeros.
  Matrix t0 = Matrix::Zero(n, n), t1 = Matrix::Zero(n, n);
  t0(0, 0) = 1.0 - p;
  t1(0, n - 1) = p;
  for (Eigen::Index j = 1; j < n; ++j) t0(j, j - 1) = 1.0;
  std::vector<std::string> states{"F"};
  for (std::size_t j = 1; j <= zeros; ++j) states.push_back("Z" + std::to_string(j));
  HiddenMarkovProcess raw(binary_alphabet(), std::move(states),
                          RowVector::Constant(n, 1.0 / static_cast<double>(n)), {t0, t1});
  ProcessDescriptor d{"golden-mean-53",
                      {{"p", p}, {"zeros", static_cast<double>(zeros)}},
                      MarkovOrder::finite(zeros),
                      1,
                      {},
                      {"reconstruction: minimum run of forced zeros after each 1"}};
  return ZooProcess{std::move(d), stationary_start(std::move(raw)), std::nullopt};
}

ZooProcess even_process(double p) {
  require_open_unit(p, "p");
  Matrix t0 = Matrix::Zero(2, 2), t1 = Matrix::Zero(2, 2);
  t0(0, 0) = p;        // A -0-> A
  t1(0, 1) = 1.0 - p;  // A -1-> B
  t1(1, 0) = 1.0;      // B -1-> A
  HiddenMarkovProcess raw(binary_alphabet(), {"A", "B"}, RowVector::Constant(2, 0.5), {t0, t1});
  ProcessDescriptor d{"even", {{"p", p}}, MarkovOrder::infinite(), 1, {}, {}};
  return ZooProcess{std::move(d), stationary_start(std::move(raw)), std::nullopt};
}

ZooProcess simple_nonunifilar_source(double p, double q) {
  require_open_unit(p, "p");
  require_open_unit(q, "q");
  Matrix t0 = Matrix::Zero(2, 2), t1 = Matrix::Zero(2, 2);
  t0(0, 0) = p;        // A -0-> A
  t0(0, 1) = 1.0 - p;  // A -0-> B  (same token, two successors)
  t0(1, 1) = q;        // B -0-> B
  t1(1, 0) = 1.0 - q;  // B -1-> A
  HiddenMarkovProcess raw(binary_alphabet(), {"A", "B"}, RowVector::Constant(2, 0.5), {t0, t1});
  ProcessDescriptor d{"sns", {{"p", p}, {"q", q}}, MarkovOrder::infinite(), 1, {}, {}};
  return ZooProcess{std::move(d), stationary_start(std::move(raw)), std::nullopt};
}

ZooProcess teddy_bear(double p, double q) {
  require_open_unit(p, "p");
  require_open_unit(q, "q");
  if (!(p + q < 1.0)) throw ValidationError("teddy-bear needs p + q < 1");
  Matrix t0 = Matrix::Zero(4, 4), t1 = Matrix::Zero(4, 4), t2 = Matrix::Zero(4, 4);
  t0(0, 0) = p;            // A -0-> A
  t1(0, 1) = q;            // A -1-> B
  t2(0, 2) = 1.0 - p - q;  // A -2-> C1
  t1(1, 0) = 1.0;          // B -1-> A   (ones pair up, as in the Even process)
  t0(2, 3) = 1.0;          // C1 -0-> C2  (2 is followed by two forced zeros)
  t0(3, 0) = 1.0;          // C2 -0-> A
  HiddenMarkovProcess raw({"0", "1", "2"}, {"A", "B", "C1", "C2"}, RowVector::Constant(4, 0.25),
                          {t0, t1, t2});
  ProcessDescriptor d{"teddy-bear",
                      {{"p", p}, {"q", q}},
                      MarkovOrder::infinite(),
                      1,
                      {},
                      {"reconstruction: stand-in with ephemeral and persistent transient beliefs"}};
  return ZooProcess{std::move(d), stationary_start(std::move(raw)), std::nullopt};
}

double parentheses_overflow_mass(double p_open, std::size_t max_depth, std::size_t horizon) {
  std::vector<double> mass(max_depth + 1, 0.0), next(max_depth + 1, 0.0);
  mass[0] = 1.0;
  double overflow = 0.0;
  for (std::size_t step = 0; step < horizon; ++step) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t d = 0; d <= max_depth; ++d) {
      const double m = mass[d];
      if (m == 0.0) continue;
      const double up = d == 0 ? 1.0 : p_open;
      if (d == max_depth) {
        overflow += m * up;
      } else {
        next[d + 1] += m * up;
      }
      if (d > 0) next[d - 1] += m * (1.0 - p_open);
    }
    std::swap(mass, next);
  }
  return overflow;
}

ZooProcess parentheses_matching(double p_open, std::size_t max_depth,
                                std::optional<std::size_t> horizon) {
  require_open_unit(p_open, "p_open");
  if (max_depth < 1) throw ValidationError("parentheses needs max_depth >= 1");
  const auto n = static_cast<Eigen::Index>(max_depth + 1);
  Matrix open = Matrix::Zero(n, n), close = Matrix::Zero(n, n);
  open(0, 1) = 1.0;
  for (Eigen::Index d = 1; d < n; ++d) {
    close(d, d - 1) = 1.0 - p_open;
    open(d, std::min(d + 1, n - 1)) += p_open;
  }
  std::vector<std::string> states;
  for (Eigen::Index d = 0; d < n; ++d) states.push_back("d" + std::to_string(d));
  RowVector init = RowVector::Zero(n);
  init(0) = 1.0;
  const std::size_t h = horizon.value_or(max_depth);
  ProcessDescriptor d{"parentheses",
                      {{"p_open", p_open},
                       {"max_depth", static_cast<double>(max_depth)},
                       {"horizon", static_cast<double>(h)}},
                      MarkovOrder::infinite(),
                      1,
                      {{"overflow_mass", parentheses_overflow_mass(p_open, max_depth, h)}},
                      {"starts at empty stack (not stationary)"}};
  HiddenMarkovProcess process({"(", ")"}, std::move(states), std::move(init), {open, close});
  return ZooProcess{std::move(d), std::move(process), std::nullopt};
}

ZooProcess two_biased_coins(double p1, double p2, double w1) {
  require_closed_unit(p1, "p1");
  require_closed_unit(p2, "p2");
  require_closed_unit(w1, "w1");
  ProcessDescriptor d{"two-coins",
                      {{"p1", p1}, {"p2", p2}, {"w1", w1}},
                      MarkovOrder::infinite(),
                      2,
                      {},
                      {}};
  return from_mixture(std::move(d),
                      MixtureProcess({{w1, coin_hmm(p1)}, {1.0 - w1, coin_hmm(p2)}}));
}

ZooProcess wonka_dursley(double p, double q, double w) {
  require_closed_unit(p, "p");
  require_open_unit(q, "q");
  require_closed_unit(w, "w");
  const std::vector<std::string> alphabet{"something", "blah", "Mr.", "Wonka", "Dursley"};
  auto component = [&](Token name) {
    std::vector<Matrix> t(alphabet.size(), Matrix::Zero(2, 2));
    t[0](0, 0) = (1.0 - q) * (1.0 - p);  // filler "something"
    t[1](0, 0) = (1.0 - q) * p;          // filler "blah"
    t[2](0, 1) = q;                      // "Mr."
    t[name](1, 0) = 1.0;                 // the component's name
    HiddenMarkovProcess raw(alphabet, {"F", "M"}, RowVector::Constant(2, 0.5), std::move(t));
    return stationary_start(std::move(raw));
  };
  ProcessDescriptor d{"wonka-dursley",
                      {{"p", p}, {"q", q}, {"w", w}},
                      MarkovOrder::infinite(),
                      2,
                      {},
                      {"reconstruction: q = name-prefix rate, p = filler mix"}};
  return from_mixture(std::move(d), MixtureProcess({{w, component(3)}, {1.0 - w, component(4)}}));
}

namespace {

double param(const ParameterMap& m, const NamedValues& defaults, const std::string& key) {
  if (auto it = m.find(key); it != m.end()) return it->second;
  for (const auto& [k, v] : defaults) {
    if (k == key) return v;
  }
  throw ValidationError("missing parameter '" + key + "'");
}

std::size_t count_param(const ParameterMap& m, const NamedValues& defaults,
                        const std::string& key) {
  const double v = param(m, defaults, key);
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e9) {
    throw ValidationError("parameter '" + key + "' must be a nonnegative integer");
  }
  return static_cast<std::size_t>(v);
}

std::vector<ZooEntry> make_registry() {
  using MO = MarkovOrder;
  std::vector<ZooEntry> r;
  auto add = [&r](std::string name, std::string summary, NamedValues defaults, MO order,
                  std::size_t comps, bool has_hmm,
                  std::function<ZooProcess(const ParameterMap&, const NamedValues&)> fn) {
    ZooEntry e{std::move(name), std::move(summary), defaults, order, comps, has_hmm, {}};
    e.build = [fn, defaults](const ParameterMap& m) { return fn(m, defaults); };
    r.push_back(std::move(e));
  };
  add("biased-coin", "IID coin, P(1) = p", {{"p", 0.5}}, MO::finite(0), 1, true,
      [](auto& m, auto& d) { return biased_coin(param(m, d, "p")); });
  add("ncoins", "N coins of bias n/(N+1), uniformly drawn per sequence", {{"n", 3}},
      MO::infinite(), 0, true,
      [](auto& m, auto& d) { return n_biased_coins(count_param(m, d, "n")); });
  add("ncoins-inf", "N -> infinity limit of ncoins (uniform bias prior); analytic only", {},
      MO::infinite(), 0, false, [](auto&, auto&) -> ZooProcess {
        throw CapabilityError("ncoins-inf has no finite HMM; use the analytic mixture routes");
      });
  add("golden-mean", "no two consecutive 1s", {{"p", 0.5}}, MO::finite(1), 1, true,
      [](auto& m, auto& d) { return golden_mean(param(m, d, "p")); });
  add("golden-mean-53", "each 1 followed by at least `zeros` forced 0s", {{"p", 0.3}, {"zeros", 5}},
      MO::finite(5), 1, true, [](auto& m, auto& d) {
        return golden_mean_53(param(m, d, "p"), count_param(m, d, "zeros"));
      });
  add("even", "even runs of 1s between 0s", {{"p", 0.5}}, MO::infinite(), 1, true,
      [](auto& m, auto& d) { return even_process(param(m, d, "p")); });
  add("sns", "simple nonunifilar source", {{"p", 0.5}, {"q", 0.5}}, MO::infinite(), 1, true,
      [](auto& m, auto& d) {
        return simple_nonunifilar_source(param(m, d, "p"), param(m, d, "q"));
      });
  add("teddy-bear", "ephemeral and persistent transient beliefs (stand-in)",
      {{"p", 0.5}, {"q", 0.25}}, MO::infinite(), 1, true,
      [](auto& m, auto& d) { return teddy_bear(param(m, d, "p"), param(m, d, "q")); });
  add("parentheses", "balanced-bracket depth walk, truncated at max_depth",
      {{"p_open", 0.5}, {"max_depth", 64}}, MO::infinite(), 1, true, [](auto& m, auto& d) {
        std::optional<std::size_t> horizon;
        if (m.count("horizon")) horizon = count_param(m, d, "horizon");
        return parentheses_matching(param(m, d, "p_open"), count_param(m, d, "max_depth"),
                                    horizon);
      });
  add("two-coins", "two biased coins, one drawn per sequence",
      {{"p1", 0.25}, {"p2", 0.75}, {"w1", 0.5}}, MO::infinite(), 2, true,
      [](auto& m, auto& d) {
        return two_biased_coins(param(m, d, "p1"), param(m, d, "p2"), param(m, d, "w1"));
      });
  add("wonka-dursley", "two components with disjoint name tokens",
      {{"p", 0.4}, {"q", 0.25}, {"w", 0.5}}, MO::infinite(), 2, true, [](auto& m, auto& d) {
        return wonka_dursley(param(m, d, "p"), param(m, d, "q"), param(m, d, "w"));
      });
  return r;
}

}  // namespace

const std::vector<ZooEntry>& zoo_registry() {
  static const std::vector<ZooEntry> registry = make_registry();
  return registry;
}

const ZooEntry& zoo_entry(std::string_view name) {
  for (const auto& e : zoo_registry()) {
    if (e.name == name) return e;
  }
  throw ValidationError("unknown process '" + std::string(name) + "'");
}

ZooProcess build_zoo_process(std::string_view name, const ParameterMap& overrides) {
  const auto& entry = zoo_entry(name);
  for (const auto& [key, value] : overrides) {
    bool known = key == "horizon" && entry.name == "parentheses";
    for (const auto& [k, v] : entry.defaults) known = known || k == key;
    if (!known) {
      throw ValidationError("process '" + entry.name + "' has no parameter '" + key + "'");
    }
  }
  return entry.build(overrides);
}

std::string zoo_registry_json(int indent) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& e : zoo_registry()) {
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    for (const auto& [k, v] : e.defaults) params[k] = v;
    nlohmann::ordered_json item;
    item["name"] = e.name;
    item["summary"] = e.summary;
    item["parameters"] = params;
    item["markov_order"] = e.markov_order.to_string();
    if (e.ergodic_components > 0) {
      item["ergodic_components"] = e.ergodic_components;
    } else {
      item["ergodic_components"] = e.name == "ncoins-inf" ? "infinite" : "n";
    }
    item["has_hmm"] = e.has_hmm;
    out.push_back(std::move(item));
  }
  return out.dump(indent);
}

}  // namespace myopic
