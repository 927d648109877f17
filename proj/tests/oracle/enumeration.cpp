#include "enumeration.hpp"

#include <cmath>
#include <functional>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace oracle {

namespace {

using Vec = std::vector<long double>;

struct Dense {
  std::size_t states = 0;
  std::size_t tokens = 0;
  // t[x][i * states + j]
  std::vector<Vec> t;
  Vec initial;

  explicit Dense(const HiddenMarkovProcess& p) : states(p.state_count()), tokens(p.alphabet_size()) {
    for (std::size_t x = 0; x < tokens; ++x) {
      Vec m(states * states);
      for (std::size_t i = 0; i < states; ++i) {
        for (std::size_t j = 0; j < states; ++j) {
          m[i * states + j] = p.transition(x)(static_cast<long>(i), static_cast<long>(j));
        }
      }
      t.push_back(std::move(m));
    }
    for (std::size_t i = 0; i < states; ++i) initial.push_back(p.initial()(static_cast<long>(i)));
  }

  Vec step(const Vec& alpha, std::size_t x) const {
    Vec out(states, 0.0L);
    for (std::size_t i = 0; i < states; ++i) {
      if (alpha[i] == 0.0L) continue;
      for (std::size_t j = 0; j < states; ++j) out[j] += alpha[i] * t[x][i * states + j];
    }
    return out;
  }
};

long double total(const Vec& v) {
  long double s = 0.0L;
  for (auto x : v) s += x;
  return s;
}

long double xlogx(long double p) { return p > 0.0L ? p * std::log(p) : 0.0L; }

// Visits every word of length <= depth with its forward vector.
void walk(const Dense& d, const Vec& alpha, std::size_t level, std::size_t depth,
          const std::function<void(const Vec&, std::size_t)>& visit) {
  visit(alpha, level);
  if (level == depth) return;
  for (std::size_t x = 0; x < d.tokens; ++x) {
    Vec next = d.step(alpha, x);
    if (total(next) > 0.0L) walk(d, next, level + 1, depth, visit);
  }
}

}  // namespace

bool enumerable(const HiddenMarkovProcess& process) { return process.alphabet_size() <= 3; }

std::vector<double> entropy_curve(const HiddenMarkovProcess& process, std::size_t length) {
  const Dense d(process);
  std::vector<long double> h(length, 0.0L);
  walk(d, d.initial, 0, length - 1, [&](const Vec& alpha, std::size_t level) {
    const long double q = total(alpha);
    long double acc = 0.0L;
    for (std::size_t x = 0; x < d.tokens; ++x) {
      const long double qx = total(d.step(alpha, x));
      acc -= xlogx(qx / q);
    }
    h[level] += q * acc;
  });
  return {h.begin(), h.end()};
}

std::map<std::vector<long long>, double> belief_masses(const HiddenMarkovProcess& process,
                                                       std::size_t length) {
  const Dense d(process);
  std::map<std::vector<long long>, double> out;
  walk(d, d.initial, 0, length, [&](const Vec& alpha, std::size_t level) {
    if (level != length) return;
    const long double q = total(alpha);
    std::vector<long long> key;
    for (auto a : alpha) key.push_back(std::llround(a / q * 1e8L));
    out[key] += static_cast<double>(q);
  });
  return out;
}

std::vector<double> component_loss(const MixtureProcess& mixture, std::size_t c,
                                   std::size_t max_context) {
  std::vector<Dense> comps;
  for (const auto& m : mixture.components()) comps.emplace_back(m.process);
  const std::size_t nx = comps.front().tokens;
  std::vector<long double> loss(max_context + 1, 0.0L);
  // State: forward vectors of every component for the same word.
  std::function<void(const std::vector<Vec>&, std::size_t)> rec =
      [&](const std::vector<Vec>& alphas, std::size_t level) {
        const long double qc = total(alphas[c]);
        if (qc == 0.0L) return;
        long double qmix = 0.0L;
        for (std::size_t k = 0; k < comps.size(); ++k) qmix += mixture[k].weight * total(alphas[k]);
        std::vector<std::vector<Vec>> children(nx);
        for (std::size_t x = 0; x < nx; ++x) {
          long double qmix_x = 0.0L;
          for (std::size_t k = 0; k < comps.size(); ++k) {
            children[x].push_back(comps[k].step(alphas[k], x));
            qmix_x += mixture[k].weight * total(children[x][k]);
          }
          const long double qc_x = total(children[x][c]);
          if (qc_x > 0.0L) loss[level] -= qc_x * std::log(qmix_x / qmix);
        }
        if (level == max_context) return;
        for (std::size_t x = 0; x < nx; ++x) rec(children[x], level + 1);
      };
  std::vector<Vec> start;
  for (const auto& d : comps) start.push_back(d.initial);
  rec(start, 0);
  return {loss.begin(), loss.end()};
}

std::vector<double> perturbed_cross_entropy(const HiddenMarkovProcess& process,
                                            std::size_t length, double eps) {
  const Dense d(process);
  std::vector<long double> c(length, 0.0L);
  const long double u = 1.0L / static_cast<long double>(d.tokens);
  walk(d, d.initial, 0, length - 1, [&](const Vec& alpha, std::size_t level) {
    const long double q = total(alpha);
    long double acc = 0.0L;
    for (std::size_t x = 0; x < d.tokens; ++x) {
      const long double p = total(d.step(alpha, x)) / q;
      const long double pred = (1.0L - eps) * p + eps * u;
      if (p > 0.0L) acc -= p * std::log(pred);
    }
    c[level] += q * acc;
  });
  return {c.begin(), c.end()};
}

long double infinite_coins_direct(std::size_t ell) {
  long double s = 0.0L;
  const long double n = static_cast<long double>(ell) + 2.0L;
  for (std::size_t k = 0; k <= ell; ++k) {
    const long double q = (static_cast<long double>(k) + 1.0L) / n;
    s -= xlogx(q) + xlogx(1.0L - q);
  }
  return s / (static_cast<long double>(ell) + 1.0L);
}

long double beta_quadrature(unsigned a, unsigned b) {
  auto f = [a, b](long double p) { return std::pow(p, a) * std::pow(1.0L - p, b); };
  return boost::math::quadrature::gauss_kronrod<long double, 61>::integrate(f, 0.0L, 1.0L, 0,
                                                                            1e-20L);
}

}  // namespace oracle
