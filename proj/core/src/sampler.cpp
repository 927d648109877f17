#include "myopic/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <limits>
#include <mutex>
#include <thread>

#include "myopic/numeric.hpp"
#include "myopic/philox.hpp"

namespace myopic {

std::vector<std::pair<std::string, std::uint16_t>> Dataset::encoding() const {
  std::vector<std::pair<std::string, std::uint16_t>> out;
  const std::uint16_t offset = spec.bos ? 1 : 0;
  if (spec.bos) out.emplace_back("<bos>", kBosId);
  for (std::size_t i = 0; i < alphabet.size(); ++i) {
    out.emplace_back(alphabet[i], static_cast<std::uint16_t>(i + offset));
  }
  return out;
}

namespace {

struct Outcome {
  double cumulative;
  Token token;
  std::size_t next;
};

// Inverse-CDF tables for one HMM.
struct SamplingTable {
  std::vector<double> initial;  // cumulative
  std::vector<std::vector<Outcome>> rows;

  explicit SamplingTable(const HiddenMarkovProcess& p) {
    double acc = 0.0;
    for (Eigen::Index s = 0; s < p.initial().size(); ++s) {
      acc += p.initial()(s);
      initial.push_back(acc);
    }
    rows.resize(p.state_count());
    for (std::size_t s = 0; s < p.state_count(); ++s) {
      acc = 0.0;
      for (Token x = 0; x < p.alphabet_size(); ++x) {
        for (std::size_t t = 0; t < p.state_count(); ++t) {
          const double w = p.transition(x)(static_cast<Eigen::Index>(s),
                                           static_cast<Eigen::Index>(t));
          if (w > 0.0) {
            acc += w;
            rows[s].push_back({acc, x, t});
          }
        }
      }
    }
  }

  std::size_t draw_initial(double u) const { return pick(initial, u); }

  const Outcome& draw(std::size_t state, double u) const {
    const auto& row = rows[state];
    // Rows sum to 1 only within rounding; scale u so the last outcome
    // absorbs the remainder.
    const double target = u * row.back().cumulative;
    auto it = std::upper_bound(row.begin(), row.end(), target,
                               [](double v, const Outcome& o) { return v < o.cumulative; });
    if (it == row.end()) --it;
    return *it;
  }

  // upper_bound lands on an entry whose cumulative value strictly exceeds
  // its predecessor's, so zero-weight entries are never chosen.
  static std::size_t pick(const std::vector<double>& cum, double u) {
    const double target = u * cum.back();
    auto it = std::upper_bound(cum.begin(), cum.end(), target);
    if (it != cum.end()) return static_cast<std::size_t>(it - cum.begin());
    std::size_t idx = cum.size() - 1;
    while (idx > 0 && cum[idx] == cum[idx - 1]) --idx;
    return idx;
  }
};

void check_spec(const DatasetSpec& spec, std::size_t alphabet_size) {
  if (spec.sequence_length < 1) throw ValidationError("sequence_length must be >= 1");
  if (spec.sequence_count < 1) throw ValidationError("sequence_count must be >= 1");
  const std::size_t ids = alphabet_size + (spec.bos ? 1 : 0);
  if (ids > 65536) {
    throw ValidationError("alphabet of " + std::to_string(alphabet_size) +
                          " tokens does not fit 16-bit ids");
  }
  if (spec.sequence_length + 1 > 0xFFFFFFFFull) {
    throw ValidationError("sequence_length exceeds the 32-bit row width");
  }
}

template <typename Fn>
void parallel_rows(std::size_t count, unsigned threads, Fn&& fn) {
  threads = std::max(1u, threads);
  if (threads == 1 || count < 2) {
    fn(0, count);
    return;
  }
  const std::size_t chunk = (count + threads - 1) / threads;
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex m;
  for (std::size_t begin = 0; begin < count; begin += chunk) {
    const std::size_t end = std::min(count, begin + chunk);
    pool.emplace_back([&, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        std::lock_guard<std::mutex> lock(m);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

Dataset sample_impl(const std::vector<const HiddenMarkovProcess*>& components,
                    const std::vector<double>& weights, const DatasetSpec& spec,
                    unsigned threads) {
  const auto& alphabet = components.front()->alphabet();
  check_spec(spec, alphabet.size());
  std::vector<SamplingTable> tables;
  for (const auto* p : components) tables.emplace_back(*p);
  std::vector<double> cum_weights;
  double acc = 0.0;
  for (double w : weights) cum_weights.push_back(acc += w);

  Dataset out;
  out.spec = spec;
  out.alphabet = alphabet;
  const std::size_t width = out.row_width();
  out.tokens.assign(spec.sequence_count * width, 0);
  out.components.assign(spec.sequence_count, 0);
  const std::uint16_t offset = spec.bos ? 1 : 0;

  parallel_rows(spec.sequence_count, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      SequenceStream stream(spec.seed, i);
      const std::size_t c = SamplingTable::pick(cum_weights, stream.uniform(0));
      const auto& table = tables[c];
      std::size_t state = table.draw_initial(stream.uniform(1));
      std::uint16_t* row = out.tokens.data() + i * width;
      if (spec.bos) *row++ = kBosId;
      for (std::size_t t = 0; t < spec.sequence_length; ++t) {
        const auto& o = table.draw(state, stream.uniform(2 + t));
        row[t] = static_cast<std::uint16_t>(o.token + offset);
        state = o.next;
      }
      out.components[i] = static_cast<std::uint32_t>(c);
    }
  });
  return out;
}

}  // namespace

Dataset sample_dataset(const HiddenMarkovProcess& process, const DatasetSpec& spec,
                       unsigned threads) {
  require_valid(process);
  return sample_impl({&process}, {1.0}, spec, threads);
}

Dataset sample_dataset(const MixtureProcess& mixture, const DatasetSpec& spec,
                       unsigned threads) {
  require_valid(mixture);
  std::vector<const HiddenMarkovProcess*> comps;
  std::vector<double> weights;
  for (const auto& c : mixture.components()) {
    comps.push_back(&c.process);
    weights.push_back(c.weight);
  }
  return sample_impl(comps, weights, spec, threads);
}

Dataset sample_dataset(const ZooProcess& process, DatasetSpec spec, unsigned threads) {
  if (spec.process_name.empty()) spec.process_name = process.descriptor.name;
  if (!spec.descriptor) spec.descriptor = process.descriptor;
  if (process.mixture) return sample_dataset(*process.mixture, spec, threads);
  return sample_dataset(process.process, spec, threads);
}

PluginEstimate plugin_entropy_estimate(const Dataset& dataset, const HiddenMarkovProcess& process,
                                       std::optional<std::size_t> max_position) {
  require_valid(process);
  if (dataset.alphabet.size() != process.alphabet_size()) {
    throw DatasetMismatch("dataset alphabet has " + std::to_string(dataset.alphabet.size()) +
                          " tokens, process has " + std::to_string(process.alphabet_size()));
  }
  const std::size_t length =
      std::min(dataset.spec.sequence_length, max_position.value_or(dataset.spec.sequence_length));
  const std::size_t m = dataset.size();
  const std::size_t nx = process.alphabet_size();
  std::vector<double> mean(length, 0.0), m2(length, 0.0);
  std::vector<RowVector> joint(nx);
  for (std::size_t i = 0; i < m; ++i) {
    RowVector belief = process.initial();
    for (std::size_t t = 0; t < length; ++t) {
      double h = 0.0;
      for (Token x = 0; x < nx; ++x) {
        joint[x] = belief * process.transition(x);
        h += entropy_term(joint[x].sum());
      }
      // Welford update, sequential over sequences for a fixed summation order.
      const double delta = h - mean[t];
      mean[t] += delta / static_cast<double>(i + 1);
      m2[t] += delta * (h - mean[t]);

      const std::uint16_t id = dataset.id(i, t);
      const std::size_t offset = dataset.spec.bos ? 1 : 0;
      if (id < offset || id - offset >= nx) {
        throw DatasetMismatch("sequence " + std::to_string(i) + " position " +
                              std::to_string(t + 1) + ": id " + std::to_string(id) +
                              " is outside the alphabet");
      }
      const Token x = id - offset;
      const double p = joint[x].sum();
      if (!(p > 0.0)) {
        throw DatasetMismatch("sequence " + std::to_string(i) + " position " +
                              std::to_string(t + 1) + ": token '" + process.alphabet()[x] +
                              "' is forbidden by the process (dataset/process mismatch)");
      }
      belief = joint[x] / p;
    }
  }
  PluginEstimate out;
  out.sequences = m;
  out.sem_defined = m > 1;
  const double bound = std::log(static_cast<double>(nx));
  out.curve.values = mean;
  out.curve.kind = CurveKind::plugin_estimate;
  out.curve.method = "plugin";
  out.curve.process_name = dataset.spec.process_name;
  out.curve.alphabet_size = nx;
  out.curve.stationary_start = is_stationary(process);
  for (std::size_t t = 0; t < length; ++t) {
    const double sd =
        m > 1 ? std::sqrt(std::max(0.0, m2[t] / static_cast<double>(m - 1))) : 0.0;
    if (sd > bound * (1.0 + 1e-12) + 1e-15) {
      throw std::logic_error("plug-in standard deviation exceeds log|X|");
    }
    out.stddev.push_back(sd);
    const double sem = out.sem_defined ? sd / std::sqrt(static_cast<double>(m))
                                       : std::numeric_limits<double>::quiet_NaN();
    out.sem.push_back(sem);
    if (out.sem_defined) {
      out.curve.lower.push_back(mean[t] - sem);
      out.curve.upper.push_back(mean[t] + sem);
    }
  }
  return out;
}

}  // namespace myopic
