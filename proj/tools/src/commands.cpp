#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iostream>
#include <memory>

#include "common.hpp"

namespace myopic::cli {

namespace {

ojson parse_json(const std::string& text) { return ojson::parse(text); }

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------- list

struct ListArgs {};

void run_list(const ListArgs&, RunRecord&, Output& out) {
  out.primary("processes.json", zoo_registry_json(2) + "\n");
}

// -------------------------------------------------------------- sample

struct SampleArgs {
  ProcessArgs process;
  std::size_t length = 100;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  bool no_bos = false;
  std::string format = "both";
  unsigned threads = 1;
};

void run_sample(const SampleArgs& a, RunRecord& rec, Output& out) {
  const auto sel = resolve_process(a.process);
  const auto& zoo = sel.require_hmm();
  if (a.format != "bin" && a.format != "jsonl" && a.format != "both") {
    throw ValidationError("--format must be bin, jsonl or both");
  }
  if (!out.to_directory() && a.format == "bin") {
    throw ValidationError("binary output needs --out");
  }
  DatasetSpec spec;
  spec.process_name = sel.name;
  spec.descriptor = zoo.descriptor;
  spec.sequence_length = a.length;
  spec.sequence_count = a.count;
  spec.seed = a.seed;
  spec.bos = !a.no_bos;
  rec.seed = a.seed;
  rec.parameters["process"] = sel.describe();
  rec.parameters["sequence_length"] = a.length;
  rec.parameters["sequence_count"] = a.count;
  rec.parameters["bos"] = spec.bos;
  rec.parameters["format"] = a.format;
  rec.parameters["threads"] = a.threads;

  const auto data = sample_dataset(zoo, spec, a.threads);
  if (!out.to_directory()) {
    out.primary("dataset.jsonl", dataset_jsonl(data));
    return;
  }
  if (a.format != "jsonl") out.primary("dataset.bin", dataset_binary(data));
  if (a.format != "bin") out.primary("dataset.jsonl", dataset_jsonl(data));
  out.secondary("meta.json", dataset_meta_json(data, sel.generator_json()));
}

// ----------------------------------------------------------------- msp

struct MspArgs {
  ProcessArgs process;
  std::size_t depth = 32;
  double merge_tol = kDefaultMergeTolerance;
  std::string format = "dot";
};

void run_msp(const MspArgs& a, RunRecord& rec, Output& out) {
  const auto sel = resolve_process(a.process);
  const auto& zoo = sel.require_hmm();
  const auto format = parse_graph_format(a.format);
  rec.parameters["process"] = sel.describe();
  rec.parameters["depth"] = a.depth;
  rec.parameters["merge_tolerance"] = a.merge_tol;
  rec.parameters["format"] = a.format;

  const auto msp = build_msp(zoo.process, a.depth, a.merge_tol);
  out.primary(format == GraphFormat::dot ? "msp.dot" : "msp.json", export_msp_graph(msp, format));

  ojson summary;
  summary["nodes"] = msp.size();
  summary["closed"] = msp.closed();
  summary["closure_depth"] = msp.closure().depth;
  summary["construction_depth"] = msp.construction_depth();
  summary["layer_sizes"] = msp.layer_sizes();
  ojson classes = ojson::object();
  for (const auto& n : msp.nodes()) {
    const std::string key = to_string(n.node_class);
    classes[key] = classes.value(key, 0) + 1;
  }
  summary["classes"] = classes;
  out.secondary("summary.json", dump(summary));
}

// ------------------------------------------------------------- entropy

struct EntropyArgs {
  ProcessArgs process;
  std::size_t length = 64;
  std::string method;
  std::optional<std::size_t> max_depth;
  double merge_tol = kDefaultMergeTolerance;
  std::string units = "nats";
  bool bound = false;
  bool no_rate = false;
  bool excess = false;
  std::string dataset;
};

void run_plugin(const EntropyArgs& a, const Selected& sel, Units units, RunRecord& rec,
                Output& out) {
  const auto& zoo = sel.require_hmm();
  const auto data = read_dataset(a.dataset);
  rec.inputs.push_back(a.dataset);
  rec.parameters["dataset"] = a.dataset;
  rec.parameters["length"] = std::min(a.length, data.spec.sequence_length);
  auto est = plugin_entropy_estimate(data, zoo.process, a.length);
  est.curve.process_name = sel.name;
  est.curve.descriptor = zoo.descriptor;
  out.primary("plugin.csv", curve_csv(est.curve, units));
  auto meta = parse_json(curve_metadata_json(est.curve, units));
  meta["sequences"] = est.sequences;
  meta["sem_defined"] = est.sem_defined;
  meta["band"] = est.sem_defined ? "mean -/+ 1 SEM" : "none (single sequence)";
  out.secondary("plugin.json", dump(meta));
}

EntropyCurve closed_form_curve(const ComponentLossCurve& c, std::size_t length) {
  auto curve = to_entropy_curve(c);
  curve.values.resize(length);
  if (!curve.lower.empty()) {
    curve.lower.resize(length);
    curve.upper.resize(length);
  }
  return curve;
}

void run_entropy(const EntropyArgs& a, RunRecord& rec, Output& out) {
  const auto sel = resolve_process(a.process);
  const Units units = parse_units(a.units);
  if (a.length < 1) throw ValidationError("--length must be >= 1");
  rec.parameters["process"] = sel.describe();
  rec.parameters["length"] = a.length;
  rec.parameters["units"] = a.units;
  if (!a.dataset.empty()) {
    run_plugin(a, sel, units, rec, out);
    return;
  }

  EntropyCurve curve;
  std::optional<EntropyRate> rate;
  const bool ncoins = sel.zoo && sel.name == "ncoins";
  if (sel.infinite_coins || (ncoins && a.method.empty())) {
    ComponentLossCurve c;
    if (sel.infinite_coins) {
      c = infinite_coins_myopic_entropy(a.length - 1);
    } else {
      const auto n = static_cast<std::size_t>(sel.overrides.count("n") ? sel.overrides.at("n") : 3);
      c = ncoins_myopic_entropy(n, a.length - 1);
    }
    curve = closed_form_curve(c, a.length);
    curve.process_name = sel.name;
    if (sel.zoo) curve.descriptor = sel.zoo->descriptor;
    if (c.asymptote) {
      rate = EntropyRate{c.asymptote->value, c.asymptote->lower, c.asymptote->upper,
                         c.asymptote->method, true, true, 0};
    }
    rec.parameters["method"] = curve.method;
  } else {
    const auto& zoo = sel.require_hmm();
    CurveOptions opts;
    if (!a.method.empty()) opts.method = parse_curve_method(a.method);
    opts.max_depth = a.max_depth;
    opts.merge_tolerance = a.merge_tol;
    rec.parameters["method"] = to_string(opts.method);
    rec.parameters["merge_tolerance"] = a.merge_tol;
    if (a.max_depth) rec.parameters["max_depth"] = *a.max_depth;
    curve = myopic_entropy_curve(zoo, a.length, opts);
    if (!a.no_rate) {
      RateOptions ro;
      ro.merge_tolerance = a.merge_tol;
      rate = entropy_rate(zoo, ro);
    }
  }
  if (a.bound) curve.kind = CurveKind::loss_bound;
  rec.parameters["kind"] = to_string(curve.kind);
  if (rate && !a.no_rate) {
    curve.asymptote = CurveAsymptote{rate->value, rate->lower, rate->upper, rate->method};
  }
  out.primary("curve.csv", curve_csv(curve, units));
  out.secondary("curve.json", curve_metadata_json(curve, units));
  if (a.excess) {
    if (!rate) throw ValidationError("--excess needs the entropy rate (drop --no-rate)");
    const auto e = excess_entropy(curve, *rate);
    std::string csv = "position,excess_" + std::string(to_string(units)) + ",lower,upper\n";
    for (std::size_t i = 0; i < e.partial.size(); ++i) {
      csv += std::to_string(i + 1) + ',' + format_double(in_units(e.partial[i], units)) + ',' +
             format_double(in_units(e.partial_lower[i], units)) + ',' +
             format_double(in_units(e.partial_upper[i], units)) + '\n';
    }
    out.secondary("excess.csv", csv);
    ojson ej;
    ej["estimate"] = std::isfinite(e.estimate) ? ojson(in_units(e.estimate, units)) : ojson(nullptr);
    ej["lower"] = in_units(e.lower, units);
    ej["upper"] = std::isfinite(e.upper) ? ojson(in_units(e.upper, units)) : ojson(nullptr);
    ej["divergent"] = e.divergent;
    ej["tail_model"] = e.tail_model;
    ej["tail_exponent"] = e.tail_exponent;
    ej["tail_r_squared"] = e.tail_r_squared;
    ej["units"] = to_string(units);
    out.secondary("excess.json", dump(ej));
  }
}

// ------------------------------------------------------------- mixture

struct MixtureArgs {
  ProcessArgs process;
  std::size_t length = 64;
  std::optional<std::size_t> component;
  std::string method;
  double bias = 0.5;
  std::string units = "nats";
};

ojson curve_summary(const ComponentLossCurve& c, Units units) {
  ojson j = parse_json(curve_metadata_json(c, units));
  j["first"] = in_units(c.values.front(), units);
  j["last"] = in_units(c.values.back(), units);
  const auto peak = std::max_element(c.values.begin(), c.values.end());
  j["max"] = in_units(*peak, units);
  j["argmax_context"] = static_cast<std::size_t>(peak - c.values.begin());
  return j;
}

void run_mixture(const MixtureArgs& a, RunRecord& rec, Output& out) {
  const auto sel = resolve_process(a.process);
  const Units units = parse_units(a.units);
  rec.parameters["process"] = sel.describe();
  rec.parameters["max_context"] = a.length;
  rec.parameters["units"] = a.units;
  ojson summary;
  summary["process"] = sel.name;
  summary["units"] = to_string(units);
  summary["max_context"] = a.length;

  if (sel.infinite_coins) {
    rec.parameters["bias"] = a.bias;
    const auto c = infinite_coins_component_loss(a.bias, a.length);
    const auto avg = infinite_coins_myopic_entropy(a.length);
    out.secondary("component.csv", curve_csv(c, units));
    out.secondary("component.json", curve_metadata_json(c, units));
    out.secondary("average.csv", curve_csv(avg, units));
    out.secondary("average.json", curve_metadata_json(avg, units));
    summary["bias"] = a.bias;
    summary["component"] = curve_summary(c, units);
    summary["average"] = curve_summary(avg, units);
    out.primary("summary.json", dump(summary));
    return;
  }

  const auto& zoo = sel.require_hmm();
  if (!zoo.mixture) {
    throw ValidationError("'" + sel.name + "' is ergodic; `mixture` needs a mixture process");
  }
  const auto& mix = *zoo.mixture;
  const bool closed_form = sel.name == "ncoins" && a.method != "belief-exact";
  if (!a.method.empty() && a.method != "belief-exact" && a.method != "closed-form") {
    throw ValidationError("--method must be closed-form or belief-exact");
  }
  if (!closed_form && a.method == "closed-form") {
    throw CapabilityError("closed form exists only for ncoins");
  }
  rec.parameters["method"] = closed_form ? "closed-form" : "belief-exact";

  std::vector<std::size_t> which;
  if (a.component) {
    if (*a.component >= mix.size()) {
      throw ValidationError("--component must be below " + std::to_string(mix.size()));
    }
    which.push_back(*a.component);
  } else {
    for (std::size_t c = 0; c < mix.size(); ++c) which.push_back(c);
  }
  std::vector<ComponentLossCurve> curves;
  for (auto c : which) {
    auto curve = closed_form ? ncoins_component_loss(mix.size(), c + 1, a.length)
                             : component_in_context_loss(mix, c, a.length);
    curve.component = c;
    curve.process_name = sel.name;
    curves.push_back(std::move(curve));
  }

  ComponentLossCurve average;
  if (closed_form) {
    average = ncoins_myopic_entropy(mix.size(), a.length);
  } else {
    const auto h = myopic_entropy_curve(zoo.process, a.length + 1);
    average.values = h.values;
    average.provenance = LossProvenance::belief_exact;
  }
  average.process_name = sel.name;
  if (!average.asymptote) {
    const auto rate = entropy_rate(mix);
    average.asymptote = CurveAsymptote{rate.value, rate.lower, rate.upper, rate.method};
  }

  ojson comps = ojson::array();
  for (const auto& c : curves) {
    const std::string stem = "component_" + std::to_string(*c.component);
    out.secondary(stem + ".csv", curve_csv(c, units));
    out.secondary(stem + ".json", curve_metadata_json(c, units));
    auto j = curve_summary(c, units);
    j["weight"] = mix[*c.component].weight;
    comps.push_back(j);
  }
  out.secondary("average.csv", curve_csv(average, units));
  out.secondary("average.json", curve_metadata_json(average, units));
  summary["components"] = comps;
  summary["average"] = curve_summary(average, units);
  if (curves.size() == mix.size()) {
    double worst = 0.0;
    for (std::size_t l = 0; l <= a.length; ++l) {
      double acc = 0.0;
      for (std::size_t c = 0; c < mix.size(); ++c) acc += mix[c].weight * curves[c].values[l];
      worst = std::max(worst, std::abs(acc - average.values[l]));
    }
    summary["averaging_identity_max_residual_nats"] = worst;
  }
  out.primary("summary.json", dump(summary));
}

// ------------------------------------------------------------- compare

struct CompareArgs {
  ProcessArgs process;
  std::string log;
  std::optional<std::size_t> length;
  std::string method;
  std::string phase;
  double min_drop = 0.02;
  std::string dataset;
  std::string predictions;
  std::vector<std::string> names{"Wonka", "Dursley"};
};

void run_compare(const CompareArgs& a, RunRecord& rec, Output& out) {
  ojson report;
  const bool names = !a.dataset.empty() || !a.predictions.empty();
  if (a.log.empty() && !names) {
    throw ValidationError("compare needs --log, or --dataset with --predictions");
  }
  if (names && (a.dataset.empty() || a.predictions.empty())) {
    throw ValidationError("--dataset and --predictions go together");
  }
  if (!a.log.empty()) {
    const auto log = read_losslog(a.log);
    rec.inputs.push_back(a.log);
    const bool have_process = !a.process.name.empty() || !a.process.file.empty();
    if (have_process) {
      const auto sel = resolve_process(a.process);
      const std::size_t length = a.length.value_or(log.max_position());
      rec.parameters["process"] = sel.describe();
      rec.parameters["length"] = length;
      EntropyCurve theory;
      if (sel.infinite_coins) {
        theory = closed_form_curve(infinite_coins_myopic_entropy(length - 1), length);
      } else {
        CurveOptions opts;
        if (!a.method.empty()) opts.method = parse_curve_method(a.method);
        theory = heldout_loss_lower_bound(sel.require_hmm(), length, opts);
      }
      theory.process_name = sel.name;
      const auto cmp = compare_to_theory(log, theory);
      report["comparison"] = parse_json(comparison_json(cmp));
      for (const auto& cp : cmp.checkpoints) {
        out.secondary("compare_step" + std::to_string(cp.step) + ".csv", comparison_csv(cp));
      }
    } else if (a.phase.empty()) {
      throw ValidationError("--log needs a theory process (--process) or --phase");
    }
    if (!a.phase.empty()) {
      const auto [b, e] = parse_window(a.phase);
      PhaseChangeOptions po;
      po.min_drop = a.min_drop;
      rec.parameters["phase_positions"] = a.phase;
      rec.parameters["min_drop"] = a.min_drop;
      report["phase_change"] = parse_json(phase_change_json(phase_change_detector(log, b, e, po)));
    }
  }
  if (names) {
    const auto data = read_dataset(a.dataset);
    const auto preds = read_token_losses(a.predictions);
    rec.inputs.push_back(a.dataset);
    rec.inputs.push_back(a.predictions);
    rec.parameters["names"] = a.names;
    report["name_conditional"] =
        parse_json(name_conditional_json(name_conditional_loss(data, preds, a.names)));
  }
  out.primary("report.json", dump(report));
}

// ------------------------------------------------------------ powerlaw

struct PowerlawArgs {
  ProcessArgs process;
  std::size_t length = 1024;
  std::string window;
  std::string model = "both";
  std::optional<double> asymptote;
};

ojson fit_json(const PowerLawFit& f) {
  ojson j;
  j["slope"] = f.slope;
  j["intercept"] = f.intercept;
  j["r_squared"] = f.r_squared;
  j["points"] = f.points;
  double worst = 0.0;
  for (double r : f.residuals) worst = std::max(worst, std::abs(r));
  j["max_abs_log_residual"] = worst;
  return j;
}

void run_powerlaw(const PowerlawArgs& a, RunRecord& rec, Output& out) {
  const auto sel = resolve_process(a.process);
  const auto [begin, end] = parse_window(a.window);
  if (a.model != "power" && a.model != "exponential" && a.model != "both") {
    throw ValidationError("--model must be power, exponential or both");
  }
  rec.parameters["process"] = sel.describe();
  rec.parameters["length"] = a.length;
  rec.parameters["window"] = a.window;
  rec.parameters["model"] = a.model;

  std::vector<double> idx, values;
  double h = 0.0;
  std::string h_method, index_kind;
  ojson warnings = ojson::array();
  if (sel.infinite_coins || sel.name == "ncoins") {
    ComponentLossCurve c;
    if (sel.infinite_coins) {
      c = infinite_coins_myopic_entropy(a.length);
    } else {
      c = ncoins_myopic_entropy(sel.zoo->mixture->size(), a.length);
    }
    values = c.values;
    for (std::size_t i = 0; i < values.size(); ++i) idx.push_back(static_cast<double>(i));
    h = c.asymptote->value;
    h_method = c.asymptote->method;
    index_kind = "context_length";
  } else {
    const auto& zoo = sel.require_hmm();
    const auto curve = myopic_entropy_curve(zoo, a.length);
    values = curve.values;
    for (std::size_t i = 0; i < values.size(); ++i) idx.push_back(static_cast<double>(i + 1));
    const auto rate = entropy_rate(zoo);
    h = rate.value;
    h_method = rate.method;
    if (!rate.exact) {
      warnings.push_back("entropy rate is bracketed [" + format_double(rate.lower) + ", " +
                         format_double(rate.upper) + "]");
    }
    index_kind = "position";
  }
  if (a.asymptote) {
    h = *a.asymptote;
    h_method = "user";
  }
  if (end > static_cast<std::size_t>(idx.back())) {
    throw ValidationError("window end " + std::to_string(end) + " exceeds the curve (last index " +
                          std::to_string(static_cast<std::size_t>(idx.back())) + ")");
  }
  ojson res;
  res["process"] = sel.name;
  res["index"] = index_kind;
  res["window"] = {begin, end};
  res["asymptote"] = {{"value", h}, {"method", h_method}};
  std::optional<double> r2_power, r2_exp;
  auto attempt = [&](const char* key, bool power) {
    try {
      const auto f = power ? power_law_diagnostics(idx, values, h, begin, end)
                           : exponential_diagnostics(idx, values, h, begin, end);
      res[key] = fit_json(f);
      (power ? r2_power : r2_exp) = f.r_squared;
    } catch (const ValidationError& e) {
      if (a.model != "both") throw;
      res[key] = {{"error", e.what()}};
    }
  };
  if (a.model != "exponential") attempt("power", true);
  if (a.model != "power") attempt("exponential", false);
  if (r2_power && r2_exp) res["preferred"] = *r2_power >= *r2_exp ? "power" : "exponential";
  res["warnings"] = warnings;
  out.primary("powerlaw.json", dump(res));
}

// -------------------------------------------------------------- replay

struct ReplayArgs {
  std::string manifest;
  std::string out;
};

std::vector<std::string> replay_argv(const ReplayArgs& a) {
  const auto m = parse_json(read_text_file(a.manifest));
  auto argv = m.at("argv").get<std::vector<std::string>>();
  if (argv.empty() || argv.front() == "replay") {
    throw ValidationError("manifest does not describe a replayable run");
  }
  const std::string target =
      a.out.empty() ? std::filesystem::path(a.manifest).parent_path().string() : a.out;
  bool replaced = false;
  for (std::size_t i = 0; i < argv.size(); ++i) {
    if (argv[i] == "--out" && i + 1 < argv.size()) {
      argv[i + 1] = target.empty() ? "." : target;
      replaced = true;
    } else if (argv[i].rfind("--out=", 0) == 0) {
      argv[i] = "--out=" + (target.empty() ? std::string(".") : target);
      replaced = true;
    }
  }
  if (!replaced) {
    argv.push_back("--out");
    argv.push_back(target.empty() ? "." : target);
  }
  return argv;
}

// --------------------------------------------------------------- driver

void emit_error(const char* kind, const std::string& message) {
  ojson e;
  e["error"] = kind;
  e["message"] = message;
  std::cerr << e.dump() << std::endl;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Myopic entropy, mixed-state presentations and in-context loss toolkit"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);

  std::string out_dir;
  std::function<void(RunRecord&, Output&)> action;
  std::string chosen;
  auto with_out = [&](CLI::App* sub) {
    sub->add_option("--out", out_dir, "output directory (default: primary payload on stdout)");
  };
  auto bind = [&](CLI::App* sub, auto& storage, auto runner) {
    sub->callback([&, sub, runner] {
      chosen = sub->get_name();
      action = [&storage, runner](RunRecord& r, Output& o) { runner(storage, r, o); };
    });
  };

  ListArgs list_args;
  auto* list = app.add_subcommand("list", "list zoo processes and their parameters");
  with_out(list);
  bind(list, list_args, run_list);

  SampleArgs sample_args;
  auto* sample = app.add_subcommand("sample", "sample a dataset");
  add_process_options(sample, sample_args.process);
  sample->add_option("--length", sample_args.length, "stochastic tokens per sequence");
  sample->add_option("--count", sample_args.count, "number of sequences")->required();
  sample->add_option("--seed", sample_args.seed, "64-bit seed")->required();
  sample->add_flag("--no-bos", sample_args.no_bos, "do not prepend BOS (id 0)");
  sample->add_option("--format", sample_args.format, "bin | jsonl | both");
  sample->add_option("--threads", sample_args.threads, "worker threads (output is identical)");
  with_out(sample);
  bind(sample, sample_args, run_sample);

  MspArgs msp_args;
  auto* msp = app.add_subcommand("msp", "build and export the mixed-state presentation");
  add_process_options(msp, msp_args.process);
  msp->add_option("--depth", msp_args.depth, "maximum construction depth");
  msp->add_option("--merge-tol", msp_args.merge_tol, "relative coordinatewise merge tolerance");
  msp->add_option("--format", msp_args.format, "dot | json");
  with_out(msp);
  bind(msp, msp_args, run_msp);

  EntropyArgs ent_args;
  auto* ent = app.add_subcommand("entropy", "myopic entropy curve (or plug-in estimate)");
  add_process_options(ent, ent_args.process);
  ent->add_option("--length", ent_args.length, "positions 1..L");
  ent->add_option("--method", ent_args.method, "msp-operator | layered-beliefs");
  ent->add_option("--max-depth", ent_args.max_depth, "MSP depth for msp-operator");
  ent->add_option("--merge-tol", ent_args.merge_tol, "relative coordinatewise merge tolerance");
  ent->add_option("--units", ent_args.units, "nats | bits");
  ent->add_flag("--bound", ent_args.bound, "label the curve as a held-out loss lower bound");
  ent->add_flag("--no-rate", ent_args.no_rate, "skip the entropy-rate asymptote");
  ent->add_flag("--excess", ent_args.excess, "also write excess-entropy partial sums");
  ent->add_option("--dataset", ent_args.dataset, "plug-in estimate from a sampled dataset");
  with_out(ent);
  bind(ent, ent_args, run_entropy);

  MixtureArgs mix_args;
  auto* mix = app.add_subcommand("mixture", "per-component in-context loss of a mixture");
  add_process_options(mix, mix_args.process);
  mix->add_option("--length", mix_args.length, "contexts 0..L");
  mix->add_option("--component", mix_args.component, "0-based component (default: all)");
  mix->add_option("--method", mix_args.method, "closed-form | belief-exact");
  mix->add_option("--bias", mix_args.bias, "tested coin bias for ncoins-inf");
  mix->add_option("--units", mix_args.units, "nats | bits");
  with_out(mix);
  bind(mix, mix_args, run_mixture);

  CompareArgs cmp_args;
  auto* cmp = app.add_subcommand("compare", "compare model loss logs with theory");
  add_process_options(cmp, cmp_args.process);
  cmp->add_option("--log", cmp_args.log, "loss-log JSONL");
  cmp->add_option("--length", cmp_args.length, "theory length (default: log's last position)");
  cmp->add_option("--method", cmp_args.method, "msp-operator | layered-beliefs");
  cmp->add_option("--phase", cmp_args.phase, "position range a:b for phase-change detection");
  cmp->add_option("--min-drop", cmp_args.min_drop, "phase-change drop threshold (nats)");
  cmp->add_option("--dataset", cmp_args.dataset, "dataset for name-conditional loss");
  cmp->add_option("--predictions", cmp_args.predictions, "per-token loss JSONL");
  cmp->add_option("--names", cmp_args.names, "name tokens")->take_all();
  with_out(cmp);
  bind(cmp, cmp_args, run_compare);

  PowerlawArgs pl_args;
  auto* pl = app.add_subcommand("powerlaw", "fit power-law and exponential tails");
  add_process_options(pl, pl_args.process);
  pl->add_option("--length", pl_args.length, "curve length");
  pl->add_option("--window", pl_args.window, "index range a:b")->required();
  pl->add_option("--model", pl_args.model, "power | exponential | both");
  pl->add_option("--asymptote", pl_args.asymptote, "override the entropy rate");
  with_out(pl);
  bind(pl, pl_args, run_powerlaw);

  ReplayArgs replay_args;
  auto* replay = app.add_subcommand("replay", "re-run the command recorded in a manifest");
  replay->add_option("manifest", replay_args.manifest, "manifest.json")->required();
  replay->add_option("--out", replay_args.out, "output directory (default: the manifest's)");
  replay->callback([&] { chosen = "replay"; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error("validation", e.what());
    return kExitValidation;
  }

  try {
    if (chosen == "replay") return run_cli(replay_argv(replay_args));
    RunRecord record;
    record.subcommand = chosen;
    record.argv = args;
    Output out(out_dir);
    action(record, out);
    write_manifest(out, record);
    return kExitOk;
  } catch (const CapabilityError& e) {
    emit_error(e.kind(), e.what());
    return kExitCapability;
  } catch (const Error& e) {
    emit_error(e.kind(), e.what());
    return kExitValidation;
  } catch (const nlohmann::json::exception& e) {
    emit_error("validation", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    emit_error("internal", e.what());
    return 1;
  }
}

}  // namespace myopic::cli
