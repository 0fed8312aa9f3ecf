#include "entrate/cli/commands.hpp"

#include <cctype>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "entrate/bootstrap.hpp"
#include "entrate/cli/ingest.hpp"
#include "entrate/cli/report.hpp"
#include "entrate/cli/stats.hpp"
#include "entrate/direct.hpp"
#include "entrate/errors.hpp"
#include "entrate/sim.hpp"
#include "entrate/swlz.hpp"

namespace entrate::cli {

using nlohmann::json;

namespace {

struct InputFlags {
  std::vector<std::string> files;
  bool collapse = false;
  bool lines = false;
  std::string alphabet_file;
};

struct EstimateFlags {
  InputFlags input;
  std::vector<std::size_t> orders;
  std::vector<std::string> methods;
  bool exclude_boundaries = false;
  bool paper_zero_mode = false;
  std::uint64_t seed = 0;
  std::size_t replicates = 0;
  std::optional<double> p;
  std::string json_out;
  std::string csv_out;
};

void add_input_flags(CLI::App* cmd, InputFlags& flags, bool files_required) {
  auto* files = cmd->add_option("files", flags.files, "Observation files; several files are one subject's windows");
  if (files_required) files->required();
  cmd->add_flag("--collapse-repeats", flags.collapse, "Merge runs of the same symbol before estimation");
  cmd->add_flag("--lines", flags.lines, "One symbol per line instead of whitespace-separated tokens");
  cmd->add_option("--alphabet", flags.alphabet_file, "File listing the ordered symbol set");
}

LoadedSequence load(const InputFlags& flags) {
  IngestOptions options;
  options.format = flags.lines ? TokenFormat::lines : TokenFormat::tokens;
  options.collapse_repeats = flags.collapse;
  if (!flags.alphabet_file.empty()) options.declared_alphabet = read_alphabet(flags.alphabet_file);
  std::vector<std::filesystem::path> paths(flags.files.begin(), flags.files.end());
  return ingest(paths, options);
}

void write_file(const std::string& path, const std::string& content, std::ostream& out) {
  if (path == "-") {
    out << content;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw InputError("cannot open '" + path + "' for writing");
  file << content;
  if (!file) throw InputError("failed writing '" + path + "'");
}

std::vector<EstimatorSpec> estimator_list(const std::vector<std::string>& methods,
                                          const std::vector<std::size_t>& orders) {
  std::vector<std::string> names = methods;
  if (names.empty()) names = {"empirical", "eigen", "limit", "swlz"};
  std::vector<std::size_t> ms = orders;
  if (ms.empty()) ms = {1};

  std::vector<EstimatorSpec> out;
  for (const auto& name : names) {
    const Method method = parse_method(name);
    if (!is_direct(method)) {
      out.push_back(EstimatorSpec{method, 1});
      continue;
    }
    for (std::size_t m : ms) out.push_back(EstimatorSpec{method, m});
  }
  return out;
}

EntropyEstimate point_estimate(const LoadedSequence& data, const Sequence& joined, const EstimatorSpec& spec,
                               bool exclude_boundaries, const DirectOptions& options) {
  if (!exclude_boundaries || !is_direct(spec.method)) return run_estimator(joined, spec, options);
  StationaryMethod stationary = StationaryMethod::empirical;
  if (spec.method == Method::direct_eigen) stationary = StationaryMethod::eigen;
  if (spec.method == Method::direct_limit) stationary = StationaryMethod::limit;
  return estimate_direct(std::span<const Sequence>(data.segments), spec.order, stationary, options);
}

std::string format_optional(const std::optional<double>& v, int precision) {
  if (!v) return "-";
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << *v;
  return os.str();
}

void print_estimates(const EstimateReport& report, std::ostream& out) {
  out << "n = " << report.n_obs << ", kappa = " << report.alphabet.size() << '\n';
  out << std::left << std::setw(18) << "method" << std::setw(7) << "order" << std::setw(12) << "H (bits)"
      << std::setw(12) << "SE" << "p" << '\n';
  for (const auto& r : report.estimates) {
    out << std::left << std::setw(18) << r.method << std::setw(7) << (r.order ? std::to_string(*r.order) : "-")
        << std::setw(12) << format_optional(r.value_bits, 6) << std::setw(12) << format_optional(r.se, 6)
        << format_optional(r.p_used, 4) << '\n';
    for (const auto& w : r.warnings) out << "  warning: " << w << '\n';
  }
}

int run_estimate(const EstimateFlags& flags, bool keep_replicates, std::ostream& out) {
  const auto data = load(flags.input);
  const auto joined = data.concatenated();
  const auto specs = estimator_list(flags.methods, flags.orders);

  DirectOptions options;
  options.paper_zero_mode = flags.paper_zero_mode;

  EstimateReport report;
  report.tool_version = tool_version();
  report.seed = flags.seed;
  report.sources = data.sources;
  report.alphabet = data.alphabet.symbols();
  report.n_obs = joined.size();

  for (const auto& spec : specs) {
    const auto est = point_estimate(data, joined, spec, flags.exclude_boundaries, options);
    EstimateRecord record;
    record.method = std::string(to_string(est.method));
    record.order = est.order;
    record.value_bits = est.value;
    record.irreducible = est.irreducible;
    record.n_obs = est.n_obs;
    record.warnings = est.warnings;

    if (flags.replicates > 0) {
      BootstrapConfig config;
      config.replicates = flags.replicates;
      config.seed = flags.seed;
      config.on_failure = flags.paper_zero_mode ? ReplicateFailurePolicy::zero : ReplicateFailurePolicy::drop;
      if (flags.p) {
        config.p = *flags.p;
      } else {
        const auto chosen = choose_p(est.value, joined.size());
        config.p = chosen.p;
        if (chosen.warning) record.warnings.push_back(*chosen.warning);
      }
      const auto boot = bootstrap_se(joined, spec, config);
      record.se = boot.standard_error;
      record.p_used = boot.p_used;
      record.bootstrap_replicates = config.replicates;
      record.zeroed = boot.zeroed;
      record.dropped = boot.dropped;
      if (boot.zeroed > 0) {
        record.warnings.push_back(std::to_string(boot.zeroed) + " reducible bootstrap replicates counted as 0");
      }
      if (boot.dropped > 0) {
        record.warnings.push_back(std::to_string(boot.dropped) + " bootstrap replicates failed and were dropped");
      }
      if (keep_replicates) record.replicate_estimates = boot.estimates;
    }
    report.estimates.push_back(std::move(record));
  }

  print_estimates(report, out);
  if (!flags.json_out.empty()) write_file(flags.json_out, json(report).dump(2) + "\n", out);
  if (!flags.csv_out.empty()) write_file(flags.csv_out, to_csv(report), out);
  return kExitOk;
}

void add_estimate_flags(CLI::App* cmd, EstimateFlags& flags, std::size_t default_replicates) {
  flags.replicates = default_replicates;
  add_input_flags(cmd, flags.input, true);
  cmd->add_option("--order", flags.orders, "Markov order for direct estimators (repeatable)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--method", flags.methods, "empirical, eigen, limit or swlz (repeatable)")
      ->check(CLI::IsMember({"empirical", "eigen", "limit", "swlz", "direct_empirical", "direct_eigen",
                             "direct_limit"}));
  cmd->add_flag("--exclude-boundaries", flags.exclude_boundaries,
                "Do not count transitions across file boundaries (direct estimators)");
  cmd->add_flag("--paper-zero-mode", flags.paper_zero_mode, "Report reducible eigen/limit estimates as 0");
  cmd->add_option("--seed", flags.seed, "Bootstrap seed");
  cmd->add_option("--replicates", flags.replicates, "Bootstrap replicates; 0 disables the bootstrap");
  cmd->add_option("--p", flags.p, "Block parameter; default chosen from each point estimate")
      ->check(CLI::Range(kMinBlockParameter, 1.0));
  cmd->add_option("--json", flags.json_out, "Write the JSON report ('-' for standard output)");
  cmd->add_option("--csv", flags.csv_out, "Write the CSV report ('-' for standard output)");
}

std::string format_state(const Sequence& seq, std::size_t t, const std::vector<std::string>& names) {
  return names.empty() ? std::to_string(seq[t]) : names[seq[t]];
}

struct SimulateFlags {
  std::string matrix = "low";
  std::size_t length = 1000;
  std::uint64_t seed = 0;
  std::size_t kappa = 8;
  double diag = 0.95;
  std::string out;
};

int run_simulate(const SimulateFlags& flags, std::ostream& out) {
  if (flags.length < 1) throw InputError("--length must be at least 1");
  Rng rng = substream(flags.seed, {0});
  Sequence seq({0}, 1);
  std::vector<std::string> names;
  if (flags.matrix == "case-i" || flags.matrix == "case-ii") {
    seq = simulate_second_order(flags.matrix == "case-i" ? kCaseI : kCaseII, flags.length, rng);
    names = {"A", "B"};
  } else if (flags.matrix == "low" || flags.matrix == "high" || flags.matrix == "medium" ||
             flags.matrix == "medium-builtin") {
    const auto P = benchmark_matrix(parse_benchmark(flags.matrix), flags.kappa, flags.diag);
    seq = simulate_chain(P, flags.length, StationaryStart{}, rng);
  } else {
    json j;
    try {
      j = json::parse(read_text_file(flags.matrix));
    } catch (const json::parse_error& e) {
      throw InputError("matrix file '" + flags.matrix + "' is not valid JSON: " + e.what());
    }
    if (!j.is_array()) throw InputError("matrix file '" + flags.matrix + "' must hold an array of rows");
    std::vector<std::vector<double>> rows;
    try {
      rows = j.get<std::vector<std::vector<double>>>();
    } catch (const json::exception&) {
      throw InputError("matrix file '" + flags.matrix + "' must hold an array of numeric rows");
    }
    seq = simulate_chain(TransitionMatrix::from_rows(rows), flags.length, StationaryStart{}, rng);
  }

  std::ostringstream text;
  for (std::size_t t = 0; t < seq.size(); ++t) {
    text << format_state(seq, t, names) << ((t + 1) % 25 == 0 || t + 1 == seq.size() ? '\n' : ' ');
  }
  if (flags.out.empty()) {
    out << text.str();
  } else {
    write_file(flags.out, text.str(), out);
  }
  return kExitOk;
}

struct ExperimentFlags {
  std::string plan;
  std::string json_out;
  std::string csv_out;
  std::optional<std::size_t> threads;
  std::optional<std::uint64_t> seed;
};

int run_experiment_command(const ExperimentFlags& flags, std::ostream& out) {
  auto plan = parse_plan(read_text_file(flags.plan));
  if (flags.threads) plan.threads = *flags.threads;
  if (flags.seed) plan.seed = *flags.seed;
  const auto report = run_experiment(plan);

  out << "plan " << report.plan_name << ", seed " << report.seed << ", " << report.replicates << " replicates";
  if (report.true_rate) out << ", true rate " << std::fixed << std::setprecision(6) << *report.true_rate;
  out << '\n';
  out << std::left << std::setw(8) << "n" << std::setw(24) << "estimator" << std::setw(11) << "mean"
      << std::setw(11) << "median" << std::setw(11) << "sd" << std::setw(8) << "failed" << std::setw(8) << "zeroed"
      << "boot SE" << '\n';
  for (const auto& c : report.cells) {
    out << std::left << std::setw(8) << c.length << std::setw(24) << describe(c.estimator) << std::setw(11)
        << format_optional(c.estimates.mean, 5) << std::setw(11) << format_optional(c.estimates.median, 5)
        << std::setw(11) << format_optional(c.estimates.sd, 5) << std::setw(8) << c.failed << std::setw(8)
        << c.zeroed
        << (c.bootstrap_se ? format_optional(c.bootstrap_se->median, 5) : std::string("-")) << '\n';
  }
  if (!flags.json_out.empty()) write_file(flags.json_out, experiment_to_json(report).dump(2) + "\n", out);
  if (!flags.csv_out.empty()) write_file(flags.csv_out, experiment_to_csv(report), out);
  return kExitOk;
}

std::vector<double> parse_numbers(const std::string& text, const std::string& source) {
  std::vector<double> values;
  std::string cleaned = text;
  for (char& ch : cleaned) {
    if (ch == ',' || ch == ';') ch = ' ';
  }
  for (const auto& token : tokenize(cleaned, TokenFormat::tokens)) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size()) throw InputError(source + ": '" + token + "' is not a number");
    values.push_back(v);
  }
  return values;
}

struct TtestFlags {
  std::string a, b;
  std::vector<std::string> files;
  std::string json_out;
};

int run_ttest(const TtestFlags& flags, std::ostream& out) {
  std::vector<double> a, b;
  if (!flags.files.empty()) {
    if (flags.files.size() != 2 || !flags.a.empty() || !flags.b.empty()) {
      throw InputError("ttest takes either two files or --a and --b");
    }
    a = parse_numbers(read_text_file(flags.files[0]), flags.files[0]);
    b = parse_numbers(read_text_file(flags.files[1]), flags.files[1]);
  } else {
    if (flags.a.empty() || flags.b.empty()) throw InputError("ttest needs --a and --b, or two files");
    a = parse_numbers(flags.a, "--a");
    b = parse_numbers(flags.b, "--b");
  }
  const auto cmp = ttest_pooled(a, b);
  out << std::fixed << std::setprecision(6);
  out << "mean_a " << cmp.means.first << "  (n = " << cmp.group_a.size() << ")\n";
  out << "mean_b " << cmp.means.second << "  (n = " << cmp.group_b.size() << ")\n";
  out << "pooled_sd " << cmp.pooled_sd << '\n';
  out << "t " << cmp.t_statistic << '\n';
  out << "df " << cmp.df << '\n';
  if (!flags.json_out.empty()) {
    const json j{{"schema_version", kReportSchemaVersion},
                 {"tool_version", tool_version()},
                 {"group_a", cmp.group_a},
                 {"group_b", cmp.group_b},
                 {"means", {cmp.means.first, cmp.means.second}},
                 {"pooled_sd", cmp.pooled_sd},
                 {"t_statistic", cmp.t_statistic},
                 {"df", cmp.df}};
    write_file(flags.json_out, j.dump(2) + "\n", out);
  }
  return kExitOk;
}

struct ParseFlags {
  InputFlags input;
  std::string text;
  bool show_lambdas = false;
  std::string json_out;
};

int run_parse(const ParseFlags& flags, std::ostream& out) {
  const auto load_parse_input = [&flags]() {
    if (flags.text.empty()) {
      if (flags.input.files.empty()) throw InputError("parse needs --string TEXT or a file");
      return load(flags.input);
    }
    if (!flags.input.files.empty()) throw InputError("parse takes either --string or files, not both");
    std::string spaced;
    for (char ch : flags.text) {
      if (std::isspace(static_cast<unsigned char>(ch))) continue;
      spaced += ch;
      spaced += ' ';
    }
    IngestOptions options;
    options.collapse_repeats = flags.input.collapse;
    if (!flags.input.alphabet_file.empty()) options.declared_alphabet = read_alphabet(flags.input.alphabet_file);
    return ingest_texts({spaced}, {"--string"}, options);
  };
  const auto data = load_parse_input();
  const auto seq = data.concatenated();
  const auto parsing = swlz_parse(seq);

  bool single_char = true;
  for (const auto& s : data.alphabet.symbols()) single_char = single_char && s.size() == 1;
  const auto phrase_text = [&](const Phrase& ph) {
    std::string s;
    for (std::size_t t = ph.start; t < ph.start + ph.length; ++t) {
      if (!single_char && t > ph.start) s += ' ';
      s += data.alphabet.symbol(seq[t]);
    }
    return s;
  };

  std::string line;
  json phrases = json::array();
  for (const auto& ph : parsing.phrases) {
    if (!line.empty()) line += " | ";
    line += phrase_text(ph);
    phrases.push_back({{"start", ph.start}, {"length", ph.length}, {"text", phrase_text(ph)}, {"capped", ph.capped}});
  }
  out << line << '\n';

  json lambdas = json::array();
  if (flags.show_lambdas || !flags.json_out.empty()) {
    const auto ml = match_lengths(seq);
    for (std::size_t i = 1; i <= ml.size(); ++i) {
      lambdas.push_back({{"i", i}, {"lambda", ml.at(i).length}, {"capped", ml.at(i).capped}});
      if (flags.show_lambdas) {
        out << "Lambda_" << i << " = " << ml.at(i).length << (ml.at(i).capped ? " (capped)" : "") << '\n';
      }
    }
  }
  if (!flags.json_out.empty()) {
    const json j{{"schema_version", kReportSchemaVersion},
                 {"tool_version", tool_version()},
                 {"alphabet", data.alphabet.symbols()},
                 {"n_obs", seq.size()},
                 {"phrases", phrases},
                 {"lambdas", lambdas}};
    write_file(flags.json_out, j.dump(2) + "\n", out);
  }
  return kExitOk;
}

int report_error(std::ostream& err, const char* kind, const std::string& message, int code) {
  err << json{{"error", {{"kind", kind}, {"message", message}}}, {"exit_code", code}}.dump() << '\n';
  return code;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entropy-rate estimation for finite-state Markov processes", "entrate"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);

  EstimateFlags estimate_flags;
  auto* estimate = app.add_subcommand("estimate", "Point estimates, optionally with bootstrap standard errors");
  add_estimate_flags(estimate, estimate_flags, 0);

  EstimateFlags bootstrap_flags;
  auto* bootstrap = app.add_subcommand("bootstrap", "Stationary-bootstrap standard errors");
  add_estimate_flags(bootstrap, bootstrap_flags, 100);

  SimulateFlags simulate_flags;
  auto* simulate = app.add_subcommand("simulate", "Simulate a sequence from a known chain");
  simulate->add_option("--matrix", simulate_flags.matrix,
                       "low, high, medium-builtin, case-i, case-ii or a JSON matrix file");
  simulate->add_option("--length", simulate_flags.length, "Number of observations");
  simulate->add_option("--seed", simulate_flags.seed, "Random seed");
  simulate->add_option("--kappa", simulate_flags.kappa, "States for the low/high benchmarks");
  simulate->add_option("--diag", simulate_flags.diag, "Diagonal of the low benchmark");
  simulate->add_option("--out", simulate_flags.out, "Output file (default standard output)");

  ExperimentFlags experiment_flags;
  auto* experiment = app.add_subcommand("experiment", "Run a Monte Carlo plan");
  experiment->add_option("plan", experiment_flags.plan, "Plan file (JSON)")->required();
  experiment->add_option("--json", experiment_flags.json_out, "Write the JSON report ('-' for standard output)");
  experiment->add_option("--csv", experiment_flags.csv_out, "Write the CSV report ('-' for standard output)");
  experiment->add_option("--threads", experiment_flags.threads, "Override the plan's thread count");
  experiment->add_option("--seed", experiment_flags.seed, "Override the plan's seed");

  TtestFlags ttest_flags;
  auto* ttest = app.add_subcommand("ttest", "Pooled-variance two-sample t statistic (a minus b)");
  ttest->add_option("--a", ttest_flags.a, "First group, comma or space separated");
  ttest->add_option("--b", ttest_flags.b, "Second group, comma or space separated");
  ttest->add_option("files", ttest_flags.files, "Two files of numbers instead of --a/--b");
  ttest->add_option("--json", ttest_flags.json_out, "Write the JSON result ('-' for standard output)");

  ParseFlags parse_flags;
  auto* parse = app.add_subcommand("parse", "Sliding-window Lempel-Ziv phrase decomposition");
  add_input_flags(parse, parse_flags.input, false);
  parse->add_option("--string", parse_flags.text, "Inline sequence; every character is one symbol");
  parse->add_flag("--lambdas", parse_flags.show_lambdas, "Also print the match lengths");
  parse->add_option("--json", parse_flags.json_out, "Write the JSON result ('-' for standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    return report_error(err, "usage_error", e.what(), kExitInput);
  }

  try {
    if (*estimate) return run_estimate(estimate_flags, false, out);
    if (*bootstrap) return run_estimate(bootstrap_flags, true, out);
    if (*simulate) return run_simulate(simulate_flags, out);
    if (*experiment) return run_experiment_command(experiment_flags, out);
    if (*ttest) return run_ttest(ttest_flags, out);
    if (*parse) return run_parse(parse_flags, out);
  } catch (const InputError& e) {
    return report_error(err, "input_error", e.what(), kExitInput);
  } catch (const ReducibleMatrixError& e) {
    return report_error(err, "reducible_matrix", e.what(), kExitNumeric);
  } catch (const NumericError& e) {
    return report_error(err, "numeric_error", e.what(), kExitNumeric);
  }
  return kExitInput;
}

}  // namespace entrate::cli
