#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"

#include "entrate/cli/commands.hpp"
#include "entrate/cli/ingest.hpp"
#include "entrate/cli/report.hpp"
#include "entrate/cli/stats.hpp"
#include "entrate/errors.hpp"

using namespace entrate;
using namespace entrate::cli;
namespace fs = std::filesystem;

namespace {

const std::vector<double> kControlSwlz{1.5483, 1.5107, 1.5727, 1.6571, 1.7552, 1.7864};
const std::vector<double> kLbnSwlz{1.6956, 1.6285, 1.6797, 1.6807, 1.7916, 1.8526};
const std::vector<double> kControlM1{1.7393, 1.5322, 1.6256, 1.7427, 1.8164, 1.8590};
const std::vector<double> kLbnM1{1.8837, 1.8015, 1.8774, 1.8403, 1.9342, 2.0515};
const std::vector<double> kControlM2{1.3632, 1.2044, 1.2621, 1.3900, 1.3637, 1.4391};
const std::vector<double> kLbnM2{1.5069, 1.3307, 1.4988, 1.5168, 1.6192, 1.7462};

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("entrate-test-" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path write(const std::string& name, const std::string& content) const {
    std::ofstream(path / name) << content;
    return path / name;
  }
};

struct Run {
  int code;
  std::string out, err;
};

Run invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "entrate");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("tokenize and collapse") {
  CHECK(tokenize("a b\n# note\n  c\t d\n", TokenFormat::tokens) == std::vector<std::string>{"a", "b", "c", "d"});
  CHECK(tokenize("self groom\nnurse\n\n# x\n", TokenFormat::lines) ==
        std::vector<std::string>{"self groom", "nurse"});
  const std::vector<std::string> t{"nurse", "nurse", "groom", "nurse"};
  CHECK(collapse_repeats(t) == std::vector<std::string>{"nurse", "groom", "nurse"});
}

TEST_CASE("ingest") {
  IngestOptions collapse;
  collapse.collapse_repeats = true;
  const auto a = ingest_texts({"nurse nurse groom nurse"}, {"s"}, collapse);
  CHECK(a.alphabet.symbols() == std::vector<std::string>{"groom", "nurse"});
  const auto seq = a.concatenated();
  CHECK(std::vector<State>(seq.states().begin(), seq.states().end()) == std::vector<State>{1, 0, 1});

  const auto b = ingest_texts({"nurse nurse groom nurse"}, {"s"}, IngestOptions{});
  CHECK(b.concatenated().size() == 4);

  const auto seven = ingest_texts({"a b c d e f g a"}, {"s"}, IngestOptions{});
  CHECK(seven.alphabet.size() == 7);
  CHECK(std::log2(7.0) == doctest::Approx(2.807).epsilon(1e-3));

  CHECK_THROWS_AS(ingest_texts({"# only a comment\n"}, {"s"}, IngestOptions{}), InputError);
  CHECK_THROWS_AS(ingest_texts({"x x x"}, {"s"}, collapse), InputError);

  IngestOptions declared;
  declared.declared_alphabet = Alphabet({"a", "b"});
  try {
    (void)ingest_texts({"a b c a zz"}, {"s"}, declared);
    FAIL("expected an error");
  } catch (const InputError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("c") != std::string::npos);
    CHECK(msg.find("zz") != std::string::npos);
  }
  const auto d = ingest_texts({"b b"}, {"s"}, declared);
  CHECK(d.alphabet.size() == 2);
}

TEST_CASE("collapsing is idempotent") {
  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<State> x(60);
    for (auto& s : x) s = static_cast<State>(rng() % 3);
    const Sequence once = collapse_repeats(Sequence(x, 3));
    CHECK(collapse_repeats(once) == once);
    for (std::size_t t = 1; t < once.size(); ++t) CHECK(once[t] != once[t - 1]);
  }
}

TEST_CASE("windows are collapsed separately then joined") {
  IngestOptions collapse;
  collapse.collapse_repeats = true;
  const auto loaded = ingest_texts({"a a b b", "b c c a"}, {"w1", "w2"}, collapse);
  REQUIRE(loaded.segments.size() == 2);
  CHECK(loaded.segments[0].size() == 2);
  CHECK(loaded.segments[1].size() == 3);
  CHECK(loaded.concatenated().size() == 5);
}

TEST_CASE("pooled t-test on the rodent table") {
  const auto swlz = ttest_pooled(kControlSwlz, kLbnSwlz);
  CHECK(std::abs(swlz.t_statistic - -1.4425) < 0.001);
  CHECK(std::abs(swlz.means.first - 1.6384) < 0.0001);
  CHECK(std::abs(swlz.means.second - 1.7215) < 0.0001);
  CHECK(swlz.df == 10);
  CHECK(std::abs(ttest_pooled(kControlM1, kLbnM1).t_statistic - -2.9308) < 0.001);

  const auto reversed = ttest_pooled(kLbnSwlz, kControlSwlz);
  CHECK(reversed.t_statistic == -swlz.t_statistic);
  CHECK(ttest_pooled(kControlSwlz, kControlSwlz).t_statistic == 0.0);

  const std::vector<double> flat{1.0, 1.0, 1.0};
  CHECK_THROWS_AS(ttest_pooled(flat, flat), NumericError);
  const std::vector<double> single{1.0};
  CHECK_THROWS_AS(ttest_pooled(single, flat), InputError);
}

TEST_CASE("first- and second-order rodent estimates are strongly correlated") {
  std::vector<double> m1 = kControlM1, m2 = kControlM2;
  m1.insert(m1.end(), kLbnM1.begin(), kLbnM1.end());
  m2.insert(m2.end(), kLbnM2.begin(), kLbnM2.end());
  CHECK(std::abs(pearson_correlation(m1, m2) - 0.937) < 0.001);
}

TEST_CASE("estimate report JSON round trip") {
  EstimateReport report;
  report.tool_version = tool_version();
  report.seed = 42;
  report.sources = {"a.txt", "b.txt"};
  report.alphabet = {"groom", "nurse"};
  report.n_obs = 300;
  EstimateRecord r;
  r.method = "direct_eigen";
  r.order = 2;
  r.value_bits = 0.1 + 0.2;
  r.se = 0.0123456789012345;
  r.p_used = 1e-6;
  r.bootstrap_replicates = 100;
  r.zeroed = 3;
  r.irreducible = true;
  r.n_obs = 300;
  r.warnings = {"one", "two, with comma"};
  r.replicate_estimates = {0.1, 0.2};
  report.estimates.push_back(r);
  EstimateRecord s;
  s.method = "swlz";
  s.value_bits = 1.25;
  report.estimates.push_back(s);

  const auto text = nlohmann::json(report).dump();
  CHECK(nlohmann::json::parse(text).get<EstimateReport>() == report);
  const auto csv = to_csv(report);
  CHECK(csv.find("\"two, with comma\"") == std::string::npos);
  CHECK(csv.find("\"one;two, with comma\"") != std::string::npos);
}

TEST_CASE("experiment report JSON round trip") {
  ExperimentPlan plan;
  plan.name = "rt";
  plan.generator = BenchmarkGenerator{BenchmarkKind::low, 8, 0.95};
  plan.lengths = {50, 200};
  plan.replicates = 5;
  plan.estimators = {EstimatorSpec{Method::direct_eigen, 1}, EstimatorSpec{Method::swlz, 1}};
  plan.bootstrap_replicates = 5;
  const auto report = run_experiment(plan);
  const auto back = experiment_from_json(nlohmann::json::parse(experiment_to_json(report).dump()));
  CHECK(back == report);
  CHECK(experiment_to_csv(report).find("direct_eigen") != std::string::npos);
}

TEST_CASE("plan parsing") {
  const auto plan = parse_plan(R"({
    "name": "p", "generator": {"benchmark": "low"}, "lengths": [50, 250],
    "replicates": 3, "estimators": [{"method": "empirical", "order": 2}, {"method": "swlz"}], "seed": 5
  })");
  CHECK(plan.name == "p");
  CHECK(plan.lengths == std::vector<std::size_t>{50, 250});
  CHECK(plan.estimators[0] == EstimatorSpec{Method::direct_empirical, 2});
  CHECK(plan.paper_zero_mode);

  const auto second = parse_plan(R"({"generator": {"second_order": {"p": 0.4, "q": 0.75, "phi": 0.3,
    "gamma": 0.26666666666666666}}, "lengths": [100], "replicates": 1, "estimators": [{"method": "eigen"}]})");
  const auto& params = std::get<SecondOrderParams>(second.generator);
  CHECK(params.a == doctest::Approx(0.52));
  CHECK(params.d == doctest::Approx(0.95));

  const auto matrix = parse_plan(R"({"generator": {"matrix": [[0.5, 0.5], [0.1, 0.9]]}, "lengths": [10],
    "replicates": 1, "estimators": [{"method": "limit"}]})");
  CHECK(std::holds_alternative<TransitionMatrix>(matrix.generator));

  const auto expect_error = [](const std::string& text, const std::string& needle) {
    try {
      (void)parse_plan(text);
      FAIL("expected an error for " << text);
    } catch (const InputError& e) {
      CHECK_MESSAGE(std::string(e.what()).find(needle) != std::string::npos, e.what());
    }
  };
  expect_error(R"({"generator": {"benchmark": "low"}, "lengths": [250, 50], "replicates": 1,
    "estimators": [{"method": "swlz"}]})", "lengths");
  expect_error(R"({"generator": {"benchmark": "low"}, "lengths": [50], "replicates": 1,
    "estimators": [{"method": "swlz"}], "extra": 1})", "extra");
  expect_error(R"({"generator": {"benchmark": "low"}, "lengths": [50], "replicates": 1,
    "estimators": [{"method": "magic"}]})", "estimators[0].method");
  expect_error(R"({"generator": {"benchmark": "low"}, "lengths": "many", "replicates": 1,
    "estimators": [{"method": "swlz"}]})", "lengths");
  expect_error("{\n  \"generator\": {\"benchmark\": \"low\"},\n  \"lengths\": [50,,]\n}", "line 3");
}

TEST_CASE("shipped plans parse") {
  const fs::path dir = fs::path(ENTRATE_SOURCE_DIR) / "plans";
  std::size_t count = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    CHECK_NOTHROW(parse_plan(slurp(entry.path())));
    ++count;
  }
  CHECK(count >= 6);
  const auto low = parse_plan(slurp(dir / "paper-4.1-low.json"));
  CHECK(low.lengths == std::vector<std::size_t>{50, 250, 500, 1000, 5000, 10000});
}

TEST_CASE("cli parse command") {
  const auto r = invoke({"parse", "--string", "13131213232331313332"});
  CHECK(r.code == kExitOk);
  CHECK(r.out == "1 | 3 | 131 | 2 | 132 | 323 | 31313 | 332\n");
}

TEST_CASE("cli estimate") {
  TempDir tmp;
  std::string alt;
  for (int t = 0; t < 500; ++t) alt += t % 2 ? "groom " : "nurse ";
  const auto file = tmp.write("alt.txt", alt);
  const auto json_path = tmp.path / "out.json";
  const auto r = invoke({"estimate", file.string(), "--json", json_path.string(), "--csv", (tmp.path / "o.csv").string()});
  REQUIRE(r.code == kExitOk);
  const auto report = nlohmann::json::parse(slurp(json_path)).get<EstimateReport>();
  REQUIRE(report.estimates.size() == 4);
  for (const auto& e : report.estimates) {
    if (e.method == "swlz") {
      CHECK(e.value_bits > 0.0);
      CHECK(e.value_bits < 0.1);
      CHECK_FALSE(e.order.has_value());
    } else {
      CHECK(e.value_bits == 0.0);
      CHECK(e.order == std::size_t{1});
    }
  }
  CHECK(fs::exists(tmp.path / "o.csv"));
}

TEST_CASE("cli bootstrap is reproducible and honours the seed") {
  TempDir tmp;
  std::mt19937_64 rng(3);
  std::string text;
  for (int t = 0; t < 400; ++t) text += std::string(1, static_cast<char>('a' + rng() % 4)) + " ";
  const auto file = tmp.write("s.txt", text);
  const auto run = [&](const std::string& seed) {
    const auto out = tmp.path / ("r" + seed + ".json");
    const auto r = invoke({"bootstrap", file.string(), "--method", "empirical", "--method", "swlz", "--replicates",
                        "20", "--seed", seed, "--json", out.string()});
    REQUIRE(r.code == kExitOk);
    return slurp(out);
  };
  const auto a = run("7");
  CHECK(a == run("7"));
  CHECK(a != run("8"));
  const auto report = nlohmann::json::parse(a).get<EstimateReport>();
  for (const auto& e : report.estimates) {
    REQUIRE(e.se.has_value());
    CHECK(*e.se > 0.0);
    CHECK(e.replicate_estimates.size() == 20);
    CHECK(e.p_used.has_value());
  }

  const auto fixed_p = invoke({"estimate", file.string(), "--method", "swlz", "--replicates", "10", "--p", "0.25",
                            "--json", "-"});
  REQUIRE(fixed_p.code == kExitOk);
  const auto json_start = fixed_p.out.find('{');
  const auto j = nlohmann::json::parse(fixed_p.out.substr(json_start));
  CHECK(j["estimates"][0]["p_used"].get<double>() == 0.25);
}

TEST_CASE("cli warns when the order is too high for the series") {
  TempDir tmp;
  std::mt19937_64 rng(4);
  std::string text;
  for (int t = 0; t < 300; ++t) text += std::string(1, static_cast<char>('a' + rng() % 7)) + "\n";
  const auto file = tmp.write("k7.txt", text);
  const auto r = invoke({"estimate", file.string(), "--method", "empirical", "--order", "3", "--json", "-"});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("warning") != std::string::npos);
}

TEST_CASE("cli exit codes") {
  TempDir tmp;
  CHECK(invoke({"estimate", (tmp.path / "missing.txt").string()}).code == kExitInput);
  CHECK(invoke({"frobnicate"}).code == kExitInput);
  CHECK(invoke({"estimate"}).code == kExitInput);

  const auto reducible = tmp.write("red.txt", "a a a b b b");
  const auto err = invoke({"estimate", reducible.string(), "--method", "eigen"});
  CHECK(err.code == kExitNumeric);
  const auto j = nlohmann::json::parse(err.err);
  CHECK(j["error"]["kind"] == "reducible_matrix");
  CHECK(j["exit_code"] == 2);

  const auto zero = invoke({"estimate", reducible.string(), "--method", "eigen", "--paper-zero-mode"});
  CHECK(zero.code == kExitOk);
  CHECK(zero.out.find("warning") != std::string::npos);

  CHECK(invoke({"ttest", "--a", "1,1,1", "--b", "1,1,1"}).code == kExitNumeric);
  CHECK(invoke({"ttest", "--a", "1,2", "--b", "x,1"}).code == kExitInput);
  const auto bad_plan = tmp.write("plan.json", R"({"lengths": [3, 2]})");
  CHECK(invoke({"experiment", bad_plan.string()}).code == kExitInput);
  CHECK(invoke({"--version"}).code == kExitOk);
}

TEST_CASE("cli ttest and simulate") {
  const auto r = invoke({"ttest", "--a", "1.5483,1.5107,1.5727,1.6571,1.7552,1.7864", "--b",
                      "1.6956 1.6285 1.6797 1.6807 1.7916 1.8526"});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("t -1.442") != std::string::npos);
  CHECK(r.out.find("df 10") != std::string::npos);

  TempDir tmp;
  const auto out = tmp.path / "sim.txt";
  REQUIRE(invoke({"simulate", "--matrix", "case-i", "--length", "300", "--seed", "3", "--out", out.string()}).code ==
          kExitOk);
  const auto tokens = tokenize(slurp(out), TokenFormat::tokens);
  CHECK(tokens.size() == 300);
  for (const auto& t : tokens) CHECK((t == "A" || t == "B"));

  const auto matrix = tmp.write("m.json", "[[0.9, 0.1], [0.2, 0.8]]");
  const auto custom = invoke({"simulate", "--matrix", matrix.string(), "--length", "50"});
  CHECK(custom.code == kExitOk);
  CHECK(tokenize(custom.out, TokenFormat::tokens).size() == 50);
  CHECK(invoke({"simulate", "--matrix", "low", "--length", "20", "--seed", "1"}).out ==
        invoke({"simulate", "--matrix", "low", "--length", "20", "--seed", "1"}).out);
}

TEST_CASE("cli experiment") {
  TempDir tmp;
  const auto plan = tmp.write("plan.json", R"({"name": "tiny", "generator": {"benchmark": "high"},
    "lengths": [50, 100], "replicates": 1, "estimators": [{"method": "empirical"}], "seed": 3})");
  const auto out = tmp.path / "r.json";
  const auto r = invoke({"experiment", plan.string(), "--json", out.string()});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("direct_empirical(m=1)") != std::string::npos);
  const auto report = experiment_from_json(nlohmann::json::parse(slurp(out)));
  REQUIRE(report.cells.size() == 2);
  for (const auto& c : report.cells) CHECK(c.estimates.min == c.estimates.max);
  const auto again = tmp.path / "r2.json";
  REQUIRE(invoke({"experiment", plan.string(), "--json", again.string()}).code == kExitOk);
  CHECK(slurp(out) == slurp(again));
}

TEST_CASE("cli exclude-boundaries drops the cross-window transition") {
  TempDir tmp;
  const auto w1 = tmp.write("w1.txt", "a b a b a b");
  const auto w2 = tmp.write("w2.txt", "c c c c");
  const auto with = invoke({"estimate", w1.string(), w2.string(), "--method", "empirical", "--json", "-"});
  const auto without = invoke(
      {"estimate", w1.string(), w2.string(), "--method", "empirical", "--exclude-boundaries", "--json", "-"});
  REQUIRE(with.code == kExitOk);
  REQUIRE(without.code == kExitOk);
  const auto vj = nlohmann::json::parse(with.out.substr(with.out.find('{')));
  const auto vo = nlohmann::json::parse(without.out.substr(without.out.find('{')));
  CHECK(vo["estimates"][0]["value_bits"].get<double>() == 0.0);
  CHECK(vj["estimates"][0]["value_bits"].get<double>() > 0.0);
}
