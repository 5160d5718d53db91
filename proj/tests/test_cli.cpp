#include <gtest/gtest.h>

#include <httplib.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ifrl/cli.hpp"
#include "ifrl/curriculum.hpp"
#include "ifrl/dataset.hpp"
#include "ifrl/metrics.hpp"
#include "ifrl/synthetic.hpp"
#include "oracles.hpp"
#include "serve_process.hpp"

using namespace ifrl;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Run r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

json last_line_json(const std::string& s) {
  auto t = s;
  while (!t.empty() && t.back() == '\n') t.pop_back();
  return json::parse(t.substr(t.rfind('\n') == std::string::npos ? 0 : t.rfind('\n') + 1));
}

void expect_single_json_error(const Run& r) {
  ASSERT_FALSE(r.err.empty());
  const auto first = r.err.substr(0, r.err.find('\n'));
  const auto j = json::parse(first);
  EXPECT_TRUE(j.contains("error"));
  EXPECT_TRUE(j.contains("message"));
}

std::string sample(const std::string& name) { return std::string(IFRL_SAMPLE_DIR) + "/" + name; }

}  // namespace

TEST(Cli, VerifyWordCount) {
  const auto r = run_cli({"verify", "--rule", R"({"rule_type":"word_count","relation":"at_most","count":25})",
                          "--text", "one two three"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("satisfied=true"), std::string::npos) << r.out;
}

TEST(Cli, VerifyUnsatisfiedStillExitsZero) {
  const auto r = run_cli({"verify", "--rule", R"({"rule_type":"no_commas"})", "--text", "a, b"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("satisfied=false"), std::string::npos);
}

TEST(Cli, ValidationErrorsExitOne) {
  auto r = run_cli({"verify", "--rule", R"({"rule_type":"word_count","relation":"at_most"})", "--text", "x"});
  EXPECT_EQ(r.code, cli::kValidationError);
  expect_single_json_error(r);
  r = run_cli({"verify", "--rule", "{not json", "--text", "x"});
  EXPECT_EQ(r.code, cli::kValidationError);
  expect_single_json_error(r);
  r = run_cli({"verify", "--rule", R"({"rule_type":"rhymes"})", "--text", "x"});
  EXPECT_EQ(r.code, cli::kValidationError);
  r = run_cli({"nonsense"});
  EXPECT_EQ(r.code, cli::kValidationError);
  expect_single_json_error(r);
  r = run_cli({"advantages", "--in", "x"});
  EXPECT_EQ(r.code, cli::kValidationError);
}

TEST(Cli, IoErrorsExitTwo) {
  const auto r = run_cli({"build-curriculum", "--in", "/nonexistent/in.jsonl", "--out", "/tmp/x.jsonl"});
  EXPECT_EQ(r.code, cli::kIoError);
  expect_single_json_error(r);
  const auto dir = oracle::temp_dir("cli_io");
  const auto m = run_cli({"score", "--model", (dir / "missing.bin").string(), "--in", "x", "--out", "y"});
  EXPECT_EQ(m.code, cli::kIoError);
}

TEST(Cli, HelpExitsZero) {
  const auto r = run_cli({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("build-curriculum"), std::string::npos);
}

TEST(Cli, CatalogListsEveryRule) {
  const auto r = run_cli({"catalog"});
  EXPECT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) ++n;
  }
  EXPECT_EQ(n, catalog().size());
}

TEST(Cli, AdvantagesGroupsByIdOrChunks) {
  const auto dir = oracle::temp_dir("cli_adv");
  dataset::write_jsonl(dir / "r.jsonl", {json{{"group_id", "a"}, {"reward", 0.0}}, json{{"group_id", "b"}, {"reward", 1.0}},
                                         json{{"group_id", "a"}, {"reward", 1.0}}, json{{"group_id", "b"}, {"reward", 1.0}}});
  auto r = run_cli({"advantages", "--group-size", "2", "--eps", "1e-9", "--in", (dir / "r.jsonl").string(), "--out",
                    (dir / "a.jsonl").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::vector<double> adv;
  dataset::read_jsonl(dir / "a.jsonl", [&](const json& j, std::size_t) { adv.push_back(j["advantage"]); });
  ASSERT_EQ(adv.size(), 4u);
  EXPECT_NEAR(adv[0], -1.0, 1e-6);
  EXPECT_EQ(adv[1], 0.0);
  EXPECT_NEAR(adv[2], 1.0, 1e-6);
  EXPECT_EQ(adv[3], 0.0);
  dataset::write_jsonl(dir / "odd.jsonl", {json{{"reward", 0.0}}, json{{"reward", 1.0}}, json{{"reward", 1.0}}});
  r = run_cli({"advantages", "--group-size", "2", "--in", (dir / "odd.jsonl").string(), "--out",
               (dir / "b.jsonl").string()});
  EXPECT_EQ(r.code, cli::kValidationError);
}

TEST(Cli, MalformedInputNamesTheLine) {
  const auto dir = oracle::temp_dir("cli_bad");
  {
    std::ofstream f(dir / "in.jsonl");
    f << R"({"id":"a","seed_text":"x","constraints":[]})" << "\n{oops\n";
  }
  const auto r = run_cli({"build-curriculum", "--in", (dir / "in.jsonl").string(), "--out", (dir / "o.jsonl").string()});
  EXPECT_EQ(r.code, cli::kValidationError);
  EXPECT_NE(r.err.find("in.jsonl:"), std::string::npos) << r.err;
}

TEST(Cli, SubcommandsMatchLibrary) {
  const auto dir = oracle::temp_dir("cli_lib");
  const auto ins = (dir / "ins.jsonl").string();
  auto r = run_cli({"synth-corpus", "--out", ins, "--responses", (dir / "resp.jsonl").string(), "--groups",
                    (dir / "groups.jsonl").string(), "--num", "30", "--seed", "5", "--num-groups", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  r = run_cli({"build-curriculum", "--in", ins, "--out", (dir / "levels.jsonl").string(), "--stats",
               (dir / "stats.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto instructions = dataset::load_instructions(ins);
  std::vector<CurriculumLevel> levels;
  for (const auto& i : instructions) {
    auto ls = decompose(i);
    levels.insert(levels.end(), ls.begin(), ls.end());
  }
  EXPECT_EQ(dataset::load_levels(dir / "levels.jsonl"), levels);
  EXPECT_EQ(dataset::read_json(dir / "stats.json")["per_level"], to_json(dataset_stats(levels))["per_level"]);

  r = run_cli({"make-pairs", "--levels", (dir / "levels.jsonl").string(), "--responses", (dir / "resp.jsonl").string(),
               "--out", (dir / "pairs.jsonl").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto pairs = build_corpus_pairs(levels, dataset::load_responses(dir / "resp.jsonl"));
  EXPECT_EQ(dataset::load_pairs(dir / "pairs.jsonl"), pairs);
  EXPECT_EQ(last_line_json(r.out)["pairs"], pairs.size());

  r = run_cli({"train-scorer", "--pairs", (dir / "pairs.jsonl").string(), "--out", (dir / "m.bin").string(),
               "--epochs", "20", "--bits", "12", "--report", (dir / "train.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  TrainConfig cfg;
  cfg.epochs = 20;
  cfg.features.bits = 12;
  const auto model = train_bce(pairs, cfg);
  EXPECT_EQ(load_model(dir / "m.bin"), model);
  EXPECT_EQ(last_line_json(r.out)["model_version"], model_version(model));
  EXPECT_EQ(dataset::read_json(dir / "train.json")["loss_curve"].size(), 21u);

  r = run_cli({"eval-rm", "--groups", (dir / "groups.jsonl").string(), "--model", (dir / "m.bin").string(),
               "--report", (dir / "rep.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::vector<PreferenceGroup> groups;
  dataset::read_jsonl(dir / "groups.jsonl", [&](const json& j, std::size_t) {
    groups.push_back(preference_group_from_json(j));
  });
  LinearScorer scorer(std::make_shared<ScorerModel>(model));
  const auto lib = eval_reward_model(groups, RewardEngine(RewardMode::full(), &scorer));
  const auto rep = dataset::read_json(dir / "rep.json");
  EXPECT_EQ(rep["kendall_tau"].get<double>(), lib.kendall_tau);
  EXPECT_EQ(rep["position_consistency"].get<double>(), lib.position_consistency);
  EXPECT_FALSE(last_line_json(r.out).contains("per_group"));
}

TEST(Cli, ScoreRolloutsMatchesEngine) {
  const auto dir = oracle::temp_dir("cli_score");
  const auto w = Constraint::hard("w", {RuleType::kWordCount, CountParams{Relation::kAtMost, 3}});
  dataset::write_jsonl(dir / "in.jsonl",
                       {json{{"group_id", 1}, {"response", "one two"}, {"constraints", json::array({to_json(w)})}},
                        json{{"group_id", 1}, {"response", "one two three four"}, {"constraints", json::array({to_json(w)})}},
                        json{{"group_id", 2}, {"response", "so \\boxed{7}"}, {"gold_answer", "7"}}});
  const auto r = run_cli({"score", "--mode", "rule_only", "--in", (dir / "in.jsonl").string(), "--out",
                          (dir / "out.jsonl").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::vector<json> got;
  dataset::read_jsonl(dir / "out.jsonl", [&](const json& j, std::size_t) { got.push_back(j); });
  ASSERT_EQ(got.size(), 3u);
  EXPECT_EQ(got[0]["reward"], 1.0);
  EXPECT_EQ(got[1]["reward"], 0.0);
  EXPECT_EQ(got[2]["reward"], 1.0);
  EXPECT_EQ(got[0]["group_id"], 1);
}

TEST(Cli, EndToEndSamplePipeline) {
  ASSERT_TRUE(fs::exists(sample("instructions.jsonl")));
  const auto dir = oracle::temp_dir("cli_e2e");
  const auto p = [&](const std::string& n) { return (dir / n).string(); };
  const auto t0 = std::chrono::steady_clock::now();

  auto r = run_cli({"build-curriculum", "--in", sample("instructions.jsonl"), "--out", p("levels.jsonl"), "--stats",
                    p("stats.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  r = run_cli({"make-pairs", "--levels", p("levels.jsonl"), "--responses", sample("responses.jsonl"), "--out",
               p("pairs.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  r = run_cli({"train-scorer", "--pairs", p("pairs.jsonl"), "--out", p("model.bin"), "--soft-only"});
  ASSERT_EQ(r.code, 0) << r.err;
  r = run_cli({"eval-rm", "--groups", sample("groups.jsonl"), "--model", p("model.bin"), "--report", p("report.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = dataset::read_json(p("report.json"));
  std::vector<PreferenceGroup> groups;
  dataset::read_jsonl(sample("groups.jsonl"), [&](const json& j, std::size_t) {
    groups.push_back(preference_group_from_json(j));
  });
  ASSERT_EQ(report["per_group"].size(), groups.size());
  LinearScorer scorer(std::make_shared<ScorerModel>(load_model(p("model.bin"))));
  const RewardEngine engine(RewardMode::full(), &scorer);
  std::size_t tie_free = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    std::vector<double> scores;
    for (const auto& resp : groups[g].responses) scores.push_back(engine.sample_reward(resp.text, groups[g].constraints).aggregate);
    std::sort(scores.begin(), scores.end());
    if (std::adjacent_find(scores.begin(), scores.end()) != scores.end()) continue;
    ++tie_free;
    const auto& row = report["per_group"][g];
    EXPECT_NEAR(row["kendall_tau"].get<double>(), 2 * row["position_consistency"].get<double>() - 1, 1e-9);
  }
  EXPECT_GT(tie_free, 0u);
  r = run_cli({"score", "--model", p("model.bin"), "--in", sample("rollouts.jsonl"), "--out", p("rewards.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  r = run_cli({"advantages", "--in", p("rewards.jsonl"), "--out", p("adv.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;

  test::ServeProcess serve(IFRL_CLI_PATH, {"serve", "--bind", "127.0.0.1:0", "--model", p("model.bin")});
  ASSERT_TRUE(serve.banner.contains("listening")) << serve.banner.dump();
  const auto addr = serve.banner["listening"].get<std::string>();
  const int port = std::stoi(addr.substr(addr.rfind(':') + 1));
  httplib::Client client("127.0.0.1", port);
  const auto health = client.Get("/healthz");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  EXPECT_EQ(json::parse(health->body)["model_version"], model_version(load_model(p("model.bin"))));

  // The served rewards agree with the score subcommand.
  std::vector<json> rollouts, rewards;
  dataset::read_jsonl(sample("rollouts.jsonl"), [&](const json& j, std::size_t) { rollouts.push_back(j); });
  dataset::read_jsonl(p("rewards.jsonl"), [&](const json& j, std::size_t) { rewards.push_back(j); });
  json items = json::array();
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < rollouts.size(); ++i) {
    if (!rollouts[i].contains("constraints")) continue;
    items.push_back({{"response", rollouts[i]["response"]}, {"constraints", rollouts[i]["constraints"]}});
    idx.push_back(i);
  }
  ASSERT_FALSE(idx.empty());
  const auto res = client.Post("/v1/score", json{{"items", items}}.dump(), "application/json");
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 200) << res->body;
  const auto results = json::parse(res->body)["results"];
  for (std::size_t k = 0; k < idx.size(); ++k) {
    EXPECT_EQ(results[k]["reward"].get<double>(), rewards[idx[k]]["reward"].get<double>());
  }
  EXPECT_EQ(serve.stop(), 0);

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_LT(secs, 60.0);
}

TEST(Cli, BinaryExitCodes) {
  const std::string bin = IFRL_CLI_PATH;
  EXPECT_EQ(WEXITSTATUS(std::system((bin + " catalog > /dev/null").c_str())), 0);
  EXPECT_EQ(WEXITSTATUS(std::system((bin + " verify --rule '{}' --text x 2> /dev/null").c_str())), 1);
  EXPECT_EQ(WEXITSTATUS(std::system((bin + " build-curriculum --in /nonexistent --out /tmp/o 2> /dev/null").c_str())), 2);
}
