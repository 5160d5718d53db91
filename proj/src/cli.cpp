#include "ifrl/cli.hpp"

#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ifrl/curriculum.hpp"
#include "ifrl/dataset.hpp"
#include "ifrl/error.hpp"
#include "ifrl/hard_verifier.hpp"
#include "ifrl/metrics.hpp"
#include "ifrl/reward.hpp"
#include "ifrl/scorer.hpp"
#include "ifrl/service.hpp"
#include "ifrl/synthetic.hpp"

namespace ifrl::cli {

namespace {

using nlohmann::json;

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop = true; }

struct Loaded {
  std::shared_ptr<const ScorerModel> model;
  std::unique_ptr<LinearScorer> scorer;
};

Loaded load_scorer(const std::string& path) {
  Loaded l;
  if (path.empty()) return l;
  l.model = std::make_shared<const ScorerModel>(load_model(path));
  l.scorer = std::make_unique<LinearScorer>(l.model);
  return l;
}

std::vector<Constraint> constraints_from(const json& arr, const std::string& path) {
  if (!arr.is_array()) fail(ErrorKind::kValidation, path + ": expected an array");
  std::vector<Constraint> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(constraint_from_json(arr[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

// --- subcommands ----------------------------------------------------------

int build_curriculum(const std::string& in, const std::string& out_path, const std::string& stats_path,
                     std::ostream& out) {
  const auto instructions = dataset::load_instructions(in);
  std::vector<CurriculumLevel> levels;
  std::size_t reasoning = 0;
  for (const auto& ins : instructions) {
    if (ins.task_kind == TaskKind::kReasoning) {
      ++reasoning;
      continue;
    }
    auto ls = decompose(ins);
    levels.insert(levels.end(), ls.begin(), ls.end());
  }
  dataset::save_levels(levels, out_path);
  auto stats = to_json(dataset_stats(levels));
  stats["skipped_reasoning"] = reasoning;
  if (!stats_path.empty()) dataset::write_json(stats_path, stats);
  out << stats.dump() << "\n";
  return kOk;
}

int make_pairs(const std::string& levels_path, const std::string& responses_path, const std::string& out_path,
               bool denoise, std::ostream& out) {
  const auto levels = dataset::load_levels(levels_path);
  const auto responses = dataset::load_responses(responses_path);
  const auto pairs = build_corpus_pairs(levels, responses, PairOptions{denoise});
  dataset::save_pairs(pairs, out_path);
  std::size_t positives = 0;
  for (const auto& p : pairs) positives += p.label == 1 ? 1 : 0;
  out << json{{"pairs", pairs.size()}, {"positive", positives}, {"negative", pairs.size() - positives}}.dump()
      << "\n";
  return kOk;
}

struct TrainArgs {
  std::string pairs, out, loss = "bce", report;
  TrainConfig config;
  bool soft_only = false;
};

int train_scorer(TrainArgs a, std::ostream& out, std::ostream& err) {
  auto pairs = dataset::load_pairs(a.pairs);
  if (a.soft_only) {
    std::erase_if(pairs, [](const LabeledPair& p) { return p.constraint.is_hard(); });
  }
  if (pairs.empty()) fail(ErrorKind::kValidation, a.pairs + ": no training pairs");
  std::size_t positives = 0;
  for (const auto& p : pairs) positives += p.label == 1 ? 1 : 0;
  if (positives == 0 || positives == pairs.size()) {
    err << json{{"warning", "training pairs carry a single label"}}.dump() << "\n";
  }
  TrainReport report;
  ScorerModel model;
  std::size_t examples = pairs.size();
  if (a.loss == "bce") {
    model = train_bce(pairs, a.config, &report);
  } else if (a.loss == "bt") {
    const auto prefs = preference_pairs(pairs);
    if (prefs.empty()) fail(ErrorKind::kValidation, a.pairs + ": no positive/negative pairs to match for bt");
    examples = prefs.size();
    model = train_bt(prefs, a.config, &report);
  } else {
    fail(ErrorKind::kValidation, "--loss must be bce or bt");
  }
  save_model(model, a.out);
  const json summary = {{"loss", a.loss},
                        {"examples", examples},
                        {"epochs", a.config.epochs},
                        {"initial_loss", report.loss.front()},
                        {"final_loss", report.loss.back()},
                        {"model_version", model_version(model)}};
  if (!a.report.empty()) {
    json r = summary;
    r["loss_curve"] = report.loss;
    dataset::write_json(a.report, r);
  }
  out << summary.dump() << "\n";
  return kOk;
}

int score(const std::string& model_path, const std::string& mode_text, const std::string& in,
          const std::string& out_path, std::ostream& out) {
  const RewardMode mode = parse_reward_mode(mode_text);
  const auto loaded = load_scorer(model_path);
  const RewardEngine engine(mode, loaded.scorer.get());
  std::vector<json> records;
  dataset::read_jsonl(in, [&](const json& j, std::size_t) {
    if (!j.is_object() || !j.contains("response") || !j["response"].is_string()) {
      fail(ErrorKind::kValidation, "response: expected a string");
    }
    json rec;
    if (j.contains("group_id")) rec["group_id"] = j["group_id"];
    const std::string response = j["response"].get<std::string>();
    if (j.contains("gold_answer")) {
      if (!j["gold_answer"].is_string()) fail(ErrorKind::kValidation, "gold_answer: expected a string");
      rec["reward"] = reasoning_reward(response, j["gold_answer"].get<std::string>());
      rec["per_constraint"] = json::array();
    } else {
      if (!j.contains("constraints")) fail(ErrorKind::kValidation, "constraints: missing");
      const auto cs = constraints_from(j["constraints"], "constraints");
      const auto b = engine.sample_reward(response, cs);
      const json bj = to_json(b);
      rec["reward"] = bj["reward"];
      rec["per_constraint"] = bj["per_constraint"];
    }
    records.push_back(std::move(rec));
  });
  dataset::write_jsonl(out_path, records);
  out << json{{"scored", records.size()}, {"mode", to_string(mode)}}.dump() << "\n";
  return kOk;
}

int advantages(std::size_t group_size, double eps, const std::string& in, const std::string& out_path,
               std::ostream& out) {
  AdvantageConfig cfg{group_size, eps};
  validate(cfg);
  std::vector<json> records;
  dataset::read_jsonl(in, [&](const json& j, std::size_t) {
    if (!j.is_object() || !j.contains("reward") || !j["reward"].is_number()) {
      fail(ErrorKind::kValidation, "reward: expected a number");
    }
    records.push_back(j);
  });
  const bool keyed = !records.empty() && std::all_of(records.begin(), records.end(), [](const json& r) {
    return r.contains("group_id");
  });
  std::vector<std::vector<std::size_t>> groups;
  if (keyed) {
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < records.size(); ++i) {
      const std::string key = records[i]["group_id"].dump();
      auto [it, fresh] = index.emplace(key, groups.size());
      if (fresh) groups.emplace_back();
      groups[it->second].push_back(i);
    }
  } else {
    if (records.size() % group_size != 0) {
      fail(ErrorKind::kValidation, in + ": " + std::to_string(records.size()) +
                                       " records are not a multiple of group size " + std::to_string(group_size));
    }
    for (std::size_t i = 0; i < records.size(); i += group_size) {
      groups.emplace_back();
      for (std::size_t k = 0; k < group_size; ++k) groups.back().push_back(i + k);
    }
  }
  for (std::size_t g = 0; g < groups.size(); ++g) {
    std::vector<double> rewards;
    for (auto i : groups[g]) rewards.push_back(records[i]["reward"].get<double>());
    std::vector<double> adv;
    try {
      adv = group_advantages(rewards, cfg);
    } catch (const Error& e) {
      const std::string name = keyed ? records[groups[g].front()]["group_id"].dump() : std::to_string(g);
      fail(e.kind(), in + ": group " + name + ": " + e.what());
    }
    for (std::size_t k = 0; k < adv.size(); ++k) records[groups[g][k]]["advantage"] = adv[k];
  }
  dataset::write_jsonl(out_path, records);
  out << json{{"groups", groups.size()}, {"records", records.size()}}.dump() << "\n";
  return kOk;
}

int eval_rm(const std::string& groups_path, const std::string& model_path, const std::string& mode_text,
            const std::string& report_path, std::ostream& out) {
  std::vector<PreferenceGroup> groups;
  dataset::read_jsonl(groups_path, [&](const json& j, std::size_t) { groups.push_back(preference_group_from_json(j)); });
  const auto loaded = load_scorer(model_path);
  const RewardEngine engine(parse_reward_mode(mode_text), loaded.scorer.get());
  const auto report = to_json(eval_reward_model(groups, engine));
  if (!report_path.empty()) dataset::write_json(report_path, report);
  json summary = report;
  summary.erase("per_group");
  out << summary.dump() << "\n";
  return kOk;
}

int verify_cmd(const std::string& rule_text, const std::optional<std::string>& text,
               const std::string& text_file, std::ostream& out) {
  json rule_json;
  try {
    rule_json = json::parse(rule_text);
  } catch (const json::exception& e) {
    fail(ErrorKind::kValidation, std::string("--rule: invalid JSON: ") + e.what());
  }
  const HardRule rule = hard_rule_from_json(rule_json, "rule");
  std::string response;
  if (text) {
    response = *text;
  } else if (!text_file.empty()) {
    std::ifstream f(text_file, std::ios::binary);
    if (!f) fail(ErrorKind::kIo, text_file + ": cannot open for reading");
    response.assign(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
  } else {
    fail(ErrorKind::kValidation, "verify needs --text or --text-file");
  }
  const auto r = verify(response, rule);
  out << "satisfied=" << (r.satisfied ? "true" : "false") << " detail=" << r.detail << "\n";
  return kOk;
}

int serve(ServiceConfig config, std::ostream& out) {
  validate(config);
  RewardService service(std::move(config));
  service.load();
  g_stop = false;
  const auto prev_int = std::signal(SIGINT, on_signal);
  const auto prev_term = std::signal(SIGTERM, on_signal);
  const int port = service.start();
  out << json{{"listening", service.config().host + ":" + std::to_string(port)},
              {"model_version", service.handle_health().body["model_version"]},
              {"mode", to_string(service.config().mode)}}
             .dump()
      << std::endl;
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(50));
  service.stop();
  std::signal(SIGINT, prev_int);
  std::signal(SIGTERM, prev_term);
  return kOk;
}

int synth_corpus(const synthetic::CorpusOptions& options, const std::string& out_path,
                 const std::string& responses_path, const std::string& groups_path, std::size_t num_groups,
                 const std::string& rollouts_path, std::ostream& out) {
  const auto instructions = synthetic::make_corpus(options);
  dataset::save_instructions(instructions, out_path);
  if (!responses_path.empty()) dataset::save_responses(synthetic::mock_corpus_responses(instructions), responses_path);
  if (!groups_path.empty()) {
    std::vector<json> records;
    for (const auto& g : synthetic::preference_groups(num_groups, options.seed + 1)) records.push_back(to_json(g));
    dataset::write_jsonl(groups_path, records);
  }
  if (!rollouts_path.empty()) {
    std::vector<json> records;
    for (const auto& r : synthetic::mock_rollouts(instructions)) records.push_back(synthetic::to_json(r));
    dataset::write_jsonl(rollouts_path, records);
  }
  out << json{{"instructions", instructions.size()}}.dump() << "\n";
  return kOk;
}

int print_catalog(std::ostream& out) {
  for (const auto& e : catalog()) {
    out << json{{"rule_type", e.rule_type}, {"param_schema", e.param_schema}, {"description", e.description}}.dump()
        << "\n";
  }
  return kOk;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kValidation:
    case ErrorKind::kUnsupported: return kValidationError;
    case ErrorKind::kIo: return kIoError;
    default: return kInternalError;
  }
}

void report_error(std::ostream& err, std::string_view kind, const std::string& message) {
  err << json{{"error", kind}, {"message", message}}.dump() << std::endl;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reward backend for instruction-following RL", "ifrl"};
  app.require_subcommand(1);

  std::string in, out_path, stats, levels, responses, model, mode = "full", report, rule, text_file, groups;
  std::optional<std::string> text;
  bool denoise = false;

  auto* bc = app.add_subcommand("build-curriculum", "Decompose instructions into curriculum levels");
  bc->add_option("--in", in, "Instructions JSONL")->required();
  bc->add_option("--out", out_path, "Levels JSONL")->required();
  bc->add_option("--stats", stats, "Per-level statistics JSON");

  auto* mp = app.add_subcommand("make-pairs", "Build labeled scorer pairs from levels and responses");
  mp->add_option("--levels", levels, "Levels JSONL")->required();
  mp->add_option("--responses", responses, "Responses JSONL (levels 0..n)")->required();
  mp->add_option("--out", out_path, "Pairs JSONL")->required();
  mp->add_flag("--denoise-hard", denoise, "Drop hard pairs the rule verifier contradicts");

  TrainArgs ta;
  auto* ts = app.add_subcommand("train-scorer", "Train the soft-constraint scorer");
  ts->add_option("--pairs", ta.pairs, "Pairs JSONL")->required();
  ts->add_option("--out", ta.out, "Model file")->required();
  ts->add_option("--loss", ta.loss, "bce or bt")->check(CLI::IsMember({"bce", "bt"}));
  ts->add_option("--epochs", ta.config.epochs, "Full-batch epochs")->capture_default_str();
  ts->add_option("--lr", ta.config.learning_rate, "Learning rate in (0, 1]")->capture_default_str();
  ts->add_option("--l2", ta.config.l2, "L2 penalty")->capture_default_str();
  ts->add_option("--seed", ta.config.seed, "Initialization seed")->capture_default_str();
  ts->add_option("--init-scale", ta.config.init_scale, "Std of the seeded initialization")->capture_default_str();
  ts->add_option("--bits", ta.config.features.bits, "Hash buckets = 2^bits")->capture_default_str();
  ts->add_option("--report", ta.report, "Training report JSON with the loss curve");
  ts->add_flag("--soft-only", ta.soft_only, "Train on soft-constraint pairs only");

  auto* sc = app.add_subcommand("score", "Score rollouts");
  sc->add_option("--model", model, "Model file (optional for rule_only)");
  sc->add_option("--mode", mode, "full, rule_only, model_only, binary_soft[:t]")->capture_default_str();
  sc->add_option("--in", in, "Rollouts JSONL")->required();
  sc->add_option("--out", out_path, "Rewards JSONL")->required();

  std::size_t group_size = 5;
  double eps = 1e-6;
  auto* ad = app.add_subcommand("advantages", "GRPO group advantages");
  ad->add_option("--group-size", group_size, "Rollouts per group")->capture_default_str();
  ad->add_option("--eps", eps, "Denominator epsilon in (0, 1e-3]")->capture_default_str();
  ad->add_option("--in", in, "Rewards JSONL")->required();
  ad->add_option("--out", out_path, "Advantages JSONL")->required();

  auto* ev = app.add_subcommand("eval-rm", "Agreement of a reward model with human ranks");
  ev->add_option("--groups", groups, "Preference groups JSONL")->required();
  ev->add_option("--model", model, "Model file");
  ev->add_option("--mode", mode, "Reward mode")->capture_default_str();
  ev->add_option("--report", report, "Report JSON");

  auto* vf = app.add_subcommand("verify", "Check one hard rule against a text");
  vf->add_option("--rule", rule, "Rule JSON")->required();
  vf->add_option("--text", text, "Response text");
  vf->add_option("--text-file", text_file, "Read the response from a file");

  std::string bind;
  std::size_t max_batch = 256;
  int timeout = 30;
  std::size_t threads = 4;
  auto* sv = app.add_subcommand("serve", "Run the HTTP reward service");
  auto* bind_opt = sv->add_option("--bind", bind, "host:port (default 127.0.0.1:8080)");
  auto* model_opt = sv->add_option("--model", model, "Model file");
  auto* mode_opt = sv->add_option("--mode", mode, "Reward mode (default full)");
  sv->add_option("--max-batch", max_batch, "Items per /v1/score request")->capture_default_str();
  sv->add_option("--timeout", timeout, "Request timeout in seconds")->capture_default_str();
  sv->add_option("--threads", threads, "Worker threads")->capture_default_str();

  synthetic::CorpusOptions so;
  std::size_t num_groups = 50;
  std::string rollouts;
  auto* sy = app.add_subcommand("synth-corpus", "Write a synthetic corpus with mock responses");
  sy->add_option("--out", out_path, "Instructions JSONL")->required();
  sy->add_option("--responses", responses, "Mock responses JSONL");
  sy->add_option("--groups", groups, "Preference groups JSONL");
  sy->add_option("--rollouts", rollouts, "Mock rollouts JSONL, 5 per instruction");
  sy->add_option("--num-groups", num_groups, "Preference groups to write")->capture_default_str();
  sy->add_option("--num", so.num_instructions, "Instruction-following items")->capture_default_str();
  sy->add_option("--reasoning", so.num_reasoning, "Reasoning items")->capture_default_str();
  sy->add_option("--min-constraints", so.min_constraints, "Fewest constraints per item")->capture_default_str();
  sy->add_option("--max-constraints", so.max_constraints, "Most constraints per item")->capture_default_str();
  sy->add_option("--soft-fraction", so.soft_fraction, "Chance that a constraint is soft")->capture_default_str();
  sy->add_option("--seed", so.seed, "Corpus seed")->capture_default_str();

  app.add_subcommand("catalog", "List the hard rule catalog as JSONL");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    report_error(err, "usage", e.what());
    const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return kValidationError;
  }

  try {
    const CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "build-curriculum") return build_curriculum(in, out_path, stats, out);
    if (name == "make-pairs") return make_pairs(levels, responses, out_path, denoise, out);
    if (name == "train-scorer") return train_scorer(ta, out, err);
    if (name == "score") return score(model, mode, in, out_path, out);
    if (name == "advantages") return advantages(group_size, eps, in, out_path, out);
    if (name == "eval-rm") return eval_rm(groups, model, mode, report, out);
    if (name == "verify") return verify_cmd(rule, text, text_file, out);
    if (name == "serve") {
      ServiceConfig cfg;
      apply_env_overrides(cfg);
      if (bind_opt->count() > 0) std::tie(cfg.host, cfg.port) = parse_bind_address(bind);
      if (model_opt->count() > 0) cfg.model_path = model;
      if (mode_opt->count() > 0) cfg.mode = parse_reward_mode(mode);
      cfg.max_batch = max_batch;
      cfg.request_timeout = std::chrono::seconds(timeout);
      cfg.worker_threads = threads;
      return serve(std::move(cfg), out);
    }
    if (name == "synth-corpus") return synth_corpus(so, out_path, responses, groups, num_groups, rollouts, out);
    if (name == "catalog") return print_catalog(out);
    report_error(err, "usage", "unknown subcommand " + name);
    return kValidationError;
  } catch (const Error& e) {
    report_error(err, to_string(e.kind()), e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    report_error(err, "internal", e.what());
    return kInternalError;
  }
}

}  // namespace ifrl::cli
