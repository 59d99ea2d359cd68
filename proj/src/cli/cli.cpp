// Copyright 2026 The msgm-bench Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "msgm/cli.hpp"

#include <omp.h>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "msgm/dataio.hpp"
#include "msgm/error.hpp"
#include "msgm/evaluation.hpp"
#include "msgm/extforecast.hpp"
#include "msgm/neural/checkpoint.hpp"
#include "msgm/simgen.hpp"
#include "msgm/splitting.hpp"
#include "msgm/workflows.hpp"
#include "nlohmann/json.hpp"

namespace msgm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kOutRootEnv = "MSGM_OUT_ROOT";

// ---- flag registration: only flags given on the command line override ----

class FlagSet {
 public:
  template <typename T>
  CLI::Option* add(CLI::App* app, const std::string& flag, std::string pointer,
                   const std::string& help) {
    auto holder = std::make_shared<T>();
    CLI::Option* opt = app->add_option(flag, *holder, help);
    appliers_.push_back([holder, opt, pointer](json& j) {
      if (opt->count() > 0) j[json::json_pointer(pointer)] = *holder;
    });
    return opt;
  }

  void apply(json& j) const {
    for (const auto& f : appliers_) f(j);
  }

 private:
  std::vector<std::function<void(json&)>> appliers_;
};

// Default hyperparameters per architecture.
json model_defaults(const std::string& arch) {
  if (arch == "transformer")
    return {{"arch", "transformer"}, {"hidden", 192}, {"layers", 3}, {"heads", 4},
            {"dropout", 0.04}};
  if (arch == "persistence")
    return {{"arch", "persistence"}, {"hidden", 1}, {"layers", 1}, {"heads", 1},
            {"dropout", 0.0}};
  return {{"arch", "lstm"}, {"hidden", 192}, {"layers", 3}, {"heads", 1}, {"dropout", 0.0}};
}

json train_defaults(const std::string& arch) {
  json t = neural::to_json(neural::TrainConfig{});
  if (arch == "transformer") {
    t["batch_size"] = 128;
    t["learning_rate"] = 0.0004;
  } else {
    t["batch_size"] = 96;
    t["learning_rate"] = 0.001;
  }
  return t;
}

void add_model_flags(CLI::App* app, FlagSet& flags) {
  flags.add<std::string>(app, "--arch", "/model/arch", "lstm | transformer");
  flags.add<std::size_t>(app, "--hidden", "/model/hidden", "hidden size");
  flags.add<std::size_t>(app, "--layers", "/model/layers", "number of layers");
  flags.add<std::size_t>(app, "--heads", "/model/heads", "attention heads (transformer)");
  flags.add<double>(app, "--dropout", "/model/dropout", "dropout rate");
}

void add_train_flags(CLI::App* app, FlagSet& flags) {
  flags.add<std::size_t>(app, "--batch-size", "/train/batch_size", "mini-batch size");
  flags.add<double>(app, "--lr", "/train/learning_rate", "learning rate");
  flags.add<double>(app, "--weight-decay", "/train/weight_decay", "AdamW weight decay");
  flags.add<std::size_t>(app, "--epochs", "/train/max_epochs", "maximum epochs");
  flags.add<std::size_t>(app, "--patience", "/train/patience", "early-stop patience");
  flags.add<std::size_t>(app, "--epoch-windows", "/train/epoch_windows",
                         "train windows sampled per epoch (0 = all)");
  flags.add<std::size_t>(app, "--val-windows", "/train/val_windows",
                         "fixed val subsample (0 = all)");
}

// ---- run directory and log ----

class RunLog {
 public:
  explicit RunLog(const fs::path& path) : out_(path) {
    if (!out_) throw IoError("cannot write log " + path.string());
  }
  void operator()(const std::string& line) {
    out_ << line << "\n";
    out_.flush();
    std::cerr << line << "\n";
  }

 private:
  std::ofstream out_;
};

std::string utc_stamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

fs::path resolve_out(const json& cfg, const std::string& sub) {
  const std::string out = cfg.value("out", std::string{});
  if (!out.empty()) return out;
  const char* root = std::getenv(kOutRootEnv);
  return fs::path(root && *root ? root : "runs") / (sub + "-" + utc_stamp());
}

// ---- shared helpers ----

struct Context {
  json cfg;
  fs::path out;
  std::unique_ptr<RunLog> log;

  void say(const std::string& s) const { (*log)(s); }
  workflows::Log logger() const {
    return [this](const std::string& s) { (*log)(s); };
  }
};

neural::ModelSpec model_from(const json& cfg) {
  return neural::model_spec_from_json(cfg.at("model"));
}

neural::TrainConfig train_from(const json& cfg) {
  neural::TrainConfig t = neural::train_config_from_json(cfg.at("train"));
  t.seed = cfg.at("seed").get<std::uint64_t>();
  return t;
}

splitting::SourceTargetSplit split_for(const Context& ctx, const dataio::Dataset& ds) {
  const std::string path = ctx.cfg.value("split", std::string{});
  if (!path.empty()) return splitting::split_from_json(evaluation::read_json(path));
  return splitting::split_source_target(ds.manifest, ctx.cfg.at("target_fraction").get<double>(),
                                        ctx.cfg.at("seed").get<std::uint64_t>());
}

std::vector<std::string> target_ids_for(const Context& ctx, const dataio::Dataset& ds) {
  auto ids = ctx.cfg.value("ids", std::vector<std::string>{});
  if (!ids.empty()) return ids;
  if (!ctx.cfg.value("split", std::string{}).empty()) return split_for(ctx, ds).target_ids;
  for (const auto& b : ds.manifest.buildings) ids.push_back(b.id);
  return ids;
}

std::vector<const dataio::SeriesFrame*> frames_for(const dataio::Dataset& ds,
                                                   const std::vector<std::string>& ids) {
  std::vector<const dataio::SeriesFrame*> out;
  for (const auto& id : ids) out.push_back(&ds.frame(id));
  return out;
}

void write_checkpoint_outputs(const Context& ctx, const workflows::PretrainResult& res) {
  neural::save_checkpoint(ctx.out / "checkpoint.json", res.checkpoint);
  evaluation::write_json(ctx.out / "pretrain.json",
                         {{"train_ids", res.train_ids},
                          {"val_ids", res.val_ids},
                          {"repeat_val_rmse", res.repeat_val_rmse},
                          {"best_repeat", res.best_repeat},
                          {"best_val_rmse", res.checkpoint.metadata.best_val_rmse},
                          {"config", ctx.cfg}});
  ctx.say("best val RMSE " + std::to_string(res.checkpoint.metadata.best_val_rmse) +
          " (repeat " + std::to_string(res.best_repeat) + ")");
}

// ---- subcommands ----

void cmd_generate(const Context& ctx) {
  simgen::GenerateOptions opt;
  opt.jobs = ctx.cfg.at("jobs").get<int>();
  const auto m = simgen::generate_dataset(ctx.cfg.at("buildings").get<int>(),
                                          ctx.cfg.at("days").get<int>(),
                                          ctx.cfg.at("seed").get<std::uint64_t>(), ctx.out, opt);
  ctx.say("wrote " + std::to_string(m.buildings.size()) + " buildings to " + ctx.out.string());
}

void cmd_split(const Context& ctx) {
  const auto manifest = dataio::read_manifest(fs::path(ctx.cfg.at("dataset").get<std::string>()) /
                                              "manifest.json");
  const auto split = splitting::split_source_target(
      manifest, ctx.cfg.at("target_fraction").get<double>(), ctx.cfg.at("seed").get<std::uint64_t>());
  evaluation::write_json(ctx.out / "split.json", splitting::to_json(split));
  ctx.say(std::to_string(split.source_ids.size()) + " sources, " +
          std::to_string(split.target_ids.size()) + " targets");
}

workflows::PretrainJob job_from(const Context& ctx) {
  workflows::PretrainJob job;
  job.spec = model_from(ctx.cfg);
  job.train = train_from(ctx.cfg);
  job.n_repeats = ctx.cfg.at("n_repeats").get<std::size_t>();
  job.source_cap = ctx.cfg.at("source_cap").get<std::size_t>();
  job.cap_train = ctx.cfg.at("cap_train").get<std::size_t>();
  job.seed = ctx.cfg.at("seed").get<std::uint64_t>();
  return job;
}

void cmd_pretrain(const Context& ctx) {
  const auto ds = dataio::load_dataset(ctx.cfg.at("dataset").get<std::string>());
  auto job = job_from(ctx);
  auto pool = split_for(ctx, ds).source_ids;
  const auto n = ctx.cfg.at("n_sources").get<std::size_t>();
  if (n > 0) {
    if (n > pool.size())
      throw InvalidArgument("pretrain: " + std::to_string(n) + " sources requested, " +
                            std::to_string(pool.size()) + " available");
    for (auto k : sample_without_replacement(pool.size(), n, derive_seed(job.seed, {0x50u})))
      job.source_ids.push_back(pool[k]);
  } else {
    job.source_ids = pool;
  }
  write_checkpoint_outputs(ctx, workflows::pretrain_msgm(job, ds, ctx.logger()));
}

void cmd_pretrain_single(const Context& ctx) {
  const auto ds = dataio::load_dataset(ctx.cfg.at("dataset").get<std::string>());
  auto job = job_from(ctx);
  std::string source = ctx.cfg.at("source").get<std::string>();
  if (source.empty()) {
    const auto pool = split_for(ctx, ds).source_ids;
    source = pool[Rng(derive_seed(job.seed, {0x51u})).below(pool.size())];
  }
  ctx.say("single source: " + source);
  job.source_ids = {source};
  write_checkpoint_outputs(ctx, workflows::pretrain_single_source(job, ds, ctx.logger()));
}

void dump_plan(const Context& ctx, std::size_t rows, double f) {
  const json plan = splitting::to_json(splitting::seasonal_plan(rows, f));
  evaluation::write_json(ctx.out / "seasonal_plan.json", plan);
  std::cout << plan.dump(2) << "\n";
}

void cmd_finetune(const Context& ctx) {
  const auto ds = dataio::load_dataset(ctx.cfg.at("dataset").get<std::string>());
  const double f = ctx.cfg.at("train_months").get<double>();
  const auto ids = target_ids_for(ctx, ds);
  if (ctx.cfg.at("dump_plan").get<bool>()) {
    dump_plan(ctx, ds.frame(ids.front()).rows(), f);
    return;
  }
  const auto ckpt = neural::load_checkpoint(ctx.cfg.at("checkpoint").get<std::string>());
  workflows::FinetuneOptions opt;
  opt.train_months = f;
  opt.train = train_from(ctx.cfg);
  opt.lr_scale = ctx.cfg.at("lr_scale").get<double>();
  opt.eval_stride = ctx.cfg.at("eval_stride").get<std::size_t>();
  std::vector<evaluation::BuildingReport> reports;
  json seasons = json::array();
  for (const auto* t : frames_for(ds, ids)) {
    const auto res = workflows::finetune_seasonal(ckpt, *t, opt, ctx.logger());
    reports.push_back(res.report);
    for (int k = 0; k < 4; ++k)
      seasons.push_back({{"building_id", t->building_id()},
                         {"season", k},
                         {"val_rmse", res.seasons[k].val_rmse},
                         {"epochs_run", res.seasons[k].epochs_run},
                         {"train_windows", res.seasons[k].train_windows}});
  }
  const auto rep = evaluation::make_eval_report(ctx.cfg.at("label").get<std::string>(),
                                                evaluation::EvalMode::kSeasonal,
                                                std::move(reports), ctx.cfg);
  json j = evaluation::to_json(rep);
  j["finetune"] = seasons;
  evaluation::write_json(ctx.out / "eval_report.json", j);
  evaluation::emit_boxplot({rep}, ctx.out / "boxplot");
  ctx.say("mean seasonal MAE " + std::to_string(rep.summary.mae.mean));
}

void cmd_evaluate(const Context& ctx) {
  const auto ds = dataio::load_dataset(ctx.cfg.at("targets").get<std::string>());
  const auto mode = evaluation::eval_mode_from_string(ctx.cfg.at("mode").get<std::string>());
  const auto ids = target_ids_for(ctx, ds);
  if (ctx.cfg.at("dump_plan").get<bool>()) {
    dump_plan(ctx, ds.frame(ids.front()).rows(), 0.0);
    return;
  }
  const auto frames = frames_for(ds, ids);
  const std::string ck = ctx.cfg.at("checkpoint").get<std::string>();
  const auto ckpt = ck == "persistence" ? workflows::persistence_checkpoint(ds.manifest.schema)
                                        : neural::load_checkpoint(ck);
  auto rep = workflows::evaluate_targets(ckpt, frames, mode, ctx.cfg.at("label").get<std::string>(),
                                         ctx.cfg.at("eval_stride").get<std::size_t>());
  rep.config = ctx.cfg;
  evaluation::write_json(ctx.out / "eval_report.json", evaluation::to_json(rep));
  evaluation::emit_boxplot({rep}, ctx.out / "boxplot");
  for (const auto& b : rep.buildings)
    ctx.say(b.building_id + ": mae " + std::to_string(b.overall.mae) + " rmse " +
            std::to_string(b.overall.rmse) + " windows " + std::to_string(b.overall.n_windows));
  ctx.say("mean MAE " + std::to_string(rep.summary.mae.mean));
}

void cmd_ablate(const Context& ctx) {
  const auto ds = dataio::load_dataset(ctx.cfg.at("dataset").get<std::string>());
  const auto split = split_for(ctx, ds);
  workflows::AblationSpec spec;
  spec.counts = ctx.cfg.at("counts").get<std::vector<std::size_t>>();
  spec.small_repeats = ctx.cfg.at("small_repeats").get<std::size_t>();
  spec.small_threshold = ctx.cfg.at("small_threshold").get<std::size_t>();
  spec.target_ids = split.target_ids;
  spec.seed = ctx.cfg.at("seed").get<std::uint64_t>();
  spec.eval_mode = evaluation::eval_mode_from_string(ctx.cfg.at("mode").get<std::string>());
  spec.eval_stride = ctx.cfg.at("eval_stride").get<std::size_t>();
  auto rep = workflows::ablate_sources(spec, ds, split.source_ids, model_from(ctx.cfg),
                                       train_from(ctx.cfg), ctx.logger());
  rep.config = ctx.cfg;
  evaluation::write_json(ctx.out / "ablation.json", evaluation::to_json(rep));
  evaluation::emit_ablation_curve(rep, ctx.out / "ablation_curve");
  for (const auto& r : rep.rows)
    ctx.say("n=" + std::to_string(r.n_sources) + ": mean MAE " + std::to_string(r.best.mae));
  ctx.say("spearman(log2 n, MAE) = " + std::to_string(rep.spearman_log2n_mae));
}

void cmd_compare(const Context& ctx) {
  const auto a = evaluation::eval_report_from_json(
      evaluation::read_json(ctx.cfg.at("a").get<std::string>()));
  const auto b = evaluation::eval_report_from_json(
      evaluation::read_json(ctx.cfg.at("b").get<std::string>()));
  auto c = workflows::compare_models(a, b);
  evaluation::write_json(ctx.out / "comparison.json", evaluation::to_json(c));
  evaluation::emit_scatter(c, ctx.out / "scatter");
  ctx.say(c.label_a + " vs " + c.label_b + ": " + std::to_string(c.wins) + " wins, " +
          std::to_string(c.losses) + " losses, " + std::to_string(c.ties) +
          " ties; MAE improvement " + std::to_string(100.0 * c.improvement_mae) + "%");
}

void cmd_report(const Context& ctx) {
  std::vector<evaluation::EvalReport> reports;
  for (const auto& p : ctx.cfg.at("inputs").get<std::vector<std::string>>())
    reports.push_back(evaluation::eval_report_from_json(evaluation::read_json(p)));
  if (reports.empty()) throw InvalidArgument("report: no input reports");
  evaluation::emit_boxplot(reports, ctx.out / "boxplot");
  std::ostringstream md;
  md << "| model | mode | targets | mean MAE | median MAE | mean RMSE |\n"
     << "|---|---|---|---|---|---|\n";
  for (const auto& r : reports)
    md << "| " << r.label << " | " << evaluation::to_string(r.mode) << " | "
       << r.buildings.size() << " | " << r.summary.mae.mean << " | " << r.summary.mae.median
       << " | " << r.summary.rmse.mean << " |\n";
  std::ofstream(ctx.out / "summary.md") << md.str();
  std::cout << md.str();
}

std::vector<std::string> split_words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

void cmd_adapter_eval(const Context& ctx) {
  const auto ds = dataio::load_dataset(ctx.cfg.at("targets").get<std::string>());
  extforecast::AdapterOptions opt;
  opt.command = split_words(ctx.cfg.at("command").get<std::string>());
  opt.timeout = std::chrono::milliseconds(ctx.cfg.at("timeout_ms").get<long>());
  const auto mode = evaluation::eval_mode_from_string(ctx.cfg.at("mode").get<std::string>());
  auto reports = extforecast::run_adapter(opt, frames_for(ds, target_ids_for(ctx, ds)), mode);
  const auto rep = evaluation::make_eval_report(ctx.cfg.at("label").get<std::string>(), mode,
                                                std::move(reports), ctx.cfg);
  evaluation::write_json(ctx.out / "eval_report.json", evaluation::to_json(rep));
  ctx.say("mean MAE " + std::to_string(rep.summary.mae.mean));
}

// ---- dispatch ----

struct Subcommand {
  CLI::App* app = nullptr;
  FlagSet flags;
  std::function<json(const std::string& arch)> defaults;
  std::function<void(const Context&)> run;
};

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app("msgm: multi-source general model benchmark harness", "msgm");
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  std::string out;
  int jobs = 0;
  app.add_option("--config", config_path, "JSON config file; flags override it");
  app.add_option("--out", out, "output directory (default: $MSGM_OUT_ROOT/<cmd>-<utc>)");
  CLI::Option* jobs_opt = app.add_option("--jobs", jobs, "worker threads (default 1)");

  std::map<std::string, Subcommand> subs;
  const auto add = [&](const std::string& name, const std::string& help) -> Subcommand& {
    Subcommand& s = subs[name];
    s.app = app.add_subcommand(name, help);
    s.flags.add<std::uint64_t>(s.app, "--seed", "/seed", "seed");
    return s;
  };
  const json common = {{"seed", 0}, {"jobs", 1}, {"out", ""}};

  {
    auto& s = add("generate", "generate a synthetic dataset");
    s.flags.add<int>(s.app, "--buildings", "/buildings", "number of buildings");
    s.flags.add<int>(s.app, "--days", "/days", "days per building");
    s.defaults = [](const std::string&) { return json{{"buildings", 80}, {"days", 365}}; };
    s.run = cmd_generate;
  }
  {
    auto& s = add("split", "split a dataset into sources and targets");
    s.flags.add<std::string>(s.app, "--dataset", "/dataset", "dataset directory");
    s.flags.add<double>(s.app, "--target-fraction", "/target_fraction", "target share");
    s.defaults = [](const std::string&) {
      return json{{"dataset", ""}, {"target_fraction", 0.2}};
    };
    s.run = cmd_split;
  }
  for (const std::string name : {"pretrain", "pretrain-single"}) {
    auto& s = add(name, name == "pretrain" ? "pretrain a multi-source model"
                                           : "pretrain on a single source building");
    s.flags.add<std::string>(s.app, "--dataset", "/dataset", "dataset directory");
    s.flags.add<std::string>(s.app, "--split", "/split", "split JSON (default: computed)");
    s.flags.add<double>(s.app, "--target-fraction", "/target_fraction", "target share");
    s.flags.add<std::size_t>(s.app, "--repeats", "/n_repeats", "training repeats");
    if (name == "pretrain")
      s.flags.add<std::size_t>(s.app, "--sources", "/n_sources",
                               "sample this many sources (0 = all)");
    else
      s.flags.add<std::string>(s.app, "--source", "/source", "source id (default: random)");
    add_model_flags(s.app, s.flags);
    add_train_flags(s.app, s.flags);
    s.defaults = [name](const std::string& arch) {
      json d = {{"dataset", ""},     {"split", ""},      {"target_fraction", 0.2},
                {"n_repeats", 4},    {"source_cap", 200}, {"cap_train", 180},
                {"model", model_defaults(arch)}, {"train", train_defaults(arch)}};
      if (name == "pretrain") d["n_sources"] = 0;
      else d["source"] = "";
      return d;
    };
    s.run = name == "pretrain" ? cmd_pretrain : cmd_pretrain_single;
  }
  {
    auto& s = add("finetune", "seasonal fine-tuning of a checkpoint on target buildings");
    s.flags.add<std::string>(s.app, "--checkpoint", "/checkpoint", "checkpoint JSON");
    s.flags.add<std::string>(s.app, "--dataset", "/dataset", "dataset directory");
    s.flags.add<std::string>(s.app, "--split", "/split", "split JSON (targets)");
    s.flags.add<std::vector<std::string>>(s.app, "--ids", "/ids", "target ids")->delimiter(',');
    s.flags.add<double>(s.app, "--months", "/train_months", "train months: 0, 0.5, 1, 2.5");
    s.flags.add<double>(s.app, "--lr-scale", "/lr_scale", "fine-tuning lr multiplier");
    s.flags.add<std::size_t>(s.app, "--eval-stride", "/eval_stride", "test window stride");
    s.flags.add<std::string>(s.app, "--label", "/label", "report label");
    s.app->add_flag("--dump-plan", "print the seasonal plan and exit");
    add_train_flags(s.app, s.flags);
    s.defaults = [](const std::string& arch) {
      return json{{"checkpoint", ""}, {"dataset", ""},       {"split", ""},
                  {"ids", json::array()}, {"train_months", 0.5}, {"lr_scale", 0.1},
                  {"eval_stride", 1},  {"label", "finetuned"}, {"dump_plan", false},
                  {"train", train_defaults(arch)}};
    };
    s.run = cmd_finetune;
  }
  {
    auto& s = add("evaluate", "zero-shot evaluation of a checkpoint");
    s.flags.add<std::string>(s.app, "--checkpoint", "/checkpoint",
                             "checkpoint JSON or 'persistence'");
    s.flags.add<std::string>(s.app, "--targets", "/targets", "dataset directory of targets");
    s.flags.add<std::string>(s.app, "--split", "/split", "split JSON (targets)");
    s.flags.add<std::vector<std::string>>(s.app, "--ids", "/ids", "target ids")->delimiter(',');
    s.flags.add<std::string>(s.app, "--mode", "/mode", "seasonal | all-in-one");
    s.flags.add<std::size_t>(s.app, "--eval-stride", "/eval_stride", "window stride");
    s.flags.add<std::string>(s.app, "--label", "/label", "report label");
    s.app->add_flag("--dump-plan", "print the seasonal plan and exit");
    s.defaults = [](const std::string&) {
      return json{{"checkpoint", ""}, {"targets", ""},   {"split", ""},
                  {"ids", json::array()}, {"mode", "seasonal"}, {"eval_stride", 1},
                  {"label", "model"}, {"dump_plan", false}};
    };
    s.run = cmd_evaluate;
  }
  {
    auto& s = add("ablate", "source-count ablation");
    s.flags.add<std::string>(s.app, "--dataset", "/dataset", "dataset directory");
    s.flags.add<std::string>(s.app, "--split", "/split", "split JSON (default: computed)");
    s.flags.add<double>(s.app, "--target-fraction", "/target_fraction", "target share");
    s.flags.add<std::vector<std::size_t>>(s.app, "--counts", "/counts", "source counts")
        ->delimiter(',');
    s.flags.add<std::size_t>(s.app, "--small-repeats", "/small_repeats", "repeats for small n");
    s.flags.add<std::size_t>(s.app, "--small-threshold", "/small_threshold",
                             "largest n that is repeated");
    s.flags.add<std::string>(s.app, "--mode", "/mode", "seasonal | all-in-one");
    s.flags.add<std::size_t>(s.app, "--eval-stride", "/eval_stride", "window stride");
    add_model_flags(s.app, s.flags);
    add_train_flags(s.app, s.flags);
    s.defaults = [](const std::string& arch) {
      return json{{"dataset", ""},
                  {"split", ""},
                  {"target_fraction", 0.2},
                  {"counts", {1, 2, 4, 8, 16, 32, 64, 128}},
                  {"small_repeats", 4},
                  {"small_threshold", 16},
                  {"mode", "seasonal"},
                  {"eval_stride", 1},
                  {"model", model_defaults(arch)},
                  {"train", train_defaults(arch)}};
    };
    s.run = cmd_ablate;
  }
  {
    auto& s = add("compare", "compare two evaluation reports");
    s.flags.add<std::string>(s.app, "--a", "/a", "report A (eval_report.json)");
    s.flags.add<std::string>(s.app, "--b", "/b", "report B (eval_report.json)");
    s.defaults = [](const std::string&) { return json{{"a", ""}, {"b", ""}}; };
    s.run = cmd_compare;
  }
  {
    auto& s = add("report", "summary table and boxplot over evaluation reports");
    s.flags.add<std::vector<std::string>>(s.app, "--inputs", "/inputs", "eval reports")
        ->delimiter(',');
    s.defaults = [](const std::string&) { return json{{"inputs", json::array()}}; };
    s.run = cmd_report;
  }
  {
    auto& s = add("adapter-eval", "score an external forecaster over the wire protocol");
    s.flags.add<std::string>(s.app, "--command", "/command", "adapter command line");
    s.flags.add<std::string>(s.app, "--targets", "/targets", "dataset directory of targets");
    s.flags.add<std::string>(s.app, "--split", "/split", "split JSON (targets)");
    s.flags.add<std::vector<std::string>>(s.app, "--ids", "/ids", "target ids")->delimiter(',');
    s.flags.add<std::string>(s.app, "--mode", "/mode", "seasonal | all-in-one");
    s.flags.add<long>(s.app, "--timeout-ms", "/timeout_ms", "per-request timeout");
    s.flags.add<std::string>(s.app, "--label", "/label", "report label");
    s.defaults = [](const std::string&) {
      return json{{"command", ""}, {"targets", ""},     {"split", ""},
                  {"ids", json::array()}, {"mode", "seasonal"}, {"timeout_ms", 30000},
                  {"label", "external"}};
    };
    s.run = cmd_adapter_eval;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const auto it = std::find_if(subs.begin(), subs.end(),
                               [](const auto& kv) { return kv.second.app->parsed(); });
  const std::string name = it->first;
  Subcommand& sub = it->second;

  try {
    json file = json::object();
    if (!config_path.empty()) {
      file = evaluation::read_json(config_path);
      if (!file.is_object()) throw InvalidArgument("config: expected a JSON object");
    }
    json flags = json::object();
    sub.flags.apply(flags);
    if (sub.app->get_option_no_throw("--dump-plan") &&
        sub.app->get_option("--dump-plan")->count() > 0)
      flags["dump_plan"] = true;
    if (!out.empty()) flags["out"] = out;
    if (jobs_opt->count() > 0) flags["jobs"] = jobs;

    // Architecture decides the model/train defaults, so resolve it first.
    std::string arch = "lstm";
    for (const json* layer : {&file, &flags})
      if (layer->contains("model") && (*layer)["model"].contains("arch"))
        arch = (*layer)["model"]["arch"].get<std::string>();
    neural::arch_from_string(arch);

    json cfg = common;
    cfg.merge_patch(sub.defaults(arch));
    file.erase("subcommand");
    cfg.merge_patch(file);
    cfg.merge_patch(flags);
    cfg["subcommand"] = name;
    if (cfg.at("jobs").get<int>() < 1) throw InvalidArgument("--jobs must be >= 1");
    omp_set_num_threads(cfg.at("jobs").get<int>());

    Context ctx;
    ctx.out = resolve_out(cfg, name);
    cfg["out"] = ctx.out.string();
    ctx.cfg = cfg;
    fs::create_directories(ctx.out);
    evaluation::write_json(ctx.out / "resolved_config.json", ctx.cfg);
    ctx.log = std::make_unique<RunLog>(ctx.out / "run.log");
    ctx.say("msgm " + name + " seed " + std::to_string(cfg.at("seed").get<std::uint64_t>()) +
            " jobs " + std::to_string(cfg.at("jobs").get<int>()));
    ctx.say("config " + cfg.dump());
    sub.run(ctx);
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const json::exception& e) {
    std::cerr << "error: bad configuration: " << e.what() << "\n";
    return 1;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("msgm");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace msgm::cli
