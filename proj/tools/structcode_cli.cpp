// structcode: convert datasets to code, inspect prompts, build retrieval
// indexes, run the few-shot pipeline and score prediction files.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "structcode/codec.hpp"
#include "structcode/dataset.hpp"
#include "structcode/error.hpp"
#include "structcode/llm_client.hpp"
#include "structcode/pipeline.hpp"
#include "structcode/prompt.hpp"
#include "structcode/synthetic.hpp"

namespace fs = std::filesystem;
using namespace structcode;

namespace {

// Flat "key = value" lines; '#' starts a comment line.
std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config '" + path + "'");
  std::map<std::string, std::string> out;
  std::string line;
  int n = 0;
  auto trim = [](std::string s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
  };
  while (std::getline(in, line)) {
    ++n;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::InvalidArgument, path + ":" + std::to_string(n) + ": expected key = value", n, 1);
    out[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return out;
}

// Options every subcommand shares, plus the config file that backs them.
struct Common {
  std::string config_path;
  std::string task = "script-gen";
  std::string format = "tree";
  std::size_t k = 15;
  std::vector<std::uint64_t> seeds;
  std::size_t budget = 4096;
  std::string backend = "oracle";
  std::string out;
  std::map<std::string, CLI::Option*> by_key;

  void add(CLI::App* app) {
    app->add_option("--config", config_path, "flat key = value file; flags override it");
    app->add_option("--task", task, "script-gen | edge-pred | expl-graph | entity-tracking");
    app->add_option("--format", format, "code format name");
    app->add_option("--k", k, "in-context examples per prompt");
    app->add_option("--seed", seeds, "seed(s), repeat or comma-separate")->delimiter(',');
    app->add_option("--budget", budget, "prompt budget in estimated tokens");
    app->add_option("--backend", backend, "oracle | canned:<path> | remote:<url>");
    app->add_option("--out", out, "output path");
  }

  // Fills every option the command line left unset from the config file.
  void apply_config() {
    if (config_path.empty()) return;
    auto cfg = read_config(config_path);
    for (const auto& [key, value] : cfg) {
      auto it = by_key.find(key);
      if (it == by_key.end()) throw Error(ErrorCode::InvalidArgument, "config: unknown key '" + key + "'");
      CLI::Option* opt = it->second;
      if (opt->count() > 0) continue;
      opt->add_result(value);
      opt->run_callback();
    }
  }

  TaskKind task_kind() const { return parse_task(task); }
  CodeFormat code_format() const { return parse_format(format); }
  std::vector<std::uint64_t> seed_list() const {
    return seeds.empty() ? std::vector<std::uint64_t>{1, 2, 3} : seeds;
  }
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + p.string() + "'");
}

// Rebuilds an instance from a decoded file, the inverse of `convert`.
TaskInstance instance_from_structure(std::string id, TaskKind task, Structure s) {
  TaskInstance inst;
  inst.id = std::move(id);
  inst.task = task;
  if (auto* t = std::get_if<EntityTrace>(&s)) {
    inst.input.actions = t->actions;
    inst.input.entities = t->entities;
  } else {
    auto& g = std::get<LabeledGraph>(s);
    auto attr = [&](const char* k) {
      auto it = g.attrs.find(k);
      return it == g.attrs.end() ? std::string() : it->second;
    };
    inst.input.goal = attr("goal");
    inst.input.belief = attr("belief");
    inst.input.argument = attr("argument");
    inst.input.stance = attr("stance");
    if (task == TaskKind::EdgePrediction) inst.input.nodes = g.nodes;
  }
  inst.gold = std::move(s);
  validate_instance(inst);
  return inst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"structured commonsense generation with code language models"};
  app.require_subcommand(1);

  Common common;
  std::string in_path, train_path, test_path, index_path, selection = "random", instance_id, style = "table";
  std::string model;
  int max_tokens = 0;
  double temperature = -1;
  bool reverse = false;
  std::size_t count = 50;
  std::string id_prefix = "x";
  std::vector<std::string> files;

  auto* convert = app.add_subcommand("convert", "dataset JSONL <-> one code file per instance");
  convert->add_option("--in", in_path, "dataset JSONL, or a directory of code files with --reverse")->required();
  convert->add_flag("--reverse", reverse, "decode code files back into JSONL");

  auto* prompt = app.add_subcommand("prompt", "print the assembled prompt for one test instance");
  prompt->add_option("--train", train_path, "training JSONL");
  prompt->add_option("--test", test_path, "test JSONL");
  prompt->add_option("--id", instance_id, "test instance id (default: first)");
  prompt->add_option("--selection", selection, "random | retrieval");
  prompt->add_option("--index", index_path, "retrieval index file");

  auto* index = app.add_subcommand("index", "build a retrieval index over a training split");
  index->add_option("--train", train_path, "training JSONL");

  auto* run = app.add_subcommand("run", "select, prompt, complete, decode and score");
  run->add_option("--train", train_path, "training JSONL");
  run->add_option("--test", test_path, "test JSONL");
  run->add_option("--selection", selection, "random | retrieval");
  run->add_option("--index", index_path, "retrieval index file");
  run->add_option("--model", model, "model name sent to the remote endpoint");
  run->add_option("--max-tokens", max_tokens, "completion length limit");
  run->add_option("--temperature", temperature, "sampling temperature");

  auto* evaluate = app.add_subcommand("evaluate", "aggregate prediction files, one per seed");
  evaluate->add_option("files", files, "predictions_seed<N>.jsonl files")->required();
  evaluate->add_option("--style", style, "table | json");

  auto* synth = app.add_subcommand("synth", "write a synthetic dataset");
  synth->add_option("--count", count, "number of instances");
  synth->add_option("--prefix", id_prefix, "instance id prefix");

  for (auto* sub : {convert, prompt, index, run, evaluate, synth}) common.add(sub);
  // Config keys are the long flag names of the active subcommand.
  auto extra_keys = [&](CLI::App* sub) {
    for (const char* key : {"task", "format", "k", "seed", "budget", "backend", "out", "train", "test", "index",
                            "selection", "model", "max-tokens", "temperature"})
      if (auto* opt = sub->get_option_no_throw(std::string("--") + key)) common.by_key[key] = opt;
  };

  CLI11_PARSE(app, argc, argv);

  try {
    CLI::App* active = app.get_subcommands().front();
    extra_keys(active);
    common.apply_config();
    const TaskKind task = common.task_kind();
    auto need = [](const std::string& value, const char* flag) {
      if (value.empty()) throw Error(ErrorCode::InvalidArgument, std::string(flag) + " is required");
    };
    if (active == prompt || active == index || active == run) need(train_path, "--train");
    if (active == prompt || active == run) need(test_path, "--test");

    if (active == convert) {
      const CodeFormat format = common.code_format();
      if (!is_applicable(task, format))
        throw Error(ErrorCode::FormatMismatch, std::string(to_string(format)) + " does not apply to " + to_string(task));
      if (common.out.empty()) throw Error(ErrorCode::InvalidArgument, "--out is required");
      if (!reverse) {
        auto data = load_dataset(in_path, task);
        for (const auto& inst : data) {
          SourceText src = inst.gold ? encode(inst, format) : make_stub(inst, format);
          write_file(fs::path(common.out) / (inst.id + file_extension(format)), src.text);
        }
        std::cerr << "wrote " << data.size() << " files to " << common.out << "\n";
      } else {
        std::vector<fs::path> paths;
        for (const auto& e : fs::directory_iterator(in_path))
          if (e.is_regular_file() && e.path().extension() == file_extension(format)) paths.push_back(e.path());
        std::sort(paths.begin(), paths.end());
        std::vector<TaskInstance> out;
        for (const auto& p : paths) {
          Decoded d = decode(SourceText{read_file(p), format}, Mode::Tolerant);
          for (const auto& w : d.warnings)
            std::cerr << p.string() << ":" << w.line << ":" << w.column << ": " << w.category << ": " << w.message
                      << "\n";
          out.push_back(instance_from_structure(p.stem().string(), task, std::move(d.structure)));
        }
        std::ostringstream ss;
        write_dataset(ss, out);
        write_file(common.out, ss.str());
        std::cerr << "wrote " << out.size() << " instances to " << common.out << "\n";
      }
    } else if (active == prompt) {
      const CodeFormat format = common.code_format();
      auto train = load_dataset(train_path, task);
      auto test = load_dataset(test_path, task);
      if (test.empty()) throw Error(ErrorCode::EmptyInput, "test split is empty");
      auto it = instance_id.empty() ? test.begin()
                                    : std::find_if(test.begin(), test.end(),
                                                   [&](const TaskInstance& t) { return t.id == instance_id; });
      if (it == test.end()) throw Error(ErrorCode::InvalidArgument, "no test instance '" + instance_id + "'");
      std::vector<TaskInstance> examples;
      if (parse_selection(selection) == Selection::Random) {
        examples = sample_examples(train, common.k, common.seed_list().front());
      } else {
        if (index_path.empty()) throw Error(ErrorCode::InvalidArgument, "--index is required for retrieval");
        std::ifstream in(index_path, std::ios::binary);
        if (!in) throw Error(ErrorCode::Io, "cannot open index '" + index_path + "'");
        auto idx = RetrievalIndex::load(in);
        auto ids = idx.retrieve(input_text(*it), common.k);
        for (auto r = ids.rbegin(); r != ids.rend(); ++r)
          for (const auto& t : train)
            if (t.id == *r) examples.push_back(t);
      }
      Prompt p = assemble_prompt(examples, make_stub(*it, format), common.budget, format);
      if (common.out.empty()) std::cout << p.rendered;
      else write_file(common.out, p.rendered);
      std::cerr << "prompt_hash " << prompt_hash(p.rendered) << "  examples " << p.examples.size() << "  dropped "
                << p.dropped << "  est_tokens " << estimate_tokens(p.rendered) << "\n";
    } else if (active == index) {
      if (common.out.empty()) throw Error(ErrorCode::InvalidArgument, "--out is required");
      auto idx = RetrievalIndex::build(load_dataset(train_path, task));
      std::ostringstream ss;
      idx.save(ss);
      write_file(common.out, ss.str());
      std::cerr << "indexed " << idx.size() << " instances, vocabulary " << idx.vocabulary().size() << "\n";
    } else if (active == run) {
      RunConfig cfg;
      cfg.task = task;
      cfg.format = common.code_format();
      cfg.k = common.k;
      cfg.seeds = common.seed_list();
      cfg.selection = parse_selection(selection);
      cfg.budget_tokens = common.budget;
      cfg.backend = common.backend;
      cfg.train_path = train_path;
      cfg.test_path = test_path;
      cfg.index_path = index_path;
      cfg.out_dir = common.out;
      if (!model.empty()) cfg.completion.model_name = model;
      if (max_tokens > 0) cfg.completion.max_tokens = max_tokens;
      if (temperature >= 0) cfg.completion.temperature = temperature;
      auto paths = structcode::run(cfg);
      EvalReport rep = evaluate_files(paths);
      write_file(fs::path(cfg.out_dir) / "report.json", render_report(rep, ReportStyle::Json));
      std::string table = render_report(rep, ReportStyle::Table);
      write_file(fs::path(cfg.out_dir) / "report.txt", table);
      std::cout << table;
    } else if (active == evaluate) {
      EvalReport rep = evaluate_files(files);
      std::string text;
      if (style == "table") text = render_report(rep, ReportStyle::Table);
      else if (style == "json") text = render_report(rep, ReportStyle::Json);
      else throw Error(ErrorCode::InvalidArgument, "--style must be table or json");
      if (common.out.empty()) std::cout << text;
      else write_file(common.out, text);
    } else if (active == synth) {
      auto data = synthetic_dataset(task, count, common.seed_list().front(), id_prefix);
      std::ostringstream ss;
      write_dataset(ss, data);
      if (common.out.empty()) std::cout << ss.str();
      else write_file(common.out, ss.str());
    }
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
