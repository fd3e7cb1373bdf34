#include "structcode/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "structcode/dataset.hpp"
#include "structcode/error.hpp"
#include "structcode/metrics.hpp"
#include "structcode/pyparse.hpp"

#ifndef STRUCTCODE_GIT_DESCRIBE
#define STRUCTCODE_GIT_DESCRIBE "unknown"
#endif

namespace structcode {

using json = nlohmann::json;

const char* to_string(Selection s) { return s == Selection::Random ? "random" : "retrieval"; }

Selection parse_selection(std::string_view name) {
  if (name == "random") return Selection::Random;
  if (name == "retrieval") return Selection::Retrieval;
  throw Error(ErrorCode::InvalidArgument, "selection must be 'random' or 'retrieval', got '" + std::string(name) + "'");
}

const char* to_string(ParseStatus s) {
  switch (s) {
    case ParseStatus::Ok: return "ok";
    case ParseStatus::Warnings: return "warnings";
    case ParseStatus::Failed: return "failed";
  }
  return "?";
}

ParseStatus parse_status(std::string_view name) {
  if (name == "ok") return ParseStatus::Ok;
  if (name == "warnings") return ParseStatus::Warnings;
  if (name == "failed") return ParseStatus::Failed;
  throw Error(ErrorCode::SchemaError, "unknown parse status '" + std::string(name) + "'");
}

void validate_run_config(const RunConfig& c) {
  auto bad = [](const char* field, const std::string& what) {
    throw Error(ErrorCode::InvalidArgument, std::string(field) + ": " + what).with_field(field);
  };
  if (!is_applicable(c.task, c.format))
    bad("format", std::string(to_string(c.format)) + " does not apply to " + to_string(c.task));
  if (c.k == 0) bad("k", "must be at least 1");
  if (c.seeds.empty()) bad("seeds", "at least one seed is required");
  if (std::set<std::uint64_t>(c.seeds.begin(), c.seeds.end()).size() != c.seeds.size()) bad("seeds", "repeated seed");
  if (c.budget_tokens == 0) bad("budget", "must be positive");
  if (c.selection == Selection::Retrieval && c.index_path.empty()) bad("index", "retrieval selection needs an index");
  validate_config(c.completion);
}

// --- records -----------------------------------------------------------------

std::string record_to_json(const PredictionRecord& r) {
  json j;
  j["id"] = r.instance_id;
  j["seed"] = r.seed;
  j["prompt_hash"] = r.prompt_hash;
  j["completion"] = r.completion;
  j["status"] = to_string(r.status);
  j["warnings"] = r.warning_count;
  j["message"] = r.message;
  j["decoded"] = r.decoded ? json::parse(structure_to_json(*r.decoded)) : json(nullptr);
  j["metrics"] = json::object();
  for (const auto& [k, v] : r.metrics) j["metrics"][k] = v;
  return j.dump();
}

PredictionRecord record_from_json(std::string_view text) {
  PredictionRecord r;
  try {
    json j = json::parse(text);
    r.instance_id = j.at("id").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.prompt_hash = j.at("prompt_hash").get<std::string>();
    r.completion = j.at("completion").get<std::string>();
    r.status = parse_status(j.at("status").get<std::string>());
    r.warning_count = j.at("warnings").get<std::size_t>();
    r.message = j.at("message").get<std::string>();
    if (!j.at("decoded").is_null()) r.decoded = structure_from_json(j["decoded"].dump());
    for (auto& [k, v] : j.at("metrics").items()) r.metrics[k] = v.get<double>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaError, std::string("prediction record: ") + e.what());
  }
  if (r.decoded.has_value() == (r.status == ParseStatus::Failed))
    throw Error(ErrorCode::SchemaError, "prediction record '" + r.instance_id + "': decoded must be present iff parsed");
  return r;
}

void write_predictions(const std::string& path, const std::vector<PredictionRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  for (const auto& r : records) out << record_to_json(r) << '\n';
  if (!out) throw Error(ErrorCode::Io, "write failed for '" + path + "'");
}

std::vector<PredictionRecord> read_predictions(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  std::vector<PredictionRecord> out;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(record_from_json(line));
    } catch (const Error& e) {
      throw Error(ErrorCode::SchemaError, path + ":" + std::to_string(n) + ": " + e.what(), n, 0);
    }
  }
  return out;
}

// --- truncation and scoring --------------------------------------------------

namespace {

// Keeps text through the first line whose trimmed content is `closer`.
std::string keep_through_line(std::string_view text, std::string_view closer) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::size_t end = nl == std::string_view::npos ? text.size() : nl;
    std::string_view line = text.substr(pos, end - pos);
    auto b = line.find_first_not_of(" \t\r");
    auto e = line.find_last_not_of(" \t\r");
    if (b != std::string_view::npos && line.substr(b, e - b + 1) == closer)
      return std::string(text.substr(0, nl == std::string_view::npos ? end : end + 1));
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return std::string(text);
}

std::string flatten_lenient(const LabeledGraph& g) {
  try {
    return flatten_for_text_metrics(g);
  } catch (const Error&) {
    std::string out;
    for (const auto& n : g.nodes) {
      if (!out.empty()) out += "; ";
      out += n.label;
    }
    return out;
  }
}

std::set<std::string> event_keys(const EntityTrace& t) {
  std::set<std::string> keys;
  for (const auto& e : derive_events(t))
    keys.insert(std::string(to_string(e.kind)) + '\x1f' + std::to_string(e.step) + '\x1f' + e.entity + '\x1f' +
                e.from + '\x1f' + e.to);
  return keys;
}

void put_prf(std::map<std::string, double>& m, const std::string& prefix, const PRF& prf) {
  m[prefix + "_p"] = prf.p;
  m[prefix + "_r"] = prf.r;
  m[prefix + "_f1"] = prf.f1;
}

void put_structure(std::map<std::string, double>& m, const LabeledGraph& gold, const LabeledGraph& pred) {
  auto ged = graph_edit_distance(gold, pred);
  m["ged"] = ged.raw;
  m["ged_norm"] = ged.normalized;
  if (gold.nodes.size() != pred.nodes.size()) m["iso"] = 0.0;
  else if (gold.nodes.size() <= 12) m["iso"] = is_isomorphic(gold, pred) ? 1.0 : 0.0;
}

}  // namespace

std::string truncate_completion(const SourceText& stub, std::string_view completion) {
  std::string full = stub.text + std::string(completion);
  switch (stub.format) {
    case CodeFormat::DotDigraph: return keep_through_line(full, "}");
    case CodeFormat::EdgeListText: return keep_through_line(full, "]");
    default: return pyparse::truncate_at_boundary(full);
  }
}

std::map<std::string, double> score_prediction(const TaskInstance& gold, const Structure* predicted) {
  std::map<std::string, double> m;
  if (!gold.gold) return m;
  if (gold.task == TaskKind::EntityTracking) {
    const auto& g = std::get<EntityTrace>(*gold.gold);
    const EntityTrace* p = predicted ? std::get_if<EntityTrace>(predicted) : nullptr;
    PRF prf;
    try {
      prf = p ? propara_prf(g, *p) : edge_prf(event_keys(g), {});
    } catch (const Error&) {
      prf = edge_prf(event_keys(g), {});
    }
    put_prf(m, "state", prf);
    return m;
  }

  const auto& g = std::get<LabeledGraph>(*gold.gold);
  LabeledGraph p;
  if (predicted)
    if (const auto* pg = std::get_if<LabeledGraph>(predicted); pg && validate_graph(*pg).empty()) p = *pg;

  switch (gold.task) {
    case TaskKind::ScriptGen: {
      put_prf(m, "edge", edge_prf(g, p));
      put_structure(m, g, p);
      std::string ref = flatten_lenient(g), cand = flatten_lenient(p);
      m["bleu"] = bleu(cand, ref);
      m["rouge_l"] = rouge_l(cand, ref);
      auto stats = graph_stats(p);
      m["nodes"] = static_cast<double>(stats.node_count);
      m["edges"] = static_cast<double>(stats.edge_count);
      m["avg_degree"] = stats.avg_degree;
      break;
    }
    case TaskKind::EdgePrediction:
      put_prf(m, "edge", edge_prf(g, p));
      put_structure(m, g, p);
      break;
    case TaskKind::ExplGraph: {
      m["stca"] = structural_accuracy(p, gold.input.belief, gold.input.argument) ? 1.0 : 0.0;
      put_prf(m, "gbs", g_overlap_score(edge_texts(g), edge_texts(p)));
      auto ged = graph_edit_distance(g, p);
      m["ged"] = ged.raw;
      m["ged_norm"] = ged.normalized;
      put_prf(m, "edge", edge_prf(g, p));
      break;
    }
    case TaskKind::EntityTracking: break;
  }
  return m;
}

std::map<std::string, SourceText> oracle_encodings(const std::vector<TaskInstance>& instances, CodeFormat format) {
  std::map<std::string, SourceText> out;
  for (const auto& inst : instances)
    if (inst.gold) out.emplace(inst.id, encode(inst, format));
  return out;
}

// --- run ---------------------------------------------------------------------

namespace {

template <typename F>
void parallel_for(std::size_t n, int parallelism, F&& body) {
  std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(parallelism, 1)), n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) body(i);
  };
  std::vector<std::jthread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  if (n) work();
}

std::string utc_now() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::vector<PredictionRecord> run_predictions(const RunConfig& config, const std::vector<TaskInstance>& train,
                                              const std::vector<TaskInstance>& test,
                                              const CompletionBackend& backend, const RetrievalIndex* index) {
  if (!is_applicable(config.task, config.format))
    throw Error(ErrorCode::FormatMismatch, std::string(to_string(config.format)) + " does not apply to " +
                                               to_string(config.task));
  std::map<std::string, std::size_t> train_by_id;
  for (std::size_t i = 0; i < train.size(); ++i) train_by_id.emplace(train[i].id, i);
  if (config.selection == Selection::Retrieval) {
    if (!index) throw Error(ErrorCode::InvalidArgument, "retrieval selection needs an index");
    for (const auto& id : index->ids())
      if (!train_by_id.count(id))
        throw Error(ErrorCode::InvalidArgument, "index entry '" + id + "' is not in the training set");
    if (config.k > index->size())
      throw Error(ErrorCode::KTooLarge, "k=" + std::to_string(config.k) + " exceeds index size " +
                                            std::to_string(index->size()));
  }

  const int par = std::max(1, backend.parallelism());
  std::vector<PredictionRecord> all;
  for (std::uint64_t seed : config.seeds) {
    std::vector<TaskInstance> shared;
    if (config.selection == Selection::Random) shared = sample_examples(train, config.k, seed);

    std::vector<PredictionRecord> records(test.size());
    std::vector<std::optional<Prompt>> prompts(test.size());
    parallel_for(test.size(), par, [&](std::size_t i) {
      const TaskInstance& inst = test[i];
      PredictionRecord& r = records[i];
      r.instance_id = inst.id;
      r.seed = seed;
      try {
        std::vector<TaskInstance> examples;
        if (config.selection == Selection::Random) {
          examples = shared;
        } else {
          auto ids = index->retrieve(input_text(inst), config.k);
          // Most similar example sits right before the stub.
          for (auto it = ids.rbegin(); it != ids.rend(); ++it) examples.push_back(train[train_by_id.at(*it)]);
        }
        Prompt p = assemble_prompt(examples, make_stub(inst, config.format), config.budget_tokens, config.format);
        r.prompt_hash = prompt_hash(p.rendered);
        prompts[i] = std::move(p);
      } catch (const Error& e) {
        r.message = std::string(to_string(e.code())) + ": " + e.what();
      }
    });

    std::vector<CompletionJob> jobs;
    std::vector<std::size_t> job_slot;
    for (std::size_t i = 0; i < test.size(); ++i) {
      if (!prompts[i]) continue;
      jobs.push_back(CompletionJob{test[i].id, std::move(*prompts[i])});
      job_slot.push_back(i);
    }
    auto results = batch_complete(backend, jobs, par);

    std::vector<const Prompt*> job_prompt(test.size(), nullptr);
    for (std::size_t j = 0; j < jobs.size(); ++j) job_prompt[job_slot[j]] = &jobs[j].prompt;
    std::vector<const CompletionResult*> result_for(test.size(), nullptr);
    for (std::size_t j = 0; j < results.size(); ++j) result_for[job_slot[j]] = &results[j];

    parallel_for(test.size(), par, [&](std::size_t i) {
      PredictionRecord& r = records[i];
      const CompletionResult* res = result_for[i];
      if (res && res->ok()) {
        r.completion = *res->text;
        try {
          std::string text = truncate_completion(job_prompt[i]->stub, r.completion);
          Decoded d = decode(SourceText{std::move(text), config.format}, Mode::Tolerant);
          r.warning_count = d.warnings.size();
          r.status = d.warnings.empty() ? ParseStatus::Ok : ParseStatus::Warnings;
          if (!d.warnings.empty()) r.message = d.warnings.front().category + ": " + d.warnings.front().message;
          r.decoded = std::move(d.structure);
        } catch (const Error& e) {
          r.status = ParseStatus::Failed;
          r.message = std::string(to_string(e.code())) + ": " + e.what();
        }
      } else if (res) {
        r.message = std::string(to_string(*res->error)) + ": " + res->message;
      }
      r.metrics = score_prediction(test[i], r.decoded ? &*r.decoded : nullptr);
    });
    for (auto& r : records) all.push_back(std::move(r));
  }
  return all;
}

std::vector<std::string> run(const RunConfig& config) {
  validate_run_config(config);
  if (config.out_dir.empty()) throw Error(ErrorCode::InvalidArgument, "out: output directory required").with_field("out");
  const std::string started = utc_now();
  auto train = load_dataset(config.train_path, config.task);
  auto test = load_dataset(config.test_path, config.task);

  std::optional<RetrievalIndex> index;
  if (config.selection == Selection::Retrieval) {
    std::ifstream in(config.index_path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open index '" + config.index_path + "'");
    index = RetrievalIndex::load(in);
  }

  std::map<std::string, SourceText> oracle;
  if (config.backend == "oracle") oracle = oracle_encodings(test, config.format);
  auto backend = make_backend(config.backend, oracle, config.completion);

  auto records = run_predictions(config, train, test, *backend, index ? &*index : nullptr);

  std::filesystem::create_directories(config.out_dir);
  std::vector<std::string> paths;
  std::size_t per_seed = test.size();
  for (std::size_t s = 0; s < config.seeds.size(); ++s) {
    std::string path = (std::filesystem::path(config.out_dir) /
                        ("predictions_seed" + std::to_string(config.seeds[s]) + ".jsonl"))
                           .string();
    std::vector<PredictionRecord> chunk(records.begin() + static_cast<std::ptrdiff_t>(s * per_seed),
                                        records.begin() + static_cast<std::ptrdiff_t>((s + 1) * per_seed));
    write_predictions(path, chunk);
    paths.push_back(path);
  }

  json manifest;
  manifest["task"] = to_string(config.task);
  manifest["format"] = to_string(config.format);
  manifest["k"] = config.k;
  manifest["seeds"] = config.seeds;
  manifest["selection"] = to_string(config.selection);
  manifest["budget_tokens"] = config.budget_tokens;
  manifest["backend"] = backend->describe();
  manifest["train"] = config.train_path;
  manifest["test"] = config.test_path;
  manifest["index"] = config.index_path;
  manifest["model"] = config.completion.model_name;
  manifest["max_tokens"] = config.completion.max_tokens;
  manifest["temperature"] = config.completion.temperature;
  manifest["stop"] = config.completion.stop_sequences;
  manifest["git_describe"] = STRUCTCODE_GIT_DESCRIBE;
  manifest["started_at"] = started;
  manifest["finished_at"] = utc_now();
  manifest["predictions"] = paths;
  std::ofstream out(std::filesystem::path(config.out_dir) / "manifest.json");
  out << manifest.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::Io, "cannot write manifest in '" + config.out_dir + "'");
  return paths;
}

// --- evaluate ----------------------------------------------------------------

EvalReport evaluate(const std::vector<std::vector<PredictionRecord>>& per_seed) {
  EvalReport rep;
  if (per_seed.empty()) return rep;
  std::set<std::string> first_ids;
  std::size_t total = 0, failed = 0;
  // metric -> per-seed means, for seeds where the metric was recorded
  std::map<std::string, std::vector<double>> seed_means;
  for (std::size_t s = 0; s < per_seed.size(); ++s) {
    const auto& recs = per_seed[s];
    std::set<std::string> ids;
    for (const auto& r : recs)
      if (!ids.insert(r.instance_id).second)
        throw Error(ErrorCode::SchemaError, "instance '" + r.instance_id + "' appears twice in seed file " +
                                                std::to_string(s + 1));
    if (s == 0) {
      first_ids = ids;
    } else if (ids != first_ids) {
      throw Error(ErrorCode::SeedMismatch, "seed file " + std::to_string(s + 1) + " covers different instance ids");
    }
    rep.seeds.push_back(recs.empty() ? 0 : recs.front().seed);
    std::map<std::string, std::pair<double, std::size_t>> sums;
    for (const auto& r : recs) {
      ++total;
      if (r.status == ParseStatus::Failed) ++failed;
      for (const auto& [k, v] : r.metrics) {
        sums[k].first += v;
        ++sums[k].second;
      }
    }
    for (const auto& [k, sc] : sums) seed_means[k].push_back(sc.first / static_cast<double>(sc.second));
  }
  rep.instance_count = first_ids.size();
  rep.parse_failure_rate = total ? static_cast<double>(failed) / static_cast<double>(total) : 0.0;
  for (auto& [k, means] : seed_means) {
    MetricSummary ms;
    ms.per_seed = means;
    double sum = 0;
    for (double v : means) sum += v;
    ms.mean = sum / static_cast<double>(means.size());
    if (means.size() > 1) {
      double ss = 0;
      for (double v : means) ss += (v - ms.mean) * (v - ms.mean);
      ms.std = std::sqrt(ss / static_cast<double>(means.size() - 1));
    }
    rep.metrics.emplace(k, std::move(ms));
  }
  return rep;
}

EvalReport evaluate_files(const std::vector<std::string>& paths) {
  std::vector<std::vector<PredictionRecord>> per_seed;
  for (const auto& p : paths) per_seed.push_back(read_predictions(p));
  return evaluate(per_seed);
}

std::string render_report(const EvalReport& rep, ReportStyle style) {
  if (style == ReportStyle::Json) {
    json j;
    j["seeds"] = rep.seeds;
    j["instance_count"] = rep.instance_count;
    j["parse_failure_rate"] = rep.parse_failure_rate;
    j["metrics"] = json::object();
    for (const auto& [k, m] : rep.metrics)
      j["metrics"][k] = {{"mean", m.mean}, {"std", m.std}, {"per_seed", m.per_seed}};
    return j.dump(2) + "\n";
  }
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "# seeds %zu  instances %zu  parse_failure_rate %.4f\n", rep.seeds.size(),
                rep.instance_count, rep.parse_failure_rate);
  out += buf;
  std::size_t width = 0;
  for (const auto& [k, m] : rep.metrics) width = std::max(width, k.size());
  for (const auto& [k, m] : rep.metrics) {
    std::snprintf(buf, sizeof buf, "%-*s  %.2f ± %.2f\n", static_cast<int>(width), k.c_str(), m.mean, m.std);
    out += buf;
  }
  return out;
}

EvalReport report_from_json(std::string_view text) {
  EvalReport rep;
  try {
    json j = json::parse(text);
    rep.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    rep.instance_count = j.at("instance_count").get<std::size_t>();
    rep.parse_failure_rate = j.at("parse_failure_rate").get<double>();
    for (auto& [k, v] : j.at("metrics").items()) {
      MetricSummary m;
      m.mean = v.at("mean").get<double>();
      m.std = v.at("std").get<double>();
      m.per_seed = v.at("per_seed").get<std::vector<double>>();
      rep.metrics.emplace(k, std::move(m));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaError, std::string("report JSON: ") + e.what());
  }
  return rep;
}

}  // namespace structcode
