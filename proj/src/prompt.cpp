#include "structcode/prompt.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "structcode/error.hpp"
#include "structcode/metrics.hpp"
#include "structcode/random.hpp"

namespace structcode {

std::size_t estimate_tokens(std::string_view text) { return (text.size() + 3) / 4; }

std::vector<TaskInstance> sample_examples(const std::vector<TaskInstance>& pool, std::size_t k, std::uint64_t seed) {
  if (k == 0 || k > pool.size())
    throw Error(ErrorCode::KTooLarge,
                "k=" + std::to_string(k) + " is outside 1.." + std::to_string(pool.size()) + " (pool size)");
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  std::vector<TaskInstance> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + static_cast<std::size_t>(uniform_below(rng, order.size() - i));
    std::swap(order[i], order[j]);
    out.push_back(pool[order[i]]);
  }
  return out;
}

namespace {

std::string render(const std::vector<SourceText>& examples, std::size_t first, const SourceText& stub,
                   std::string_view separator) {
  std::string out;
  for (std::size_t i = first; i < examples.size(); ++i) {
    out += examples[i].text;
    out += separator;
  }
  out += stub.text;
  return out;
}

}  // namespace

Prompt assemble_prompt(const std::vector<SourceText>& examples, const SourceText& stub, std::size_t budget_tokens,
                       std::string_view separator) {
  if (examples.empty()) throw Error(ErrorCode::InvalidArgument, "a prompt needs at least one example");
  // The rendered length is the sum of the parts; track it instead of
  // re-rendering for every candidate start.
  std::size_t first = 0;
  std::size_t bytes = stub.text.size();
  for (const auto& e : examples) bytes += e.text.size() + separator.size();
  while ((bytes + 3) / 4 > budget_tokens) {
    if (first + 1 == examples.size())
      throw Error(ErrorCode::BudgetExhausted, "the stub plus one example needs " + std::to_string((bytes + 3) / 4) +
                                                  " tokens, budget is " + std::to_string(budget_tokens));
    bytes -= examples[first].text.size() + separator.size();
    ++first;
  }
  Prompt p;
  p.examples.assign(examples.begin() + static_cast<std::ptrdiff_t>(first), examples.end());
  p.stub = stub;
  p.separator = std::string(separator);
  p.rendered = render(examples, first, stub, separator);
  p.dropped = first;
  return p;
}

Prompt assemble_prompt(const std::vector<TaskInstance>& examples, const SourceText& stub, std::size_t budget_tokens,
                       CodeFormat format, std::string_view separator) {
  std::vector<SourceText> encoded;
  encoded.reserve(examples.size());
  for (const auto& e : examples) encoded.push_back(encode(e, format));
  Prompt p = assemble_prompt(encoded, stub, budget_tokens, separator);
  for (std::size_t i = p.dropped; i < examples.size(); ++i) p.example_ids.push_back(examples[i].id);
  return p;
}

std::vector<std::string> split_prompt(std::string_view rendered, std::string_view separator) {
  std::vector<std::string> pieces;
  if (separator.empty()) {
    pieces.emplace_back(rendered);
    return pieces;
  }
  std::size_t start = 0;
  std::size_t search = 0;
  while (true) {
    std::size_t i = rendered.find(separator, search);
    if (i == std::string_view::npos) break;
    if (i > start && rendered[i - 1] == '\n') {
      pieces.emplace_back(rendered.substr(start, i - start));
      start = search = i + separator.size();
    } else {
      search = i + 1;
    }
  }
  pieces.emplace_back(rendered.substr(start));
  return pieces;
}

// --- similarity ------------------------------------------------------------------

std::vector<double> embed(std::string_view text, const std::vector<std::string>& vocabulary) {
  if (vocabulary.empty()) throw Error(ErrorCode::EmptyInput, "empty vocabulary");
  std::vector<double> v(vocabulary.size(), 0.0);
  for (const auto& tok : normalized_tokens(text)) {
    auto it = std::lower_bound(vocabulary.begin(), vocabulary.end(), tok);
    if (it != vocabulary.end() && *it == tok) v[static_cast<std::size_t>(it - vocabulary.begin())] += 1.0;
  }
  return v;
}

double cosine(const std::vector<double>& u, const std::vector<double>& v) {
  if (u.size() != v.size())
    throw Error(ErrorCode::DimensionMismatch,
                "vectors of dimension " + std::to_string(u.size()) + " and " + std::to_string(v.size()));
  double dot = 0, nu = 0, nv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0 || nv == 0) return 0.0;
  return dot / (std::sqrt(nu) * std::sqrt(nv));
}

double kst_loss(double sim_text, double sim_graph) {
  double d = sim_text - sim_graph;
  return d * d;
}

double graph_similarity(const LabeledGraph& g1, const LabeledGraph& g2) { return edge_prf(g1, g2).f1; }

// --- retrieval index -------------------------------------------------------------

namespace {

double sparse_norm(const RetrievalIndex::Sparse& s) {
  double n = 0;
  for (auto [_, c] : s) n += static_cast<double>(c) * c;
  return std::sqrt(n);
}

RetrievalIndex::Sparse to_sparse(std::string_view text, const std::vector<std::string>& vocabulary) {
  std::map<std::uint32_t, std::uint32_t> counts;
  for (const auto& tok : normalized_tokens(text)) {
    auto it = std::lower_bound(vocabulary.begin(), vocabulary.end(), tok);
    if (it != vocabulary.end() && *it == tok) ++counts[static_cast<std::uint32_t>(it - vocabulary.begin())];
  }
  return RetrievalIndex::Sparse(counts.begin(), counts.end());
}

}  // namespace

RetrievalIndex RetrievalIndex::build(const std::vector<TaskInstance>& instances) {
  RetrievalIndex index;
  std::set<std::string> vocab;
  std::unordered_set<std::string> seen;
  for (const auto& inst : instances) {
    if (!seen.insert(inst.id).second) throw Error(ErrorCode::InvalidArgument, "duplicate instance id '" + inst.id + "'");
    auto toks = normalized_tokens(input_text(inst));
    if (toks.empty()) throw Error(ErrorCode::EmptyInput, "instance '" + inst.id + "' has no input text");
    vocab.insert(toks.begin(), toks.end());
  }
  index.vocabulary_.assign(vocab.begin(), vocab.end());
  for (const auto& inst : instances) {
    index.ids_.push_back(inst.id);
    index.entries_.push_back(to_sparse(input_text(inst), index.vocabulary_));
    index.norms_.push_back(sparse_norm(index.entries_.back()));
  }
  return index;
}

std::vector<double> RetrievalIndex::embedding(std::size_t i) const {
  std::vector<double> v(vocabulary_.size(), 0.0);
  for (auto [t, c] : entries_.at(i)) v[t] = c;
  return v;
}

std::vector<std::string> RetrievalIndex::retrieve(std::string_view query_text, std::size_t k) const {
  if (k > size())
    throw Error(ErrorCode::KTooLarge, "k=" + std::to_string(k) + " exceeds index size " + std::to_string(size()));
  Sparse q = to_sparse(query_text, vocabulary_);
  double qn = sparse_norm(q);
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) {
    double dot = 0;
    auto a = q.begin();
    auto b = entries_[i].begin();
    while (a != q.end() && b != entries_[i].end()) {
      if (a->first < b->first) {
        ++a;
      } else if (b->first < a->first) {
        ++b;
      } else {
        dot += static_cast<double>(a->second) * b->second;
        ++a;
        ++b;
      }
    }
    double score = (qn == 0 || norms_[i] == 0) ? 0.0 : dot / (qn * norms_[i]);
    scored.emplace_back(score, i);
  }
  std::sort(scored.begin(), scored.end(), [this](const auto& x, const auto& y) {
    if (x.first != y.first) return x.first > y.first;
    return ids_[x.second] < ids_[y.second];
  });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(ids_[scored[i].second]);
  return out;
}

namespace {

constexpr std::string_view kMagic = "STRUCTCODE-INDEX v1";

bool bad_field(std::string_view s) { return s.find_first_of("\t\n\r") != std::string_view::npos; }

}  // namespace

void RetrievalIndex::save(std::ostream& out) const {
  out << kMagic << '\n';
  out << "vocab " << vocabulary_.size() << '\n';
  for (const auto& term : vocabulary_) out << term << '\n';
  out << "entries " << ids_.size() << '\n';
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (bad_field(ids_[i])) throw Error(ErrorCode::InvalidArgument, "instance id contains a tab or newline");
    out << ids_[i];
    for (auto [t, c] : entries_[i]) out << '\t' << t << ':' << c;
    out << '\n';
  }
}

RetrievalIndex RetrievalIndex::load(std::istream& in) {
  std::string line;
  int line_no = 0;
  auto next = [&]() -> std::string& {
    if (!std::getline(in, line)) throw Error(ErrorCode::Io, "index file truncated", line_no + 1);
    ++line_no;
    return line;
  };
  auto fail = [&](const std::string& what) -> Error { return Error(ErrorCode::Io, "index file: " + what, line_no); };
  auto count_after = [&](std::string_view prefix) {
    const std::string& l = next();
    if (l.rfind(prefix, 0) != 0) throw fail("expected '" + std::string(prefix) + "'");
    try {
      return static_cast<std::size_t>(std::stoull(l.substr(prefix.size())));
    } catch (const std::exception&) {
      throw fail("bad count");
    }
  };
  if (next() != kMagic) throw fail("bad magic header");
  RetrievalIndex index;
  std::size_t nv = count_after("vocab ");
  for (std::size_t i = 0; i < nv; ++i) index.vocabulary_.push_back(next());
  if (!std::is_sorted(index.vocabulary_.begin(), index.vocabulary_.end()) ||
      std::adjacent_find(index.vocabulary_.begin(), index.vocabulary_.end()) != index.vocabulary_.end())
    throw fail("vocabulary is not sorted and unique");
  std::size_t ne = count_after("entries ");
  for (std::size_t i = 0; i < ne; ++i) {
    std::istringstream fields(next());
    std::string id;
    std::getline(fields, id, '\t');
    Sparse entry;
    std::string cell;
    while (std::getline(fields, cell, '\t')) {
      auto colon = cell.find(':');
      if (colon == std::string::npos) throw fail("bad cell '" + cell + "'");
      unsigned long t, c;
      try {
        t = std::stoul(cell.substr(0, colon));
        c = std::stoul(cell.substr(colon + 1));
      } catch (const std::exception&) {
        throw fail("bad cell '" + cell + "'");
      }
      if (t >= nv || c == 0 || (!entry.empty() && entry.back().first >= t)) throw fail("bad cell '" + cell + "'");
      entry.emplace_back(static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(c));
    }
    if (entry.empty()) throw fail("zero vector for '" + id + "'");
    if (std::find(index.ids_.begin(), index.ids_.end(), id) != index.ids_.end()) throw fail("duplicate id '" + id + "'");
    index.ids_.push_back(id);
    index.norms_.push_back(sparse_norm(entry));
    index.entries_.push_back(std::move(entry));
  }
  return index;
}

}  // namespace structcode
