#include "structcode/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "structcode/error.hpp"

namespace structcode {

double harmonic(double p, double r) { return p + r > 0 ? 2 * p * r / (p + r) : 0.0; }

namespace {

void require_valid(const LabeledGraph& g, const char* what) {
  for (const auto& v : validate_graph(g)) {
    if (v.kind == ViolationKind::DuplicateId)
      throw Error(ErrorCode::InvalidGraph, std::string(what) + ": duplicate node id '" + v.id + "'");
    if (v.kind == ViolationKind::DanglingEdge)
      throw Error(ErrorCode::InvalidGraph, std::string(what) + ": dangling edge " + v.src + " -> " + v.dst);
  }
}

std::unordered_map<std::string, std::size_t> index_of(const LabeledGraph& g) {
  std::unordered_map<std::string, std::size_t> idx;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) idx.emplace(g.nodes[i].id, i);
  return idx;
}

}  // namespace

std::set<std::string> edge_keys(const LabeledGraph& g, bool with_relations) {
  std::set<std::string> keys;
  for (const auto& e : g.edges) {
    const Node* s = g.find(e.src);
    const Node* d = g.find(e.dst);
    std::string key = normalize_label(s ? s->label : e.src);
    key += '\x1f';
    if (with_relations) key += normalize_label(e.relation.value_or(""));
    key += '\x1f';
    key += normalize_label(d ? d->label : e.dst);
    keys.insert(std::move(key));
  }
  return keys;
}

PRF edge_prf(const std::set<std::string>& gold, const std::set<std::string>& pred) {
  std::size_t common = 0;
  for (const auto& e : pred) common += gold.count(e);
  PRF out;
  out.p = pred.empty() ? 0.0 : static_cast<double>(common) / pred.size();
  out.r = gold.empty() ? 0.0 : static_cast<double>(common) / gold.size();
  out.f1 = harmonic(out.p, out.r);
  return out;
}

PRF edge_prf(const LabeledGraph& gold, const LabeledGraph& pred) {
  require_valid(gold, "gold graph");
  require_valid(pred, "predicted graph");
  bool typed = gold.typed() && pred.typed();
  return edge_prf(edge_keys(gold, typed), edge_keys(pred, typed));
}

// --- graph edit distance -----------------------------------------------------

namespace {

struct IndexedGraph {
  std::vector<std::string> labels;                                  // normalized
  std::vector<std::vector<std::pair<std::size_t, std::string>>> out;  // deduplicated
  std::vector<std::vector<std::pair<std::size_t, std::string>>> in;
  std::size_t edge_count = 0;
};

IndexedGraph index_graph(const LabeledGraph& g, bool typed) {
  IndexedGraph ig;
  auto idx = index_of(g);
  for (const auto& n : g.nodes) ig.labels.push_back(normalize_label(n.label));
  ig.out.resize(g.nodes.size());
  ig.in.resize(g.nodes.size());
  std::set<std::tuple<std::size_t, std::size_t, std::string>> seen;
  for (const auto& e : g.edges) {
    std::size_t s = idx.at(e.src), d = idx.at(e.dst);
    std::string rel = typed ? normalize_label(e.relation.value_or("")) : std::string();
    if (!seen.emplace(s, d, rel).second) continue;
    ig.out[s].emplace_back(d, rel);
    ig.in[d].emplace_back(s, rel);
    ++ig.edge_count;
  }
  return ig;
}

class GedSearch {
 public:
  GedSearch(const IndexedGraph& a, const IndexedGraph& b) : a_(a), b_(b) {
    for (std::size_t v = 0; v < b.labels.size(); ++v)
      for (const auto& [w, rel] : b.out[v]) e2_.insert(key(v, w, rel));
    plan();
  }

  // Best kept-edge count over label-respecting maximal mappings.
  std::size_t solve_exact() {
    plan();
    map_.assign(a_.labels.size(), kUnset);
    used_.assign(b_.labels.size(), false);
    best_ = 0;
    dfs(0, 0, a_.edge_count);
    return best_;
  }

  std::size_t solve_greedy() {
    plan();
    map_.assign(a_.labels.size(), kUnset);
    used_.assign(b_.labels.size(), false);
    std::size_t kept = 0;
    for (std::size_t u : order_) {
      std::size_t best_gain = 0;
      std::size_t best_v = kNone;
      auto& group = group_state_[group_of_[u]];
      if (group.remaining_matches > 0) {
        for (std::size_t v : group.candidates) {
          if (used_[v]) continue;
          std::size_t g = gain(u, v);
          if (best_v == kNone || g > best_gain) {
            best_gain = g;
            best_v = v;
          }
        }
      }
      if (best_v != kNone) {
        map_[u] = best_v;
        used_[best_v] = true;
        --group.remaining_matches;
        kept += best_gain;
      } else {
        map_[u] = kNone;
      }
      --group.remaining_nodes;
    }
    return kept;
  }

  std::size_t match_count() const {
    std::size_t m = 0;
    for (const auto& g : initial_groups_) m += g.remaining_matches;
    return m;
  }

  // True when some label has more than one candidate pairing.
  bool ambiguous() const {
    for (const auto& g : initial_groups_)
      if (g.remaining_matches > 0 && (g.remaining_nodes > 1 || g.candidates.size() > 1)) return true;
    return false;
  }

 private:
  static constexpr std::size_t kUnset = std::numeric_limits<std::size_t>::max();
  static constexpr std::size_t kNone = kUnset - 1;

  struct Group {
    std::vector<std::size_t> candidates;  // nodes of b with this label
    std::size_t remaining_matches = 0;    // pairs still to form
    std::size_t remaining_nodes = 0;      // nodes of a still undecided
  };

  void plan() {
    if (planned_) {
      group_state_ = initial_groups_;
      return;
    }
    std::map<std::string, std::size_t> gid;
    for (std::size_t u = 0; u < a_.labels.size(); ++u) {
      auto [it, fresh] = gid.emplace(a_.labels[u], initial_groups_.size());
      if (fresh) initial_groups_.emplace_back();
      group_of_.push_back(it->second);
      ++initial_groups_[it->second].remaining_nodes;
    }
    for (std::size_t v = 0; v < b_.labels.size(); ++v) {
      auto it = gid.find(b_.labels[v]);
      if (it != gid.end()) initial_groups_[it->second].candidates.push_back(v);
    }
    for (auto& g : initial_groups_) g.remaining_matches = std::min(g.remaining_nodes, g.candidates.size());
    // Forced and unmatched nodes first, then larger-degree nodes so edges
    // resolve early and the bound tightens.
    order_.resize(a_.labels.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t x, std::size_t y) {
      auto choice = [&](std::size_t u) {
        const auto& g = initial_groups_[group_of_[u]];
        return g.remaining_matches == 0 ? 0 : g.candidates.size() * g.remaining_nodes;
      };
      std::size_t cx = choice(x), cy = choice(y);
      if (cx != cy) return cx < cy;
      return a_.out[x].size() + a_.in[x].size() > a_.out[y].size() + a_.in[y].size();
    });
    group_state_ = initial_groups_;
    planned_ = true;
  }

  std::string key(std::size_t s, std::size_t d, const std::string& rel) const {
    return std::to_string(s) + ',' + std::to_string(d) + ',' + rel;
  }

  // Edges of `u` to already-decided nodes (and self-loops) preserved by u -> v.
  std::size_t gain(std::size_t u, std::size_t v) const {
    std::size_t g = 0;
    for (const auto& [w, rel] : a_.out[u]) {
      std::size_t mw = w == u ? v : map_[w];
      if (mw == kUnset || mw == kNone) continue;
      if (e2_.count(key(v, mw, rel))) ++g;
    }
    for (const auto& [w, rel] : a_.in[u]) {
      if (w == u) continue;
      std::size_t mw = map_[w];
      if (mw == kUnset || mw == kNone) continue;
      if (e2_.count(key(mw, v, rel))) ++g;
    }
    return g;
  }

  // Edges that become fully decided when u is decided.
  std::size_t resolved(std::size_t u) const {
    std::size_t r = 0;
    for (const auto& [w, rel] : a_.out[u])
      if (w == u || map_[w] != kUnset) ++r;
    for (const auto& [w, rel] : a_.in[u])
      if (w != u && map_[w] != kUnset) ++r;
    return r;
  }

  void dfs(std::size_t pos, std::size_t kept, std::size_t open_edges) {
    if (kept + open_edges <= best_ && pos != 0) return;
    if (pos == order_.size()) {
      best_ = std::max(best_, kept);
      return;
    }
    std::size_t u = order_[pos];
    auto& group = group_state_[group_of_[u]];
    std::size_t closing = resolved(u);
    --group.remaining_nodes;
    if (group.remaining_matches > 0) {
      --group.remaining_matches;
      for (std::size_t v : group.candidates) {
        if (used_[v]) continue;
        std::size_t g = gain(u, v);
        map_[u] = v;
        used_[v] = true;
        dfs(pos + 1, kept + g, open_edges - closing);
        used_[v] = false;
        map_[u] = kUnset;
      }
      ++group.remaining_matches;
    }
    // Leave u unmatched only if the group can still fill its quota.
    if (group.remaining_nodes >= group.remaining_matches) {
      map_[u] = kNone;
      dfs(pos + 1, kept, open_edges - closing);
      map_[u] = kUnset;
    }
    ++group.remaining_nodes;
  }

  const IndexedGraph& a_;
  const IndexedGraph& b_;
  std::unordered_set<std::string> e2_;
  bool planned_ = false;
  std::vector<Group> initial_groups_;
  std::vector<Group> group_state_;
  std::vector<std::size_t> group_of_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> map_;
  std::vector<bool> used_;
  std::size_t best_ = 0;
};

}  // namespace

GedResult graph_edit_distance(const LabeledGraph& g1, const LabeledGraph& g2, std::size_t exact_limit) {
  require_valid(g1, "first graph");
  require_valid(g2, "second graph");
  bool typed = g1.typed() && g2.typed();
  IndexedGraph a = index_graph(g1, typed);
  IndexedGraph b = index_graph(g2, typed);
  GedSearch search(a, b);
  GedResult result;
  std::size_t kept;
  if (!search.ambiguous() || a.labels.size() + b.labels.size() <= exact_limit) {
    kept = search.solve_exact();
  } else {
    kept = search.solve_greedy();
    result.exact = false;
  }
  std::size_t m = search.match_count();
  long v1 = static_cast<long>(a.labels.size()), v2 = static_cast<long>(b.labels.size());
  long e1 = static_cast<long>(a.edge_count), e2 = static_cast<long>(b.edge_count);
  result.raw = v1 + v2 - 2 * static_cast<long>(m) + e1 + e2 - 2 * static_cast<long>(kept);
  long denom = v1 + v2 + e1 + e2;
  result.normalized = denom == 0 ? 0.0 : static_cast<double>(result.raw) / static_cast<double>(denom);
  return result;
}

// --- isomorphism -------------------------------------------------------------

namespace {

struct Adjacency {
  std::size_t n = 0;
  std::vector<char> m;  // n*n
  std::vector<std::size_t> outdeg, indeg;
  std::size_t edges = 0;

  bool at(std::size_t i, std::size_t j) const { return m[i * n + j] != 0; }
};

Adjacency adjacency(const LabeledGraph& g) {
  Adjacency a;
  a.n = g.nodes.size();
  a.m.assign(a.n * a.n, 0);
  a.outdeg.assign(a.n, 0);
  a.indeg.assign(a.n, 0);
  auto idx = index_of(g);
  for (const auto& e : g.edges) {
    std::size_t s = idx.at(e.src), d = idx.at(e.dst);
    if (a.m[s * a.n + d]) continue;
    a.m[s * a.n + d] = 1;
    ++a.outdeg[s];
    ++a.indeg[d];
    ++a.edges;
  }
  return a;
}

class IsoSearch {
 public:
  IsoSearch(const Adjacency& a, const Adjacency& b) : a_(a), b_(b), map_(a.n, kNone), used_(b.n, false) {
    order_.resize(a.n);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    // Most constrained first.
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t x, std::size_t y) {
      return a.outdeg[x] + a.indeg[x] > a.outdeg[y] + a.indeg[y];
    });
  }

  bool run(std::size_t pos = 0) {
    if (pos == order_.size()) return true;
    std::size_t u = order_[pos];
    for (std::size_t v = 0; v < b_.n; ++v) {
      if (used_[v] || !feasible(u, v)) continue;
      map_[u] = v;
      used_[v] = true;
      if (run(pos + 1)) return true;
      used_[v] = false;
      map_[u] = kNone;
    }
    return false;
  }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  bool feasible(std::size_t u, std::size_t v) const {
    if (a_.outdeg[u] != b_.outdeg[v] || a_.indeg[u] != b_.indeg[v] || a_.at(u, u) != b_.at(v, v)) return false;
    for (std::size_t w = 0; w < a_.n; ++w) {
      std::size_t mw = map_[w];
      if (mw == kNone) continue;
      if (a_.at(u, w) != b_.at(v, mw) || a_.at(w, u) != b_.at(mw, v)) return false;
    }
    return true;
  }

  const Adjacency& a_;
  const Adjacency& b_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> map_;
  std::vector<bool> used_;
};

std::vector<std::pair<std::size_t, std::size_t>> degree_sequence(const Adjacency& a) {
  std::vector<std::pair<std::size_t, std::size_t>> seq;
  for (std::size_t i = 0; i < a.n; ++i) seq.emplace_back(a.outdeg[i], a.indeg[i]);
  std::sort(seq.begin(), seq.end());
  return seq;
}

}  // namespace

bool is_isomorphic(const LabeledGraph& g1, const LabeledGraph& g2, std::size_t max_nodes) {
  require_valid(g1, "first graph");
  require_valid(g2, "second graph");
  std::size_t n = std::max(g1.nodes.size(), g2.nodes.size());
  if (n > max_nodes)
    throw Error(ErrorCode::SizeLimitExceeded,
                "isomorphism check limited to " + std::to_string(max_nodes) + " nodes, got " + std::to_string(n));
  Adjacency a = adjacency(g1);
  Adjacency b = adjacency(g2);
  if (a.n != b.n || a.edges != b.edges) return false;
  if (degree_sequence(a) != degree_sequence(b)) return false;
  return IsoSearch(a, b).run();
}

// --- structural accuracy -------------------------------------------------------

const std::vector<std::string>& stopwords() {
  static const std::vector<std::string> words = {
      "a",    "an",    "the",   "and",  "or",    "but",   "if",    "of",    "to",    "in",
      "on",   "at",    "by",    "for",  "with",  "from",  "as",    "is",    "are",   "was",
      "were", "be",    "been",  "it",   "its",   "this",  "that",  "these", "those", "he",
      "she",  "they",  "we",    "you",  "i",     "not",   "no",    "do",    "does",  "did",
      "should", "would", "could", "can", "will", "has",   "have",  "had",   "so",    "than",
  };
  return words;
}

namespace {

std::set<std::string> content_tokens(std::string_view text) {
  const auto& stop = stopwords();
  std::set<std::string> out;
  for (auto& t : normalized_tokens(text))
    if (std::find(stop.begin(), stop.end(), t) == stop.end()) out.insert(std::move(t));
  return out;
}

bool shares_token(const std::set<std::string>& node, const std::set<std::string>& text) {
  for (const auto& t : node)
    if (text.count(t)) return true;
  return false;
}

}  // namespace

bool structural_accuracy(const LabeledGraph& g, std::string_view belief, std::string_view argument) {
  require_valid(g, "graph");
  if (g.nodes.empty() || !is_weakly_connected(g) || !is_dag(g)) return false;
  auto b = content_tokens(belief);
  auto a = content_tokens(argument);
  std::size_t in_belief = 0, in_argument = 0;
  for (const auto& n : g.nodes) {
    auto toks = content_tokens(n.label);
    if (shares_token(toks, b)) ++in_belief;
    if (shares_token(toks, a)) ++in_argument;
  }
  return in_belief >= 2 && in_argument >= 2;
}

// --- edge overlap --------------------------------------------------------------

double token_f1_similarity(std::string_view a, std::string_view b) {
  auto ta = normalized_tokens(a);
  auto tb = normalized_tokens(b);
  if (ta.empty() && tb.empty()) return 1.0;
  if (ta.empty() || tb.empty()) return 0.0;
  std::map<std::string, int> counts;
  for (const auto& t : ta) ++counts[t];
  std::size_t common = 0;
  for (const auto& t : tb) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  double p = static_cast<double>(common) / tb.size();
  double r = static_cast<double>(common) / ta.size();
  return harmonic(p, r);
}

double exact_match_similarity(std::string_view a, std::string_view b) {
  return normalize_label(a) == normalize_label(b) ? 1.0 : 0.0;
}

std::vector<std::string> edge_texts(const LabeledGraph& g) {
  std::vector<std::string> out;
  for (const auto& e : g.edges) {
    const Node* s = g.find(e.src);
    const Node* d = g.find(e.dst);
    std::string text = s ? s->label : e.src;
    if (e.relation && !e.relation->empty()) text += " " + *e.relation;
    text += " ";
    text += d ? d->label : e.dst;
    out.push_back(std::move(text));
  }
  return out;
}

double max_weight_assignment(const std::vector<std::vector<double>>& weights) {
  std::size_t rows = weights.size();
  if (rows == 0) return 0.0;
  std::size_t cols = weights[0].size();
  for (const auto& r : weights)
    if (r.size() != cols) throw Error(ErrorCode::DimensionMismatch, "ragged weight matrix");
  if (cols == 0) return 0.0;
  bool transpose = rows > cols;
  std::size_t n = transpose ? cols : rows;  // n <= m
  std::size_t m = transpose ? rows : cols;
  auto cost = [&](std::size_t i, std::size_t j) { return -(transpose ? weights[j][i] : weights[i][j]); };
  // Shortest augmenting path with potentials, 1-based.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0), v(m + 1, 0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      std::size_t i0 = p[j0], j1 = 0;
      double delta = inf;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  double total = 0;
  for (std::size_t j = 1; j <= m; ++j)
    if (p[j] != 0) total -= cost(p[j] - 1, j - 1);
  return total;
}

namespace {

double greedy_assignment(const std::vector<std::vector<double>>& w) {
  struct Cell {
    double score;
    std::size_t i, j;
  };
  std::vector<Cell> cells;
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = 0; j < w[i].size(); ++j) cells.push_back({w[i][j], i, j});
  std::stable_sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) { return a.score > b.score; });
  std::vector<bool> row_used(w.size(), false), col_used(w.empty() ? 0 : w[0].size(), false);
  double total = 0;
  for (const auto& c : cells) {
    if (row_used[c.i] || col_used[c.j]) continue;
    row_used[c.i] = col_used[c.j] = true;
    total += c.score;
  }
  return total;
}

}  // namespace

PRF g_overlap_score(const std::vector<std::string>& gold, const std::vector<std::string>& pred,
                    const EdgeSimilarity& sim) {
  PRF out;
  if (gold.empty() || pred.empty()) return out;
  std::vector<std::vector<double>> w(pred.size(), std::vector<double>(gold.size()));
  for (std::size_t i = 0; i < pred.size(); ++i)
    for (std::size_t j = 0; j < gold.size(); ++j) w[i][j] = sim(pred[i], gold[j]);
  double total = (pred.size() <= 12 && gold.size() <= 12) ? max_weight_assignment(w) : greedy_assignment(w);
  out.p = total / pred.size();
  out.r = total / gold.size();
  out.f1 = harmonic(out.p, out.r);
  return out;
}

// --- text overlap --------------------------------------------------------------

double bleu(std::string_view candidate, std::string_view reference) {
  auto c = normalized_tokens(candidate);
  auto r = normalized_tokens(reference);
  if (c.empty() || r.empty()) return 0.0;
  double log_sum = 0;
  for (std::size_t n = 1; n <= 4; ++n) {
    std::map<std::vector<std::string>, std::size_t> ref_counts, cand_counts;
    for (std::size_t i = 0; i + n <= r.size(); ++i) ++ref_counts[std::vector<std::string>(r.begin() + i, r.begin() + i + n)];
    for (std::size_t i = 0; i + n <= c.size(); ++i) ++cand_counts[std::vector<std::string>(c.begin() + i, c.begin() + i + n)];
    std::size_t total = c.size() >= n ? c.size() - n + 1 : 0;
    std::size_t matched = 0;
    for (const auto& [gram, count] : cand_counts) {
      auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) matched += std::min(count, it->second);
    }
    double precision;
    if (matched > 0) {
      precision = static_cast<double>(matched) / total;
    } else if (n == 1) {
      return 0.0;
    } else {
      precision = 1.0 / (static_cast<double>(total) + 1.0);
    }
    log_sum += std::log(precision);
  }
  double bp = c.size() < r.size() ? std::exp(1.0 - static_cast<double>(r.size()) / c.size()) : 1.0;
  return bp * std::exp(log_sum / 4.0);
}

double rouge_l(std::string_view candidate, std::string_view reference) {
  auto c = normalized_tokens(candidate);
  auto r = normalized_tokens(reference);
  if (c.empty() || r.empty()) return 0.0;
  std::vector<std::size_t> prev(r.size() + 1, 0), cur(r.size() + 1, 0);
  for (std::size_t i = 1; i <= c.size(); ++i) {
    for (std::size_t j = 1; j <= r.size(); ++j)
      cur[j] = c[i - 1] == r[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  double lcs = static_cast<double>(prev[r.size()]);
  return harmonic(lcs / c.size(), lcs / r.size());
}

// --- entity states -------------------------------------------------------------

const char* to_string(Event::Kind kind) {
  switch (kind) {
    case Event::Kind::Create: return "create";
    case Event::Kind::Destroy: return "destroy";
    case Event::Kind::Move: return "move";
  }
  return "unknown";
}

namespace {

std::string where(const StateValue& v) {
  return v.kind() == StateValue::Kind::Known ? normalize_label(v.location()) : std::string("?");
}

}  // namespace

std::set<Event> derive_events(const EntityTrace& trace) {
  validate_trace(trace);
  std::set<Event> events;
  for (std::size_t j = 0; j < trace.entities.size(); ++j) {
    std::string entity = normalize_label(trace.entities[j]);
    for (std::size_t t = 1; t < trace.states.size(); ++t) {
      const StateValue& before = trace.states[t - 1][j];
      const StateValue& after = trace.states[t][j];
      bool existed = before.kind() != StateValue::Kind::NonExistent;
      bool exists = after.kind() != StateValue::Kind::NonExistent;
      if (!existed && !exists) continue;
      if (!existed) {
        events.insert(Event{Event::Kind::Create, t, entity, "", where(after)});
      } else if (!exists) {
        events.insert(Event{Event::Kind::Destroy, t, entity, where(before), ""});
      } else if (before.kind() != after.kind() || where(before) != where(after)) {
        events.insert(Event{Event::Kind::Move, t, entity, where(before), where(after)});
      }
    }
  }
  return events;
}

PRF propara_prf(const EntityTrace& gold, const EntityTrace& pred) {
  validate_trace(gold);
  validate_trace(pred);
  if (gold.actions.size() != pred.actions.size() || gold.entities.size() != pred.entities.size())
    throw Error(ErrorCode::ShapeMismatch, "gold trace is " + std::to_string(gold.actions.size()) + "x" +
                                              std::to_string(gold.entities.size()) + ", prediction is " +
                                              std::to_string(pred.actions.size()) + "x" +
                                              std::to_string(pred.entities.size()));
  // Entities are aligned by position, so name them by position on both sides.
  auto positional = [](EntityTrace t) {
    for (std::size_t j = 0; j < t.entities.size(); ++j) t.entities[j] = "e" + std::to_string(j);
    return t;
  };
  auto g = derive_events(positional(gold));
  auto p = derive_events(positional(pred));
  std::size_t common = 0;
  for (const auto& e : p) common += g.count(e);
  PRF out;
  out.p = p.empty() ? 0.0 : static_cast<double>(common) / p.size();
  out.r = g.empty() ? 0.0 : static_cast<double>(common) / g.size();
  out.f1 = harmonic(out.p, out.r);
  return out;
}

}  // namespace structcode
