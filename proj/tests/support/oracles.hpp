#pragma once

// Brute-force references for the distance algorithms.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lpcode/random.hpp"
#include "lpcode/similarity.hpp"

namespace lpcode::oracle {

/// Full (n+1) x (m+1) edit-distance table.
inline std::size_t levenshtein_full(std::string_view a, std::string_view b) {
  std::vector<std::vector<std::size_t>> t(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) t[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) t[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      t[i][j] = std::min({t[i - 1][j] + 1, t[i][j - 1] + 1, t[i - 1][j - 1] + (a[i - 1] != b[j - 1] ? 1 : 0)});
  return t[a.size()][b.size()];
}

struct Node {
  char label;
  std::vector<Node> kids;
};
using Forest = std::vector<Node>;

inline std::size_t count(const Forest& f) {
  std::size_t n = 0;
  for (const auto& x : f) n += 1 + count(x.kids);
  return n;
}

inline void encode(const Forest& f, std::string& out) {
  for (const auto& x : f) {
    out += x.label;
    out += '(';
    encode(x.kids, out);
    out += ')';
  }
}

inline std::string encode(const Forest& f) {
  std::string s;
  encode(f, s);
  return s;
}

/// Every forest one edit away: insert a node adopting a run of siblings,
/// delete a node (its children take its place) or relabel a node.
inline void neighbors(const Forest& list, const std::vector<char>& alphabet,
                      const std::function<void(const Forest&)>& emit) {
  for (std::size_t i = 0; i <= list.size(); ++i)
    for (std::size_t j = i; j <= list.size(); ++j)
      for (char a : alphabet) {
        Forest m(list.begin(), list.begin() + static_cast<std::ptrdiff_t>(i));
        m.push_back({a, Forest(list.begin() + static_cast<std::ptrdiff_t>(i), list.begin() + static_cast<std::ptrdiff_t>(j))});
        m.insert(m.end(), list.begin() + static_cast<std::ptrdiff_t>(j), list.end());
        emit(m);
      }
  for (std::size_t k = 0; k < list.size(); ++k) {
    Forest del(list.begin(), list.begin() + static_cast<std::ptrdiff_t>(k));
    del.insert(del.end(), list[k].kids.begin(), list[k].kids.end());
    del.insert(del.end(), list.begin() + static_cast<std::ptrdiff_t>(k) + 1, list.end());
    emit(del);
    for (char a : alphabet) {
      if (a == list[k].label) continue;
      Forest m = list;
      m[k].label = a;
      emit(m);
    }
    neighbors(list[k].kids, alphabet, [&](const Forest& kids) {
      Forest m = list;
      m[k].kids = kids;
      emit(m);
    });
  }
}

/// Length of the shortest edit script turning `a` into `b`, by bidirectional
/// breadth-first search (the operation set is closed under inversion). Some
/// optimal script deletes, then relabels, then inserts, so no intermediate
/// forest needs more than max(|a|, |b|) nodes or labels outside a and b.
inline std::size_t edit_script_distance(const Forest& a, const Forest& b) {
  const std::size_t bound = std::max(count(a), count(b));
  std::vector<char> alphabet;
  std::function<void(const Forest&)> collect = [&](const Forest& f) {
    for (const auto& x : f) {
      if (std::find(alphabet.begin(), alphabet.end(), x.label) == alphabet.end()) alphabet.push_back(x.label);
      collect(x.kids);
    }
  };
  collect(a);
  collect(b);
  struct Side {
    std::unordered_map<std::string, std::size_t> dist;
    std::vector<Forest> frontier;
    std::size_t depth = 0;
  };
  Side sa, sb;
  sa.dist.emplace(encode(a), 0);
  sa.frontier.push_back(a);
  sb.dist.emplace(encode(b), 0);
  sb.frontier.push_back(b);
  if (sa.dist.count(encode(b))) return 0;
  for (;;) {
    Side& grow = sa.frontier.size() <= sb.frontier.size() ? sa : sb;
    Side& other = &grow == &sa ? sb : sa;
    if (grow.frontier.empty()) return SIZE_MAX;
    std::vector<Forest> next;
    std::size_t best = SIZE_MAX;
    for (const auto& f : grow.frontier)
      neighbors(f, alphabet, [&](const Forest& g) {
        if (count(g) > bound) return;
        auto key = encode(g);
        if (!grow.dist.emplace(key, grow.depth + 1).second) return;
        if (auto it = other.dist.find(key); it != other.dist.end()) best = std::min(best, grow.depth + 1 + it->second);
        next.push_back(g);
      });
    ++grow.depth;
    grow.frontier = std::move(next);
    if (best != SIZE_MAX) return best;
  }
}

/// Random ordered tree: node i hangs under a random earlier node as its last child.
inline LabeledTree random_tree(Rng& rng, std::size_t n, std::string_view labels) {
  LabeledTree t;
  t.add(std::string(1, labels[rng.below(labels.size())]));
  for (std::size_t i = 1; i < n; ++i)
    t.add(std::string(1, labels[rng.below(labels.size())]), static_cast<std::uint32_t>(rng.below(i)));
  return t;
}

inline Forest to_forest(const LabeledTree& t, std::uint32_t node = 0) {
  Forest kids;
  for (auto c : t.children[node]) kids.push_back(to_forest(t, c).front());
  return {Node{t.labels[node][0], kids}};
}

}  // namespace lpcode::oracle
