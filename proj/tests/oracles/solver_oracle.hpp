#pragma once

// Random word problems over a small free category, and a reference decision
// procedure that shares no code with the library: plain breadth-first
// rewriting from the left side over integer words.

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace catdiag::oracle {

using Word = std::vector<int>; // arrow indices, composed left to right

struct Arrow {
  int src;
  int dst;
};

struct Equation {
  int src;
  int dst;
  Word lhs;
  Word rhs;
};

struct Problem {
  int objects = 0;
  std::vector<Arrow> arrows;
  std::vector<Equation> hyps;
  Equation goal;

  std::string word_text(const Word& w) const {
    if (w.empty()) return "I";
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) s += (i ? " . x" : "x") + std::to_string(w[i]);
    return s;
  }

  std::string text() const {
    std::string s = "category C\nobject";
    for (int o = 0; o < objects; ++o) s += " o" + std::to_string(o);
    s += " : C\n";
    for (std::size_t i = 0; i < arrows.size(); ++i) {
      s += "morphism x" + std::to_string(i) + " : o" + std::to_string(arrows[i].src) + " -> o" +
           std::to_string(arrows[i].dst) + " in C\n";
    }
    for (std::size_t i = 0; i < hyps.size(); ++i) {
      s += "hypothesis H" + std::to_string(i) + " : " + word_text(hyps[i].lhs) + " = " + word_text(hyps[i].rhs) + "\n";
    }
    s += "goal G : " + word_text(goal.lhs) + " = " + word_text(goal.rhs) + "\n";
    return s;
  }

  int end_of(int src, const Word& w) const { return w.empty() ? src : arrows[static_cast<std::size_t>(w.back())].dst; }
};

inline std::vector<Word> rewrites(const Problem& p, int src, const Word& w) {
  std::vector<int> obj{src};
  for (int a : w) obj.push_back(p.arrows[static_cast<std::size_t>(a)].dst);
  std::vector<Word> out;
  for (const auto& h : p.hyps) {
    for (int dir = 0; dir < 2; ++dir) {
      const Word& from = dir ? h.rhs : h.lhs;
      const Word& to = dir ? h.lhs : h.rhs;
      for (std::size_t i = 0; i + from.size() <= w.size(); ++i) {
        if (from.empty() ? obj[i] != h.src : !std::equal(from.begin(), from.end(), w.begin() + static_cast<long>(i))) {
          continue;
        }
        Word next(w.begin(), w.begin() + static_cast<long>(i));
        next.insert(next.end(), to.begin(), to.end());
        next.insert(next.end(), w.begin() + static_cast<long>(i + from.size()), w.end());
        out.push_back(std::move(next));
      }
    }
  }
  return out;
}

/// True when the goal follows in at most `depth` rewrite steps.
inline bool provable(const Problem& p, int depth) {
  std::set<Word> seen{p.goal.lhs};
  std::vector<Word> level{p.goal.lhs};
  if (p.goal.lhs == p.goal.rhs) return true;
  for (int k = 0; k < depth; ++k) {
    std::vector<Word> next;
    for (const auto& w : level) {
      for (auto& n : rewrites(p, p.goal.src, w)) {
        if (n == p.goal.rhs) return true;
        if (seen.insert(n).second) next.push_back(std::move(n));
      }
    }
    level = std::move(next);
  }
  return false;
}

inline Word random_walk(const Problem& p, std::mt19937_64& rng, int src, int len) {
  Word w;
  int at = src;
  for (int i = 0; i < len; ++i) {
    std::vector<int> out;
    for (std::size_t a = 0; a < p.arrows.size(); ++a) {
      if (p.arrows[a].src == at) out.push_back(static_cast<int>(a));
    }
    if (out.empty()) break;
    int a = out[rng() % out.size()];
    w.push_back(a);
    at = p.arrows[static_cast<std::size_t>(a)].dst;
  }
  return w;
}

// A second path with the same endpoints as `w`, when one turns up.
inline bool parallel(const Problem& p, std::mt19937_64& rng, int src, const Word& w, Word& out) {
  int dst = p.end_of(src, w);
  for (int tries = 0; tries < 60; ++tries) {
    Word v = random_walk(p, rng, src, static_cast<int>(rng() % 4));
    if (p.end_of(src, v) == dst && v != w && !(v.empty() && w.empty())) {
      out = v;
      return true;
    }
  }
  return false;
}

inline Problem random_problem(std::mt19937_64& rng) {
  for (;;) {
    Problem p;
    // At most 4 objects, 5 arrows and 4 hypotheses.
    p.objects = 2 + static_cast<int>(rng() % 3);
    int n = 3 + static_cast<int>(rng() % 3);
    for (int i = 0; i < n; ++i) {
      p.arrows.push_back({static_cast<int>(rng() % static_cast<unsigned>(p.objects)),
                          static_cast<int>(rng() % static_cast<unsigned>(p.objects))});
    }
    int want = 2 + static_cast<int>(rng() % 3);
    for (int tries = 0; tries < 40 && static_cast<int>(p.hyps.size()) < want; ++tries) {
      int src = static_cast<int>(rng() % static_cast<unsigned>(p.objects));
      Word l = random_walk(p, rng, src, 1 + static_cast<int>(rng() % 3));
      Word r;
      if (l.empty() || !parallel(p, rng, src, l, r)) continue;
      p.hyps.push_back({src, p.end_of(src, l), l, r});
    }
    if (p.hyps.empty()) continue;

    // Half the goals are reachable by construction, the rest are arbitrary.
    int src = static_cast<int>(rng() % static_cast<unsigned>(p.objects));
    Word l = random_walk(p, rng, src, 1 + static_cast<int>(rng() % 3));
    if (l.empty()) continue;
    Word r;
    if (rng() % 2) {
      r = l;
      int steps = 1 + static_cast<int>(rng() % 6);
      for (int i = 0; i < steps; ++i) {
        auto next = rewrites(p, src, r);
        if (next.empty()) break;
        r = next[rng() % next.size()];
      }
      if (r.empty() && l.empty()) continue;
    } else if (!parallel(p, rng, src, l, r)) {
      continue;
    }
    p.goal = {src, p.end_of(src, l), l, r};
    return p;
  }
}

} // namespace catdiag::oracle
