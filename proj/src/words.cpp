#include "raag/words.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace raag {

namespace {

// Distinct adjacent vertices commute; a vertex never commutes with itself.
bool commute_v(const DefiningGraph& g, int u, int v) { return u != v && g.adjacent(u, v); }

// Free reduction: delete a cancelling pair whenever only commuting letters
// separate it. The result length is an invariant of the element.
Word reduce(const DefiningGraph& g, Word w) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < w.size() && !changed; ++i) {
      for (size_t j = i + 1; j < w.size(); ++j) {
        if (w[j].v == w[i].v) {
          if (w[j].sign == -w[i].sign) {
            w.erase(w.begin() + j);
            w.erase(w.begin() + i);
            changed = true;
          }
          break;  // same vertex blocks either way
        }
        if (!g.adjacent(w[i].v, w[j].v)) break;
      }
    }
  }
  return w;
}

}  // namespace

Word parse_word(const DefiningGraph& g, const std::string& text) {
  Word w;
  std::istringstream is(text);
  std::string tok;
  while (is >> tok) {
    std::string label = tok;
    long long exp = 1;
    if (auto caret = tok.find('^'); caret != std::string::npos) {
      label = tok.substr(0, caret);
      try {
        exp = std::stoll(tok.substr(caret + 1));
      } catch (const std::exception&) {
        throw std::invalid_argument("bad exponent in token: " + tok);
      }
    }
    int v = g.index_of(label);
    if (v < 0) throw std::invalid_argument("unknown generator: " + label);
    Letter l{v, exp < 0 ? -1 : 1};
    for (long long i = 0; i < std::llabs(exp); ++i) w.push_back(l);
  }
  return w;
}

std::string word_str(const DefiningGraph& g, const Word& w) {
  if (w.empty()) return "1";
  std::ostringstream os;
  size_t i = 0;
  bool first = true;
  while (i < w.size()) {
    size_t j = i;
    while (j < w.size() && w[j] == w[i]) ++j;
    long long exp = static_cast<long long>(j - i) * w[i].sign;
    if (!first) os << " ";
    os << g.label(w[i].v);
    if (exp != 1) os << "^" << exp;
    first = false;
    i = j;
  }
  return os.str();
}

Word inverse(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back(it->inverse());
  return out;
}

Word concat(const Word& a, const Word& b) {
  Word out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

Word power(const Word& w, long long k) {
  Word base = k < 0 ? inverse(w) : w;
  Word out;
  out.reserve(base.size() * static_cast<size_t>(std::llabs(k)));
  for (long long i = 0; i < std::llabs(k); ++i) out.insert(out.end(), base.begin(), base.end());
  return out;
}

Word conjugate(const Word& u, const Word& w) { return concat(concat(u, w), inverse(u)); }

Word normal_form(const DefiningGraph& g, const Word& w) {
  Word rest = reduce(g, w);
  Word canon;
  canon.reserve(rest.size());
  // Greedy: the least letter that can commute to the front is the first
  // letter of the lexicographically least shuffle; recurse on the rest.
  while (!rest.empty()) {
    int best = -1;
    for (int i = 0; i < static_cast<int>(rest.size()); ++i) {
      bool avail = true;
      for (int j = 0; j < i; ++j)
        if (!commute_v(g, rest[j].v, rest[i].v)) {
          avail = false;
          break;
        }
      if (avail && (best < 0 || rest[i] < rest[best])) best = i;
    }
    canon.push_back(rest[best]);
    rest.erase(rest.begin() + best);
  }
  return canon;
}

bool is_trivial(const DefiningGraph& g, const Word& w) { return reduce(g, w).empty(); }

bool equal_elements(const DefiningGraph& g, const Word& a, const Word& b) {
  return normal_form(g, a) == normal_form(g, b);
}

std::set<int> support(const DefiningGraph& g, const Word& w) {
  std::set<int> s;
  for (const Letter& l : reduce(g, w)) s.insert(l.v);
  return s;
}

bool commutes(const DefiningGraph& g, const Word& a, const Word& b) {
  return is_trivial(g, concat(concat(a, b), concat(inverse(a), inverse(b))));
}

namespace {
std::vector<std::set<int>> noncommuting_components(const DefiningGraph& g,
                                                   const std::set<int>& supp);
Word project_letters(const Word& w, const std::set<int>& verts);
}  // namespace

CyclicForm cyclic_reduce(const DefiningGraph& g, const Word& w) {
  Word core = reduce(g, w);
  Word conj;
  // Strip pairs x ... x^-1 where x commutes to the front and x^-1 to the
  // back. Linear reduction already removed pairs cancellable on the inner
  // arc, so exhausting these leaves a cyclically reduced word.
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < core.size() && !changed; ++i) {
      bool front_mobile = true;
      for (size_t j = 0; j < i; ++j)
        if (!commute_v(g, core[j].v, core[i].v)) {
          front_mobile = false;
          break;
        }
      if (!front_mobile) continue;
      for (size_t k = core.size(); k-- > i + 1;) {
        if (core[k].v == core[i].v) {
          if (core[k].sign == -core[i].sign) {
            conj.push_back(core[i]);
            core.erase(core.begin() + k);
            core.erase(core.begin() + i);
            changed = true;
          }
          break;
        }
        if (!g.adjacent(core[k].v, core[i].v)) break;
      }
    }
  }

  // Canonical representative of the conjugacy class. The class of a
  // cyclically reduced word is its orbit under commutation swaps and
  // rotations, and both moves act on each noncommuting component of the
  // support independently: letters of distinct components commute, so the
  // word equals the product of its component projections in any order.
  // Canonical form: concatenate each component's canonical projection in
  // component order (ascending least vertex). A component with no commuting
  // pair inside it behaves as a free group word, where the orbit is just the
  // rotations and the least one is canonical; only components mixing
  // commuting and noncommuting letters need the general orbit search.
  Word canon;
  Word rot_conj;
  for (const auto& comp : noncommuting_components(g, support(g, core))) {
    Word part = project_letters(core, comp);
    bool mixed = false;
    for (auto a = comp.begin(); a != comp.end() && !mixed; ++a)
      for (auto b = std::next(a); b != comp.end() && !mixed; ++b)
        if (commute_v(g, *a, *b)) mixed = true;
    Word best = part;
    Word best_pre;
    if (!mixed) {
      Word cur = part, pre;
      for (size_t i = 1; i < part.size(); ++i) {
        pre.push_back(cur.front());
        cur.erase(cur.begin());
        cur.push_back(pre.back());
        if (cur < best) {
          best = cur;
          best_pre = pre;
        }
      }
    } else {
      // Close under both move types; nodes map to the conjugating prefix
      // that reaches them.
      std::map<Word, Word> seen;
      std::queue<Word> todo;
      seen.emplace(part, Word{});
      todo.push(part);
      constexpr size_t kOrbitCap = 200000;
      bool capped = false;
      while (!todo.empty() && !capped) {
        Word u = todo.front();
        todo.pop();
        auto visit = [&](Word v, Word c) {
          if (seen.size() >= kOrbitCap) {
            capped = true;
            return;
          }
          if (seen.emplace(v, std::move(c)).second) todo.push(std::move(v));
        };
        for (size_t i = 0; i + 1 < u.size() && !capped; ++i)
          if (commute_v(g, u[i].v, u[i + 1].v)) {
            Word v = u;
            std::swap(v[i], v[i + 1]);
            visit(std::move(v), seen.at(u));
          }
        if (!capped) {
          Word v(u.begin() + 1, u.end());
          v.push_back(u[0]);
          Word c = seen.at(u);
          c.push_back(u[0]);
          visit(std::move(v), std::move(c));
        }
      }
      if (capped) {
        // Fallback: rotations of this projection only. Deterministic and a
        // valid conjugate of minimal length, though not class-invariant.
        best = normal_form(g, part);
        best_pre.clear();
        Word cur = part, pre;
        for (size_t i = 0; i + 1 < part.size(); ++i) {
          pre.push_back(cur[0]);
          cur.erase(cur.begin());
          cur.push_back(pre.back());
          Word nf = normal_form(g, cur);
          if (nf < best) {
            best = nf;
            best_pre = pre;
          }
        }
      } else {
        best = seen.begin()->first;
        best_pre = seen.begin()->second;
      }
    }
    // part == best_pre * best * best_pre^-1, and both factors commute with
    // every other component, so the pieces assemble left to right.
    canon.insert(canon.end(), best.begin(), best.end());
    rot_conj.insert(rot_conj.end(), best_pre.begin(), best_pre.end());
  }
  return {normal_form(g, concat(conj, rot_conj)), canon};
}

namespace {

std::optional<long long> exponent_of(const DefiningGraph& g, const Word& w, const Word& r) {
  Word nw = normal_form(g, w), nr = normal_form(g, r);
  if (nw.empty()) return 0;
  if (nr.empty() || nw.size() % nr.size() != 0) return std::nullopt;
  long long t = static_cast<long long>(nw.size() / nr.size());
  if (equal_elements(g, power(nr, t), nw)) return t;
  if (equal_elements(g, power(nr, -t), nw)) return -t;
  return std::nullopt;
}

// Root of a cyclically reduced word whose support is a single component of
// the non-commutation graph. Returns (root, k) with word == root^k, k >= 1
// maximal.
std::pair<Word, long long> primitive_root_single(const DefiningGraph& g, const Word& cyc) {
  Word core = normal_form(g, cyc);
  std::map<std::pair<int, int>, long long> counts;
  for (const Letter& l : core) ++counts[{l.v, l.sign}];
  long long g0 = 0;
  for (const auto& [_, c] : counts) g0 = std::gcd(g0, c);
  std::vector<long long> divisors;
  for (long long k = g0; k >= 2; --k)
    if (g0 % k == 0) divisors.push_back(k);
  for (long long k : divisors) {
    const size_t m = core.size() / k;
    // A k-th root has exactly the letter multiset of core divided by k, so
    // enumerating arrangements of that multiset is complete. Try the
    // canonical prefix first.
    Word prefix(core.begin(), core.begin() + m);
    if (equal_elements(g, power(prefix, k), core)) return {normal_form(g, prefix), k};
    Word letters;
    for (const auto& [vl, c] : counts)
      for (long long i = 0; i < c / k; ++i) letters.push_back({vl.first, vl.second});
    std::sort(letters.begin(), letters.end());
    size_t tries = 0;
    do {
      if (++tries > 1000000) throw std::logic_error("primitive root enumeration bound exceeded");
      if (equal_elements(g, power(letters, k), core)) return {normal_form(g, letters), k};
    } while (std::next_permutation(letters.begin(), letters.end()));
  }
  return {core, 1};
}

// Partition of the support into components of the non-commutation graph;
// triangle-freeness caps this at two components.
std::vector<std::set<int>> noncommuting_components(const DefiningGraph& g, const std::set<int>& supp) {
  std::vector<std::set<int>> comps;
  std::set<int> left = supp;
  while (!left.empty()) {
    std::set<int> comp;
    std::queue<int> q;
    int s = *left.begin();
    left.erase(s);
    comp.insert(s);
    q.push(s);
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (auto it = left.begin(); it != left.end();) {
        if (!commute_v(g, u, *it)) {
          comp.insert(*it);
          q.push(*it);
          it = left.erase(it);
        } else {
          ++it;
        }
      }
    }
    comps.push_back(std::move(comp));
  }
  return comps;
}

Word project_letters(const Word& w, const std::set<int>& verts) {
  Word out;
  for (const Letter& l : w)
    if (verts.count(l.v)) out.push_back(l);
  return out;
}

std::pair<Word, long long> primitive_root_cyclic(const DefiningGraph& g, const Word& core) {
  auto comps = noncommuting_components(g, support(g, core));
  if (comps.size() <= 1) return primitive_root_single(g, core);
  auto [r1, k1] = primitive_root_single(g, project_letters(core, comps[0]));
  auto [r2, k2] = primitive_root_single(g, project_letters(core, comps[1]));
  long long k = std::gcd(k1, k2);
  Word root = concat(power(r1, k1 / k), power(r2, k2 / k));
  return {normal_form(g, root), k};
}

}  // namespace

RootPower primitive_root(const DefiningGraph& g, const Word& w) {
  if (is_trivial(g, w)) throw std::invalid_argument("primitive root of the trivial element");
  CyclicForm cf = cyclic_reduce(g, w);
  auto [root_core, k] = primitive_root_cyclic(g, cf.core);
  Word root = normal_form(g, conjugate(cf.conjugator, root_core));
  return {root, k};
}

BasicZ2 basic_generators(const DefiningGraph& g, const Word& wg, const Word& wh) {
  Word ng = normal_form(g, wg), nh = normal_form(g, wh);
  if (ng.empty() || nh.empty())
    throw std::invalid_argument("trivial element: the pair generates a cyclic group");
  if (!commutes(g, ng, nh)) throw std::invalid_argument("elements do not commute");

  CyclicForm cf = cyclic_reduce(g, ng);
  const Word& u = cf.conjugator;
  const Word& ghat = cf.core;
  Word hp = normal_form(g, conjugate(inverse(u), nh));

  std::set<int> supp_g = support(g, ghat);
  auto comps = noncommuting_components(g, supp_g);

  Word gen1, gen2;
  long long gc1 = 0, gc2 = 0, hc1 = 0, hc2 = 0;
  if (comps.size() == 2) {
    // ghat spans both factors; its link is empty (a common neighbor of both
    // sides would close a triangle), so h' is a product of root powers.
    auto [r1, k1] = primitive_root_single(g, normal_form(g, project_letters(ghat, comps[0])));
    auto [r2, k2] = primitive_root_single(g, normal_form(g, project_letters(ghat, comps[1])));
    Word h1 = project_letters(hp, comps[0]);
    Word rest = hp;
    std::erase_if(rest, [&](const Letter& l) { return comps[0].count(l.v) || comps[1].count(l.v); });
    if (!rest.empty())
      throw std::invalid_argument("support does not conjugate into any join");
    Word h2 = project_letters(hp, comps[1]);
    auto a = exponent_of(g, h1, r1), b = exponent_of(g, h2, r2);
    if (!a || !b) throw std::invalid_argument("support does not conjugate into any join");
    if (k1 * *b - k2 * *a == 0)
      throw std::invalid_argument("the pair generates a cyclic group");
    gen1 = r1;
    gen2 = r2;
    gc1 = k1;
    gc2 = k2;
    hc1 = *a;
    hc2 = *b;
  } else {
    // ghat is a power of one root; the centralizer is <root> x F(link).
    auto [r1, k1] = primitive_root_single(g, ghat);
    std::set<int> link;
    for (int v = 0; v < g.vertex_count(); ++v) {
      bool all = !supp_g.empty();
      for (int s : supp_g)
        if (!commute_v(g, v, s)) {
          all = false;
          break;
        }
      if (all) link.insert(v);
    }
    Word h1 = project_letters(hp, supp_g);
    Word x = project_letters(hp, link);
    Word rest = hp;
    std::erase_if(rest, [&](const Letter& l) { return supp_g.count(l.v) || link.count(l.v); });
    if (!rest.empty())
      throw std::invalid_argument("support does not conjugate into any join");
    auto a = exponent_of(g, h1, r1);
    if (!a) throw std::invalid_argument("support does not conjugate into any join");
    if (is_trivial(g, x))
      throw std::invalid_argument("the pair generates a cyclic group");
    // x lives in the free group on the link but need not be cyclically
    // reduced there, so take the general root.
    CyclicForm xc = cyclic_reduce(g, x);
    auto [rho_core, kx] = primitive_root_cyclic(g, xc.core);
    Word rho = normal_form(g, conjugate(xc.conjugator, rho_core));
    gen1 = r1;
    gen2 = rho;
    gc1 = k1;
    gc2 = 0;
    hc1 = *a;
    hc2 = kx;
  }

  // Ambient join: Galois closure of the two supports, oriented so side1
  // holds the least vertex, matching maximal_joins.
  auto common_neighbors = [&](const std::set<int>& s) {
    std::set<int> out;
    for (int v = 0; v < g.vertex_count(); ++v) {
      bool all = !s.empty();
      for (int u : s)
        if (!g.adjacent(u, v)) {
          all = false;
          break;
        }
      if (all) out.insert(v);
    }
    return out;
  };
  std::set<int> s1 = support(g, gen1);
  std::set<int> t = common_neighbors(s1);
  std::set<int> s2 = common_neighbors(t);
  for (int v : support(g, gen2))
    if (!t.count(v)) throw std::invalid_argument("support does not conjugate into any join");
  Join join;
  join.side1.assign(s2.begin(), s2.end());
  join.side2.assign(t.begin(), t.end());
  if (join.side2[0] < join.side1[0]) {
    std::swap(join.side1, join.side2);
    std::swap(gen1, gen2);
    std::swap(gc1, gc2);
    std::swap(hc1, hc2);
  }

  // Orient each generator to the lex-least of itself and its inverse,
  // preferring positive letters (so a beats a^-1 despite the normal form
  // order putting inverses first).
  auto pos_first_less = [](const Word& a, const Word& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    for (size_t i = 0; i < a.size(); ++i) {
      if (a[i].v != b[i].v) return a[i].v < b[i].v;
      if (a[i].sign != b[i].sign) return a[i].sign > b[i].sign;
    }
    return false;
  };
  auto orient = [&](Word& gen, long long& cg, long long& ch) {
    Word inv = normal_form(g, inverse(gen));
    if (pos_first_less(inv, gen)) {
      gen = inv;
      cg = -cg;
      ch = -ch;
    }
  };
  orient(gen1, gc1, hc1);
  orient(gen2, gc2, hc2);

  BasicZ2 out{join, gen1, gen2, normal_form(g, u), {gc1, gc2}, {hc1, hc2}};
  // Sanity: the inputs must decompose over the produced basis.
  Word back_g = conjugate(out.conjugator, concat(power(gen1, gc1), power(gen2, gc2)));
  Word back_h = conjugate(out.conjugator, concat(power(gen1, hc1), power(gen2, hc2)));
  if (!equal_elements(g, back_g, ng) || !equal_elements(g, back_h, nh))
    throw std::logic_error("basic generator decomposition failed verification");
  return out;
}

}  // namespace raag
