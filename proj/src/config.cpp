#include "raag/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "raag/oracle.hpp"

namespace raag {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigError("line " + std::to_string(line) + ": " + msg);
}

bool squarefree(long long d) {
  for (long long p = 2; p * p <= d; ++p)
    if (d % (p * p) == 0) return false;
  return true;
}

// "sqrt2" or "sqrt(2)" -> 2; anything else (including a bare "sqrt") -> none.
std::optional<long long> radical_of(const std::string& tok) {
  if (tok.rfind("sqrt", 0) != 0) return std::nullopt;
  std::string body = tok.substr(4);
  if (body.size() >= 2 && body.front() == '(' && body.back() == ')')
    body = body.substr(1, body.size() - 2);
  if (body.empty() || body.size() > 18) return std::nullopt;
  for (char c : body)
    if (c < '0' || c > '9') return std::nullopt;
  return std::stoll(body);
}

struct Entry {
  int line = 0;
  std::string key, value;
};

long long parse_int(const Entry& e) {
  try {
    std::size_t pos = 0;
    long long v = std::stoll(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument(e.value);
    return v;
  } catch (const std::exception&) {
    fail(e.line, "bad integer: " + e.value);
  }
}

}  // namespace

Quadratic parse_quadratic(const std::string& text) {
  std::string spaced;
  for (char c : text) spaced.push_back(c == '*' ? ' ' : c);
  std::vector<std::string> t = split_ws(spaced);
  auto bad = [&]() -> std::invalid_argument {
    return std::invalid_argument("bad metric value: " + text);
  };
  auto term = [&](const std::string& coeff, const std::string& rad, int sgn) {
    std::optional<long long> d = radical_of(rad);
    if (!d) throw bad();
    if (*d < 2 || !squarefree(*d))
      throw std::invalid_argument("radicand must be a squarefree integer >= 2: " + text);
    Rat b = coeff.empty() ? Rat(1) : parse_rational(coeff);
    return Quadratic(Rat(0), sgn < 0 ? Rat(-b) : b, *d);
  };
  if (t.size() == 1) {
    if (radical_of(t[0])) return term("", t[0], +1);
    if (t[0].size() > 1 && t[0][0] == '-' && radical_of(t[0].substr(1)))
      return term("", t[0].substr(1), -1);
    return Quadratic(parse_rational(t[0]));
  }
  if (t.size() == 2) return term(t[0], t[1], +1);
  if ((t.size() == 3 || t.size() == 4) && (t[1] == "+" || t[1] == "-")) {
    int sgn = t[1] == "+" ? +1 : -1;
    Rat a = parse_rational(t[0]);
    Quadratic root = t.size() == 3 ? term("", t[2], sgn) : term(t[2], t[3], sgn);
    return Quadratic(std::move(a), std::move(root.b), root.d);
  }
  throw bad();
}

ExperimentConfig::ExperimentConfig()
    : tolerance(Rat(1, Int("1000000000000"))), epsilon(Rat(1, 100)) {}

const Word* ExperimentConfig::find_word(const std::string& name) const {
  for (const auto& [n, w] : words)
    if (n == name) return &w;
  return nullptr;
}

const SubgroupSpec* ExperimentConfig::find_subgroup(const std::string& name) const {
  for (const SubgroupSpec& s : subgroups)
    if (s.name == name) return &s;
  return nullptr;
}

std::optional<Quadratic> ExperimentConfig::length_of(int v) const {
  for (const auto& [u, q] : lengths)
    if (u == v) return q;
  return std::nullopt;
}

ProductComplex ExperimentConfig::complex() const {
  if (!has_model())
    throw std::invalid_argument("config declares no model ([model] join or star)");
  auto metric_for = [&](const std::vector<int>& verts) {
    std::vector<std::pair<int, Quadratic>> out;
    for (int v : verts) {
      std::optional<Quadratic> q = length_of(v);
      if (!q)
        throw std::invalid_argument("no length assigned to vertex '" + graph.label(v) + "'");
      out.emplace_back(v, std::move(*q));
    }
    return out;
  };
  if (star_center) {
    std::vector<int> need = graph.neighbors(*star_center);
    need.push_back(*star_center);
    return ProductComplex::star(graph, *star_center, metric_for(need));
  }
  std::vector<int> need = join->side1;
  need.insert(need.end(), join->side2.begin(), join->side2.end());
  return ProductComplex(graph, *join, metric_for(need));
}

ExperimentConfig parse_config(const std::string& text) {
  // Pass 1: split into sections of key/value entries, comments stripped.
  static const std::vector<std::string> kSections = {
      "graph", "lengths", "model", "subgroups", "words",
      "budgets", "tolerances", "output"};
  std::map<std::string, std::vector<Entry>> sections;
  {
    std::istringstream in(text);
    std::string raw, current;
    int line = 0;
    while (std::getline(in, raw)) {
      ++line;
      if (std::size_t hash = raw.find('#'); hash != std::string::npos)
        raw.resize(hash);
      std::string s = trim(raw);
      if (s.empty()) continue;
      if (s.front() == '[') {
        std::size_t close = s.find(']');
        if (close == std::string::npos) fail(line, "unterminated section header");
        if (!trim(s.substr(close + 1)).empty())
          fail(line, "trailing text after section header");
        current = trim(s.substr(1, close - 1));
        if (std::find(kSections.begin(), kSections.end(), current) == kSections.end())
          fail(line, "unknown section [" + current + "]");
        if (sections.count(current)) fail(line, "duplicate section [" + current + "]");
        sections[current];
        continue;
      }
      std::size_t eq = s.find('=');
      if (eq == std::string::npos) fail(line, "expected key = value");
      if (current.empty()) fail(line, "key/value before any section header");
      Entry e{line, trim(s.substr(0, eq)), trim(s.substr(eq + 1))};
      if (e.key.empty()) fail(line, "empty key");
      sections[current].push_back(std::move(e));
    }
  }

  // Pass 2: process sections in dependency order, [graph] first.
  ExperimentConfig cfg;
  if (!sections.count("graph")) throw ConfigError("config has no [graph] section");

  std::vector<std::string> labels;
  std::vector<std::pair<std::string, std::string>> edges;
  int vertices_line = 0;
  for (const Entry& e : sections["graph"]) {
    if (e.key == "vertices") {
      vertices_line = e.line;
      for (std::string& l : split_ws(e.value)) labels.push_back(std::move(l));
    } else if (e.key == "edges") {
      for (const std::string& tok : split_ws(e.value)) {
        if (std::count(tok.begin(), tok.end(), '-') != 1)
          fail(e.line, "bad edge '" + tok + "' (expected u-v)");
        std::size_t dash = tok.find('-');
        std::string u = tok.substr(0, dash), v = tok.substr(dash + 1);
        if (u.empty() || v.empty()) fail(e.line, "bad edge '" + tok + "' (expected u-v)");
        for (const std::string& end : {u, v})
          if (std::find(labels.begin(), labels.end(), end) == labels.end())
            fail(e.line, "unknown vertex '" + end + "' in edge " + tok);
        edges.emplace_back(std::move(u), std::move(v));
      }
    } else {
      fail(e.line, "unknown key '" + e.key + "' in [graph]");
    }
  }
  if (labels.empty()) throw ConfigError("[graph] declares no vertices");
  try {
    cfg.graph = DefiningGraph::make(std::move(labels), edges);
  } catch (const std::invalid_argument& ex) {
    fail(vertices_line, ex.what());
  }
  auto vertex = [&](const std::string& label, int line) {
    int v = cfg.graph.index_of(label);
    if (v < 0) fail(line, "unknown vertex '" + label + "'");
    return v;
  };

  for (const Entry& e : sections["lengths"]) {
    int v = vertex(e.key, e.line);
    if (cfg.length_of(v)) fail(e.line, "duplicate length for vertex '" + e.key + "'");
    Quadratic q;
    try {
      q = parse_quadratic(e.value);
    } catch (const std::invalid_argument& ex) {
      fail(e.line, ex.what());
    }
    if (q.sign() <= 0) fail(e.line, "length of '" + e.key + "' must be positive");
    cfg.lengths.emplace_back(v, std::move(q));
  }

  for (const Entry& e : sections["model"]) {
    if (e.key == "join") {
      if (cfg.join) fail(e.line, "duplicate join");
      std::size_t bar = e.value.find('|');
      if (bar == std::string::npos) fail(e.line, "join needs two sides: a b | c d");
      Join j;
      for (int side = 0; side < 2; ++side) {
        std::string part = side == 0 ? e.value.substr(0, bar) : e.value.substr(bar + 1);
        if (part.find('|') != std::string::npos) fail(e.line, "join has more than two sides");
        std::vector<int>& out = side == 0 ? j.side1 : j.side2;
        for (const std::string& l : split_ws(part)) out.push_back(vertex(l, e.line));
        if (out.empty()) fail(e.line, "empty join side");
        std::sort(out.begin(), out.end());
        if (std::adjacent_find(out.begin(), out.end()) != out.end())
          fail(e.line, "repeated vertex in join side");
      }
      for (int v : j.side1)
        if (std::find(j.side2.begin(), j.side2.end(), v) != j.side2.end())
          fail(e.line, "vertex '" + cfg.graph.label(v) + "' on both join sides");
      cfg.join = std::move(j);
    } else if (e.key == "star") {
      if (cfg.star_center) fail(e.line, "duplicate star");
      std::vector<std::string> t = split_ws(e.value);
      if (t.size() != 1) fail(e.line, "star takes one center vertex");
      cfg.star_center = vertex(t[0], e.line);
    } else {
      fail(e.line, "unknown key '" + e.key + "' in [model]");
    }
    if (cfg.join && cfg.star_center)
      fail(e.line, "model declares both join and star");
  }

  auto parse_cfg_word = [&](const std::string& text_, int line) {
    try {
      return parse_word(cfg.graph, text_);
    } catch (const std::invalid_argument& ex) {
      fail(line, ex.what());
    }
  };
  for (const Entry& e : sections["subgroups"]) {
    if (cfg.find_subgroup(e.key)) fail(e.line, "duplicate subgroup '" + e.key + "'");
    std::size_t comma = e.value.find(',');
    if (comma == std::string::npos || e.value.find(',', comma + 1) != std::string::npos)
      fail(e.line, "subgroup needs two generators: g1, g2");
    SubgroupSpec s;
    s.name = e.key;
    s.gen1 = parse_cfg_word(e.value.substr(0, comma), e.line);
    s.gen2 = parse_cfg_word(e.value.substr(comma + 1), e.line);
    if (s.gen1.empty() || s.gen2.empty()) fail(e.line, "empty subgroup generator");
    cfg.subgroups.push_back(std::move(s));
  }

  for (const Entry& e : sections["words"]) {
    if (cfg.find_word(e.key)) fail(e.line, "duplicate word '" + e.key + "'");
    cfg.words.emplace_back(e.key, parse_cfg_word(e.value, e.line));
  }

  for (const Entry& e : sections["budgets"]) {
    if (e.key == "seed") {
      long long v = parse_int(e);
      if (v < 0 || v > 0xffffffffLL) fail(e.line, "seed out of range");
      cfg.seed = static_cast<unsigned>(v);
      continue;
    }
    long long* slot = e.key == "N"   ? &cfg.budget_n
                      : e.key == "K" ? &cfg.budget_k
                      : e.key == "S" ? &cfg.budget_s
                                     : nullptr;
    if (!slot) fail(e.line, "unknown key '" + e.key + "' in [budgets]");
    *slot = parse_int(e);
    if (*slot <= 0) fail(e.line, "budget " + e.key + " must be positive");
  }

  for (const Entry& e : sections["tolerances"]) {
    Rat* slot = e.key == "tolerance" ? &cfg.tolerance
                : e.key == "epsilon" ? &cfg.epsilon
                                     : nullptr;
    if (!slot) fail(e.line, "unknown key '" + e.key + "' in [tolerances]");
    try {
      *slot = parse_rational(e.value);
    } catch (const std::invalid_argument& ex) {
      fail(e.line, ex.what());
    }
    if (*slot <= 0) fail(e.line, e.key + " must be positive");
  }

  for (const Entry& e : sections["output"]) {
    if (e.key == "dir") {
      cfg.out_dir = e.value;
    } else if (e.key == "format") {
      static const std::vector<std::string> kFormats = {"text", "json", "csv", "svg"};
      if (std::find(kFormats.begin(), kFormats.end(), e.value) == kFormats.end())
        fail(e.line, "format must be one of text, json, csv, svg");
      cfg.format = e.value;
    } else {
      fail(e.line, "unknown key '" + e.key + "' in [output]");
    }
  }

  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace raag
