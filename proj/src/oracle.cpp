#include "raag/oracle.hpp"

#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <utility>

namespace raag {
namespace {

// Compact byte key for memo maps; supports vertices below 2^15.
std::string word_key(const Word& w) {
  std::string s;
  s.reserve(w.size() * 2);
  for (const Letter& l : w) {
    unsigned v = static_cast<unsigned>(l.v);
    s.push_back(static_cast<char>(v & 0xff));
    s.push_back(static_cast<char>(((v >> 8) << 1) | unsigned(l.sign > 0)));
  }
  return s;
}

std::string class_key(const DefiningGraph& g, const Word& w) {
  return word_key(cyclic_reduce(g, w).core);
}

}  // namespace

Rat parse_rational(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty rational");
  auto bad = [&]() -> std::invalid_argument {
    return std::invalid_argument("bad rational: " + s);
  };
  try {
    auto slash = s.find('/');
    if (slash != std::string::npos) {
      boost::multiprecision::cpp_int p(s.substr(0, slash));
      boost::multiprecision::cpp_int q(s.substr(slash + 1));
      if (q == 0) throw bad();
      return Rat(p, q);
    }
    auto dot = s.find('.');
    if (dot != std::string::npos) {
      std::string head = s.substr(0, dot), tail = s.substr(dot + 1);
      bool neg = !head.empty() && head[0] == '-';
      if (neg) head = head.substr(1);
      else if (!head.empty() && head[0] == '+') head = head.substr(1);
      if (head.empty() && tail.empty()) throw bad();
      for (const std::string& part : {head, tail})
        for (char c : part)
          if (c < '0' || c > '9') throw bad();
      boost::multiprecision::cpp_int scale = 1;
      for (std::size_t i = 0; i < tail.size(); ++i) scale *= 10;
      boost::multiprecision::cpp_int num = head.empty()
          ? boost::multiprecision::cpp_int(0)
          : boost::multiprecision::cpp_int(head);
      num = num * scale + (tail.empty() ? boost::multiprecision::cpp_int(0)
                                        : boost::multiprecision::cpp_int(tail));
      Rat r(num, scale);
      return neg ? -r : r;
    }
    return Rat(boost::multiprecision::cpp_int(s));
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception&) {
    throw bad();
  }
}

Length parse_length_value(const std::string& text) {
  std::string s;
  for (char c : text)
    if (c != ' ' && c != '\t') s.push_back(c);
  if (s.rfind("sqrt(", 0) == 0 && !s.empty() && s.back() == ')') {
    Rat inner = parse_rational(s.substr(5, s.size() - 6));
    if (inner < 0) throw std::invalid_argument("negative radicand: " + text);
    return Length(Quadratic(inner));
  }
  Rat value = parse_rational(s);
  if (value < 0) throw std::invalid_argument("negative length: " + text);
  return Length::of_scalar(Quadratic(value));
}

LengthOracle geometric_oracle(const ProductComplex& X, std::string name) {
  struct Memo {
    std::mutex lock;
    std::unordered_map<std::string, Length> values;
  };
  auto complex = std::make_shared<ProductComplex>(X);
  auto memo = std::make_shared<Memo>();
  LengthOracle o;
  o.provenance = Provenance::geometric;
  o.name = std::move(name);
  o.evaluate = [complex, memo](const Word& w) {
    std::string key = word_key(w);
    {
      std::scoped_lock hold(memo->lock);
      auto it = memo->values.find(key);
      if (it != memo->values.end()) return it->second;
    }
    Length value = complex->length(w);
    std::scoped_lock hold(memo->lock);
    return memo->values.emplace(std::move(key), std::move(value)).first->second;
  };
  return o;
}

LengthOracle table_oracle(const DefiningGraph& g, const std::string& text,
                          std::string name) {
  auto table = std::make_shared<std::unordered_map<std::string, Length>>();
  auto graph = std::make_shared<DefiningGraph>(g);
  (*table)[std::string()] = Length();  // the trivial class is always 0

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string trimmed = line;
    while (!trimmed.empty() && (trimmed.back() == '\r' || trimmed.back() == ' '))
      trimmed.pop_back();
    std::size_t start = trimmed.find_first_not_of(" \t");
    if (start == std::string::npos || trimmed[start] == '#') continue;
    // Words contain spaces, so the value is everything after the last tab,
    // or after the last space when no tab is present.
    std::size_t sep = trimmed.rfind('\t');
    if (sep == std::string::npos) sep = trimmed.rfind(' ');
    if (sep == std::string::npos || sep <= start)
      throw std::invalid_argument("table line " + std::to_string(line_no) +
                                  " has no value: " + trimmed);
    Word w = parse_word(*graph, trimmed.substr(start, sep - start));
    Length value = parse_length_value(trimmed.substr(sep + 1));
    std::string key = class_key(*graph, w);
    if (key.empty() && !value.is_zero())
      throw std::invalid_argument("table line " + std::to_string(line_no) +
                                  " assigns a nonzero length to the trivial word");
    auto [it, fresh] = table->emplace(key, value);
    if (!fresh && !(it->second == value))
      throw std::invalid_argument("table line " + std::to_string(line_no) +
                                  " conflicts with an earlier entry for the same class");
  }

  LengthOracle o;
  o.provenance = Provenance::table;
  o.name = std::move(name);
  o.evaluate = [table, graph](const Word& w) {
    auto it = table->find(class_key(*graph, w));
    if (it == table->end()) it = table->find(class_key(*graph, inverse(w)));
    if (it == table->end())
      throw std::out_of_range("oracle has no entry for word: " + word_str(*graph, w));
    return it->second;
  };
  return o;
}

LengthOracle override_oracle(const LengthOracle& base, const DefiningGraph& g,
                             const std::vector<std::pair<Word, Length>>& overrides) {
  auto graph = std::make_shared<DefiningGraph>(g);
  auto reroute = std::make_shared<std::unordered_map<std::string, Length>>();
  for (const auto& [w, value] : overrides) (*reroute)[class_key(*graph, w)] = value;
  LengthOracle o;
  o.provenance = Provenance::adversarial;
  o.name = base.name + "+overrides";
  o.evaluate = [base = base.evaluate, graph, reroute](const Word& w) {
    auto it = reroute->find(class_key(*graph, w));
    if (it == reroute->end()) it = reroute->find(class_key(*graph, inverse(w)));
    if (it != reroute->end()) return it->second;
    return base(w);
  };
  return o;
}

LengthOracle recording_oracle(const LengthOracle& base,
                              std::shared_ptr<std::vector<Word>> log) {
  struct Guard {
    std::mutex lock;
  };
  auto guard = std::make_shared<Guard>();
  LengthOracle o;
  o.provenance = base.provenance;
  o.name = base.name + "+recorder";
  o.evaluate = [base = base.evaluate, log, guard](const Word& w) {
    {
      std::scoped_lock hold(guard->lock);
      log->push_back(w);
    }
    return base(w);
  };
  return o;
}

}  // namespace raag
