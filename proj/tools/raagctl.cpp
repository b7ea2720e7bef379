// raagctl: command-line driver for the translation-length toolkit. Each command
// loads a declarative config, runs one pipeline (graph validation, exact
// word lengths, lattice gap search, rectangle reconstruction, rigidity
// comparison, plane development) and emits a deterministic report in text or
// JSON, with CSV/SVG payloads for figure data.
//
// Exit codes: 0 success / agreement, 1 domain violation or mismatch,
// 2 usage or I/O failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "raag/config.hpp"
#include "raag/oracle.hpp"
#include "raag/plane_development.hpp"
#include "raag/reconstruction.hpp"

using nlohmann::json;
using namespace raag;

namespace {

// Problems with how the tool was invoked, as opposed to domain violations.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::vector<std::string> configs;
  std::string word;
  std::string subgroups;  // "G,H"
  long long budget = 0;   // 0 = config default
  std::string epsilon;    // exact rational; empty = config default
  long long seed = -1;    // negative = config default
  std::string out;        // empty = config default
  std::string format;     // empty = config default
  std::string fixture = "bend";
  int copies = 4;
};

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Exact value in the length-table grammar whenever representable: rational
// scalars as p/q, everything with a rational radicand as sqrt(p/q). Values
// with irrational radicands keep their exact nested spelling, which the
// table grammar does not cover.
std::string oracle_value(const Length& l) {
  if (auto s = l.as_scalar(); s && s->is_rational()) return s->str();
  if (l.rad.is_rational()) return "sqrt(" + l.rad.str() + ")";
  return l.str();
}

std::string subgroup_str(const DefiningGraph& g, const BasicZ2& z) {
  std::string core = "<" + word_str(g, z.gen1) + ", " + word_str(g, z.gen2) + ">";
  if (z.conjugator.empty()) return core;
  std::string w = word_str(g, z.conjugator);
  return w + " " + core + " (" + w + ")^-1";
}

// The report format for this command; commands that have no figure payload
// reject csv/svg instead of silently printing text.
std::string report_format(const Options& opt, const ExperimentConfig& cfg,
                          bool figures_available) {
  std::string f = !opt.format.empty() ? opt.format : cfg.format;
  if (f == "text" || f == "json") return f;
  if (figures_available && (f == "csv" || f == "svg")) return f;
  throw UsageError("format '" + f + "' is not available for this command");
}

Word resolve_word(const ExperimentConfig& cfg, const std::string& text) {
  if (const Word* named = cfg.find_word(text)) return *named;
  return parse_word(cfg.graph, text);
}

// "--subgroups G,H" -> the two named generator pairs, as maximal Z^2 data.
std::pair<BasicZ2, BasicZ2> resolve_subgroups(const ExperimentConfig& cfg,
                                              const std::string& spec) {
  std::size_t comma = spec.find(',');
  if (comma == std::string::npos || spec.find(',', comma + 1) != std::string::npos)
    throw UsageError("--subgroups takes two config names: G,H");
  auto resolve = [&](std::string name) {
    while (!name.empty() && name.front() == ' ') name.erase(name.begin());
    while (!name.empty() && name.back() == ' ') name.pop_back();
    const SubgroupSpec* s = cfg.find_subgroup(name);
    if (!s) throw std::invalid_argument("unknown subgroup '" + name + "'");
    return basic_generators(cfg.graph, s->gen1, s->gen2);
  };
  return {resolve(spec.substr(0, comma)), resolve(spec.substr(comma + 1))};
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw std::ios_base::failure("cannot write " + path.string());
}

json length_entry(const DefiningGraph& g, const Word& w, const Length& l) {
  return json{{"word", word_str(g, w)}, {"value", oracle_value(l)}};
}

// ---------------------------------------------------------------------------

int cmd_validate(const Options& opt) {
  ExperimentConfig cfg = load_config(opt.configs[0]);
  std::string format = report_format(opt, cfg, false);
  std::vector<std::string> violations = cfg.graph.validate().violations;
  if (violations.empty() && cfg.has_model()) {
    try {
      cfg.complex();
    } catch (const std::exception& e) {
      violations.emplace_back(e.what());
    }
  }
  bool ok = violations.empty();
  if (format == "json") {
    json j{{"command", "validate"},
           {"ok", ok},
           {"vertices", cfg.graph.vertex_count()},
           {"edges", cfg.graph.edges().size()},
           {"violations", violations}};
    std::cout << j.dump(2) << "\n";
  } else if (ok) {
    std::cout << "ok: " << cfg.graph.vertex_count() << " vertices, "
              << cfg.graph.edges().size() << " edges\n";
  } else {
    for (const std::string& v : violations) std::cout << "violation: " << v << "\n";
  }
  return ok ? 0 : 1;
}

int cmd_length(const Options& opt) {
  ExperimentConfig cfg = load_config(opt.configs[0]);
  std::string format = report_format(opt, cfg, false);
  Word w = resolve_word(cfg, opt.word);
  ProductComplex X = cfg.complex();
  Length l = X.length(w);
  if (format == "json") {
    json j{{"command", "length"},
           {"word", word_str(cfg.graph, w)},
           {"value", oracle_value(l)},
           {"approx", l.approx()},
           {"lengths", json::array({length_entry(cfg.graph, w, l)})}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << oracle_value(l) << "\n";
  }
  return 0;
}

int cmd_gap(const Options& opt) {
  ExperimentConfig cfg = load_config(opt.configs[0]);
  std::string format = report_format(opt, cfg, false);
  auto [G, H] = resolve_subgroups(cfg, opt.subgroups);
  long long budget = opt.budget > 0 ? opt.budget : cfg.budget_n;
  ProductComplex X = cfg.complex();
  LengthOracle oracle = geometric_oracle(X);
  GapEstimate est = minset_gap(oracle, cfg.graph, G, H, budget);

  Word gh = free_reduce(concat(est.g, est.h));
  if (format == "json") {
    json rows = json::array();
    for (std::size_t i = 0; i < est.shell_best.size(); ++i)
      rows.push_back(json{{"n", i + 1}, {"best", est.shell_best[i].approx()}});
    json j{{"command", "gap"},
           {"budget", est.budget},
           {"rows", rows},
           {"best", {{"exact", est.best.str()}, {"approx", est.best.approx()},
                     {"sign", est.best.sign()}}},
           {"exponents", est.exponents},
           {"witness", {{"g", word_str(cfg.graph, est.g)}, {"h", word_str(cfg.graph, est.h)}}},
           {"attained", est.attained},
           {"intersecting", est.intersecting()},
           {"lengths", json::array({length_entry(cfg.graph, est.g, oracle(est.g)),
                                    length_entry(cfg.graph, est.h, oracle(est.h)),
                                    length_entry(cfg.graph, gh, oracle(gh))})}};
    if (est.twice_distance)
      j["twice_distance"] = {{"exact", oracle_value(*est.twice_distance)},
                             {"approx", est.twice_distance->approx()}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "G = " << subgroup_str(cfg.graph, G) << "\n"
              << "H = " << subgroup_str(cfg.graph, H) << "\n"
              << "budget = " << est.budget << "\n"
              << "  N  best\n";
    for (std::size_t i = 0; i < est.shell_best.size(); ++i)
      std::cout << "  " << i + 1 << "  " << fmt_g(est.shell_best[i].approx()) << "\n";
    std::cout << "best = " << est.best.str() << " ~ " << fmt_g(est.best.approx()) << "\n"
              << "witness exponents = (" << est.exponents[0] << ", " << est.exponents[1]
              << ", " << est.exponents[2] << ", " << est.exponents[3] << ")\n"
              << "g = " << word_str(cfg.graph, est.g) << "\n"
              << "h = " << word_str(cfg.graph, est.h) << "\n";
    if (est.twice_distance)
      std::cout << "2d = " << oracle_value(*est.twice_distance) << " ~ "
                << fmt_g(est.twice_distance->approx()) << "\n";
    std::cout << "attained = " << (est.attained ? "yes" : "no") << "\n"
              << "intersecting = " << (est.intersecting() ? "yes" : "no") << "\n";
  }
  return 0;
}

void print_side(const char* name, const std::optional<GridlineData>& side,
                const DefiningGraph& g) {
  if (!side) return;
  std::cout << name << ": g = " << word_str(g, side->g) << ", h = " << word_str(g, side->h)
            << ", t = " << side->t << ", r = " << side->r.str()
            << ", direction = " << side->direction << "\n";
}

json side_json(const std::optional<GridlineData>& side, const DefiningGraph& g) {
  if (!side) return nullptr;
  return json{{"g", word_str(g, side->g)}, {"h", word_str(g, side->h)},
              {"t", side->t},            {"r", side->r.str()},
              {"direction", side->direction}};
}

int cmd_reconstruct(const Options& opt) {
  ExperimentConfig cfg = load_config(opt.configs[0]);
  std::string format = report_format(opt, cfg, false);
  auto [G, H] = resolve_subgroups(cfg, opt.subgroups);
  long long budget = opt.budget > 0 ? opt.budget : cfg.budget_n;
  ProductComplex X = cfg.complex();
  LengthOracle oracle = geometric_oracle(X);
  ReconstructedRectangle rec = reconstruct_rectangle(oracle, cfg.graph, G, H, budget);

  if (format == "json") {
    json lengths = json::array();
    for (const std::optional<GridlineData>& side : {rec.side1, rec.side2})
      if (side) {
        lengths.push_back(length_entry(cfg.graph, side->g, oracle(side->g)));
        lengths.push_back(length_entry(cfg.graph, side->h, oracle(side->h)));
      }
    json j{{"command", "reconstruct"},
           {"kind", kind_name(rec.kind)},
           {"r1", rec.r1.str()},
           {"r2", rec.r2.str()},
           {"inf1", rec.inf1},
           {"inf2", rec.inf2},
           {"dir1", rec.dir1},
           {"dir2", rec.dir2},
           {"side1", side_json(rec.side1, cfg.graph)},
           {"side2", side_json(rec.side2, cfg.graph)},
           {"shared1", rec.shared1.empty() ? json(nullptr) : json(word_str(cfg.graph, rec.shared1))},
           {"shared2", rec.shared2.empty() ? json(nullptr) : json(word_str(cfg.graph, rec.shared2))},
           {"complete", rec.complete},
           {"note", rec.note},
           {"lengths", lengths}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "kind = " << kind_name(rec.kind) << "\n"
              << "r1 = " << (rec.inf1 ? "inf" : rec.r1.str()) << "\n"
              << "r2 = " << (rec.inf2 ? "inf" : rec.r2.str()) << "\n"
              << "dir1 = " << rec.dir1 << "\n"
              << "dir2 = " << rec.dir2 << "\n";
    print_side("side1", rec.side1, cfg.graph);
    print_side("side2", rec.side2, cfg.graph);
    if (!rec.shared1.empty())
      std::cout << "shared1 = " << word_str(cfg.graph, rec.shared1) << "\n";
    if (!rec.shared2.empty())
      std::cout << "shared2 = " << word_str(cfg.graph, rec.shared2) << "\n";
    std::cout << "complete = " << (rec.complete ? "yes" : "no") << "\n";
    if (!rec.note.empty()) std::cout << "note = " << rec.note << "\n";
  }
  return 0;
}

int cmd_rigidity(const Options& opt) {
  ExperimentConfig a = load_config(opt.configs[0]);
  ExperimentConfig b = load_config(opt.configs[1]);
  std::string format = report_format(opt, a, false);
  if (a.graph.labels() != b.graph.labels() || a.graph.edges() != b.graph.edges())
    throw std::invalid_argument("configs use different defining graphs");
  if (a.subgroups.empty())
    throw std::invalid_argument("first config declares no subgroups for the chart family");
  std::vector<BasicZ2> family;
  for (const SubgroupSpec& s : a.subgroups)
    family.push_back(basic_generators(a.graph, s.gen1, s.gen2));
  LengthOracle oa = geometric_oracle(a.complex(), "A");
  LengthOracle ob = geometric_oracle(b.complex(), "B");
  unsigned seed = opt.seed >= 0 ? static_cast<unsigned>(opt.seed) : a.seed;
  IsometryResult res =
      build_isometry(oa, ob, a.graph, family, static_cast<int>(a.budget_s), seed);

  if (format == "json") {
    json charts = json::array();
    for (const ChartRecord& c : res.charts)
      charts.push_back(json{{"subgroup", subgroup_str(a.graph, c.subgroup)},
                            {"l1", c.l1.str()},
                            {"l2", c.l2.str()},
                            {"frame", c.frame}});
    json gluing = json::array();
    for (const GlueRecord& g : res.gluing)
      gluing.push_back(json{{"chart_a", g.chart_a},
                            {"chart_b", g.chart_b},
                            {"kind", kind_name(g.kind)},
                            {"r1", g.r1.str()},
                            {"r2", g.r2.str()},
                            {"dir1", g.dir1},
                            {"dir2", g.dir2}});
    json j{{"command", "rigidity"}, {"ok", res.ok}, {"charts", charts}, {"gluing", gluing}};
    if (res.mismatch) {
      const MismatchReport& m = *res.mismatch;
      j["mismatch"] = {{"witness", word_str(a.graph, m.witness)},
                       {"a", oracle_value(m.value_a)},
                       {"b", oracle_value(m.value_b)}};
    }
    if (res.coverage_error) j["coverage_error"] = *res.coverage_error;
    std::cout << j.dump(2) << "\n";
  } else if (res.ok) {
    std::cout << "isometric: " << res.charts.size() << " charts, " << res.gluing.size()
              << " glued overlaps\n";
    for (std::size_t i = 0; i < res.charts.size(); ++i) {
      const ChartRecord& c = res.charts[i];
      std::cout << "chart " << i << ": " << subgroup_str(a.graph, c.subgroup)
                << ", lattice (" << c.l1.str() << ", " << c.l2.str() << "), frame ("
                << c.frame[0] << ", " << c.frame[1] << ")\n";
    }
    for (const GlueRecord& g : res.gluing)
      std::cout << "glue " << g.chart_a << "&" << g.chart_b << ": " << kind_name(g.kind)
                << " r1 = " << g.r1.str() << ", r2 = " << g.r2.str() << ", dir ("
                << g.dir1 << ", " << g.dir2 << ")\n";
  } else if (res.mismatch) {
    const MismatchReport& m = *res.mismatch;
    std::cout << "mismatch: l(" << word_str(a.graph, m.witness)
              << ") = " << oracle_value(m.value_a) << " vs " << oracle_value(m.value_b)
              << "\n";
  } else {
    std::cout << "undecided: " << res.coverage_error.value_or("no chart family coverage")
              << "\n";
  }
  return res.ok ? 0 : 1;
}

int cmd_develop(const Options& opt) {
  ExperimentConfig cfg;
  if (!opt.configs.empty()) cfg = load_config(opt.configs[0]);
  std::string format = report_format(opt, cfg, true);
  Rat eps_rat = !opt.epsilon.empty() ? parse_rational(opt.epsilon) : cfg.epsilon;
  if (eps_rat <= 0) throw UsageError("epsilon must be positive");
  double eps = eps_rat.convert_to<double>();
  if (opt.copies < 2) throw UsageError("need at least two copies");

  DevelopInput in;
  if (opt.fixture == "straight") {
    in = DevelopInput::exact({Rat(3), Rat(2)}, {0.0, 0.0}, {0, 0}, opt.copies);
    in.label = {"g", "bridge"};
  } else if (opt.fixture == "staircase") {
    // Tree case: axis pieces of g and h joined by two bridge copies,
    // l(g) = 2, l(h) = 3, d = 1; the period is l(g)+l(h)+2d exactly.
    in = DevelopInput::exact({Rat(2), Rat(1), Rat(3), Rat(1)}, {0.0, 0.0, 0.0, 0.0},
                             {0, 0, 0, 0}, opt.copies);
    in.label = {"g", "bridge", "h", "bridge"};
  } else if (opt.fixture == "bend") {
    // One-sided eps-bend: turning by asin(eps) at the slits keeps the strip
    // width exactly eps and the straightening residual within 8*eps.
    double th = std::asin(eps);
    in.seg_len = {1.0, 2.0, 1.0, 2.0};
    in.turn = {th, -th, -th, th};
    in.slit = {+1, 0, -1, 0};
    in.label = {"v0", "v1", "v2", "v3"};
    in.copies = opt.copies;
  } else {
    throw UsageError("unknown fixture '" + opt.fixture +
                     "' (expected straight, staircase or bend)");
  }

  Development dev = develop(in);
  Straightened st = straighten(dev);
  LengthBound lb = length_bound_check(dev, st, eps);

  std::string csv = development_csv(dev);
  std::string svg = development_svg(dev, &st);
  std::string out_dir = !opt.out.empty() ? opt.out : cfg.out_dir;

  std::string report;
  if (format == "json") {
    json axis = json::array();
    for (const Vec2& p : st.axis) axis.push_back(json::array({p.x, p.y}));
    json j{{"command", "develop"},
           {"fixture", opt.fixture},
           {"epsilon", to_string(eps_rat)},
           {"copies", dev.copies},
           {"period", json::array({dev.period.x, dev.period.y})},
           {"strip_width", dev.width()},
           {"translation_length", st.translation_length},
           {"hausdorff", st.hausdorff},
           {"anchor", st.anchor},
           {"axis", axis},
           {"residual", lb.residual},
           {"max_segment_excess", lb.max_segment_excess},
           {"ok", lb.ok}};
    if (dev.exact_period_len) j["exact_period_length"] = to_string(*dev.exact_period_len);
    if (st.exact_translation_length)
      j["exact_translation_length"] = to_string(*st.exact_translation_length);
    report = j.dump(2) + "\n";
  } else {
    std::ostringstream os;
    os << "fixture = " << opt.fixture << "\n"
       << "epsilon = " << to_string(eps_rat) << "\n"
       << "copies = " << dev.copies << "\n"
       << "period = (" << fmt_g(dev.period.x) << ", " << fmt_g(dev.period.y) << ")\n"
       << "strip width = " << fmt_g(dev.width()) << "\n"
       << "translation length = " << fmt_g(st.translation_length);
    if (st.exact_translation_length)
      os << " (exact " << to_string(*st.exact_translation_length) << ")";
    os << "\n"
       << "hausdorff = " << fmt_g(st.hausdorff) << "\n"
       << "residual = " << fmt_g(lb.residual) << "\n"
       << "max segment excess = " << fmt_g(lb.max_segment_excess) << "\n"
       << "within 8*epsilon = " << (lb.ok ? "yes" : "no") << "\n";
    report = os.str();
  }

  if (!out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::path dir(out_dir);
    fs::create_directories(dir);
    write_file(dir / "develop.csv", csv);
    write_file(dir / "develop.svg", svg);
    write_file(dir / (format == "json" ? "report.json" : "report.txt"), report);
  }

  if (format == "csv")
    std::cout << csv;
  else if (format == "svg")
    std::cout << svg;
  else
    std::cout << report;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"translation-length toolkit driver"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* cmd, int configs) {
    cmd->add_option("--config", opt.configs, "experiment config file")
        ->expected(configs)
        ->required(configs > 0);
    cmd->add_option("--format", opt.format, "text, json, csv or svg");
    return cmd;
  };

  CLI::App* validate = add_common(app.add_subcommand("validate", "check the defining graph"), 1);
  CLI::App* length = add_common(app.add_subcommand("length", "exact translation length"), 1);
  length->add_option("--word", opt.word, "word text or config word name")->required();
  CLI::App* gap = add_common(app.add_subcommand("gap", "lattice gap search"), 1);
  gap->add_option("--subgroups", opt.subgroups, "two config subgroup names, G,H")->required();
  gap->add_option("--budget", opt.budget, "lattice ball radius");
  CLI::App* reconstruct =
      add_common(app.add_subcommand("reconstruct", "rectangle from lengths"), 1);
  reconstruct->add_option("--subgroups", opt.subgroups, "two config subgroup names, G,H")
      ->required();
  reconstruct->add_option("--budget", opt.budget, "lattice ball radius");
  CLI::App* rigidity =
      add_common(app.add_subcommand("rigidity", "compare two length functions"), 2);
  rigidity->add_option("--seed", opt.seed, "sampling seed");
  CLI::App* develop = app.add_subcommand("develop", "plane development fixtures");
  develop->add_option("--config", opt.configs, "optional config for defaults")->expected(1);
  develop->add_option("--format", opt.format, "text, json, csv or svg");
  develop->add_option("fixture", opt.fixture, "straight, staircase or bend");
  develop->add_option("--epsilon", opt.epsilon, "bend scale, exact rational");
  develop->add_option("--copies", opt.copies, "periods to lay out");
  develop->add_option("--out", opt.out, "directory for develop.csv/develop.svg");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (validate->parsed()) return cmd_validate(opt);
    if (length->parsed()) return cmd_length(opt);
    if (gap->parsed()) return cmd_gap(opt);
    if (reconstruct->parsed()) return cmd_reconstruct(opt);
    if (rigidity->parsed()) return cmd_rigidity(opt);
    if (develop->parsed()) return cmd_develop(opt);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
