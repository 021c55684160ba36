#include "cmt/refs.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace cmt {

namespace {

struct Tokens {
  std::vector<std::string> toks;
  size_t pos = 0;

  explicit Tokens(const std::string& text) {
    std::istringstream in(text);
    std::string t;
    while (in >> t) toks.push_back(t);
  }
  bool done() const { return pos >= toks.size(); }
  const std::string& peek() const {
    if (done()) throw BadInput("unexpected end of reference");
    return toks[pos];
  }
  std::string next() {
    std::string t = peek();
    ++pos;
    return t;
  }
  void expect(const std::string& t) {
    if (next() != t) throw BadInput("expected '" + t + "'");
  }
};

bool looks_rational(const std::string& t) {
  if (t.empty()) return false;
  for (char c : t)
    if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '/' || c == '-'))
      return false;
  return true;
}

bool looks_integer(const std::string& t) {
  if (t.empty()) return false;
  for (char c : t)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

CylinderMeasure measure_expr(Tokens& tk);

ClopenSet clopen_expr(Tokens& tk) {
  tk.expect("[");
  std::vector<BinWord> gens;
  while (tk.peek() != "]") gens.push_back(BinWord(tk.next()));
  tk.expect("]");
  return ClopenSet::from_generators(std::move(gens));
}

SequenceSetFamily family_expr(Tokens& tk) {
  tk.expect("{");
  SequenceSetFamily fam;
  while (tk.peek() != "}") fam.sets.push_back(clopen_expr(tk));
  tk.expect("}");
  return fam;
}

SelectionStrategy strategy_expr(Tokens& tk) {
  tk.expect("(");
  auto table = std::make_shared<std::map<BinWord, uint64_t>>();
  size_t max_level = 0;
  std::vector<uint64_t> level_max;
  while (tk.peek() != ")") {
    std::string entry = tk.next();
    size_t colon = entry.find(':');
    if (colon == std::string::npos)
      throw BadInput("strategy entry needs history:index, got " + entry);
    BinWord h(entry.substr(0, colon));
    uint64_t idx = std::stoull(entry.substr(colon + 1));
    (*table)[h] = idx;
    max_level = std::max(max_level, h.size());
    if (level_max.size() <= h.size()) level_max.resize(h.size() + 1, 0);
    level_max[h.size()] = std::max(level_max[h.size()], idx);
  }
  tk.expect(")");
  SelectionStrategy s;
  s.label = "tree";
  s.next_index = [table](const BinWord& h) -> uint64_t {
    auto it = table->find(h);
    return it == table->end() ? UINT64_MAX : it->second;
  };
  s.fuel = [level_max](size_t lvl) -> uint64_t {
    return lvl < level_max.size() ? level_max[lvl] + 1 : 0;
  };
  return s;
}

CylinderMeasure measure_expr(Tokens& tk) {
  std::string tag = tk.next();
  if (tag == "FAIR") return fair_coin();
  if (tag == "BERNOULLI") return bernoulli(rat_parse(tk.next()));
  if (tag == "DIRAC")
    return dirac(PointOracle::periodic(BinWord(tk.next())));
  if (tag == "MIX") {
    std::vector<Rat> weights;
    std::vector<CylinderMeasure> parts;
    if (looks_integer(tk.peek())) {
      size_t k = std::stoul(tk.next());
      for (size_t i = 0; i < k; ++i) {
        weights.push_back(rat_parse(tk.next()));
        parts.push_back(measure_expr(tk));
      }
    } else {
      // Greedy form: read pairs while a rational follows. Nested MIX
      // inside MIX needs the counted form.
      do {
        weights.push_back(rat_parse(tk.next()));
        parts.push_back(measure_expr(tk));
      } while (!tk.done() && looks_rational(tk.peek()));
    }
    return mix(weights, parts);
  }
  if (tag == "SCALE") {
    Rat c = rat_parse(tk.next());
    return scale(c, measure_expr(tk));
  }
  if (tag == "RESTRICT") {
    CylinderMeasure m = measure_expr(tk);
    return restrict_to_clopen(m, clopen_expr(tk));
  }
  if (tag == "SUM") {
    if (!looks_integer(tk.peek()))
      throw BadInput("SUM needs a component count");
    size_t k = std::stoul(tk.next());
    std::vector<CylinderMeasure> parts;
    for (size_t i = 0; i < k; ++i) parts.push_back(measure_expr(tk));
    return disjoint_sum(parts);
  }
  throw BadInput("unknown measure tag: " + tag);
}

MonotoneMachine machine_expr(Tokens& tk) {
  std::string tag = tk.next();
  if (tag == "ID") return identity_machine();
  if (tag == "VN") return von_neumann();
  if (tag == "TAIL") return tail_map();
  if (tag == "PROJ_EVEN") return project_even();
  if (tag == "PROJ_ODD") return project_odd();
  if (tag == "CDFINV") return cdf_inversion_map(measure_expr(tk));
  if (tag == "GRAPH") return graph_machine(machine_expr(tk));
  if (tag == "COMPOSE") {
    MonotoneMachine m2 = machine_expr(tk);
    MonotoneMachine m1 = machine_expr(tk);
    return compose(m2, m1);
  }
  if (tag == "SELECT") return selection_machine(strategy_expr(tk));
  if (tag == "SEQSET") {
    auto r = seqset_machine(family_expr(tk));
    if (auto* m = std::get_if<MonotoneMachine>(&r)) return *m;
    const auto& err = std::get<SeqSetError>(r);
    if (auto* h = std::get_if<HalfMassViolation>(&err))
      throw BadInput("SEQSET set " + std::to_string(h->index) +
                     " has fair mass " + rat_str(h->mass) + ", want 1/2");
    const auto& w = std::get<IndependenceWitness>(err);
    std::string sets;
    for (size_t i : w.subfamily) sets += (sets.empty() ? "" : ",") + std::to_string(i);
    throw BadInput("SEQSET family is dependent on {" + sets + "}: mass " +
                   rat_str(w.intersection_mass) + " != " +
                   rat_str(w.product_mass));
  }
  if (tag == "TRANSPORT") {
    std::string path = tk.next();
    std::ifstream in(path);
    if (!in) throw BadInput("cannot open plan file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return transport_machine(plan_from_text(ss.str()));
  }
  throw BadInput("unknown machine tag: " + tag);
}

void strip_header(Tokens& tk) {
  if (!tk.done() && tk.peek() == "MEASURE") {
    tk.next();
    tk.next();  // label
  }
}

}  // namespace

CylinderMeasure parse_measure(const std::string& text) {
  Tokens tk(text);
  strip_header(tk);
  CylinderMeasure m = measure_expr(tk);
  if (!tk.done()) throw BadInput("trailing tokens in measure reference");
  return m;
}

ProductCylinderMeasure parse_product_measure(const std::string& text) {
  Tokens tk(text);
  std::string tag = tk.next();
  if (tag == "PRODUCT") {
    CylinderMeasure m1 = measure_expr(tk);
    CylinderMeasure m2 = measure_expr(tk);
    if (!tk.done()) throw BadInput("trailing tokens in product reference");
    return product(m1, m2);
  }
  if (tag == "SPLIT") {
    CylinderMeasure m = measure_expr(tk);
    if (!tk.done()) throw BadInput("trailing tokens in product reference");
    return split_transfer(m);
  }
  throw BadInput("product measure must be PRODUCT or SPLIT, got " + tag);
}

MonotoneMachine parse_machine(const std::string& text) {
  Tokens tk(text);
  MonotoneMachine m = machine_expr(tk);
  if (!tk.done()) throw BadInput("trailing tokens in machine reference");
  return m;
}

ClopenSet parse_clopen(const std::string& text) {
  Tokens tk(text);
  ClopenSet c = clopen_expr(tk);
  if (!tk.done()) throw BadInput("trailing tokens in clopen reference");
  return c;
}

SequenceSetFamily parse_family(const std::string& text) {
  Tokens tk(text);
  SequenceSetFamily f = family_expr(tk);
  if (!tk.done()) throw BadInput("trailing tokens in family reference");
  return f;
}

PointOracle parse_point(const std::string& text) {
  std::string t = text;
  // Tolerate a decorative trailing ellipsis.
  while (!t.empty() && (t.back() == '.' || static_cast<unsigned char>(t.back()) > 127))
    t.pop_back();
  BinWord pattern(t);
  if (pattern.empty()) throw BadInput("point pattern must be nonempty");
  return PointOracle::periodic(pattern);
}

std::string clopen_str(const ClopenSet& c) {
  std::string out = "[";
  for (const auto& g : c.generators()) out += " " + g.display();
  return out + " ]";
}

std::string interval_str(const RatInterval& iv) { return iv.str(); }

std::string plan_to_text(const TransportPlan& plan, const std::string& mu_ref,
                         const std::string& nu_prime_ref,
                         const std::string& x0_ref) {
  std::ostringstream out;
  out << "PLAN\n";
  out << "MU " << mu_ref << "\n";
  out << "NUPRIME " << nu_prime_ref << "\n";
  out << "X0 " << x0_ref << "\n";
  out << "STAGES " << plan.built_depth() << "\n";
  for (size_t s = 1; s <= plan.built_depth(); ++s) {
    out << "STAGE " << s << "\n";
    for (const auto& mv : plan.stage(s).moves) {
      out << "MOVE " << mv.source.column.display() << " "
          << rat_str(mv.source.y_lo) << " " << rat_str(mv.source.y_hi)
          << " -> " << mv.target.column.display() << " "
          << rat_str(mv.target.y_lo) << " " << rat_str(mv.target.y_hi)
          << " MASS " << rat_str(mv.mass) << "\n";
    }
  }
  return out.str();
}

std::shared_ptr<TransportPlan> plan_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::string mu_ref, nuprime_ref, x0_ref;
  size_t stages = 0;
  std::vector<std::string> move_lines;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "PLAN" || key == "STAGE") continue;
    std::string rest = line.substr(std::min(line.size(), key.size() + 1));
    if (key == "MU")
      mu_ref = rest;
    else if (key == "NUPRIME")
      nuprime_ref = rest;
    else if (key == "X0")
      x0_ref = rest;
    else if (key == "STAGES")
      stages = std::stoul(rest);
    else if (key == "MOVE")
      move_lines.push_back(line);
    else
      throw BadInput("unknown plan line: " + key);
  }
  if (mu_ref.empty() || nuprime_ref.empty() || x0_ref.empty())
    throw BadInput("plan file is missing its instance header");
  WitnessInstance inst = make_instance(parse_measure(mu_ref),
                                       parse_measure(nuprime_ref),
                                       parse_point(x0_ref));
  auto plan = std::make_shared<TransportPlan>(inst, stages);
  // Integrity: recorded moves must match the rebuilt stages line for line.
  std::string rebuilt = plan_to_text(*plan, mu_ref, nuprime_ref, x0_ref);
  size_t found = 0;
  std::istringstream rin(rebuilt);
  while (std::getline(rin, line)) {
    if (line.rfind("MOVE ", 0) != 0) continue;
    if (found >= move_lines.size() || move_lines[found] != line)
      throw BadInput("plan file does not match its instance");
    ++found;
  }
  if (found != move_lines.size())
    throw BadInput("plan file does not match its instance");
  return plan;
}

}  // namespace cmt
