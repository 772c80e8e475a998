#include "quanta/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace quanta {

namespace {

[[noreturn]] void schema(const std::string& message) { throw Error(ErrorCode::Schema, message); }

const Json& field(const Json& doc, const char* key) {
  if (!doc.is_object()) schema("expected an object");
  auto it = doc.find(key);
  if (it == doc.end()) schema(std::string("missing field \"") + key + "\"");
  return *it;
}

std::string text(const Json& v, const char* what) {
  if (!v.is_string()) schema(std::string(what) + " must be a string");
  return v.get<std::string>();
}

std::vector<std::string> strings(const Json& v, const char* what) {
  if (!v.is_array()) schema(std::string(what) + " must be an array");
  std::vector<std::string> out;
  for (const auto& s : v) out.push_back(text(s, what));
  return out;
}

Integer integer(const Json& v, const char* what) {
  if (v.is_number_integer()) return v.is_number_unsigned() ? Integer(v.get<unsigned long>()) : Integer(v.get<long>());
  if (v.is_string()) return parse_integer(v.get<std::string>());
  schema(std::string(what) + " must be an integer");
}

Json integer_json(const Integer& v) {
  if (v.fits_slong_p()) return Json(v.get_si());
  return Json(v.get_str());
}

Weight weight(const Json& v) {
  if (v.is_string() && v.get<std::string>() == "silent") return Weight::silent();
  return Weight(integer(v, "weight"));
}

Json weight_json(const Weight& w) { return w.is_silent() ? Json("silent") : integer_json(w.value()); }

Alphabet alphabet(const Json& doc) {
  try {
    return Alphabet(strings(field(doc, "alphabet"), "alphabet"));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Schema) throw;
    schema(e.what());
  }
}

/// States, initial and accepting; returns the name lookup.
template <class A>
void read_states(const Json& doc, A& a) {
  auto names = strings(field(doc, "states"), "states");
  if (names.empty()) schema("an automaton needs at least one state");
  for (const auto& n : names) {
    if (a.find_state(n)) schema("duplicate state \"" + n + "\"");
    a.add_state(n);
  }
  const Json& init = field(doc, "initial");
  if (init.is_array()) {
    auto list = strings(init, "initial");
    if (list.empty()) schema("initial must name a state");
    bool first = true;
    for (const auto& n : list) {
      auto s = a.find_state(n);
      if (!s) schema("unknown initial state \"" + n + "\"");
      if (first) a.set_initial(*s);
      else a.add_initial(*s);
      first = false;
    }
  } else {
    auto n = text(init, "initial");
    auto s = a.find_state(n);
    if (!s) schema("unknown initial state \"" + n + "\"");
    a.set_initial(*s);
  }
  auto acc = doc.contains("accepting") ? strings(doc.at("accepting"), "accepting") : std::vector<std::string>{};
  for (const auto& n : acc) {
    auto s = a.find_state(n);
    if (!s) schema("unknown accepting state \"" + n + "\"");
    a.set_accepting(*s);
  }
}

template <class A>
StateId state_ref(const A& a, const Json& t, const char* key) {
  auto n = text(field(t, key), key);
  auto s = a.find_state(n);
  if (!s) schema("unknown state \"" + n + "\"");
  return *s;
}

LetterId letter_ref(const Alphabet& sigma, const Json& t) {
  auto l = text(field(t, "letter"), "letter");
  auto id = sigma.find(l);
  if (!id) schema("unknown letter \"" + l + "\"");
  return *id;
}

template <class A, class LabelJson>
Json states_json(const A& a, LabelJson label_json) {
  Json doc;
  doc["alphabet"] = a.alphabet().letters();
  std::vector<std::string> names, acc;
  for (StateId s = 0; s < a.num_states(); ++s) {
    names.push_back(a.state_name(s));
    if (a.is_accepting(s)) acc.push_back(a.state_name(s));
  }
  doc["states"] = names;
  if (a.initial_states().size() == 1) {
    doc["initial"] = a.state_name(a.initial());
  } else {
    std::vector<std::string> init;
    for (auto s : a.initial_states()) init.push_back(a.state_name(s));
    doc["initial"] = init;
  }
  doc["accepting"] = acc;
  Json ts = Json::array();
  for (const auto& t : a.transitions()) {
    Json j{{"from", a.state_name(t.from)}, {"letter", a.alphabet().letter(t.letter)}, {"to", a.state_name(t.to)}};
    label_json(j, t.label);
    ts.push_back(std::move(j));
  }
  doc["transitions"] = std::move(ts);
  return doc;
}

ValueFunction value_function(const Json& doc) {
  auto name = text(field(doc, "valueFunction"), "valueFunction");
  std::optional<Integer> bound;
  if (doc.contains("bound")) bound = integer(doc.at("bound"), "bound");
  try {
    return parse_value_function(name, bound);
  } catch (const Error& e) {
    schema(e.what());
  }
}

void value_function_json(Json& doc, const ValueFunction& fn) {
  if (const auto* f = std::get_if<FinValFn>(&fn)) {
    doc["valueFunction"] = name(*f);
    if (f->kind == FinValFn::Kind::BSum) doc["bound"] = integer_json(f->bound);
  } else {
    doc["valueFunction"] = name(std::get<InfValFn>(fn));
  }
}

InfValFn inf_value_function(const Json& v, const char* what) {
  auto fn = parse_value_function(text(v, what), std::nullopt);
  if (!std::holds_alternative<InfValFn>(fn)) schema(std::string(what) + " must be an infinite-word value function");
  return std::get<InfValFn>(fn);
}

std::size_t count(const Json& v, const char* what) {
  Integer i = integer(v, what);
  if (i < 0 || !i.fits_ulong_p()) schema(std::string(what) + " out of range");
  return i.get_ui();
}

}  // namespace

std::string to_string(DocumentKind kind) {
  switch (kind) {
    case DocumentKind::Automaton: return "automaton";
    case DocumentKind::Nwa: return "nwa";
    case DocumentKind::Mca: return "mca";
    case DocumentKind::Chain: return "chain";
  }
  return "unknown";
}

DocumentKind detect_kind(const Json& doc) {
  if (!doc.is_object()) schema("document must be a JSON object");
  if (doc.contains("master")) return DocumentKind::Nwa;
  if (doc.contains("edges")) return DocumentKind::Chain;
  if (doc.contains("counters")) return DocumentKind::Mca;
  if (doc.contains("transitions")) return DocumentKind::Automaton;
  schema("cannot tell what kind of document this is");
}

std::string read_text(const std::string& path, std::istream& stdin_stream) {
  std::ostringstream buf;
  if (path == "-") {
    buf << stdin_stream.rdbuf();
  } else {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + path);
    buf << in.rdbuf();
  }
  return buf.str();
}

Json read_json(const std::string& path, std::istream& stdin_stream) {
  auto content = read_text(path, stdin_stream);
  try {
    return Json::parse(content);
  } catch (const Json::parse_error& e) {
    schema(path + ": " + e.what());
  }
}

WeightedAutomaton automaton_from_json(const Json& doc) {
  auto fn = value_function(doc);
  auto mode = std::holds_alternative<FinValFn>(fn) ? WordMode::Finite : WordMode::Infinite;
  WeightedAutomaton wa(alphabet(doc), fn, mode);
  read_states(doc, wa);
  const Json& ts = field(doc, "transitions");
  if (!ts.is_array()) schema("transitions must be an array");
  for (const auto& t : ts) {
    Weight w = t.contains("weight") ? weight(t.at("weight")) : Weight(0);
    wa.add_transition(state_ref(wa, t, "from"), letter_ref(wa.alphabet(), t), state_ref(wa, t, "to"), w);
  }
  return wa;
}

Json to_json(const WeightedAutomaton& wa) {
  auto doc = states_json(wa, [](Json& j, const Weight& w) { j["weight"] = weight_json(w); });
  value_function_json(doc, wa.value_function());
  return doc;
}

Dfa dfa_from_json(const Json& doc) {
  Dfa d(alphabet(doc));
  read_states(doc, d);
  const Json& ts = field(doc, "transitions");
  if (!ts.is_array()) schema("transitions must be an array");
  for (const auto& t : ts) {
    d.add_transition(state_ref(d, t, "from"), letter_ref(d.alphabet(), t), state_ref(d, t, "to"), std::monostate{});
  }
  return d;
}

NestedWeightedAutomaton nwa_from_json(const Json& doc) {
  NestedWeightedAutomaton nwa;
  const Json& m = field(doc, "master");
  nwa.master = MasterAutomaton(alphabet(m));
  read_states(m, nwa.master);
  const Json& slaves = field(doc, "slaves");
  if (!slaves.is_array()) schema("slaves must be an array");
  const Json& ts = field(m, "transitions");
  if (!ts.is_array()) schema("transitions must be an array");
  for (const auto& t : ts) {
    std::size_t label = count(field(t, "label"), "label");
    if (label < 1) schema("slave labels start at 1");
    nwa.master.add_transition(state_ref(nwa.master, t, "from"), letter_ref(nwa.master.alphabet(), t),
                              state_ref(nwa.master, t, "to"), static_cast<SlaveIndex>(label - 1));
  }
  nwa.master_fn = inf_value_function(field(doc, "masterFunction"), "masterFunction");
  for (const auto& s : slaves) nwa.slaves.push_back(automaton_from_json(s));
  if (doc.contains("dummies")) {
    const Json& d = doc.at("dummies");
    if (!d.is_array()) schema("dummies must be an array");
    for (const auto& i : d) {
      std::size_t idx = count(i, "dummy index");
      if (idx < 1) schema("dummy indices start at 1");
      nwa.dummies.push_back(static_cast<SlaveIndex>(idx - 1));
    }
    std::sort(nwa.dummies.begin(), nwa.dummies.end());
    nwa.dummies.erase(std::unique(nwa.dummies.begin(), nwa.dummies.end()), nwa.dummies.end());
  }
  return nwa;
}

Json to_json(const NestedWeightedAutomaton& nwa) {
  Json doc;
  doc["master"] = states_json(nwa.master, [](Json& j, SlaveIndex i) { j["label"] = i + 1; });
  doc["masterFunction"] = name(nwa.master_fn);
  Json slaves = Json::array();
  for (const auto& s : nwa.slaves) slaves.push_back(to_json(s));
  doc["slaves"] = std::move(slaves);
  Json dummies = Json::array();
  for (auto d : nwa.dummies) dummies.push_back(d + 1);
  doc["dummies"] = std::move(dummies);
  return doc;
}

MonitorCounterAutomaton mca_from_json(const Json& doc) {
  std::size_t k = count(field(doc, "counters"), "counters");
  MonitorCounterAutomaton mca(alphabet(doc), inf_value_function(field(doc, "valueFunction"), "valueFunction"), k);
  read_states(doc, mca);
  const Json& ts = field(doc, "transitions");
  if (!ts.is_array()) schema("transitions must be an array");
  for (const auto& t : ts) {
    const Json& ins = field(t, "instructions");
    if (!ins.is_array()) schema("instructions must be an array");
    InstructionVector v;
    for (const auto& i : ins) {
      if (i.is_string() && i.get<std::string>() == "start") v.push_back(CounterInstruction::start());
      else if (i.is_string() && i.get<std::string>() == "terminate") v.push_back(CounterInstruction::terminate());
      else v.push_back(CounterInstruction::add(integer(i, "instruction")));
    }
    mca.add_transition(state_ref(mca, t, "from"), letter_ref(mca.alphabet(), t), state_ref(mca, t, "to"), std::move(v));
  }
  return mca;
}

Json to_json(const MonitorCounterAutomaton& mca) {
  auto doc = states_json(mca, [](Json& j, const InstructionVector& v) {
    Json ins = Json::array();
    for (const auto& i : v) {
      switch (i.op) {
        case CounterInstruction::Op::Start: ins.push_back("start"); break;
        case CounterInstruction::Op::Terminate: ins.push_back("terminate"); break;
        case CounterInstruction::Op::Add: ins.push_back(integer_json(i.amount)); break;
      }
    }
    j["instructions"] = std::move(ins);
  });
  doc["counters"] = mca.counters();
  doc["valueFunction"] = name(mca.value_function());
  return doc;
}

LabeledMarkovChain chain_from_json(const Json& doc) {
  LabeledMarkovChain m(alphabet(doc));
  auto names = strings(field(doc, "states"), "states");
  if (names.empty()) schema("a chain needs at least one state");
  for (const auto& n : names) {
    if (m.find_state(n)) schema("duplicate state \"" + n + "\"");
    m.add_state(n);
  }
  auto init = text(field(doc, "initial"), "initial");
  auto s0 = m.find_state(init);
  if (!s0) schema("unknown initial state \"" + init + "\"");
  m.set_initial(*s0);
  const Json& es = field(doc, "edges");
  if (!es.is_array()) schema("edges must be an array");
  auto ref = [&](const Json& e, const char* key) {
    auto n = text(field(e, key), key);
    auto s = m.find_state(n);
    if (!s) schema("unknown state \"" + n + "\"");
    return *s;
  };
  for (const auto& e : es) {
    Rational p = parse_rational(text(field(e, "prob"), "prob"));
    Weight w = e.contains("weight") ? weight(e.at("weight")) : Weight::silent();
    m.add_edge(ref(e, "from"), letter_ref(m.alphabet(), e), ref(e, "to"), p, w);
  }
  return m;
}

Json to_json(const LabeledMarkovChain& m) {
  Json doc;
  doc["alphabet"] = m.alphabet().letters();
  std::vector<std::string> names;
  for (StateId s = 0; s < m.num_states(); ++s) names.push_back(m.state_name(s));
  doc["states"] = names;
  doc["initial"] = m.state_name(m.initial());
  Json es = Json::array();
  for (const auto& e : m.edges()) {
    Json j{{"from", m.state_name(e.from)},
           {"letter", m.alphabet().letter(e.letter)},
           {"to", m.state_name(e.to)},
           {"prob", to_string(e.prob)}};
    if (!e.weight.is_silent()) j["weight"] = weight_json(e.weight);
    es.push_back(std::move(j));
  }
  doc["edges"] = std::move(es);
  return doc;
}

Json to_json(const DiscreteDistribution& d) {
  Json points = Json::array();
  for (const auto& p : d.points) points.push_back({{"value", p.value.to_string()}, {"mass", to_string(p.mass)}});
  return {{"points", std::move(points)}, {"rejectionMass", to_string(d.rejection_mass)}};
}

Json to_json(const AnalysisReport& report) {
  Json doc;
  doc["expected"] = report.expected ? Json(report.expected->to_string()) : Json(nullptr);
  doc["exact"] = report.exact;
  doc["method"] = method_tag(report.method);
  doc["params"] = report.params;
  if (report.distribution) doc["distribution"] = to_json(*report.distribution);
  if (report.almost_sure_witness) doc["almostSureWitness"] = report.almost_sure_witness->to_string();
  if (report.distribution_exact_up_to) doc["distributionExactUpTo"] = to_string(*report.distribution_exact_up_to);
  return doc;
}

Json to_json(const ValidationReport& report) {
  Json issues = Json::array();
  for (const auto& i : report.issues) {
    issues.push_back({{"severity", i.severity == Issue::Severity::Error ? "error" : "warning"},
                      {"code", i.code},
                      {"message", i.message}});
  }
  return {{"ok", report.ok()}, {"issues", std::move(issues)}};
}

Json to_json(const AcceptanceReport& report) {
  return {{"almostSureAccepting", report.almost_sure},
          {"diagnostics", report.diagnostics},
          {"rejectingMass", to_string(report.rejecting_mass)}};
}

Cnf parse_dimacs(std::string_view content) {
  std::istringstream in{std::string(content)};
  std::string line;
  Cnf cnf;
  std::optional<std::size_t> declared;
  std::vector<int> current;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok) || tok == "c" || tok == "%") continue;
    if (tok == "p") {
      std::string fmt;
      long n = 0, m = 0;
      if (!(ls >> fmt >> n >> m) || fmt != "cnf" || n < 1 || m < 1) schema("malformed DIMACS header: " + line);
      cnf.variables = static_cast<std::size_t>(n);
      declared = static_cast<std::size_t>(m);
      continue;
    }
    if (!declared) schema("DIMACS clause before the header");
    std::istringstream cs(line);
    long lit = 0;
    while (cs >> lit) {
      if (lit == 0) {
        cnf.clauses.push_back(std::move(current));
        current.clear();
      } else {
        if (static_cast<std::size_t>(std::labs(lit)) > cnf.variables) schema("literal out of range: " + std::to_string(lit));
        current.push_back(static_cast<int>(lit));
      }
    }
    if (!cs.eof()) schema("malformed DIMACS clause: " + line);
  }
  if (!declared) schema("missing DIMACS header");
  if (!current.empty()) cnf.clauses.push_back(std::move(current));
  if (cnf.clauses.size() != *declared) {
    schema("DIMACS header declares " + std::to_string(*declared) + " clauses, found " + std::to_string(cnf.clauses.size()));
  }
  return cnf;
}

}  // namespace quanta
