#include "quanta/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "quanta/io.hpp"
#include "quanta/translate.hpp"

namespace quanta {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Schema:
    case ErrorCode::InvalidArgument: return kExitInput;
    case ErrorCode::OpenProblem:
    case ErrorCode::SumUnboundedBelow:
    case ErrorCode::NonDeterministic:
    case ErrorCode::NotDualizable:
    case ErrorCode::ResourceLimit:
    case ErrorCode::DepthCap: return kExitUnsupported;
    default: return kExitViolation;
  }
}

namespace {

std::string decimal(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("QUANTA_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "QUANTA_SEED must be an unsigned integer");
    }
  }
  return 0;
}

void require_valid(const ValidationReport& report, const std::string& what) {
  if (report.ok()) return;
  std::string message = what + " is invalid";
  for (const auto& i : report.issues) {
    if (i.severity == Issue::Severity::Error) message += "; " + i.code + ": " + i.message;
  }
  throw Error(ErrorCode::Schema, message);
}

/// Validation minus determinism, which the analyses report themselves.
void require_valid_nwa(const NestedWeightedAutomaton& nwa) {
  auto report = validate_nwa(nwa);
  std::erase_if(report.issues, [](const Issue& i) { return i.code == "nondeterministic"; });
  require_valid(report, "NWA");
}

LabeledMarkovChain load_chain(const std::string& path, std::istream& in) {
  auto m = chain_from_json(read_json(path, in));
  require_valid(validate_chain(m), "chain");
  return m;
}

struct Loaded {
  DocumentKind kind;
  std::optional<NestedWeightedAutomaton> nwa;
  std::optional<MonitorCounterAutomaton> mca;
  std::optional<WeightedAutomaton> wa;
  std::optional<LabeledMarkovChain> chain;

  Simulable simulable() const {
    if (nwa) return &*nwa;
    if (mca) return &*mca;
    if (wa) return &*wa;
    throw Error(ErrorCode::InvalidArgument, "a chain cannot be simulated on its own");
  }
  const Alphabet& alphabet() const {
    if (nwa) return nwa->alphabet();
    if (mca) return mca->alphabet();
    if (wa) return wa->alphabet();
    return chain->alphabet();
  }
};

Loaded load_any(const std::string& path, std::istream& in) {
  auto doc = read_json(path, in);
  Loaded l{detect_kind(doc), {}, {}, {}, {}};
  switch (l.kind) {
    case DocumentKind::Nwa: l.nwa = nwa_from_json(doc); break;
    case DocumentKind::Mca: l.mca = mca_from_json(doc); break;
    case DocumentKind::Automaton: l.wa = automaton_from_json(doc); break;
    case DocumentKind::Chain: l.chain = chain_from_json(doc); break;
  }
  return l;
}

void print(std::ostream& out, const Json& doc) { out << doc.dump(2) << "\n"; }

struct Options {
  // shared
  std::string input, nwa, mca, wa, chain, kind, output;
  // analyze
  std::string question = "expected";
  std::vector<std::string> lambdas;
  bool approx = false;
  std::string epsilon = "1/100";
  // translate
  std::size_t width = 0;
  // simulate
  std::size_t horizon = 1000, samples = 1000;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> burn_in;
  unsigned threads = 0;
  // generate
  std::size_t k = 2;
  std::string file, alphabet = "a,b", prob = "1/2";
  std::vector<std::string> files;
  // equivalence
  std::string left, right, mode = "per-position";
  std::size_t max_len = 10, lag = 2;
};

void emit(const Options& o, std::ostream& out, const Json& doc) {
  if (o.output.empty() || o.output == "-") {
    print(out, doc);
    return;
  }
  std::ofstream f(o.output);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write " + o.output);
  print(f, doc);
}

int cmd_validate(const Options& o, std::istream& in, std::ostream& out) {
  std::string path = o.input;
  if (path.empty()) throw Error(ErrorCode::InvalidArgument, "validate needs a document");
  auto doc = read_json(path, in);
  DocumentKind kind = detect_kind(doc);
  if (!o.kind.empty()) {
    if (o.kind == "nwa") kind = DocumentKind::Nwa;
    else if (o.kind == "mca") kind = DocumentKind::Mca;
    else if (o.kind == "chain") kind = DocumentKind::Chain;
    else if (o.kind == "automaton") kind = DocumentKind::Automaton;
    else throw Error(ErrorCode::InvalidArgument, "unknown kind " + o.kind);
  }
  ValidationReport report;
  switch (kind) {
    case DocumentKind::Nwa: report = validate_nwa(nwa_from_json(doc)); break;
    case DocumentKind::Mca: report = validate_mca(mca_from_json(doc)); break;
    case DocumentKind::Chain: report = validate_chain(chain_from_json(doc)); break;
    case DocumentKind::Automaton: {
      auto wa = automaton_from_json(doc);
      if (wa.word_mode() == WordMode::Finite) {
        validate_slave(wa, "automaton", report);
      } else if (!wa.is_deterministic()) {
        report.error("nondeterministic", "automaton is non-deterministic");
      }
      break;
    }
  }
  Json j = to_json(report);
  j["kind"] = to_string(kind);
  print(out, j);
  return report.ok() ? kExitOk : kExitViolation;
}

int cmd_translate(const std::string& direction, const Options& o, std::istream& in, std::ostream& out) {
  if (direction == "nwa-to-mca") {
    auto nwa = nwa_from_json(read_json(o.input, in));
    require_valid(validate_nwa(nwa), "NWA");
    emit(o, out, to_json(nwa_to_mca(nwa, o.width)));
  } else {
    auto mca = mca_from_json(read_json(o.input, in));
    require_valid(validate_mca(mca), "MCA");
    emit(o, out, to_json(mca_to_nwa(mca)));
  }
  return kExitOk;
}

Json cdf_table(const DiscreteDistribution& d, const std::vector<Rational>& lambdas) {
  Json rows = Json::array();
  for (const auto& l : lambdas) rows.push_back({{"lambda", to_string(l)}, {"cdf", to_string(d.cdf(ExtValue(l)))}});
  return rows;
}

int cmd_analyze(const Options& o, std::istream& in, std::ostream& out) {
  if (o.nwa.empty() == o.wa.empty()) throw Error(ErrorCode::InvalidArgument, "analyze needs exactly one of --nwa or --wa");
  if (o.chain.empty()) throw Error(ErrorCode::InvalidArgument, "analyze needs --chain");
  std::vector<Rational> lambdas;
  for (const auto& l : o.lambdas) lambdas.push_back(parse_rational(l));
  std::optional<Rational> top;
  if (!lambdas.empty()) top = *std::max_element(lambdas.begin(), lambdas.end());
  auto m = load_chain(o.chain, in);

  AnalysisReport report;
  if (!o.wa.empty()) {
    auto wa = automaton_from_json(read_json(o.wa, in));
    wa.require_deterministic("weighted automaton");
    if (o.question == "almost-sure" && lambdas.empty()) {
      throw Error(ErrorCode::InvalidArgument, "almost-sure acceptance applies to NWA documents");
    }
    report = analyze_deterministic_wa(wa, m);
  } else {
    auto nwa = nwa_from_json(read_json(o.nwa, in));
    require_valid_nwa(nwa);
    if (o.question == "almost-sure" && lambdas.empty()) {
      auto acc = almost_sure_acceptance(nwa, m);
      print(out, to_json(acc));
      return acc.almost_sure ? kExitOk : kExitViolation;
    }
    if (o.approx) {
      report = approx_inf_sum(nwa, m, parse_rational(o.epsilon));
    } else {
      report = analyze_nwa(nwa, m, o.question == "expected" ? std::nullopt : top);
    }
  }

  Json doc;
  if (o.question == "expected") {
    if (!report.expected) throw Error(ErrorCode::OpenProblem, "no expected value is available for this automaton");
    doc = {{"expected", report.expected->to_string()},
           {"exact", report.exact},
           {"method", method_tag(report.method)},
           {"params", report.params}};
  } else if (o.question == "distribution") {
    doc = to_json(report);
    if (report.distribution) doc["cdf"] = cdf_table(*report.distribution, lambdas);
  } else if (o.question == "almost-sure") {
    if (!report.distribution) throw Error(ErrorCode::OpenProblem, "no distribution is available for this automaton");
    Json rows = Json::array();
    for (const auto& l : lambdas) {
      rows.push_back({{"lambda", to_string(l)}, {"almostSure", report.distribution->cdf(ExtValue(l)) == 1}});
    }
    doc = {{"answers", std::move(rows)}, {"method", method_tag(report.method)}, {"exact", report.exact}};
    if (report.almost_sure_witness) doc["almostSureWitness"] = report.almost_sure_witness->to_string();
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown question " + o.question);
  }
  print(out, doc);
  return kExitOk;
}

int cmd_simulate(const Options& o, std::istream& in, std::ostream& out) {
  if (o.chain.empty()) throw Error(ErrorCode::InvalidArgument, "simulate needs --chain");
  auto m = load_chain(o.chain, in);
  MonteCarloOptions mc;
  mc.horizon = o.horizon;
  mc.samples = o.samples;
  mc.seed = o.seed ? *o.seed : default_seed();
  mc.burn_in = o.burn_in;
  mc.threads = o.threads;
  MonteCarloResult r;
  if (!o.nwa.empty()) {
    auto nwa = nwa_from_json(read_json(o.nwa, in));
    require_valid_nwa(nwa);
    r = monte_carlo_estimate(nwa, m, mc);
  } else if (!o.mca.empty()) {
    auto mca = mca_from_json(read_json(o.mca, in));
    require_valid(validate_mca(mca), "MCA");
    r = monte_carlo_estimate(mca, m, mc);
  } else if (!o.wa.empty()) {
    r = monte_carlo_estimate(automaton_from_json(read_json(o.wa, in)), m, mc);
  } else {
    throw Error(ErrorCode::InvalidArgument, "simulate needs --nwa, --mca or --wa");
  }
  print(out, {{"mean", r.accepted ? Json(decimal(r.mean)) : Json(nullptr)},
              {"variance", decimal(r.variance)},
              {"standardError", r.accepted ? Json(decimal(r.standard_error())) : Json(nullptr)},
              {"rejectionRate", decimal(r.rejection_rate)},
              {"samples", r.samples},
              {"accepted", r.accepted},
              {"horizon", mc.horizon},
              {"burnIn", r.burn_in},
              {"seed", mc.seed},
              {"significantDigits", 9}});
  return kExitOk;
}

int cmd_generate(const std::string& what, const Options& o, std::istream& in, std::ostream& out) {
  Json doc;
  if (what == "blocks-diff") {
    doc = to_json(build_blocks_diff());
  } else if (what == "art") {
    doc = to_json(build_art(o.k));
  } else if (what == "cnf") {
    doc = to_json(cnf_to_nwa(parse_dimacs(read_text(o.file, in))));
  } else if (what == "uniform") {
    std::vector<std::string> letters;
    std::stringstream ss(o.alphabet);
    for (std::string l; std::getline(ss, l, ',');) letters.push_back(l);
    doc = to_json(uniform_chain(Alphabet(letters)));
  } else if (what == "request-grant") {
    doc = to_json(request_grant_chain(parse_rational(o.prob)));
  } else {
    std::vector<Dfa> automata;
    for (const auto& f : o.files) automata.push_back(dfa_from_json(read_json(f, in)));
    doc = to_json(intersection_to_nwa(automata));
  }
  emit(o, out, doc);
  return kExitOk;
}

int cmd_equivalence(const Options& o, std::istream& in, std::ostream& out) {
  auto a = load_any(o.left, in);
  auto b = load_any(o.right, in);
  if (!(a.alphabet() == b.alphabet())) throw Error(ErrorCode::InvalidArgument, "documents use different alphabets");
  EquivalenceOptions eo;
  eo.lag = o.lag;
  if (o.mode == "per-position") eo.mode = CompareMode::PerPosition;
  else if (o.mode == "running-min") eo.mode = CompareMode::RunningMin;
  else if (o.mode == "running-max") eo.mode = CompareMode::RunningMax;
  else throw Error(ErrorCode::InvalidArgument, "unknown mode " + o.mode);
  auto r = check_equivalence_on_prefixes(a.simulable(), b.simulable(), a.alphabet(), o.max_len, eo);
  Json doc{{"equivalent", r.equivalent}, {"wordsChecked", r.words_checked}, {"maxLen", o.max_len}};
  if (!r.equivalent) {
    doc["counterexample"] = a.alphabet().format(r.counterexample);
    doc["reason"] = r.reason;
  }
  print(out, doc);
  return r.equivalent ? kExitOk : kExitViolation;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantitative monitor automata: validation, translation, analysis and simulation"};
  app.require_subcommand(1);
  Options o;

  auto* validate = app.add_subcommand("validate", "Check an NWA, MCA, chain or automaton document");
  validate->add_option("file", o.input, "Document path or - for stdin")->required();
  validate->add_option("--kind", o.kind, "Override detection: nwa, mca, chain or automaton");

  auto* translate = app.add_subcommand("translate", "Translate between NWA and monitor counter automata");
  translate->require_subcommand(1);
  auto* n2m = translate->add_subcommand("nwa-to-mca", "NWA of bounded width to an MCA");
  n2m->add_option("input", o.input, "NWA document")->required();
  n2m->add_option("--width,-k", o.width, "Width bound")->required();
  n2m->add_option("--output,-o", o.output, "Output path");
  auto* m2n = translate->add_subcommand("mca-to-nwa", "MCA to an NWA");
  m2n->add_option("input", o.input, "MCA document")->required();
  m2n->add_option("--output,-o", o.output, "Output path");

  auto* analyze = app.add_subcommand("analyze", "Exact probabilistic analysis over a Markov chain");
  analyze->add_option("--nwa", o.nwa, "NWA document");
  analyze->add_option("--wa", o.wa, "Deterministic weighted automaton document");
  analyze->add_option("--chain", o.chain, "Markov chain document")->required();
  analyze->add_option("--question", o.question, "expected, distribution or almost-sure")
      ->check(CLI::IsMember({"expected", "distribution", "almost-sure"}));
  analyze->add_option("--lambda", o.lambdas, "Threshold p/q; repeatable");
  analyze->add_flag("--approx", o.approx, "Approximate Inf/Sup over Sum slaves");
  analyze->add_option("--epsilon", o.epsilon, "Approximation precision p/q");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate");
  simulate->add_option("--nwa", o.nwa, "NWA document");
  simulate->add_option("--mca", o.mca, "MCA document");
  simulate->add_option("--wa", o.wa, "Weighted automaton document");
  simulate->add_option("--chain", o.chain, "Markov chain document")->required();
  simulate->add_option("--horizon", o.horizon, "Prefix length");
  simulate->add_option("--samples", o.samples, "Number of samples");
  simulate->add_option("--seed", o.seed, "Seed (default: QUANTA_SEED or 0)");
  simulate->add_option("--burn-in", o.burn_in, "Ignore completions at earlier positions");
  simulate->add_option("--threads", o.threads, "Worker threads (0: all cores)");

  auto* generate = app.add_subcommand("generate", "Build example and reduction instances");
  generate->require_subcommand(1);
  auto* g_blocks = generate->add_subcommand("blocks-diff", "Two-counter block difference automaton");
  auto* g_art = generate->add_subcommand("art", "Average response time NWA");
  g_art->add_option("--k", o.k, "Maximal pending requests");
  auto* g_cnf = generate->add_subcommand("cnf", "(Inf;Min) NWA counting CNF models");
  g_cnf->add_option("--file", o.file, "DIMACS file")->required();
  auto* g_uniform = generate->add_subcommand("uniform", "Uniform one-state chain");
  g_uniform->add_option("--alphabet", o.alphabet, "Comma-separated letters");
  auto* g_rg = generate->add_subcommand("request-grant", "Request/grant chain");
  g_rg->add_option("--p", o.prob, "Grant probability p/q");
  auto* g_inter = generate->add_subcommand("intersection", "(Inf;Min) NWA for an intersection of automata");
  g_inter->add_option("--files", o.files, "Automaton documents over {a,b}")->required();
  for (auto* g : {g_blocks, g_art, g_cnf, g_uniform, g_rg, g_inter}) {
    g->add_option("--output,-o", o.output, "Output path");
  }

  auto* equivalence = app.add_subcommand("equivalence", "Compare value traces on all short words");
  equivalence->add_option("--left", o.left, "First document")->required();
  equivalence->add_option("--right", o.right, "Second document")->required();
  equivalence->add_option("--max-len", o.max_len, "Longest word to explore");
  equivalence->add_option("--lag", o.lag, "Allowed difference in completion steps");
  equivalence->add_option("--mode", o.mode, "per-position, running-min or running-max");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*validate) return cmd_validate(o, in, out);
    if (*translate) return cmd_translate(*n2m ? "nwa-to-mca" : "mca-to-nwa", o, in, out);
    if (*analyze) return cmd_analyze(o, in, out);
    if (*simulate) return cmd_simulate(o, in, out);
    if (*generate) {
      for (auto* g : generate->get_subcommands()) return cmd_generate(g->get_name(), o, in, out);
    }
    if (*equivalence) return cmd_equivalence(o, in, out);
  } catch (const Error& e) {
    print(out, {{"error", std::string(error_tag(e.code()))}, {"message", e.what()}});
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::bad_alloc&) {
    print(out, {{"error", "resource-limit"}, {"message", "out of memory"}});
    err << "error: out of memory\n";
    return kExitUnsupported;
  }
  return kExitInput;
}

}  // namespace quanta
