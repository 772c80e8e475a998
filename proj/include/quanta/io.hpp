#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include <json.hpp>

#include "quanta/analysis.hpp"
#include "quanta/gen.hpp"
#include "quanta/mca.hpp"
#include "quanta/sim.hpp"

namespace quanta {

using Json = nlohmann::json;

enum class DocumentKind : std::uint8_t { Automaton, Nwa, Mca, Chain };
std::string to_string(DocumentKind kind);
DocumentKind detect_kind(const Json& doc);

/// Reads a file, or standard input for "-". Throws Error(Schema) on bad JSON
/// and Error(InvalidArgument) if the file cannot be opened.
Json read_json(const std::string& path, std::istream& stdin_stream);
std::string read_text(const std::string& path, std::istream& stdin_stream);

WeightedAutomaton automaton_from_json(const Json& doc);
Json to_json(const WeightedAutomaton& wa);

Dfa dfa_from_json(const Json& doc);

NestedWeightedAutomaton nwa_from_json(const Json& doc);
Json to_json(const NestedWeightedAutomaton& nwa);

MonitorCounterAutomaton mca_from_json(const Json& doc);
Json to_json(const MonitorCounterAutomaton& mca);

LabeledMarkovChain chain_from_json(const Json& doc);
Json to_json(const LabeledMarkovChain& m);

Json to_json(const DiscreteDistribution& d);
Json to_json(const AnalysisReport& report);
Json to_json(const ValidationReport& report);
Json to_json(const AcceptanceReport& report);

/// "p cnf n m" header, clauses terminated by 0, "c" comment lines.
Cnf parse_dimacs(std::string_view text);

}  // namespace quanta
