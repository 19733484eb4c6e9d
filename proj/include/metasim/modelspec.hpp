#pragma once

#include <optional>
#include <string>
#include <vector>

#include "metasim/core.hpp"

namespace metasim {

/// Name-based model description, the external representation behind the
/// `.mps` file format. Documents are kept in canonical form: species
/// sorted by name, nodes in natural order (p2 before p10), one volume
/// entry per node, rule terms merged and sorted. parse() and
/// document_from_model() both return canonical documents, which makes
/// parse(serialize(doc)) == doc a structural identity.
struct DocSpecies {
    std::string name;
    bool buffered = false;
    friend bool operator==(const DocSpecies&, const DocSpecies&) = default;
};

struct DocTerm {
    int coeff = 1;
    std::string species;
    friend bool operator==(const DocTerm&, const DocTerm&) = default;
};

struct DocRule {
    std::string id;
    std::vector<DocTerm> lhs;
    std::vector<DocTerm> rhs; // empty = the empty multiset, written `0`
    double constant = 0.0;
    std::optional<std::string> target;
    friend bool operator==(const DocRule&, const DocRule&) = default;
};

struct DocVolume {
    std::string name;
    double area = 1.0;
    std::vector<Count> init; // aligned with the document's species order
    std::vector<DocRule> rules;
    friend bool operator==(const DocVolume&, const DocVolume&) = default;
};

struct DocEdge {
    std::string a, b; // ordered by node position
    double weight = 1.0;
    friend bool operator==(const DocEdge&, const DocEdge&) = default;
};

/// Only the keys present in the file; round-trips without inventing values.
struct DocConfig {
    std::optional<double> t_end;
    std::optional<std::uint64_t> seed;
    std::optional<Engine> engine;
    std::optional<double> epsilon;
    std::optional<int> critical_threshold;
    std::optional<int> ssa_fallback_steps;
    std::optional<double> record_interval;

    bool any() const;
    /// Overlays the set fields onto `config`.
    void apply(SimulationConfig& config) const;
    friend bool operator==(const DocConfig&, const DocConfig&) = default;
};

struct ModelDocument {
    std::vector<DocSpecies> species;
    std::vector<std::string> nodes;
    std::vector<DocEdge> edges;
    std::vector<DocVolume> volumes;
    DocConfig config;
    friend bool operator==(const ModelDocument&, const ModelDocument&) = default;
};

struct Diagnostic {
    int line = 0;   // 1-based
    int column = 0; // 1-based, inside the offending token
    std::string code;
    std::string message;
};

std::string format_diagnostic(const Diagnostic& d);

struct ParseResult {
    std::optional<ModelDocument> document; // set iff diagnostics is empty
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return document.has_value(); }
};

/// Parses `.mps` text. Never throws on malformed input: every defect is a
/// diagnostic with line/column, and parsing continues past recoverable
/// errors so one pass reports as much as possible. Identifiers must be
/// declared before use.
ParseResult parse(std::string_view text);

/// Canonical rendering; parse(serialize(doc)) == doc for canonical
/// documents. Unit weights, zero init counts, empty volume blocks and an
/// empty config block are elided.
std::string serialize(const ModelDocument& doc);

/// Materializes a canonical document into a runnable model (volume index =
/// node position, species index = position in the sorted species list).
/// Throws std::invalid_argument on dangling names; use parse() for
/// untrusted input.
MetapopulationModel to_model(const ModelDocument& doc);

/// Overlays the document's config block (if any) onto `base`.
SimulationConfig config_from(const ModelDocument& doc, SimulationConfig base = {});

/// Inverse of to_model. Node order is normalized to natural name order and
/// volume/target indices are remapped accordingly, so the result is
/// canonical even for models with unordered volume names.
ModelDocument document_from_model(const MetapopulationModel& model);

/// Numeric-aware name ordering: "p2" < "p10".
bool natural_less(std::string_view a, std::string_view b);

} // namespace metasim
