#include "metasim/modelspec.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace metasim {

bool natural_less(std::string_view a, std::string_view b) {
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const unsigned char ca = static_cast<unsigned char>(a[i]);
        const unsigned char cb = static_cast<unsigned char>(b[j]);
        if (std::isdigit(ca) && std::isdigit(cb)) {
            std::size_t ia = i, jb = j;
            while (ia < a.size() && std::isdigit(static_cast<unsigned char>(a[ia]))) ++ia;
            while (jb < b.size() && std::isdigit(static_cast<unsigned char>(b[jb]))) ++jb;
            std::string_view da = a.substr(i, ia - i), db = b.substr(j, jb - j);
            // Compare digit runs numerically: by length after stripping
            // leading zeros, then lexicographically.
            const auto strip = [](std::string_view s) {
                std::size_t k = 0;
                while (k + 1 < s.size() && s[k] == '0') ++k;
                return s.substr(k);
            };
            const std::string_view na = strip(da), nb = strip(db);
            if (na.size() != nb.size()) return na.size() < nb.size();
            if (na != nb) return na < nb;
            // Same value, different spelling ("01" vs "1"): keep the order
            // total so equal-valued names cannot swap under an unstable sort.
            if (da != db) return da < db;
            i = ia;
            j = jb;
            continue;
        }
        if (ca != cb) return ca < cb;
        ++i;
        ++j;
    }
    return (a.size() - i) < (b.size() - j);
}

bool DocConfig::any() const {
    return t_end || seed || engine || epsilon || critical_threshold || ssa_fallback_steps ||
           record_interval;
}

void DocConfig::apply(SimulationConfig& config) const {
    if (t_end) config.t_end = *t_end;
    if (seed) config.seed = *seed;
    if (engine) config.engine = *engine;
    if (epsilon) config.epsilon = *epsilon;
    if (critical_threshold) config.critical_threshold = *critical_threshold;
    if (ssa_fallback_steps) config.ssa_fallback_steps = *ssa_fallback_steps;
    if (record_interval) config.record_interval = *record_interval;
}

std::string format_diagnostic(const Diagnostic& d) {
    std::ostringstream os;
    os << "line " << d.line << ":" << d.column << ": " << d.code << ": " << d.message;
    return os.str();
}

namespace {

// ---------------------------------------------------------------- lexer --

struct Token {
    enum class Type { Ident, Number, Symbol, End };
    Type type = Type::End;
    std::string_view text;
    int column = 0; // 1-based
};

/// Splits one line into tokens. Unknown characters produce a Symbol token
/// with the raw character so the parser can report it.
std::vector<Token> tokenize(std::string_view line) {
    std::vector<Token> out;
    std::size_t i = 0;
    const auto is_ident_start = [](char c) {
        return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
    };
    const auto is_ident = [&](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    };
    const auto is_num_char = [](char c) {
        return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == 'e' || c == 'E' ||
               c == '+' || c == '-';
    };
    while (i < line.size()) {
        const char c = line[i];
        if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
            continue;
        }
        if (c == '#') break; // comment to end of line
        const int column = static_cast<int>(i) + 1;
        if (is_ident_start(c)) {
            std::size_t start = i;
            while (i < line.size() && is_ident(line[i])) ++i;
            out.push_back({Token::Type::Ident, line.substr(start, i - start), column});
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '-' && i + 1 < line.size() &&
             (std::isdigit(static_cast<unsigned char>(line[i + 1])) || line[i + 1] == '.')) ||
            (c == '.' && i + 1 < line.size() && std::isdigit(static_cast<unsigned char>(line[i + 1])))) {
            std::size_t start = i;
            ++i;
            while (i < line.size() && is_num_char(line[i])) {
                // '+'/'-' only valid right after an exponent marker
                if ((line[i] == '+' || line[i] == '-') &&
                    !(line[i - 1] == 'e' || line[i - 1] == 'E')) {
                    break;
                }
                ++i;
            }
            out.push_back({Token::Type::Number, line.substr(start, i - start), column});
            continue;
        }
        if (c == '-' && i + 1 < line.size() && line[i + 1] == '>') {
            out.push_back({Token::Type::Symbol, line.substr(i, 2), column});
            i += 2;
            continue;
        }
        out.push_back({Token::Type::Symbol, line.substr(i, 1), column});
        ++i;
    }
    return out;
}

// --------------------------------------------------------------- parser --

struct RawRule {
    DocRule rule;
    int line = 0;
};

struct RawVolume {
    std::string name;
    double area = 1.0;
    std::map<std::string, Count> init;
    std::vector<DocRule> rules;
    std::set<std::string> rule_ids;
    int line = 0;
};

struct ParserState {
    std::vector<Diagnostic> diagnostics;
    std::vector<DocSpecies> species;
    std::set<std::string> species_names;
    std::vector<std::string> nodes;
    std::set<std::string> node_names;
    std::vector<DocEdge> edges;
    std::set<std::pair<std::string, std::string>> edge_keys;
    std::vector<RawVolume> volumes;
    std::set<std::string> volume_names;
    DocConfig config;
    std::set<std::string> config_keys;

    enum class Block { None, Volume, Config } block = Block::None;
    int block_line = 0;
    int line = 0;

    void error(int column, std::string code, std::string message) {
        diagnostics.push_back({line, std::max(column, 1), std::move(code), std::move(message)});
    }
};

class LineParser {
public:
    LineParser(ParserState& state, std::vector<Token> tokens)
        : state_(state), tokens_(std::move(tokens)) {}

    const Token& peek() const {
        static const Token kEnd{};
        return pos_ < tokens_.size() ? tokens_[pos_] : kEnd;
    }
    Token next() {
        Token t = peek();
        if (pos_ < tokens_.size()) ++pos_;
        return t;
    }
    bool at_end() const { return pos_ >= tokens_.size(); }
    int here() const {
        return pos_ < tokens_.size() ? tokens_[pos_].column : end_column();
    }
    int end_column() const { return tokens_.empty() ? 1 : tokens_.back().column; }

    bool expect_symbol(std::string_view symbol) {
        if (peek().type == Token::Type::Symbol && peek().text == symbol) {
            next();
            return true;
        }
        state_.error(here(), "syntax", "expected '" + std::string(symbol) + "'");
        return false;
    }

    std::optional<std::string> expect_ident(const char* what) {
        if (peek().type == Token::Type::Ident) return std::string(next().text);
        state_.error(here(), "syntax", std::string("expected ") + what);
        return std::nullopt;
    }

    std::optional<double> expect_real(const char* what) {
        if (peek().type != Token::Type::Number) {
            state_.error(here(), "syntax", std::string("expected ") + what);
            return std::nullopt;
        }
        const Token t = next();
        double value = 0.0;
        const auto* begin = t.text.data();
        const auto* end = t.text.data() + t.text.size();
        const auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
            state_.error(t.column, "syntax", "malformed number '" + std::string(t.text) + "'");
            return std::nullopt;
        }
        return value;
    }

    std::optional<Count> expect_int(const char* what) {
        if (peek().type != Token::Type::Number) {
            state_.error(here(), "syntax", std::string("expected ") + what);
            return std::nullopt;
        }
        const Token t = next();
        Count value = 0;
        const auto* begin = t.text.data();
        const auto* end = t.text.data() + t.text.size();
        const auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc{} || ptr != end) {
            state_.error(t.column, "syntax", "expected integer, got '" + std::string(t.text) + "'");
            return std::nullopt;
        }
        return value;
    }

    void expect_line_end() {
        if (!at_end()) {
            state_.error(here(), "syntax",
                         "unexpected trailing '" + std::string(peek().text) + "'");
        }
    }

private:
    ParserState& state_;
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

/// lhs/rhs of a rule: `0` or `+`-separated `[coeff] species` terms.
std::optional<std::vector<DocTerm>> parse_side(ParserState& state, LineParser& lp,
                                               std::string_view stop_symbol) {
    std::vector<DocTerm> terms;
    if (lp.peek().type == Token::Type::Number && lp.peek().text == "0") {
        const Token zero = lp.next();
        if (lp.peek().type == Token::Type::Ident) {
            state.error(zero.column, "malformed-stoichiometry",
                        "stoichiometry must be a positive integer");
            return std::nullopt;
        }
        return terms; // the empty multiset
    }
    for (;;) {
        int coeff = 1;
        if (lp.peek().type == Token::Type::Number) {
            const Token t = lp.next();
            int parsed = 0;
            const auto [ptr, ec] =
                std::from_chars(t.text.data(), t.text.data() + t.text.size(), parsed);
            if (ec != std::errc{} || ptr != t.text.data() + t.text.size() || parsed <= 0) {
                state.error(t.column, "malformed-stoichiometry",
                            "stoichiometry must be a positive integer, got '" +
                                std::string(t.text) + "'");
                return std::nullopt;
            }
            coeff = parsed;
        }
        if (lp.peek().type != Token::Type::Ident) {
            state.error(lp.here(), "syntax", "expected species name");
            return std::nullopt;
        }
        const Token name = lp.next();
        if (!state.species_names.count(std::string(name.text))) {
            state.error(name.column, "unknown-species",
                        "unknown species '" + std::string(name.text) + "'");
            return std::nullopt;
        }
        terms.push_back({coeff, std::string(name.text)});
        if (lp.peek().type == Token::Type::Symbol && lp.peek().text == "+") {
            lp.next();
            continue;
        }
        break;
    }
    (void)stop_symbol;
    return terms;
}

std::vector<DocTerm> normalize_side(std::vector<DocTerm> terms) {
    std::sort(terms.begin(), terms.end(),
              [](const DocTerm& x, const DocTerm& y) { return x.species < y.species; });
    std::vector<DocTerm> merged;
    for (auto& t : terms) {
        if (!merged.empty() && merged.back().species == t.species) {
            merged.back().coeff += t.coeff;
        } else {
            merged.push_back(std::move(t));
        }
    }
    return merged;
}

void parse_rule_statement(ParserState& state, LineParser& lp, RawVolume& volume) {
    const int id_column = lp.here();
    const auto id = lp.expect_ident("rule id");
    if (!id) return;
    if (!lp.expect_symbol(":")) return;
    auto lhs = parse_side(state, lp, "->");
    if (!lhs) return;
    if (!lp.expect_symbol("->")) return;
    auto rhs = parse_side(state, lp, "@");
    if (!rhs) return;
    if (!lp.expect_symbol("@")) return;
    const int constant_column = lp.here();
    const auto constant = lp.expect_real("stochastic constant");
    if (!constant) return;

    DocRule rule;
    rule.id = *id;
    rule.lhs = normalize_side(std::move(*lhs));
    rule.rhs = normalize_side(std::move(*rhs));
    rule.constant = *constant;

    if (lp.peek().type == Token::Type::Ident && lp.peek().text == "target") {
        lp.next();
        const Token node = lp.peek().type == Token::Type::Ident ? lp.next() : Token{};
        if (node.type != Token::Type::Ident) {
            state.error(lp.here(), "syntax", "expected target node name");
            return;
        }
        if (!state.node_names.count(std::string(node.text))) {
            state.error(node.column, "unknown-node",
                        "unknown target node '" + std::string(node.text) + "'");
            return;
        }
        rule.target = std::string(node.text);
    }
    lp.expect_line_end();

    if (*constant < 0.0) {
        state.error(constant_column, "negative-constant",
                    "stochastic constant must be >= 0");
        return;
    }
    if (!volume.rule_ids.insert(rule.id).second) {
        state.error(id_column, "duplicate-rule-id",
                    "rule '" + rule.id + "' already defined in volume " + volume.name);
        return;
    }
    volume.rules.push_back(std::move(rule));
}

void parse_statement(ParserState& state, LineParser& lp) {
    if (lp.at_end()) return;

    // Block close first: a bare '}'.
    if (lp.peek().type == Token::Type::Symbol && lp.peek().text == "}") {
        const Token t = lp.next();
        if (state.block == ParserState::Block::None) {
            state.error(t.column, "unbalanced-block", "'}' without an open block");
        } else {
            state.block = ParserState::Block::None;
        }
        lp.expect_line_end();
        return;
    }

    if (lp.peek().type != Token::Type::Ident) {
        state.error(lp.here(), "syntax",
                    "unexpected '" + std::string(lp.peek().text) + "'");
        return;
    }

    if (state.block == ParserState::Block::Volume) {
        RawVolume& volume = state.volumes.back();
        const Token keyword = lp.next();
        if (keyword.text == "init") {
            const Token name = lp.peek().type == Token::Type::Ident ? lp.next() : Token{};
            if (name.type != Token::Type::Ident) {
                state.error(lp.here(), "syntax", "expected species name");
                return;
            }
            if (!lp.expect_symbol("=")) return;
            const int value_column = lp.here();
            const auto value = lp.expect_int("initial count");
            if (!value) return;
            lp.expect_line_end();
            if (!state.species_names.count(std::string(name.text))) {
                state.error(name.column, "unknown-species",
                            "unknown species '" + std::string(name.text) + "'");
                return;
            }
            if (*value < 0) {
                state.error(value_column, "bad-count", "initial count must be >= 0");
                return;
            }
            if (!volume.init.emplace(std::string(name.text), *value).second) {
                state.error(name.column, "duplicate-init",
                            "species '" + std::string(name.text) + "' already initialized");
            }
            return;
        }
        if (keyword.text == "rule") {
            parse_rule_statement(state, lp, volume);
            return;
        }
        if (keyword.text == "area") {
            if (!lp.expect_symbol("=")) return;
            const int value_column = lp.here();
            const auto value = lp.expect_real("area");
            if (!value) return;
            lp.expect_line_end();
            if (!(*value > 0.0)) {
                state.error(value_column, "bad-count", "area must be > 0");
                return;
            }
            volume.area = *value;
            return;
        }
        state.error(keyword.column, "syntax",
                    "expected init, rule, area or '}' inside volume block");
        return;
    }

    if (state.block == ParserState::Block::Config) {
        const Token key = lp.next();
        if (!lp.expect_symbol("=")) return;
        const std::string key_name(key.text);
        if (!state.config_keys.insert(key_name).second) {
            state.error(key.column, "bad-config-value", "duplicate config key '" + key_name + "'");
            return;
        }
        if (key_name == "engine") {
            const auto value = lp.expect_ident("engine name");
            if (!value) return;
            lp.expect_line_end();
            const auto engine = engine_from_string(*value);
            if (!engine) {
                state.error(key.column, "bad-config-value",
                            "engine must be 'ssa' or 'tau', got '" + *value + "'");
                return;
            }
            state.config.engine = engine;
            return;
        }
        if (key_name == "seed") {
            if (lp.peek().type != Token::Type::Number) {
                state.error(lp.here(), "syntax", "expected seed value");
                return;
            }
            const Token t = lp.next();
            lp.expect_line_end();
            std::uint64_t seed = 0;
            const auto [ptr, ec] =
                std::from_chars(t.text.data(), t.text.data() + t.text.size(), seed);
            if (ec != std::errc{} || ptr != t.text.data() + t.text.size()) {
                state.error(t.column, "bad-config-value", "seed must be a 64-bit unsigned integer");
                return;
            }
            state.config.seed = seed;
            return;
        }
        if (key_name == "critical_threshold" || key_name == "ssa_fallback_steps") {
            const auto value = lp.expect_int("integer value");
            if (!value) return;
            lp.expect_line_end();
            if (key_name == "critical_threshold") {
                if (*value < 0) {
                    state.error(key.column, "bad-config-value", "critical_threshold must be >= 0");
                    return;
                }
                state.config.critical_threshold = static_cast<int>(*value);
            } else {
                if (*value <= 0) {
                    state.error(key.column, "bad-config-value", "ssa_fallback_steps must be > 0");
                    return;
                }
                state.config.ssa_fallback_steps = static_cast<int>(*value);
            }
            return;
        }
        if (key_name == "t_end" || key_name == "epsilon" || key_name == "record_interval") {
            const auto value = lp.expect_real("value");
            if (!value) return;
            lp.expect_line_end();
            if (key_name == "epsilon") {
                if (!(*value > 0.0 && *value < 1.0)) {
                    state.error(key.column, "bad-config-value", "epsilon must be in (0,1)");
                    return;
                }
                state.config.epsilon = *value;
            } else if (!(*value > 0.0)) {
                state.error(key.column, "bad-config-value", key_name + " must be > 0");
                return;
            } else if (key_name == "t_end") {
                state.config.t_end = *value;
            } else {
                state.config.record_interval = *value;
            }
            return;
        }
        state.error(key.column, "unknown-config-key", "unknown config key '" + key_name + "'");
        return;
    }

    // Top level.
    const Token keyword = lp.next();
    if (keyword.text == "species") {
        const auto name = lp.expect_ident("species name");
        if (!name) return;
        bool buffered = false;
        if (lp.peek().type == Token::Type::Ident && lp.peek().text == "buffered") {
            lp.next();
            buffered = true;
        }
        lp.expect_line_end();
        if (!state.species_names.insert(*name).second) {
            state.error(keyword.column, "duplicate-species", "species '" + *name + "' already declared");
            return;
        }
        state.species.push_back({*name, buffered});
        return;
    }
    if (keyword.text == "node") {
        const auto name = lp.expect_ident("node name");
        if (!name) return;
        lp.expect_line_end();
        if (!state.node_names.insert(*name).second) {
            state.error(keyword.column, "duplicate-node", "node '" + *name + "' already declared");
            return;
        }
        state.nodes.push_back(*name);
        return;
    }
    if (keyword.text == "edge") {
        const Token a = lp.peek().type == Token::Type::Ident ? lp.next() : Token{};
        if (a.type != Token::Type::Ident) {
            state.error(lp.here(), "syntax", "expected node name");
            return;
        }
        const Token b = lp.peek().type == Token::Type::Ident ? lp.next() : Token{};
        if (b.type != Token::Type::Ident) {
            state.error(lp.here(), "syntax", "expected node name");
            return;
        }
        double weight = 1.0;
        if (lp.peek().type == Token::Type::Ident && lp.peek().text == "weight") {
            lp.next();
            const int weight_column = lp.here();
            const auto value = lp.expect_real("edge weight");
            if (!value) return;
            if (!(*value > 0.0)) {
                state.error(weight_column, "bad-weight", "edge weight must be > 0");
                return;
            }
            weight = *value;
        }
        lp.expect_line_end();
        const std::string name_a(a.text), name_b(b.text);
        if (!state.node_names.count(name_a)) {
            state.error(a.column, "unknown-node", "unknown node '" + name_a + "'");
            return;
        }
        if (!state.node_names.count(name_b)) {
            state.error(b.column, "unknown-node", "unknown node '" + name_b + "'");
            return;
        }
        if (name_a == name_b) {
            state.error(a.column, "self-edge", "self-edge not allowed");
            return;
        }
        auto key = std::minmax(name_a, name_b);
        if (!state.edge_keys.insert({key.first, key.second}).second) {
            state.error(a.column, "duplicate-edge",
                        "edge between '" + name_a + "' and '" + name_b + "' already declared");
            return;
        }
        state.edges.push_back({name_a, name_b, weight});
        return;
    }
    if (keyword.text == "volume") {
        const auto name = lp.expect_ident("volume name");
        if (!name) return;
        if (!lp.expect_symbol("{")) return;
        lp.expect_line_end();
        if (!state.node_names.count(*name)) {
            state.error(keyword.column, "unknown-node",
                        "volume '" + *name + "' is not a declared node");
            // Open the block anyway so its statements parse in context.
        } else if (!state.volume_names.insert(*name).second) {
            state.error(keyword.column, "duplicate-volume",
                        "volume '" + *name + "' already defined");
        }
        RawVolume volume;
        volume.name = *name;
        volume.line = state.line;
        state.volumes.push_back(std::move(volume));
        state.block = ParserState::Block::Volume;
        state.block_line = state.line;
        return;
    }
    if (keyword.text == "config") {
        if (!lp.expect_symbol("{")) return;
        lp.expect_line_end();
        state.block = ParserState::Block::Config;
        state.block_line = state.line;
        return;
    }
    state.error(keyword.column, "syntax",
                "expected species, node, edge, volume or config, got '" +
                    std::string(keyword.text) + "'");
}

} // namespace

ParseResult parse(std::string_view text) {
    ParserState state;
    std::size_t offset = 0;
    while (offset <= text.size()) {
        const std::size_t newline = text.find('\n', offset);
        const std::string_view line = text.substr(
            offset, newline == std::string_view::npos ? text.size() - offset : newline - offset);
        ++state.line;
        LineParser lp(state, tokenize(line));
        parse_statement(state, lp);
        if (newline == std::string_view::npos) break;
        offset = newline + 1;
    }
    if (state.block != ParserState::Block::None) {
        state.diagnostics.push_back(
            {state.block_line, 1, "unbalanced-block", "block opened here is never closed"});
    }

    ParseResult result;
    result.diagnostics = std::move(state.diagnostics);
    if (!result.diagnostics.empty()) return result;

    // Canonicalize.
    ModelDocument doc;
    doc.species = std::move(state.species);
    std::sort(doc.species.begin(), doc.species.end(),
              [](const DocSpecies& a, const DocSpecies& b) { return a.name < b.name; });
    doc.nodes = std::move(state.nodes);
    std::sort(doc.nodes.begin(), doc.nodes.end(),
              [](const std::string& a, const std::string& b) { return natural_less(a, b); });

    std::map<std::string, int> node_index;
    for (std::size_t i = 0; i < doc.nodes.size(); ++i) node_index[doc.nodes[i]] = static_cast<int>(i);
    std::map<std::string, int> species_index;
    for (std::size_t i = 0; i < doc.species.size(); ++i) {
        species_index[doc.species[i].name] = static_cast<int>(i);
    }

    for (auto& e : state.edges) {
        if (node_index[e.a] > node_index[e.b]) std::swap(e.a, e.b);
    }
    std::sort(state.edges.begin(), state.edges.end(), [&](const DocEdge& x, const DocEdge& y) {
        return std::pair(node_index[x.a], node_index[x.b]) <
               std::pair(node_index[y.a], node_index[y.b]);
    });
    doc.edges = std::move(state.edges);

    std::map<std::string, RawVolume*> by_name;
    for (auto& v : state.volumes) by_name[v.name] = &v;
    for (const auto& node : doc.nodes) {
        DocVolume out;
        out.name = node;
        out.init.assign(doc.species.size(), 0);
        if (auto it = by_name.find(node); it != by_name.end()) {
            RawVolume& raw = *it->second;
            out.area = raw.area;
            for (const auto& [species, count] : raw.init) {
                out.init[static_cast<std::size_t>(species_index[species])] = count;
            }
            out.rules = std::move(raw.rules);
        }
        doc.volumes.push_back(std::move(out));
    }
    doc.config = state.config;
    result.document = std::move(doc);
    return result;
}

namespace {

std::string format_real(double value) {
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, ptr);
}

void write_side(std::ostringstream& os, const std::vector<DocTerm>& terms) {
    if (terms.empty()) {
        os << "0";
        return;
    }
    bool first = true;
    for (const auto& t : terms) {
        if (!first) os << " + ";
        first = false;
        if (t.coeff != 1) os << t.coeff << " ";
        os << t.species;
    }
}

} // namespace

std::string serialize(const ModelDocument& doc) {
    std::ostringstream os;
    os << "# metasim model\n";
    if (!doc.species.empty()) {
        for (const auto& s : doc.species) {
            os << "species " << s.name << (s.buffered ? " buffered" : "") << "\n";
        }
    }
    if (!doc.nodes.empty()) {
        os << "\n";
        for (const auto& n : doc.nodes) os << "node " << n << "\n";
    }
    if (!doc.edges.empty()) {
        os << "\n";
        for (const auto& e : doc.edges) {
            os << "edge " << e.a << " " << e.b;
            if (e.weight != 1.0) os << " weight " << format_real(e.weight);
            os << "\n";
        }
    }
    for (const auto& v : doc.volumes) {
        const bool has_init =
            std::any_of(v.init.begin(), v.init.end(), [](Count c) { return c != 0; });
        if (!has_init && v.rules.empty() && v.area == 1.0) continue;
        os << "\nvolume " << v.name << " {\n";
        if (v.area != 1.0) os << "  area = " << format_real(v.area) << "\n";
        for (std::size_t s = 0; s < v.init.size(); ++s) {
            if (v.init[s] == 0) continue;
            os << "  init " << doc.species[s].name << " = " << v.init[s] << "\n";
        }
        for (const auto& rule : v.rules) {
            os << "  rule " << rule.id << ": ";
            write_side(os, rule.lhs);
            os << " -> ";
            write_side(os, rule.rhs);
            os << " @ " << format_real(rule.constant);
            if (rule.target) os << " target " << *rule.target;
            os << "\n";
        }
        os << "}\n";
    }
    if (doc.config.any()) {
        os << "\nconfig {\n";
        const auto& c = doc.config;
        if (c.t_end) os << "  t_end = " << format_real(*c.t_end) << "\n";
        if (c.seed) os << "  seed = " << *c.seed << "\n";
        if (c.engine) os << "  engine = " << to_string(*c.engine) << "\n";
        if (c.epsilon) os << "  epsilon = " << format_real(*c.epsilon) << "\n";
        if (c.critical_threshold) os << "  critical_threshold = " << *c.critical_threshold << "\n";
        if (c.ssa_fallback_steps) os << "  ssa_fallback_steps = " << *c.ssa_fallback_steps << "\n";
        if (c.record_interval) os << "  record_interval = " << format_real(*c.record_interval) << "\n";
        os << "}\n";
    }
    return os.str();
}

MetapopulationModel to_model(const ModelDocument& doc) {
    MetapopulationModel model;
    for (const auto& s : doc.species) model.species.add(s.name, s.buffered);

    std::map<std::string, int> node_index;
    for (std::size_t i = 0; i < doc.nodes.size(); ++i) node_index[doc.nodes[i]] = static_cast<int>(i);
    std::map<std::string, int> species_index;
    for (std::size_t i = 0; i < doc.species.size(); ++i) {
        species_index[doc.species[i].name] = static_cast<int>(i);
    }
    const auto node_of = [&](const std::string& name) {
        const auto it = node_index.find(name);
        if (it == node_index.end()) throw std::invalid_argument("unknown node '" + name + "'");
        return it->second;
    };
    const auto species_of = [&](const std::string& name) {
        const auto it = species_index.find(name);
        if (it == species_index.end()) throw std::invalid_argument("unknown species '" + name + "'");
        return it->second;
    };

    model.graph = TopologyGraph(static_cast<int>(doc.nodes.size()));
    for (const auto& e : doc.edges) model.graph.add_edge(node_of(e.a), node_of(e.b), e.weight);

    if (doc.volumes.size() != doc.nodes.size()) {
        throw std::invalid_argument("document is not canonical: one volume per node required");
    }
    for (std::size_t i = 0; i < doc.volumes.size(); ++i) {
        const DocVolume& dv = doc.volumes[i];
        Volume v;
        v.index = static_cast<int>(i);
        v.name = dv.name;
        v.area = dv.area;
        v.counts.assign(static_cast<std::size_t>(model.species.size()), 0);
        for (std::size_t s = 0; s < dv.init.size() && s < v.counts.size(); ++s) {
            v.counts[s] = dv.init[s];
        }
        for (const auto& rule : dv.rules) {
            std::vector<StoichTerm> lhs, rhs;
            for (const auto& t : rule.lhs) lhs.push_back({species_of(t.species), t.coeff});
            for (const auto& t : rule.rhs) rhs.push_back({species_of(t.species), t.coeff});
            std::optional<int> target;
            if (rule.target) target = node_of(*rule.target);
            v.rules.push_back(make_rule(rule.id, std::move(lhs), std::move(rhs), rule.constant, target));
        }
        model.volumes.push_back(std::move(v));
    }
    return model;
}

SimulationConfig config_from(const ModelDocument& doc, SimulationConfig base) {
    doc.config.apply(base);
    return base;
}

ModelDocument document_from_model(const MetapopulationModel& model) {
    ModelDocument doc;

    // Species sorted by name; remember old-index -> name.
    std::vector<std::string> species_names(static_cast<std::size_t>(model.species.size()));
    for (int s = 0; s < model.species.size(); ++s) {
        species_names[static_cast<std::size_t>(s)] = model.species[s].name;
        doc.species.push_back({model.species[s].name, model.species[s].buffered});
    }
    std::sort(doc.species.begin(), doc.species.end(),
              [](const DocSpecies& a, const DocSpecies& b) { return a.name < b.name; });
    std::map<std::string, int> species_slot;
    for (std::size_t i = 0; i < doc.species.size(); ++i) {
        species_slot[doc.species[i].name] = static_cast<int>(i);
    }

    // Nodes in natural order; remember the permutation old -> new.
    std::vector<int> order(model.volumes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return natural_less(model.volumes[static_cast<std::size_t>(a)].name,
                            model.volumes[static_cast<std::size_t>(b)].name);
    });
    std::vector<int> new_index(order.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        new_index[static_cast<std::size_t>(order[pos])] = static_cast<int>(pos);
    }
    for (int old : order) doc.nodes.push_back(model.volumes[static_cast<std::size_t>(old)].name);

    std::vector<std::pair<std::pair<int, int>, double>> indexed_edges;
    for (const auto& [a, b] : model.graph.edges()) {
        int na = new_index[static_cast<std::size_t>(a)];
        int nb = new_index[static_cast<std::size_t>(b)];
        if (na > nb) std::swap(na, nb);
        indexed_edges.push_back({{na, nb}, model.graph.weight(a, b)});
    }
    std::sort(indexed_edges.begin(), indexed_edges.end());
    for (const auto& [pair, weight] : indexed_edges) {
        doc.edges.push_back({doc.nodes[static_cast<std::size_t>(pair.first)],
                             doc.nodes[static_cast<std::size_t>(pair.second)], weight});
    }

    for (int old : order) {
        const Volume& v = model.volumes[static_cast<std::size_t>(old)];
        DocVolume dv;
        dv.name = v.name;
        dv.area = v.area;
        dv.init.assign(doc.species.size(), 0);
        for (std::size_t s = 0; s < v.counts.size(); ++s) {
            dv.init[static_cast<std::size_t>(species_slot[species_names[s]])] = v.counts[s];
        }
        for (const auto& rule : v.rules) {
            DocRule dr;
            dr.id = rule.id;
            for (const auto& t : rule.reactants) {
                dr.lhs.push_back({t.count, species_names[static_cast<std::size_t>(t.species)]});
            }
            for (const auto& t : rule.products) {
                dr.rhs.push_back({t.count, species_names[static_cast<std::size_t>(t.species)]});
            }
            dr.lhs = normalize_side(std::move(dr.lhs));
            dr.rhs = normalize_side(std::move(dr.rhs));
            dr.constant = rule.constant;
            if (rule.target) {
                dr.target = doc.nodes[static_cast<std::size_t>(
                    new_index[static_cast<std::size_t>(*rule.target)])];
            }
            dv.rules.push_back(std::move(dr));
        }
        doc.volumes.push_back(std::move(dv));
    }
    return doc;
}

} // namespace metasim
