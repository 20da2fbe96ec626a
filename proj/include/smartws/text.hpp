#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "smartws/model.hpp"

namespace smartws {

using PrefixMap = std::map<std::string, std::string>;

struct ParseError : std::runtime_error {
    int line;
    int column;
    ParseError(const std::string& msg, int line_, int column_)
        : std::runtime_error(msg + " (line " + std::to_string(line_) + ", column " +
                             std::to_string(column_) + ")"),
          line(line_),
          column(column_) {}
};

namespace detail {

// Tokenizer and statement parser for the triple text format:
//   <iri> | prefixed:name | "lexical" | "lexical"^^datatype | ?variable | .
// plus `@prefix name: <iri> .` and `PREFIX name: <iri>` directives and
// `#` line comments. A trailing '.' attached to an unquoted token is the
// statement terminator.
class TripleTextParser {
public:
    TripleTextParser(std::string_view src, const PrefixMap& base, bool allow_variables)
        : src_(src), prefixes_(base), allow_variables_(allow_variables) {}

    std::vector<TriplePattern> run() {
        std::vector<TriplePattern> out;
        while (true) {
            skip_ws();
            if (at_end()) break;
            if (try_prefix_directive()) continue;
            out.push_back(statement());
        }
        return out;
    }

private:
    using ObjectTerm = std::variant<Variable, Iri, Literal>;

    std::string_view src_;
    PrefixMap prefixes_;
    bool allow_variables_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;

    [[noreturn]] void fail(const std::string& msg, int line, int col) const {
        throw ParseError(msg, line, col);
    }
    [[noreturn]] void fail(const std::string& msg) const { fail(msg, line_, col_); }

    bool at_end() const { return pos_ >= src_.size(); }
    char peek() const { return src_[pos_]; }

    char advance() {
        char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_ws() {
        while (!at_end()) {
            char c = peek();
            if (c == '#') {
                while (!at_end() && peek() != '\n') advance();
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else {
                break;
            }
        }
    }

    bool lookahead_word(std::string_view word) const {
        if (src_.size() - pos_ < word.size()) return false;
        if (src_.substr(pos_, word.size()) != word) return false;
        std::size_t after = pos_ + word.size();
        return after >= src_.size() || src_[after] == ' ' || src_[after] == '\t' ||
               src_[after] == '\r' || src_[after] == '\n';
    }

    void expect_word(std::string_view word) {
        for (char c : word) {
            if (at_end() || peek() != c) fail("expected '" + std::string(word) + "'");
            advance();
        }
    }

    bool try_prefix_directive() {
        bool turtle_style = lookahead_word("@prefix");
        bool sparql_style = lookahead_word("PREFIX");
        if (!turtle_style && !sparql_style) return false;
        expect_word(turtle_style ? "@prefix" : "PREFIX");
        skip_ws();
        int nline = line_, ncol = col_;
        std::string name;
        while (!at_end() && peek() != ':' && !std::isspace(static_cast<unsigned char>(peek())))
            name += advance();
        if (at_end() || peek() != ':') fail("expected ':' after prefix name", nline, ncol);
        advance();
        skip_ws();
        Iri iri = iri_ref();
        prefixes_[name] = iri.value;
        skip_ws();
        // '@prefix' requires the closing dot; the PREFIX form takes it optionally.
        if (!at_end() && peek() == '.') {
            advance();
        } else if (turtle_style) {
            fail("expected '.' after @prefix directive");
        }
        return true;
    }

    Iri iri_ref() {
        int sline = line_, scol = col_;
        if (at_end() || peek() != '<') fail("expected IRI");
        advance();
        std::string value;
        while (!at_end() && peek() != '>') {
            char c = peek();
            if (c == '\n') fail("unterminated IRI", sline, scol);
            value += advance();
        }
        if (at_end()) fail("unterminated IRI", sline, scol);
        advance();  // '>'
        if (!valid_iri(value)) fail("malformed IRI <" + value + ">", sline, scol);
        return Iri{value};
    }

    Literal literal() {
        int sline = line_, scol = col_;
        advance();  // opening quote
        std::string lex;
        while (true) {
            if (at_end()) fail("unterminated literal", sline, scol);
            char c = advance();
            if (c == '"') break;
            if (c == '\n') fail("unterminated literal", sline, scol);
            if (c == '\\') {
                if (at_end()) fail("unterminated escape", sline, scol);
                char e = advance();
                switch (e) {
                    case '\\': lex += '\\'; break;
                    case '"': lex += '"'; break;
                    case 'n': lex += '\n'; break;
                    case 'r': lex += '\r'; break;
                    case 't': lex += '\t'; break;
                    default: fail(std::string("unknown escape '\\") + e + "'", sline, scol);
                }
            } else {
                lex += c;
            }
        }
        Datatype dt = Datatype::string;
        if (pos_ + 1 < src_.size() && src_[pos_] == '^' && src_[pos_ + 1] == '^') {
            advance();
            advance();
            std::string word;
            while (!at_end() && std::isalpha(static_cast<unsigned char>(peek()))) word += advance();
            if (word == "string") dt = Datatype::string;
            else if (word == "integer") dt = Datatype::integer;
            else if (word == "decimal") dt = Datatype::decimal;
            else if (word == "boolean") dt = Datatype::boolean;
            else fail("unknown datatype '" + word + "'", sline, scol);
        }
        if (!lexical_valid(lex, dt))
            fail("malformed " + std::string(datatype_name(dt)) + " literal \"" + lex + "\"",
                 sline, scol);
        return Literal{lex, dt};
    }

    Variable variable() {
        int sline = line_, scol = col_;
        advance();  // '?'
        std::string name;
        while (!at_end()) {
            char c = peek();
            bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                      (c >= '0' && c <= '9') || c == '_';
            if (!ok) break;
            name += advance();
        }
        if (!valid_variable_name(name)) fail("malformed variable name", sline, scol);
        if (!allow_variables_) fail("variables are not allowed in a data document", sline, scol);
        return Variable{name};
    }

    // Returns the expanded IRI of a prefixed name, stripping at most one
    // trailing '.' (the statement terminator) back into the stream.
    Iri prefixed_name() {
        int sline = line_, scol = col_;
        std::string word;
        while (!at_end()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '<' || c == '"' ||
                c == '#')
                break;
            word += advance();
        }
        if (word.size() > 1 && word.back() == '.') {
            word.pop_back();
            --pos_;  // re-expose the dot; it is pure punctuation, col bookkeeping is moot
            --col_;
        }
        auto colon = word.find(':');
        if (colon == std::string::npos)
            fail("expected a prefixed name (missing ':') in '" + word + "'", sline, scol);
        std::string prefix = word.substr(0, colon);
        std::string local = word.substr(colon + 1);
        auto it = prefixes_.find(prefix);
        if (it == prefixes_.end()) fail("unknown prefix '" + prefix + ":'", sline, scol);
        std::string value = it->second + local;
        if (!valid_iri(value)) fail("malformed IRI <" + value + ">", sline, scol);
        return Iri{value};
    }

    ObjectTerm term() {
        char c = peek();
        if (c == '<') return iri_ref();
        if (c == '"') return literal();
        if (c == '?') return variable();
        if (c == '.') fail("unexpected '.'");
        return prefixed_name();
    }

    TriplePattern statement() {
        TriplePattern out;
        int sline = line_, scol = col_;
        ObjectTerm s = term();
        if (std::holds_alternative<Literal>(s))
            fail("literal is not allowed in subject position", sline, scol);
        out.subject = std::holds_alternative<Variable>(s)
                          ? std::variant<Variable, Iri>(std::get<Variable>(s))
                          : std::variant<Variable, Iri>(std::get<Iri>(s));
        skip_ws();
        if (at_end()) fail("unexpected end of statement (missing predicate)");
        int pline = line_, pcol = col_;
        ObjectTerm p = term();
        if (std::holds_alternative<Literal>(p))
            fail("literal is not allowed in predicate position", pline, pcol);
        out.predicate = std::holds_alternative<Variable>(p)
                            ? std::variant<Variable, Iri>(std::get<Variable>(p))
                            : std::variant<Variable, Iri>(std::get<Iri>(p));
        skip_ws();
        if (at_end()) fail("unexpected end of statement (missing object)");
        out.object = term();
        skip_ws();
        if (at_end() || peek() != '.') fail("expected '.' at end of statement");
        advance();
        return out;
    }
};

}  // namespace detail

// Parses a conjunctive pattern; variables allowed in all positions
// (object position also admits literals).
inline GraphPattern parse_pattern(std::string_view text, const PrefixMap& base_prefixes = {}) {
    return GraphPattern{detail::TripleTextParser(text, base_prefixes, true).run()};
}

// Parses a ground document. Triples come back in document order; duplicates
// are preserved in the list.
inline std::vector<Triple> parse_document(std::string_view text,
                                          const PrefixMap& base_prefixes = {}) {
    auto patterns = detail::TripleTextParser(text, base_prefixes, false).run();
    std::vector<Triple> out;
    out.reserve(patterns.size());
    for (const auto& p : patterns) {
        Triple t;
        t.subject = std::get<Iri>(p.subject);
        t.predicate = std::get<Iri>(p.predicate);
        if (auto* i = std::get_if<Iri>(&p.object)) t.object = *i;
        else t.object = std::get<Literal>(p.object);
        out.push_back(std::move(t));
    }
    return out;
}

// Canonical form: expanded IRIs, one statement per line, lines sorted by
// (subject, predicate, object), duplicates collapsed.
inline std::string serialize_triples(std::vector<Triple> triples) {
    std::sort(triples.begin(), triples.end(), triple_less);
    triples.erase(std::unique(triples.begin(), triples.end()), triples.end());
    std::string out;
    for (const auto& t : triples) {
        out += triple_line(t);
        out += "\n";
    }
    return out;
}

}  // namespace smartws
