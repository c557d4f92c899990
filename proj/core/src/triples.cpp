#include "tnorm/triples.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "tnorm/vocab.hpp"

namespace tnorm {

namespace {

struct LineScanner {
    std::string_view line;
    size_t i = 0;
    const std::string& file;
    int lineno;

    [[noreturn]] void fail(const std::string& what) const {
        throw SyntaxError(what, SourcePos{file, lineno, static_cast<int>(i) + 1});
    }

    void skip_ws() {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    }

    bool done() {
        skip_ws();
        return i >= line.size();
    }

    std::string bare_token() {
        skip_ws();
        size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i == start) fail("expected a token");
        return std::string(line.substr(start, i - start));
    }

    std::string quoted() {
        ++i; // opening quote
        std::string out;
        while (i < line.size() && line[i] != '"') {
            if (line[i] == '\\' && i + 1 < line.size()) {
                ++i;
                switch (line[i]) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                default: fail("unsupported escape in string literal");
                }
            } else {
                out += line[i];
            }
            ++i;
        }
        if (i >= line.size()) fail("unterminated string literal");
        ++i; // closing quote
        return out;
    }

    Value object() {
        skip_ws();
        if (i < line.size() && line[i] == '"') {
            std::string s = quoted();
            if (i + 1 < line.size() && line[i] == '^' && line[i + 1] == '^') {
                i += 2;
                std::string type = bare_token();
                if (type != "xsd:dateTimeStamp") fail("unsupported literal datatype '" + type + "'");
                auto t = parse_timestamp(s);
                if (!t) fail("invalid xsd:dateTimeStamp literal \"" + s + "\"");
                return Value(*t);
            }
            return Value::text(std::move(s));
        }
        std::string tok = bare_token();
        // Numeric?
        size_t j = tok[0] == '-' ? 1 : 0;
        bool digits = j < tok.size();
        bool dot = false;
        for (size_t k = j; k < tok.size(); ++k) {
            if (tok[k] == '.' && !dot && k + 1 < tok.size()) {
                dot = true;
            } else if (!std::isdigit(static_cast<unsigned char>(tok[k]))) {
                digits = false;
                break;
            }
        }
        if (digits && dot) return Value(std::stod(tok));
        if (digits) return Value(static_cast<std::int64_t>(std::stoll(tok)));
        return Value::resource(std::move(tok));
    }
};

} // namespace

TripleDoc parse_triples(std::string_view text, const std::string& filename) {
    TripleDoc doc;
    int lineno = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        LineScanner sc{line, 0, filename, lineno};
        if (sc.done()) continue;
        if (line[sc.i] == '#') continue;

        std::string subject = sc.bare_token();
        std::string predicate = sc.bare_token();
        Value object = sc.object();
        std::string terminator = sc.bare_token();
        if (terminator != ".") sc.fail("expected '.' at end of triple");
        if (!sc.done()) sc.fail("trailing content after '.'");

        if (predicate == "rdfs:subClassOf" || predicate == "rdfs:subPropertyOf") {
            if (!object.is_resource()) sc.fail("schema axiom object must be a name");
            doc.axioms.push_back({predicate == "rdfs:subClassOf" ? SchemaAxiom::Kind::SubClassOf
                                                                 : SchemaAxiom::Kind::SubPropertyOf,
                                  subject, object.as_resource().id});
            continue;
        }
        if (predicate == "rdf:type") predicate = vocab::a;
        if (predicate == vocab::a && !object.is_resource()) sc.fail("class membership object must be a name");
        doc.facts.push_back(
            {Resource{std::move(subject)}, std::move(predicate), std::move(object), Partition::State, Origin::Asserted});
    }
    return doc;
}

TripleDoc load_triples_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open triple file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_triples(buf.str(), path);
}

} // namespace tnorm
