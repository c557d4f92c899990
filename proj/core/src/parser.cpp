#include "tnorm/parser.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tnorm/vocab.hpp"

namespace tnorm {

namespace {

enum class Tok {
    Ident, Var, Int, Decimal, Text,
    LParen, RParen, Comma, Semi, Dot,
    Plus, Minus, Star, Slash,
    Lt, Le, Eq, Ne, Ge, Gt,
    KwNorm, KwException, KwTo, KwType, KwOn, KwWhere, KwThen, KwElse,
    KwBefore, KwCompute, KwCreate, KwAssert, KwAnd, KwNot,
    End,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;      // Ident / Var (no sigil) / Text
    std::int64_t int_val = 0;
    double dec_val = 0.0;
    SourcePos pos;
};

Tok keyword_kind(const std::string& word) {
    if (word == "NORM") return Tok::KwNorm;
    if (word == "EXCEPTION") return Tok::KwException;
    if (word == "TO") return Tok::KwTo;
    if (word == "TYPE") return Tok::KwType;
    if (word == "ON") return Tok::KwOn;
    if (word == "WHERE") return Tok::KwWhere;
    if (word == "THEN") return Tok::KwThen;
    if (word == "ELSE") return Tok::KwElse;
    if (word == "BEFORE") return Tok::KwBefore;
    if (word == "COMPUTE") return Tok::KwCompute;
    if (word == "CREATE") return Tok::KwCreate;
    if (word == "ASSERT") return Tok::KwAssert;
    if (word == "AND") return Tok::KwAnd;
    if (word == "NOT") return Tok::KwNot;
    return Tok::Ident;
}

class Lexer {
public:
    Lexer(const std::string& text, std::string filename) : text_(text), file_(std::move(filename)) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_space();
            Token t;
            t.pos = {file_, line_, col()};
            if (at_end()) {
                t.kind = Tok::End;
                out.push_back(t);
                return out;
            }
            char c = text_[i_];
            if (c == '?') {
                ++i_;
                t.kind = Tok::Var;
                t.text = word();
                if (t.text.empty()) throw SyntaxError("expected a variable name after '?'", t.pos);
                if (t.text.size() >= 2 && t.text[0] == '_' && t.text[1] == '_')
                    throw SyntaxError("variable names starting with '__' are reserved: ?" + t.text, t.pos);
            } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                t.text = word();
                t.kind = keyword_kind(t.text);
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                number(t);
            } else if (c == '\'') {
                ++i_;
                t.kind = Tok::Text;
                while (!at_end() && text_[i_] != '\'' && text_[i_] != '\n') t.text += text_[i_++];
                if (at_end() || text_[i_] != '\'') throw SyntaxError("unterminated text literal", t.pos);
                ++i_;
            } else {
                symbol(t);
            }
            out.push_back(std::move(t));
        }
    }

private:
    bool at_end() const { return i_ >= text_.size(); }
    int col() const { return static_cast<int>(i_ - line_start_) + 1; }

    void skip_space() {
        while (!at_end()) {
            char c = text_[i_];
            if (c == '\n') {
                ++i_;
                ++line_;
                line_start_ = i_;
            } else if (c == ' ' || c == '\t' || c == '\r') {
                ++i_;
            } else if (c == '#') {
                while (!at_end() && text_[i_] != '\n') ++i_;
            } else {
                return;
            }
        }
    }

    std::string word() {
        std::string out;
        while (!at_end()) {
            char c = text_[i_];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_')
                out += c, ++i_;
            else
                break;
        }
        return out;
    }

    void number(Token& t) {
        std::string digits;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[i_]))) digits += text_[i_++];
        // A decimal needs a digit after the dot; "6." is the int 6 then '.'.
        if (!at_end() && text_[i_] == '.' && i_ + 1 < text_.size() &&
            std::isdigit(static_cast<unsigned char>(text_[i_ + 1]))) {
            std::string frac;
            ++i_;
            while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[i_]))) frac += text_[i_++];
            t.kind = Tok::Decimal;
            t.dec_val = std::stod(digits + "." + frac);
        } else {
            t.kind = Tok::Int;
            try {
                t.int_val = std::stoll(digits);
            } catch (const std::out_of_range&) {
                throw SyntaxError("integer literal out of range", t.pos);
            }
        }
    }

    void symbol(Token& t) {
        char c = text_[i_++];
        auto two = [&](char next) {
            if (!at_end() && text_[i_] == next) {
                ++i_;
                return true;
            }
            return false;
        };
        switch (c) {
        case '(': t.kind = Tok::LParen; return;
        case ')': t.kind = Tok::RParen; return;
        case ',': t.kind = Tok::Comma; return;
        case ';': t.kind = Tok::Semi; return;
        case '.': t.kind = Tok::Dot; return;
        case '+': t.kind = Tok::Plus; return;
        case '-': t.kind = Tok::Minus; return;
        case '*': t.kind = Tok::Star; return;
        case '/': t.kind = Tok::Slash; return;
        case '<': t.kind = two('=') ? Tok::Le : Tok::Lt; return;
        case '>': t.kind = two('=') ? Tok::Ge : Tok::Gt; return;
        case '=': two('='); t.kind = Tok::Eq; return;
        case '!':
            if (two('=')) {
                t.kind = Tok::Ne;
                return;
            }
            throw SyntaxError("stray '!'", t.pos);
        default:
            throw SyntaxError(std::string("unexpected character '") + c + "'", t.pos);
        }
    }

    const std::string& text_;
    std::string file_;
    size_t i_ = 0;
    size_t line_start_ = 0;
    int line_ = 1;
};

bool is_duration_unit(const std::string& w) {
    return w == "hours" || w == "hour" || w == "minutes" || w == "minute" || w == "days" || w == "day" ||
           w == "seconds" || w == "second" || w == "ms";
}

Duration unit_duration(const std::string& w) {
    if (w == "hours" || w == "hour") return hours(1);
    if (w == "minutes" || w == "minute") return minutes(1);
    if (w == "days" || w == "day") return days(1);
    if (w == "seconds" || w == "second") return seconds(1);
    return millis(1);
}

enum class TimeField { None, Hour, Minute, Day, Year };

TimeField field_of(const std::string& w) {
    if (w == "hour") return TimeField::Hour;
    if (w == "minute") return TimeField::Minute;
    if (w == "day") return TimeField::Day;
    if (w == "year") return TimeField::Year;
    return TimeField::None;
}

Expr::Kind accessor_kind(TimeField f) {
    switch (f) {
    case TimeField::Hour: return Expr::Kind::HourOf;
    case TimeField::Minute: return Expr::Kind::MinuteOf;
    case TimeField::Day: return Expr::Kind::DayOf;
    default: return Expr::Kind::YearOf;
    }
}

class Parser {
public:
    Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    std::vector<RuleItem> run() {
        std::vector<RuleItem> items;
        while (peek().kind != Tok::End) {
            if (peek().kind == Tok::KwNorm)
                items.emplace_back(parse_norm());
            else if (peek().kind == Tok::KwException)
                items.emplace_back(parse_exception());
            else
                throw SyntaxError("expected NORM or EXCEPTION", peek().pos);
        }
        validate_items(items);
        return items;
    }

private:
    const Token& peek(size_t ahead = 0) const {
        size_t j = i_ + ahead;
        return j < toks_.size() ? toks_[j] : toks_.back();
    }
    const Token& advance() { return toks_[i_ < toks_.size() - 1 ? i_++ : i_]; }
    bool accept(Tok k) {
        if (peek().kind == k) {
            advance();
            return true;
        }
        return false;
    }
    const Token& expect(Tok k, const char* what) {
        if (peek().kind != k) throw SyntaxError(std::string("expected ") + what, peek().pos);
        return advance();
    }

    // ---- items ----------------------------------------------------------

    NormAst parse_norm() {
        NormAst n;
        n.pos = peek().pos;
        expect(Tok::KwNorm, "NORM");
        n.name = expect(Tok::Ident, "a norm name").text;

        if (accept(Tok::KwOn)) {
            n.outer.event_var = expect(Tok::Var, "the trigger variable").text;
            expect(Tok::KwWhere, "WHERE");
            n.outer.conditions = parse_conditions();
            expect(Tok::KwThen, "THEN");
        } else {
            synthesize_trigger(n);
        }

        if (accept(Tok::KwCompute)) n.computes = parse_computes();
        if (accept(Tok::KwCreate)) n.creates = parse_creates();
        if (accept(Tok::KwAssert)) n.asserts = parse_asserts();

        expect(Tok::KwOn, "the inner ON clause");
        n.inner.event_var = expect(Tok::Var, "the regulated-event variable").text;
        if (accept(Tok::KwBefore)) {
            BeforeClause b;
            b.event_var = expect(Tok::Var, "the BEFORE event variable").text;
            expect(Tok::KwWhere, "WHERE");
            Pattern first = parse_conditions();
            if (accept(Tok::KwWhere)) {
                b.conditions = std::move(first);
                n.inner.conditions = parse_conditions();
            } else {
                n.inner.conditions = std::move(first);
            }
            n.inner.before = std::move(b);
        } else {
            expect(Tok::KwWhere, "WHERE");
            n.inner.conditions = parse_conditions();
        }
        expect(Tok::KwThen, "THEN");
        expect(Tok::KwAssert, "ASSERT");
        n.inner.then_asserts = parse_asserts();
        if (accept(Tok::KwElse)) {
            expect(Tok::KwAssert, "ASSERT");
            n.inner.else_asserts = parse_asserts();
        }
        return n;
    }

    void synthesize_trigger(NormAst& n) {
        n.outer.synthesized = true;
        n.outer.event_var = "__enact";
        auto v = [](const char* name) { return Term::variable(name); };
        n.outer.conditions.atoms = {
            Atom::cls(std::string(vocab::NormEnactment), v("__enact")),
            Atom::prop(std::string(vocab::enacts), v("__enact"), Term::constant(Value(Resource{n.name}))),
            Atom::prop(std::string(vocab::atTime), v("__enact"), v("__enactI")),
            Atom::prop(std::string(vocab::inXSDDateTimeStamp), v("__enactI"), v("__enactT")),
        };
    }

    ExceptionAst parse_exception() {
        ExceptionAst e;
        e.pos = peek().pos;
        expect(Tok::KwException, "EXCEPTION");
        if (peek().kind == Tok::Ident) e.name = advance().text;
        expect(Tok::KwTo, "TO");
        e.target = expect(Tok::Ident, "a target name").text;
        if (accept(Tok::KwType)) {
            const Token& t = expect(Tok::Int, "an exception type (1, 2 or 3)");
            if (t.int_val < 1 || t.int_val > 3)
                throw SyntaxError("exception type must be 1, 2 or 3", t.pos);
            e.kind = static_cast<ExceptionKind>(t.int_val);
            e.kind_explicit = true;
        }
        expect(Tok::KwOn, "ON");
        e.event_var = expect(Tok::Var, "the triggering-event variable").text;
        expect(Tok::KwWhere, "WHERE");
        e.conditions = parse_conditions();
        expect(Tok::KwThen, "THEN");
        e.consequent_predicate = expect(Tok::Ident, "the exception consequent").text;
        expect(Tok::LParen, "'('");
        e.consequent_subject = parse_term();
        expect(Tok::Comma, "','");
        e.consequent_object = parse_term();
        expect(Tok::RParen, "')'");
        accept(Tok::Semi);
        return e;
    }

    // ---- statement lists --------------------------------------------------

    std::vector<ComputeStmt> parse_computes() {
        std::vector<ComputeStmt> out;
        while (peek().kind == Tok::Var) {
            ComputeStmt c;
            SourcePos pos = peek().pos;
            c.target = advance().text;
            TimeField target_field = TimeField::None;
            if (peek().kind == Tok::Dot) {
                advance();
                const Token& f = expect(Tok::Ident, "a time field (hour, minute, day, year)");
                target_field = field_of(f.text);
                if (target_field == TimeField::None)
                    throw SyntaxError("unknown time field '" + f.text + "'", f.pos);
            }
            expect(Tok::Eq, "'='");
            c.expr = normalize_compute(target_field, parse_expr(), pos);
            out.push_back(std::move(c));
            accept(Tok::Semi);
        }
        if (out.empty()) throw SyntaxError("COMPUTE needs at least one ?var = expression", peek().pos);
        return out;
    }

    // "?x.hour = <expr>.hour + k" assigns a shifted timestamp, not a number:
    // solve for the target by turning the field offset into a duration (or a
    // calendar-year shift). A bare "?x = ?t.year + k" also means a calendar
    // shift; plain field reads stay numeric.
    Expr normalize_compute(TimeField target_field, Expr e, const SourcePos& pos) {
        const bool is_add = e.kind == Expr::Kind::Add;
        const bool is_sub = e.kind == Expr::Kind::Sub;
        const Expr* acc = nullptr;
        std::int64_t k = 0;
        if ((is_add || is_sub) && e.args[1].kind == Expr::Kind::Lit && e.args[1].lit.is_int()) {
            const Expr& lhs = e.args[0];
            if (lhs.kind == Expr::Kind::HourOf || lhs.kind == Expr::Kind::MinuteOf ||
                lhs.kind == Expr::Kind::DayOf || lhs.kind == Expr::Kind::YearOf) {
                acc = &lhs;
                k = e.args[1].lit.as_int();
                if (is_sub) k = -k;
            }
        }
        if (target_field == TimeField::None) {
            if (acc && acc->kind == Expr::Kind::YearOf)
                return Expr::add_years(acc->args[0], static_cast<int>(k));
            return e;
        }
        if (!acc)
            throw SyntaxError("a '.field =' target needs the form ?t.field + n on the right", pos);
        if (acc->kind != accessor_kind(target_field))
            throw SyntaxError("time fields on both sides of '=' must match", pos);
        if (target_field == TimeField::Year)
            return Expr::add_years(acc->args[0], static_cast<int>(k));
        Duration unit = target_field == TimeField::Hour    ? hours(k)
                        : target_field == TimeField::Minute ? minutes(k)
                                                            : days(k);
        return Expr::binary(Expr::Kind::Add, acc->args[0], Expr::literal(Value(unit)));
    }

    std::vector<CreateStmt> parse_creates() {
        std::vector<CreateStmt> out;
        while (peek().kind == Tok::Ident && peek(1).kind == Tok::LParen) {
            CreateStmt c;
            c.class_name = advance().text;
            expect(Tok::LParen, "'('");
            c.var = expect(Tok::Var, "a fresh variable").text;
            expect(Tok::RParen, "')'");
            out.push_back(std::move(c));
            accept(Tok::Semi);
        }
        if (out.empty()) throw SyntaxError("CREATE needs at least one Class(?var)", peek().pos);
        return out;
    }

    std::vector<AssertStmt> parse_asserts() {
        std::vector<AssertStmt> out;
        while (peek().kind == Tok::Ident && peek(1).kind == Tok::LParen) {
            AssertStmt s;
            s.predicate = advance().text;
            expect(Tok::LParen, "'('");
            s.subject = parse_term();
            expect(Tok::Comma, "','");
            s.object = parse_term();
            expect(Tok::RParen, "')'");
            out.push_back(std::move(s));
            accept(Tok::Semi);
        }
        if (out.empty()) throw SyntaxError("ASSERT needs at least one prop(term,term)", peek().pos);
        return out;
    }

    // ---- conditions ---------------------------------------------------------

    Pattern parse_conditions() {
        Pattern p;
        p.atoms.push_back(parse_condition());
        while (accept(Tok::KwAnd)) p.atoms.push_back(parse_condition());
        return p;
    }

    Atom parse_condition() {
        if (accept(Tok::KwNot)) {
            if (!(peek().kind == Tok::Ident && peek(1).kind == Tok::LParen))
                throw SyntaxError("NOT expects a class or property atom", peek().pos);
            return Atom::negation({parse_positive_atom()});
        }
        if (peek().kind == Tok::Ident && peek(1).kind == Tok::LParen) return parse_positive_atom();
        return parse_comparison();
    }

    Atom parse_positive_atom() {
        std::string name = advance().text;
        expect(Tok::LParen, "'('");
        Term first = parse_term();
        if (accept(Tok::Comma)) {
            Term second = parse_term();
            expect(Tok::RParen, "')'");
            return Atom::prop(std::move(name), std::move(first), std::move(second));
        }
        expect(Tok::RParen, "')'");
        return Atom::cls(std::move(name), std::move(first));
    }

    Atom parse_comparison() {
        Expr lhs = parse_expr();
        CmpOp op;
        switch (peek().kind) {
        case Tok::Lt: op = CmpOp::Lt; break;
        case Tok::Le: op = CmpOp::Le; break;
        case Tok::Eq: op = CmpOp::Eq; break;
        case Tok::Ne: op = CmpOp::Ne; break;
        case Tok::Ge: op = CmpOp::Ge; break;
        case Tok::Gt: op = CmpOp::Gt; break;
        default: throw SyntaxError("expected a comparison operator", peek().pos);
        }
        advance();
        Expr rhs = parse_expr();
        return Atom::compare(std::move(lhs), op, std::move(rhs));
    }

    Term parse_term() {
        const Token& t = peek();
        switch (t.kind) {
        case Tok::Var: advance(); return Term::variable(t.text);
        case Tok::Text: advance(); return Term::constant(Value(Text{t.text}));
        case Tok::Int: advance(); return Term::constant(Value(t.int_val));
        case Tok::Decimal: advance(); return Term::constant(Value(t.dec_val));
        case Tok::Minus: {
            advance();
            const Token& n = peek();
            if (n.kind == Tok::Int) {
                advance();
                return Term::constant(Value(-n.int_val));
            }
            if (n.kind == Tok::Decimal) {
                advance();
                return Term::constant(Value(-n.dec_val));
            }
            throw SyntaxError("expected a number after '-'", n.pos);
        }
        case Tok::Ident: advance(); return Term::constant(Value(Resource{t.text}));
        default: throw SyntaxError("expected a term (variable or constant)", t.pos);
        }
    }

    // ---- expressions --------------------------------------------------------

    Expr parse_expr() { return parse_add(); }

    Expr parse_add() {
        Expr e = parse_mul();
        while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
            Expr::Kind k = advance().kind == Tok::Plus ? Expr::Kind::Add : Expr::Kind::Sub;
            e = Expr::binary(k, std::move(e), parse_mul());
        }
        return e;
    }

    Expr parse_mul() {
        Expr e = parse_postfix();
        while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
            Expr::Kind k = advance().kind == Tok::Star ? Expr::Kind::Mul : Expr::Kind::Div;
            e = Expr::binary(k, std::move(e), parse_postfix());
        }
        return e;
    }

    Expr parse_postfix() {
        Expr e = parse_primary();
        while (peek().kind == Tok::Dot && peek(1).kind == Tok::Ident &&
               field_of(peek(1).text) != TimeField::None) {
            advance();
            TimeField f = field_of(advance().text);
            e = Expr::accessor(accessor_kind(f), std::move(e));
        }
        return e;
    }

    Expr parse_primary() {
        const Token& t = peek();
        switch (t.kind) {
        case Tok::Var: advance(); return Expr::variable(t.text);
        case Tok::Text: advance(); return Expr::literal(Value(Text{t.text}));
        case Tok::LParen: {
            advance();
            Expr e = parse_expr();
            expect(Tok::RParen, "')'");
            return e;
        }
        case Tok::Minus: {
            advance();
            const Token& n = peek();
            if (n.kind == Tok::Int) {
                advance();
                return number_suffix(-n.int_val, true, 0.0);
            }
            if (n.kind == Tok::Decimal) {
                advance();
                return number_suffix(0, false, -n.dec_val);
            }
            throw SyntaxError("expected a number after '-'", n.pos);
        }
        case Tok::Int: advance(); return number_suffix(t.int_val, true, 0.0);
        case Tok::Decimal: advance(); return number_suffix(0, false, t.dec_val);
        case Tok::Ident: advance(); return Expr::literal(Value(Resource{t.text}));
        default: throw SyntaxError("expected an expression", t.pos);
        }
    }

    // Contextual suffixes after a number: duration units ("24 hours") and
    // twelve-hour clock marks ("7 a.m.", "7p.m").
    Expr number_suffix(std::int64_t iv, bool is_int, double dv) {
        if (peek().kind == Tok::Ident) {
            const std::string& w = peek().text;
            if (is_duration_unit(w)) {
                advance();
                double n = is_int ? static_cast<double>(iv) : dv;
                double ms = n * static_cast<double>(unit_duration(w).ms);
                return Expr::literal(Value(Duration{static_cast<std::int64_t>(std::llround(ms))}));
            }
            if (is_int && (w == "am" || w == "pm" || w == "a" || w == "p")) {
                bool pm = w[0] == 'p';
                const SourcePos pos = peek().pos;
                advance();
                if (w.size() == 1) {
                    expect(Tok::Dot, "'.' in a.m./p.m.");
                    const Token& m = expect(Tok::Ident, "'m' in a.m./p.m.");
                    if (m.text != "m") throw SyntaxError("expected 'm' after 'a.'/'p.'", m.pos);
                }
                accept(Tok::Dot); // the closing dot of "a.m." / trailing "pm."
                if (iv < 1 || iv > 12) throw SyntaxError("clock hour must be 1..12", pos);
                std::int64_t hour = iv % 12 + (pm ? 12 : 0);
                return Expr::literal(Value(hour));
            }
        }
        return is_int ? Expr::literal(Value(iv)) : Expr::literal(Value(dv));
    }

    std::vector<Token> toks_;
    size_t i_ = 0;
};

} // namespace

std::vector<RuleItem> parse_norms(const std::string& text, const std::string& filename) {
    Lexer lexer(text, filename);
    Parser parser(lexer.run());
    return parser.run();
}

std::vector<RuleItem> load_norms_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open norm file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_norms(ss.str(), path);
}

} // namespace tnorm
