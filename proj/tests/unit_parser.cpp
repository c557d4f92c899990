#include <doctest.h>

#include <string>
#include <vector>

#include "support/testutil.hpp"
#include "tnorm/ast.hpp"
#include "tnorm/errors.hpp"
#include "tnorm/parser.hpp"

using namespace tnorm;

namespace {

// Parses a mutated rule text and returns the diagnostic. A wrong exception
// type escapes and fails the enclosing test case with its message.
template <class E>
std::string err(const std::string& text) {
    try {
        (void)parse_norms(text, "bad.norms");
        return "<parse succeeded>";
    } catch (const E& e) {
        return e.what();
    }
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

#define CHECK_ERR(E, text, needle)                                                                 \
    do {                                                                                           \
        const std::string m_ = err<E>(text);                                                       \
        INFO("diagnostic: ", m_);                                                                  \
        CHECK(contains(m_, needle));                                                               \
    } while (0)

// A valid general norm split into replaceable chunks so each negative test
// states only its own mutation.
struct NormText {
    std::string head = "NORM G1\n";
    std::string outer =
        "ON ?e1 WHERE Ping(?e1) AND atTime(?e1,?i1) AND inXSDDateTimeStamp(?i1,?t1)\nTHEN\n";
    std::string compute = "COMPUTE ?tend.hour = ?t1.hour + 2\n";
    std::string create = "CREATE DeonticRelation(?dr); TimeEvent(?tev); Instant(?iv);\n";
    std::string asserts = "ASSERT isGenerated(?dr,G1); activated(?dr,?e1); end(?dr,?tev);\n"
                          "       atTime(?tev,?iv); inXSDDateTimeStamp(?iv,?tend);\n";
    std::string inner = "ON ?e2 BEFORE ?tev\n"
                        "WHERE Pong(?e2) AND actor(?e2,?who)\n"
                        "THEN ASSERT fulfills(?who,?dr); fulfilled(?dr,?e2)\n";
    std::string tail;

    std::string text() const { return head + outer + compute + create + asserts + inner + tail; }
};

const NormAst& norm_at(const std::vector<RuleItem>& items, size_t i) {
    REQUIRE(i < items.size());
    const auto* n = std::get_if<NormAst>(&items[i]);
    REQUIRE(n != nullptr);
    return *n;
}

const ExceptionAst& exception_at(const std::vector<RuleItem>& items, size_t i) {
    REQUIRE(i < items.size());
    const auto* e = std::get_if<ExceptionAst>(&items[i]);
    REQUIRE(e != nullptr);
    return *e;
}

} // namespace

TEST_CASE("parser: pretty-print round trip is the identity on every rule fixture") {
    const char* files[] = {
        "norms/traffic.norms",   "norms/library.norms",  "norms/quarantine.norms",
        "norms/school.norms",    "norms/redlight.norms", "norms/delivery.norms",
        "norms/implication.norms", "norms/drill.norms",
    };
    for (const char* rel : files) {
        CAPTURE(rel);
        auto first = load_norms_file(testutil::fixture_path(rel));
        std::string printed = pretty_print(first);
        auto second = parse_norms(printed, rel);
        REQUIRE(second.size() == first.size());
        for (size_t i = 0; i < first.size(); ++i) {
            CAPTURE(i);
            CHECK(first[i] == second[i]);
        }
        // And printing the reparse reproduces the same text.
        CHECK(pretty_print(second) == printed);
    }
}

TEST_CASE("parser: congestion-charge norm parses into the documented shape") {
    auto items = load_norms_file(testutil::fixture_path("norms/traffic.norms"));
    REQUIRE(items.size() == 2);

    const NormAst& n = norm_at(items, 0);
    CHECK(n.name == "Norm01");
    CHECK(n.outer.event_var == "e1");
    CHECK_FALSE(n.outer.synthesized);
    REQUIRE(n.outer.conditions.atoms.size() == 7);
    CHECK(n.outer.conditions.atoms[0].kind == Atom::Kind::Class);
    CHECK(n.outer.conditions.atoms[0].name == "RestrictedTrafficAreaAccess");

    // "7 a.m." and "7 p.m." are plain hour numbers after parsing.
    const Atom& am = n.outer.conditions.atoms[5];
    REQUIRE(am.kind == Atom::Kind::Compare);
    CHECK(am.op == CmpOp::Gt);
    REQUIRE(am.rhs.kind == Expr::Kind::Lit);
    CHECK(am.rhs.lit == Value(std::int64_t{7}));
    const Atom& pm = n.outer.conditions.atoms[6];
    REQUIRE(pm.rhs.kind == Expr::Kind::Lit);
    CHECK(pm.rhs.lit == Value(std::int64_t{19}));

    // "?tend_n.hour = ?t1.hour + 24" assigns a shifted timestamp.
    REQUIRE(n.computes.size() == 1);
    CHECK(n.computes[0].target == "tend_n");
    const Expr& e = n.computes[0].expr;
    REQUIRE(e.kind == Expr::Kind::Add);
    CHECK(e.args[0].kind == Expr::Kind::Var);
    CHECK(e.args[0].var == "t1");
    REQUIRE(e.args[1].kind == Expr::Kind::Lit);
    CHECK(e.args[1].lit == Value(hours(24)));

    REQUIRE(n.creates.size() == 3);
    CHECK(n.creates[0].class_name == "DeonticRelation");
    CHECK(n.dr_var() == "dr");
    CHECK(n.is_specific());
    CHECK(n.asserts.size() == 6);

    CHECK(n.inner.event_var == "e2");
    REQUIRE(n.inner.before.has_value());
    CHECK(n.inner.before->event_var == "tevend_n");
    CHECK(n.inner.before->conditions.atoms.empty());
    CHECK(n.inner.conditions.atoms.size() == 6);
    CHECK(n.inner.then_asserts.size() == 2);
    REQUIRE(n.inner.else_asserts.has_value());
    CHECK(n.inner.else_asserts->size() == 2);

    // Literal flavours survive: quoted text vs bare resource vs integer.
    const Atom& recipient = n.inner.conditions.atoms[2];
    CHECK(recipient.terms[1].value == Value(Text{"Milan"}));
    const Atom& price = n.inner.conditions.atoms[3];
    CHECK(price.terms[1].value == Value(std::int64_t{6}));
    const Atom& currency = n.inner.conditions.atoms[4];
    CHECK(currency.terms[1].value == Value(Resource{"euro"}));

    const ExceptionAst& exc = exception_at(items, 1);
    CHECK(exc.target == "Norm01");
    CHECK(exc.kind == ExceptionKind::ToActivation);
    CHECK(exc.name == "Norm01/exception1");
    CHECK(exc.event_var == "e1");
}

TEST_CASE("parser: unconditional norms get a synthesized enactment trigger") {
    auto items = load_norms_file(testutil::fixture_path("norms/redlight.norms"));
    const NormAst& n = norm_at(items, 0);
    CHECK(n.outer.synthesized);
    CHECK(n.outer.event_var == "__enact");
    REQUIRE(n.outer.conditions.atoms.size() == 4);
    CHECK(n.outer.conditions.atoms[0].kind == Atom::Kind::Class);
    CHECK(n.outer.conditions.atoms[0].name == "NormEnactment");
    CHECK(n.outer.conditions.atoms[1].name == "enacts");
    CHECK(n.outer.conditions.atoms[1].terms[1].value == Value(Resource{n.name}));
    CHECK(n.outer.conditions.atoms[2].name == "atTime");
    CHECK(n.outer.conditions.atoms[3].name == "inXSDDateTimeStamp");
}

TEST_CASE("parser: file order is preserved and forward exception targets work") {
    std::string text = "EXCEPTION Early TO G1\nON ?e1 WHERE Drill(?e1)\nTHEN exceptionToNorm(G1,?e1)\n" +
                       NormText{}.text();
    auto items = parse_norms(text);
    REQUIRE(items.size() == 2);
    CHECK(exception_at(items, 0).name == "Early");
    CHECK(norm_at(items, 1).name == "G1");
}

TEST_CASE("parser: anonymous exceptions are numbered per target") {
    NormText base;
    base.tail = "EXCEPTION TO G1\nON ?e1 WHERE Storm(?e1)\nTHEN exceptionToNorm(G1,?e1)\n"
                "EXCEPTION TO G1\nON ?e1 WHERE Flood(?e1)\nTHEN exceptionToNorm(G1,?e1)\n";
    auto items = parse_norms(base.text());
    REQUIRE(items.size() == 3);
    CHECK(exception_at(items, 1).name == "G1/exception1");
    CHECK(exception_at(items, 2).name == "G1/exception2");
}

TEST_CASE("parser: unrelated-event exceptions gain missing outcome guards") {
    NormText base;
    base.tail = "EXCEPTION Fire TO G1 TYPE 3\n"
                "ON ?en WHERE Fire(?en) AND isGenerated(?dr,G1)\n"
                "THEN exceptionToDR(?dr,?en)\n";
    auto items = parse_norms(base.text());
    const ExceptionAst& e = exception_at(items, 1);
    REQUIRE(e.conditions.atoms.size() == 4);
    const Atom& gf = e.conditions.atoms[2];
    REQUIRE(gf.kind == Atom::Kind::Not);
    REQUIRE(gf.body.size() == 1);
    CHECK(gf.body[0].name == "fulfills");
    CHECK(gf.body[0].terms[0].var == "__gf");
    CHECK(gf.body[0].terms[1].var == "dr");
    const Atom& gv = e.conditions.atoms[3];
    REQUIRE(gv.kind == Atom::Kind::Not);
    CHECK(gv.body[0].name == "violates");

    // Hand-written guards are kept, not duplicated.
    NormText with_guards;
    with_guards.tail = "EXCEPTION Fire TO G1 TYPE 3\n"
                       "ON ?en WHERE Fire(?en) AND isGenerated(?dr,G1)\n"
                       "      AND NOT fulfills(?a,?dr) AND NOT violates(?a,?dr)\n"
                       "THEN exceptionToDR(?dr,?en)\n";
    auto items2 = parse_norms(with_guards.text());
    CHECK(exception_at(items2, 1).conditions.atoms.size() == 4);
}

TEST_CASE("parser: number suffix sugar") {
    NormText t;
    t.compute = "COMPUTE ?tend = ?t1 + 90 minutes; ?x = 12 a.m.; ?y = 12 p.m.; ?z = 7p.m.;\n"
                "        ?w = ?t1 + 2 days; ?u = ?t1 + 500 ms;\n";
    auto items = parse_norms(t.text());
    const NormAst& n = norm_at(items, 0);
    REQUIRE(n.computes.size() == 6);
    CHECK(n.computes[0].expr.args[1].lit == Value(minutes(90)));
    CHECK(n.computes[1].expr.lit == Value(std::int64_t{0}));
    CHECK(n.computes[2].expr.lit == Value(std::int64_t{12}));
    CHECK(n.computes[3].expr.lit == Value(std::int64_t{19}));
    CHECK(n.computes[4].expr.args[1].lit == Value(days(2)));
    CHECK(n.computes[5].expr.args[1].lit == Value(Duration{500}));
}

TEST_CASE("parser: year arithmetic desugars to a calendar shift") {
    NormText t;
    t.compute = "COMPUTE ?tend.year = ?t1.year + 1; ?also = ?t1.year - 2;\n"
                "        ?plain = ?t1.year; ?tday.day = ?t1.day + 15;\n";
    t.asserts = "ASSERT isGenerated(?dr,G1); activated(?dr,?e1); end(?dr,?tev);\n"
                "       atTime(?tev,?iv); inXSDDateTimeStamp(?iv,?tend);\n";
    auto items = parse_norms(t.text());
    const NormAst& n = norm_at(items, 0);
    REQUIRE(n.computes.size() == 4);
    CHECK(n.computes[0].expr.kind == Expr::Kind::AddYears);
    CHECK(n.computes[0].expr.years == 1);
    CHECK(n.computes[1].expr.kind == Expr::Kind::AddYears);
    CHECK(n.computes[1].expr.years == -2);
    CHECK(n.computes[2].expr.kind == Expr::Kind::YearOf);
    REQUIRE(n.computes[3].expr.kind == Expr::Kind::Add);
    CHECK(n.computes[3].expr.args[1].lit == Value(days(15)));
}

TEST_CASE("parser: diagnostics carry file, line and column") {
    try {
        parse_norms("NORM N1\nON ?e1 WHERE Ping(?__x)\nTHEN CREATE DeonticRelation(?dr);", "f.norms");
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        const std::string m = e.what();
        CHECK(contains(m, "f.norms:2:"));
        CHECK(contains(m, "reserved"));
        CHECK(e.pos().line == 2);
    }
}

TEST_CASE("parser: lexical and structural syntax errors") {
    CHECK_ERR(SyntaxError, "NORM N ON ? WHERE", "expected a variable name after '?'");
    CHECK_ERR(SyntaxError, "NORM N ON ?__e1 WHERE", "reserved: ?__e1");
    {
        NormText t;
        t.inner = "ON ?e2 BEFORE ?tev WHERE Pong(?e2) AND note(?e2,'open\n";
        CHECK_ERR(SyntaxError, t.text(), "unterminated text literal");
    }
    CHECK_ERR(SyntaxError, "NORM N ON ?e WHERE price(?e,99999999999999999999)", "integer literal out of range");
    CHECK_ERR(SyntaxError, "NORM N ON ?e WHERE !Ping(?e)", "stray '!'");
    CHECK_ERR(SyntaxError, "NORM N ON ?e WHERE @", "unexpected character '@'");
    CHECK_ERR(SyntaxError, "RULE N", "expected NORM or EXCEPTION");
    CHECK_ERR(SyntaxError, "NORM G1\nON ?e1 THEN CREATE DeonticRelation(?dr);", "expected WHERE");
    {
        NormText t;
        t.tail = "EXCEPTION TO G1 TYPE 4\nON ?e WHERE Storm(?e)\nTHEN exceptionToNorm(G1,?e)\n";
        CHECK_ERR(SyntaxError, t.text(), "exception type must be 1, 2 or 3");
    }
    {
        NormText t;
        t.compute = "COMPUTE ?x.week = ?t1.hour + 2\n";
        CHECK_ERR(SyntaxError, t.text(), "unknown time field 'week'");
    }
    {
        NormText t;
        t.compute = "COMPUTE CREATE";
        CHECK_ERR(SyntaxError, t.text(), "COMPUTE needs at least one ?var = expression");
    }
    {
        NormText t;
        t.compute = "COMPUTE ?x.hour = ?t1 + 2 hours\n";
        CHECK_ERR(SyntaxError, t.text(), "a '.field =' target needs the form ?t.field + n");
    }
    {
        NormText t;
        t.compute = "COMPUTE ?x.hour = ?t1.day + 1\n";
        CHECK_ERR(SyntaxError, t.text(), "time fields on both sides of '=' must match");
    }
    {
        NormText t;
        t.create = "CREATE ASSERT";
        CHECK_ERR(SyntaxError, t.text(), "CREATE needs at least one Class(?var)");
    }
    {
        NormText t;
        t.asserts = "ASSERT ON";
        CHECK_ERR(SyntaxError, t.text(), "ASSERT needs at least one prop(term,term)");
    }
    {
        NormText t;
        t.outer = "ON ?e1 WHERE Ping(?e1) AND NOT ?e1 > 5\nTHEN\n";
        CHECK_ERR(SyntaxError, t.text(), "NOT expects a class or property atom");
    }
    {
        NormText t;
        t.outer = "ON ?e1 WHERE Ping(?e1) AND ?e1 AND atTime(?e1,?i1)\nTHEN\n";
        CHECK_ERR(SyntaxError, t.text(), "expected a comparison operator");
    }
    {
        NormText t;
        t.compute = "COMPUTE ?x = -foo\n";
        CHECK_ERR(SyntaxError, t.text(), "expected a number after '-'");
    }
    {
        NormText t;
        t.inner = "ON ?e2 BEFORE ?tev WHERE price(?e2,AND)\n";
        CHECK_ERR(SyntaxError, t.text(), "expected a term (variable or constant)");
    }
    {
        NormText t;
        t.compute = "COMPUTE ?x = THEN\n";
        CHECK_ERR(SyntaxError, t.text(), "expected an expression");
    }
    {
        NormText t;
        t.outer = "ON ?e1 WHERE Ping(?e1) AND atTime(?e1,?i1) AND inXSDDateTimeStamp(?i1,?t1)\n"
                  "      AND ?t1.hour > 7 a.x\nTHEN\n";
        CHECK_ERR(SyntaxError, t.text(), "expected 'm' after 'a.'/'p.'");
    }
    {
        NormText t;
        t.outer = "ON ?e1 WHERE Ping(?e1) AND atTime(?e1,?i1) AND inXSDDateTimeStamp(?i1,?t1)\n"
                  "      AND ?t1.hour > 13 a.m.\nTHEN\n";
        CHECK_ERR(SyntaxError, t.text(), "clock hour must be 1..12");
    }
}

TEST_CASE("parser: scoping and binding validation") {
    {
        NormText t;
        t.outer = "ON ?e1 WHERE Ping(?x) AND atTime(?x,?i1) AND inXSDDateTimeStamp(?i1,?t1)\nTHEN\n";
        CHECK_ERR(ValidationError, t.text(),
                  "trigger variable ?e1 does not appear in any positive condition");
    }
    {
        NormText t;
        t.outer = "ON ?e1 WHERE Ping(?e1) AND ?p > 5 AND atTime(?e1,?i1)"
                  " AND inXSDDateTimeStamp(?i1,?t1)\nTHEN\n";
        CHECK_ERR(ValidationError, t.text(), "?p used before being bound in the trigger conditions");
    }
    {
        NormText t;
        t.compute = "COMPUTE ?tend = ?zz + 2 hours\n";
        CHECK_ERR(ValidationError, t.text(), "unbound variable ?zz in COMPUTE");
    }
    {
        NormText t;
        t.compute = "COMPUTE ?e1 = ?t1 + 2 hours; ?tend = ?t1 + 2 hours\n";
        CHECK_ERR(ValidationError, t.text(), "COMPUTE target ?e1 is already bound");
    }
    {
        NormText t;
        t.create = "CREATE DeonticRelation(?dr); TimeEvent(?e1); Instant(?iv);\n";
        CHECK_ERR(ValidationError, t.text(), "CREATE variable ?e1 is already bound");
    }
    {
        NormText t;
        t.asserts = "ASSERT isGenerated(?dr,G1); activated(?dr,?e1); end(?dr,?tev);\n"
                    "       atTime(?tev,?iv); inXSDDateTimeStamp(?iv,?tend); owner(?dr,?nobody);\n";
        CHECK_ERR(ValidationError, t.text(), "unbound variable ?nobody in ASSERT");
    }
    {
        NormText t;
        t.inner = "ON ?e1 BEFORE ?tev WHERE Pong(?e1) AND actor(?e1,?who)\n"
                  "THEN ASSERT fulfills(?who,?dr); fulfilled(?dr,?e1)\n";
        CHECK_ERR(ValidationError, t.text(), "inner event variable must differ from the trigger variable");
    }
    {
        NormText t;
        t.inner = "ON ?t1 BEFORE ?tev WHERE Pong(?t1) AND actor(?t1,?who)\n"
                  "THEN ASSERT fulfills(?who,?dr); fulfilled(?dr,?t1)\n";
        CHECK_ERR(ValidationError, t.text(), "inner event variable ?t1 is already bound");
    }
    {
        NormText t;
        t.inner = "ON ?e2 BEFORE ?tev WHERE actor(?e2,?who)\n"
                  "THEN ASSERT fulfills(?who,?dr); fulfilled(?dr,?e2)\n";
        auto items = parse_norms(t.text()); // property atoms bind too
        CHECK(norm_at(items, 0).inner.conditions.atoms.size() == 1);
    }
    {
        NormText t;
        t.inner = "ON ?e2 BEFORE ?tev WHERE NOT Pong(?e2)\n"
                  "THEN ASSERT fulfills(?who,?dr); fulfilled(?dr,?e2)\n";
        CHECK_ERR(ValidationError, t.text(),
                  "regulated event ?e2 does not appear in any positive condition");
    }
    {
        NormText t;
        t.inner = "ON ?e2 BEFORE ?tev WHERE Pong(?e2) AND ?amount > 5 AND actor(?e2,?who)\n"
                  "THEN ASSERT fulfills(?who,?dr); fulfilled(?dr,?e2)\n";
        CHECK_ERR(ValidationError, t.text(), "?amount used before being bound in the regulated conditions");
    }
    {
        NormText t;
        t.inner = "ON ?e2 BEFORE ?tev WHERE Pong(?e2)\n"
                  "THEN ASSERT fulfills(?e2,?dr); fulfilled(?dr,?e2)\n";
        CHECK_ERR(ValidationError, t.text(), "must bind an actor via actor(?e2,?agent)");
    }
}

TEST_CASE("parser: create and assert discipline") {
    {
        NormText t;
        t.create = "CREATE DeonticRelation(?dr); NormEnactment(?tev); Instant(?iv);\n";
        CHECK_ERR(ValidationError, t.text(), "CREATE may not mint 'NormEnactment'");
    }
    {
        NormText t;
        t.create = "CREATE TimeEvent(?tev); Instant(?iv);\n";
        t.asserts = "ASSERT end(?tev,?tev);\n";
        CHECK_ERR(ValidationError, t.text(), "must CREATE exactly one DeonticRelation");
    }
    {
        NormText t;
        t.create = "CREATE DeonticRelation(?dr); DeonticRelation(?dr2); TimeEvent(?tev); Instant(?iv);\n";
        CHECK_ERR(ValidationError, t.text(), "must CREATE exactly one DeonticRelation");
    }
    {
        NormText t;
        t.asserts = "ASSERT isGenerated(?dr,G1); activated(?dr,?e1); fulfilled(?dr,?e1);\n"
                    "       end(?dr,?tev); atTime(?tev,?iv); inXSDDateTimeStamp(?iv,?tend);\n";
        CHECK_ERR(ValidationError, t.text(), "outcome predicate 'fulfilled' outside the inner rule");
    }
    {
        NormText t;
        t.asserts = "ASSERT isGenerated(?dr,G1); activated(?dr,?e1); exceptionToDR(?dr,?e1);\n"
                    "       end(?dr,?tev); atTime(?tev,?iv); inXSDDateTimeStamp(?iv,?tend);\n";
        CHECK_ERR(ValidationError, t.text(), "'exceptionToDR' may only be asserted by exceptions");
    }
    {
        NormText t;
        t.asserts = "ASSERT isGenerated(?dr,G1); activated(?dr,?e1); happened(?e1,?t1);\n"
                    "       end(?dr,?tev); atTime(?tev,?iv); inXSDDateTimeStamp(?iv,?tend);\n";
        CHECK_ERR(ValidationError, t.text(), "'happened' cannot be asserted by rules");
    }
    {
        NormText t;
        t.asserts = "ASSERT isGenerated(?dr,Other); activated(?dr,?e1); end(?dr,?tev);\n"
                    "       atTime(?tev,?iv); inXSDDateTimeStamp(?iv,?tend);\n";
        CHECK_ERR(ValidationError, t.text(), "isGenerated must link the created relation to this norm's own name");
    }
    {
        NormText t;
        t.asserts = "ASSERT activated(?dr,?e1); end(?dr,?tev);\n"
                    "       atTime(?tev,?iv); inXSDDateTimeStamp(?iv,?tend);\n";
        CHECK_ERR(ValidationError, t.text(), "missing ASSERT isGenerated(?dr,G1)");
    }
    {
        NormText t;
        t.asserts = "ASSERT isGenerated(?dr,G1); activated(?dr,?tev); end(?dr,?tev);\n"
                    "       atTime(?tev,?iv); inXSDDateTimeStamp(?iv,?tend);\n";
        CHECK_ERR(ValidationError, t.text(), "activated must record the trigger event ?e1");
    }
    {
        NormText t;
        t.asserts = "ASSERT isGenerated(?dr,G1); activated(?dr,?e1); debtor(?e1,?e1); end(?dr,?tev);\n"
                    "       atTime(?tev,?iv); inXSDDateTimeStamp(?iv,?tend);\n";
        CHECK_ERR(ValidationError, t.text(), "debtor must have the created relation as its subject");
    }
    {
        NormText t;
        t.compute = "COMPUTE ?n = 1 + 2; ?tend.hour = ?t1.hour + 2\n";
        t.asserts = "ASSERT isGenerated(?dr,G1); activated(?dr,?e1); end(?dr,?tev);\n"
                    "       atTime(?tev,?iv); inXSDDateTimeStamp(?iv,?n);\n";
        CHECK_ERR(ValidationError, t.text(), "inXSDDateTimeStamp needs a timestamp value, ?n is not one");
    }
}

TEST_CASE("parser: compute type discipline") {
    auto bad_compute = [](const std::string& stmt, const std::string& needle) {
        NormText t;
        t.compute = "COMPUTE ?n = 1 + 2; " + stmt + "; ?tend.hour = ?t1.hour + 2\n";
        CHECK_ERR(ValidationError, t.text(), needle);
    };
    bad_compute("?x = ?n.hour", "time-field accessor on a non-timestamp");
    bad_compute("?x = ?n.year + 2", ".year arithmetic on a non-timestamp");
    bad_compute("?x = ?t1 + ?t1", "timestamp + timestamp is not defined");
    bad_compute("?x = ?t1 + 5", "timestamp and bare number cannot be added");
    bad_compute("?x = 24 hours + 5", "duration and bare number cannot be added");
    bad_compute("?x = ?t1 * 2", "timestamps cannot be multiplied or divided");
    bad_compute("?x = 24 hours * 2 hours", "duration * duration is not defined");
    bad_compute("?x = 5 / 24 hours", "number / duration is not defined");
    bad_compute("?x = 'label' + 1", "arithmetic on a non-numeric value");
    bad_compute("?x = 24 hours - ?t1", "duration - timestamp is not defined");

    // Legal combinations still pass.
    NormText ok;
    ok.compute = "COMPUTE ?d = ?t1 - ?t1; ?later = ?t1 + ?d; ?scaled = ?d * 2;\n"
                 "        ?tend.hour = ?t1.hour + 2\n";
    CHECK(parse_norms(ok.text()).size() == 1);
}

TEST_CASE("parser: deadline chain validation") {
    {
        NormText t;
        t.inner = "ON ?e2 BEFORE ?iv WHERE Pong(?e2) AND actor(?e2,?who)\n"
                  "THEN ASSERT fulfills(?who,?dr); fulfilled(?dr,?e2)\n";
        CHECK_ERR(ValidationError, t.text(), "BEFORE on a created individual requires a TimeEvent, got Instant");
    }
    {
        NormText t;
        t.asserts = "ASSERT isGenerated(?dr,G1); activated(?dr,?e1);\n"
                    "       atTime(?tev,?iv); inXSDDateTimeStamp(?iv,?tend);\n";
        CHECK_ERR(ValidationError, t.text(), "a created deadline needs ASSERT end(?dr,?tev)");
    }
    {
        NormText t;
        t.inner = "ON ?e2 BEFORE ?b WHERE Pong(?e2) AND actor(?e2,?who)\n"
                  "THEN ASSERT fulfills(?who,?dr); fulfilled(?dr,?e2)\n";
        CHECK_ERR(ValidationError, t.text(), "BEFORE event ?b is neither created nor bound by its conditions");
    }
    {
        NormText t;
        t.inner = "ON ?e2 BEFORE ?b WHERE Deadline(?b) AND ?late > 5\n"
                  "WHERE Pong(?e2) AND actor(?e2,?who)\n"
                  "THEN ASSERT fulfills(?who,?dr); fulfilled(?dr,?e2)\n";
        CHECK_ERR(ValidationError, t.text(), "?late used before being bound in BEFORE conditions");
    }
    {
        NormText t;
        t.inner = "ON ?e2 WHERE Pong(?e2) AND actor(?e2,?who)\n"
                  "THEN ASSERT fulfills(?who,?dr); fulfilled(?dr,?e2)\n"
                  "ELSE ASSERT violates(?who,?dr); violated(?dr,?e2)\n";
        CHECK_ERR(ValidationError, t.text(), "ELSE requires a BEFORE clause");
    }
}

TEST_CASE("parser: outcome pair validation") {
    auto with_then = [](const std::string& then_else) {
        NormText t;
        t.inner = "ON ?e2 BEFORE ?tev WHERE Pong(?e2) AND actor(?e2,?who)\n" + then_else;
        return t.text();
    };
    CHECK_ERR(ValidationError,
              with_then("THEN ASSERT fulfills(?who,?dr); fulfills(?e2,?dr); fulfilled(?dr,?e2)\n"),
              "THEN has more than one fulfills/violates assert");
    CHECK_ERR(ValidationError,
              with_then("THEN ASSERT fulfilled(?dr,?e2); violated(?dr,?e2)\n"),
              "THEN has more than one fulfilled/violated assert");
    CHECK_ERR(ValidationError, with_then("THEN ASSERT fulfills(?who,?dr)\n"),
              "THEN must assert exactly one outcome pair");
    CHECK_ERR(ValidationError,
              with_then("THEN ASSERT fulfills(?who,?dr); violated(?dr,?e2)\n"),
              "THEN mixes outcome kinds (fulfills with violated)");
    CHECK_ERR(ValidationError,
              with_then("THEN ASSERT fulfills(?who,?e2); fulfilled(?dr,?e2)\n"),
              "fulfills must name the created relation ?dr as its object");
    CHECK_ERR(ValidationError,
              with_then("THEN ASSERT fulfills(?who,?dr); fulfilled(?e2,?dr)\n"),
              "fulfilled must name the created relation ?dr as its subject");
    CHECK_ERR(ValidationError,
              with_then("THEN ASSERT fulfills(?who,?dr); fulfilled(?dr,?e2); exceptionToNorm(G1,?e2)\n"),
              "THEN may not assert 'exceptionToNorm'");
    CHECK_ERR(ValidationError,
              with_then("THEN ASSERT fulfills(?who,?dr); fulfilled(?dr,?e2)\n"
                        "ELSE ASSERT fulfills(?who,?dr); fulfilled(?dr,?tev)\n"),
              "THEN and ELSE must carry opposite outcomes");
    CHECK_ERR(ValidationError,
              with_then("THEN ASSERT fulfills(?who,?dr); fulfilled(?dr,?e2)\n"
                        "ELSE ASSERT violates(?who,?dr); violated(?dr,?nowhere)\n"),
              "unbound variable ?nowhere in ELSE assert");
}

TEST_CASE("parser: exception kind and target validation") {
    auto with_exc = [](const std::string& exc) {
        NormText t;
        t.tail = exc;
        return t.text();
    };
    CHECK_ERR(CompileError,
              with_exc("EXCEPTION X TO G1 TYPE 3\nON ?e WHERE Storm(?e)\nTHEN exceptionToNorm(G1,?e)\n"),
              "TYPE 3 cannot conclude exceptionToNorm");
    CHECK_ERR(ValidationError,
              with_exc("EXCEPTION X TO G1\nON ?e WHERE Storm(?e) AND isGenerated(?dr,G1)\n"
                       "THEN exceptionToDR(?dr,?e)\n"),
              "exceptionToDR requires an explicit TYPE 2 or TYPE 3 clause");
    CHECK_ERR(CompileError,
              with_exc("EXCEPTION X TO G1 TYPE 1\nON ?e WHERE Storm(?e) AND isGenerated(?dr,G1)\n"
                       "THEN exceptionToDR(?dr,?e)\n"),
              "TYPE 1 cannot conclude exceptionToDR");
    CHECK_ERR(ValidationError,
              with_exc("EXCEPTION X TO G1\nON ?e WHERE Storm(?e)\nTHEN cancels(G1,?e)\n"),
              "exception consequent must be exceptionToNorm, exceptionToDR or exceptionToException");
    CHECK_ERR(UnknownTarget,
              with_exc("EXCEPTION X TO Nope\nON ?e WHERE Storm(?e)\nTHEN exceptionToNorm(Nope,?e)\n"),
              "unknown norm 'Nope'");
    CHECK_ERR(UnknownTarget,
              with_exc("EXCEPTION X TO NoExc\nON ?e WHERE Storm(?e)\nTHEN exceptionToException(NoExc,?e)\n"),
              "unknown exception 'NoExc'");
    CHECK_ERR(CompileError,
              with_exc("EXCEPTION X TO G1 TYPE 2\nON ?e WHERE Storm(?e)\nTHEN exceptionToException(G1,?e)\n"),
              "exceptions to exceptions take no TYPE clause");
    CHECK_ERR(UnboundExceptionVariable,
              with_exc("EXCEPTION X TO G1\nON ?e WHERE Storm(?e) AND ?far > 5\nTHEN exceptionToNorm(G1,?e)\n"),
              "variable ?far is neither bound locally nor in scope of 'G1'");
    CHECK_ERR(ValidationError,
              with_exc("EXCEPTION X TO G1\nON ?e WHERE Storm(?e)\nTHEN exceptionToNorm(G1,?other)\n"),
              "consequent must name the triggering event ?e");
    CHECK_ERR(ValidationError,
              with_exc("EXCEPTION X TO G1\nON ?e WHERE Storm(?e)\nTHEN exceptionToNorm(NotG1,?e)\n"),
              "consequent must name the target 'G1'");
    CHECK_ERR(ValidationError,
              with_exc("EXCEPTION X TO G1 TYPE 3\nON ?e WHERE Storm(?e)\nTHEN exceptionToDR(Milan,?e)\n"),
              "exceptionToDR must name a deontic-relation variable");
    CHECK_ERR(ValidationError,
              with_exc("EXCEPTION X TO G1 TYPE 3\nON ?e WHERE Storm(?e) AND DeonticRelation(?dd)\n"
                       "THEN exceptionToDR(?dd,?e)\n"),
              "conditions must include isGenerated(?dd,G1)");

    // Nesting stops at one level of exception-to-exception.
    std::string chain = with_exc(
        "EXCEPTION X TO G1\nON ?e WHERE Storm(?e)\nTHEN exceptionToNorm(G1,?e)\n"
        "EXCEPTION Y TO X\nON ?e WHERE Calm(?e)\nTHEN exceptionToException(X,?e)\n"
        "EXCEPTION Z TO Y\nON ?e WHERE Wind(?e)\nTHEN exceptionToException(Y,?e)\n");
    CHECK_ERR(ValidationError, chain, "exceptions to exceptions cannot be nested further");

    // Exceptions to the regulated phase see the whole norm scope; activation
    // exceptions see only the outer scope. Positive atoms bind locally, so
    // the distinction shows up on comparison-only uses.
    std::string uses_inner_var =
        with_exc("EXCEPTION X TO G1\nON ?e WHERE Storm(?e) AND ?who != 'mayor'\nTHEN exceptionToNorm(G1,?e)\n");
    CHECK_ERR(UnboundExceptionVariable, uses_inner_var, "?who is neither bound locally nor in scope of 'G1'");
    std::string type2_inner_var =
        with_exc("EXCEPTION X TO G1 TYPE 2\nON ?e WHERE Storm(?e) AND isGenerated(?dr,G1)"
                 " AND ?who != 'mayor'\nTHEN exceptionToDR(?dr,?e)\n");
    CHECK(parse_norms(type2_inner_var).size() == 2);
}

TEST_CASE("parser: duplicate names are rejected across norms and exceptions") {
    NormText twice;
    twice.tail = NormText{}.text();
    CHECK_ERR(ValidationError, twice.text(), "duplicate norm/exception name");

    NormText exc_clash;
    exc_clash.tail = "EXCEPTION G1 TO G1\nON ?e WHERE Storm(?e)\nTHEN exceptionToNorm(G1,?e)\n";
    CHECK_ERR(ValidationError, exc_clash.text(), "duplicate norm/exception name");
}
