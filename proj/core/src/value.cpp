#include "tnorm/value.hpp"

#include <cstdio>

namespace tnorm {

namespace {

std::string render_decimal(double d) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", d);
    return buf;
}

} // namespace

std::string Value::canonical() const {
    struct V {
        std::string operator()(const Resource& r) const { return "r:" + r.id; }
        std::string operator()(const Text& t) const { return "s:" + t.value; }
        std::string operator()(std::int64_t i) const { return "i:" + std::to_string(i); }
        std::string operator()(double d) const { return "d:" + render_decimal(d); }
        std::string operator()(Timestamp t) const { return "t:" + format_timestamp(t); }
        std::string operator()(Duration d) const { return "u:" + format_duration(d); }
    };
    return std::visit(V{}, v_);
}

std::string Value::display() const {
    struct V {
        std::string operator()(const Resource& r) const { return r.id; }
        std::string operator()(const Text& t) const { return "'" + t.value + "'"; }
        std::string operator()(std::int64_t i) const { return std::to_string(i); }
        std::string operator()(double d) const { return render_decimal(d); }
        std::string operator()(Timestamp t) const { return format_timestamp(t); }
        std::string operator()(Duration d) const { return format_duration(d); }
    };
    return std::visit(V{}, v_);
}

const char* to_string(CmpOp op) {
    switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Eq: return "=";
    case CmpOp::Ne: return "!=";
    case CmpOp::Ge: return ">=";
    case CmpOp::Gt: return ">";
    }
    return "?";
}

namespace {

bool apply(int cmp, CmpOp op) {
    switch (op) {
    case CmpOp::Lt: return cmp < 0;
    case CmpOp::Le: return cmp <= 0;
    case CmpOp::Eq: return cmp == 0;
    case CmpOp::Ne: return cmp != 0;
    case CmpOp::Ge: return cmp >= 0;
    case CmpOp::Gt: return cmp > 0;
    }
    return false;
}

} // namespace

bool compare_values(const Value& lhs, CmpOp op, const Value& rhs) {
    if (lhs.is_numeric() && rhs.is_numeric()) {
        if (lhs.is_int() && rhs.is_int()) {
            auto a = lhs.as_int(), b = rhs.as_int();
            return apply(a < b ? -1 : a > b ? 1 : 0, op);
        }
        double a = lhs.as_double(), b = rhs.as_double();
        return apply(a < b ? -1 : a > b ? 1 : 0, op);
    }
    if (lhs.is_timestamp() && rhs.is_timestamp()) {
        auto a = lhs.as_timestamp().ms, b = rhs.as_timestamp().ms;
        return apply(a < b ? -1 : a > b ? 1 : 0, op);
    }
    if (lhs.is_duration() && rhs.is_duration()) {
        auto a = lhs.as_duration().ms, b = rhs.as_duration().ms;
        return apply(a < b ? -1 : a > b ? 1 : 0, op);
    }
    // Remaining kinds support only (in)equality, and only within the kind.
    if (op == CmpOp::Eq || op == CmpOp::Ne) {
        if (lhs.storage().index() != rhs.storage().index()) return false;
        return (lhs == rhs) == (op == CmpOp::Eq);
    }
    return false;
}

} // namespace tnorm
