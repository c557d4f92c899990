#include "tnorm/vocab.hpp"

namespace tnorm {

bool is_lifecycle_property(std::string_view name) {
    using namespace vocab;
    return name == isGenerated || name == activated || name == debtor || name == end || name == fulfills ||
           name == violates || name == fulfilled || name == violated || name == exceptionToNorm ||
           name == exceptionToDR || name == exceptionToException || name == happened || name == enacts;
}

bool is_lifecycle_class(std::string_view name) {
    using namespace vocab;
    return name == DeonticRelation || name == TimeEvent || name == NormEnactment;
}

bool is_vocab_class(std::string_view name) {
    using namespace vocab;
    return name == DeonticRelation || name == TimeEvent || name == Instant || name == Event ||
           name == NormEnactment;
}

bool is_vocab_property(std::string_view name) {
    using namespace vocab;
    return is_lifecycle_property(name) || name == atTime || name == inXSDDateTimeStamp || name == actor;
}

bool is_rule_assertable(std::string_view name) {
    using namespace vocab;
    return name != happened && name != enacts && name != a;
}

bool is_rule_creatable(std::string_view name) {
    return name != vocab::NormEnactment;
}

std::string fresh_id(std::string_view norm, std::string_view slot, std::string_view event_id) {
    std::string out;
    out.reserve(norm.size() + slot.size() + event_id.size() + 2);
    out.append(norm).append("#").append(slot).append("#").append(event_id);
    return out;
}

const std::vector<PreludeAxiom>& prelude_axioms() {
    static const std::vector<PreludeAxiom> axioms = {
        {vocab::TimeEvent, "rdfs:subClassOf", vocab::Event},
    };
    return axioms;
}

} // namespace tnorm
