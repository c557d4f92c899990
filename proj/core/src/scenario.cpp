#include "tnorm/scenario.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tnorm/errors.hpp"

namespace tnorm {

namespace {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

Value prop_value(const json& j, const std::string& prop) {
    if (j.is_string()) return Value::resource(j.get<std::string>());
    // is_number_integer() is true for unsigned storage too; test unsigned first
    // so values above INT64_MAX are rejected instead of wrapping.
    if (j.is_number_unsigned()) {
        auto u = j.get<std::uint64_t>();
        if (u > static_cast<std::uint64_t>(INT64_MAX))
            throw ScenarioError("property '" + prop + "': integer out of range");
        return Value(static_cast<std::int64_t>(u));
    }
    if (j.is_number_integer()) return Value(j.get<std::int64_t>());
    if (j.is_number_float()) return Value(j.get<double>());
    if (j.is_object() && j.size() == 1 && j.contains("text") && j["text"].is_string())
        return Value::text(j["text"].get<std::string>());
    if (j.is_object() && j.size() == 1 && j.contains("time") && j["time"].is_string()) {
        auto ts = parse_timestamp(j["time"].get<std::string>());
        if (!ts)
            throw ScenarioError("property '" + prop + "': bad timestamp '" +
                                j["time"].get<std::string>() + "'");
        return Value(*ts);
    }
    throw ScenarioError("property '" + prop + "': unsupported value " + j.dump());
}

} // namespace

EventRecord parse_event_json(const std::string& line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw ScenarioError(std::string("bad event record: ") + e.what());
    }
    if (!j.is_object()) throw ScenarioError("event record is not a JSON object");
    if (!j.contains("id") || !j["id"].is_string())
        throw ScenarioError("event record needs a string \"id\"");
    if (!j.contains("time") || !j["time"].is_string())
        throw ScenarioError("event record needs a string \"time\"");

    EventRecord ev;
    ev.id = Resource{j["id"].get<std::string>()};
    auto ts = parse_timestamp(j["time"].get<std::string>());
    if (!ts)
        throw ScenarioError("event '" + ev.id.id + "': bad timestamp '" +
                            j["time"].get<std::string>() + "'");
    ev.time = *ts;

    if (j.contains("classes")) {
        if (!j["classes"].is_array())
            throw ScenarioError("event '" + ev.id.id + "': \"classes\" must be an array");
        for (const auto& c : j["classes"]) {
            if (!c.is_string())
                throw ScenarioError("event '" + ev.id.id + "': class names must be strings");
            ev.classes.push_back(c.get<std::string>());
        }
    }
    if (j.contains("props")) {
        if (!j["props"].is_object())
            throw ScenarioError("event '" + ev.id.id + "': \"props\" must be an object");
        for (const auto& [key, val] : j["props"].items()) {
            if (val.is_array())
                for (const auto& elem : val)
                    ev.properties.emplace_back(key, prop_value(elem, key));
            else
                ev.properties.emplace_back(key, prop_value(val, key));
        }
    }
    for (const auto& [key, val] : j.items())
        if (key != "id" && key != "time" && key != "classes" && key != "props")
            throw ScenarioError("event '" + ev.id.id + "': unknown field \"" + key + "\"");
    return ev;
}

std::vector<EventRecord> parse_scenario(const std::string& text, const std::string& filename) {
    std::vector<EventRecord> events;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        try {
            events.push_back(parse_event_json(line));
        } catch (const ScenarioError& e) {
            throw ScenarioError(filename + ":" + std::to_string(lineno) + ": " + e.what());
        }
        if (events.size() > 1 && events.back().time < events[events.size() - 2].time)
            throw ScenarioError(filename + ":" + std::to_string(lineno) +
                                ": events out of time order");
    }
    return events;
}

std::vector<EventRecord> load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path);
}

std::string to_json_line(const DeonticEvent& ev) {
    ordered j;
    j["kind"] = to_string(ev.kind);
    if (!ev.dr.empty()) j["dr"] = ev.dr;
    j["norm"] = ev.norm;
    if (!ev.agent.empty()) j["agent"] = ev.agent;
    j["cause"] = ev.cause;
    j["at"] = format_timestamp(ev.at);
    return j.dump();
}

std::string to_json_line(const Firing& f) {
    ordered j;
    j["seq"] = f.seq;
    j["rule"] = f.rule_id;
    ordered b = ordered::object();
    for (const auto& [var, val] : f.binding) b["?" + var] = val.display();
    j["binding"] = b;
    ordered added = ordered::array();
    for (const auto& fact : f.added) added.push_back(fact.display());
    j["added"] = added;
    return j.dump();
}

std::string render_log(const std::vector<DeonticEvent>& log) {
    std::string out;
    for (const auto& ev : log) {
        out += to_json_line(ev);
        out += '\n';
    }
    return out;
}

std::string render_trace(const FiringTrace& trace) {
    std::string out;
    for (const auto& f : trace) {
        out += to_json_line(f);
        out += '\n';
    }
    return out;
}

} // namespace tnorm
