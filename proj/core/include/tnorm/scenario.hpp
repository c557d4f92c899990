// Scenario files and log rendering.
//
// A scenario is line-delimited JSON, one event per line:
//
//   {"id": "e1", "time": "2021-03-01T10:00:00Z",
//    "classes": ["RestrictedTrafficAreaAccess"],
//    "props": {"vehicle": "car1", "price": 6, "note": {"text": "late"}}}
//
// Property values: a JSON string names a resource, {"text": s} is a text
// literal, {"time": s} a timestamp, integers and decimals map to the two
// numeric kinds, an array fans out to one fact per element. Lines starting
// with '#' and blank lines are skipped. Event times must be non-decreasing.
#pragma once

#include <string>
#include <vector>

#include "tnorm/runtime.hpp"

namespace tnorm {

EventRecord parse_event_json(const std::string& line);
std::vector<EventRecord> parse_scenario(const std::string& text,
                                        const std::string& filename = "<scenario>");
std::vector<EventRecord> load_scenario_file(const std::string& path);

// One JSON object per line; empty dr/agent fields are omitted.
std::string to_json_line(const DeonticEvent& ev);
std::string to_json_line(const Firing& f);
std::string render_log(const std::vector<DeonticEvent>& log);
std::string render_trace(const FiringTrace& trace);

} // namespace tnorm
