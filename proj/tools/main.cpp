// Command-line front end: check/compile norm files, monitor event streams,
// run simulations, and an interactive what-if REPL.
//
// Exit codes: 0 ok, 1 norm errors, 2 scenario errors, 3 engine budget.
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tnorm/compiler.hpp"
#include "tnorm/errors.hpp"
#include "tnorm/parser.hpp"
#include "tnorm/runtime.hpp"
#include "tnorm/scenario.hpp"
#include "tnorm/triples.hpp"

namespace {

using namespace tnorm;

constexpr int kExitOk = 0;
constexpr int kExitNormError = 1;
constexpr int kExitScenarioError = 2;
constexpr int kExitBudget = 3;

struct Config {
    std::vector<std::string> norm_files;
    std::vector<std::string> schema_files;
    std::string scenario_file;
    std::string out_file;
    bool trace = false;
    std::size_t budget = Engine::kDefaultBudget;
    std::string skew = "0s";
    std::string start;
};

struct Inputs {
    std::vector<RuleItem> items;
    RuleSet rules;
    Schema schema;
    std::vector<Fact> base_facts;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Inputs load_inputs(const Config& cfg) {
    Inputs in;
    if (cfg.norm_files.size() == 1) {
        in.items = load_norms_file(cfg.norm_files[0]);
    } else {
        // Cross-file exception targets need one validation pass, so multiple
        // files parse as one concatenated unit.
        std::string all;
        for (const auto& f : cfg.norm_files) {
            all += slurp(f);
            all += '\n';
        }
        in.items = parse_norms(all, "<norm files>");
    }
    std::vector<SchemaAxiom> axioms;
    for (const auto& f : cfg.schema_files) {
        TripleDoc doc = load_triples_file(f);
        axioms.insert(axioms.end(), doc.axioms.begin(), doc.axioms.end());
        in.base_facts.insert(in.base_facts.end(), doc.facts.begin(), doc.facts.end());
    }
    in.schema = load_schema(axioms);
    in.rules = compile_rules(in.items);
    return in;
}

// stdout unless --out names a file.
class Output {
  public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw ScenarioError("cannot open output file '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

  private:
    std::ofstream file_;
};

void print_summary(std::ostream& os, const std::vector<DeonticEvent>& log) {
    std::size_t act = 0, ful = 0, vio = 0, inh = 0;
    for (const auto& ev : log) {
        switch (ev.kind) {
            case DeonticKind::Activated: ++act; break;
            case DeonticKind::Fulfilled: ++ful; break;
            case DeonticKind::Violated: ++vio; break;
            case DeonticKind::Inhibited: ++inh; break;
        }
    }
    os << "{\"summary\":{\"activations\":" << act << ",\"fulfilments\":" << ful
       << ",\"violations\":" << vio << ",\"inhibitions\":" << inh << "}}\n";
}

int cmd_check(const Config& cfg) {
    Inputs in = load_inputs(cfg);
    std::size_t norms = 0, exceptions = 0;
    for (const auto& item : in.items)
        std::holds_alternative<NormAst>(item) ? ++norms : ++exceptions;
    std::cout << "ok: " << norms << " norm(s), " << exceptions << " exception(s), "
              << in.rules.rules.size() << " production rule(s)\n";
    return kExitOk;
}

int cmd_compile(const Config& cfg) {
    Inputs in = load_inputs(cfg);
    Output out(cfg.out_file);
    out.stream() << dump(in.rules);
    return kExitOk;
}

Duration parse_skew(const std::string& text) {
    auto d = parse_duration_shorthand(text);
    if (!d) throw ScenarioError("bad --skew value '" + text + "' (use e.g. 30s, 5m, 2h)");
    return *d;
}

int run_scenario(const Config& cfg, ClockMode mode) {
    Inputs in = load_inputs(cfg);
    RuntimeOptions opts;
    opts.mode = mode;
    opts.budget = cfg.budget;
    opts.skew = parse_skew(cfg.skew);
    Runtime rt(in.rules, in.schema, opts);
    rt.load_facts(in.base_facts);

    std::vector<EventRecord> events = cfg.scenario_file.empty()
        ? std::vector<EventRecord>{}
        : load_scenario_file(cfg.scenario_file);
    if (cfg.scenario_file.empty()) {
        // Stream mode: records arrive on standard input.
        std::string line;
        int lineno = 0;
        while (std::getline(std::cin, line)) {
            ++lineno;
            auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos || line[first] == '#') continue;
            try {
                events.push_back(parse_event_json(line));
            } catch (const ScenarioError& e) {
                throw ScenarioError("<stdin>:" + std::to_string(lineno) + ": " + e.what());
            }
        }
    }

    Output out(cfg.out_file);
    if (!cfg.start.empty()) {
        auto t = parse_timestamp(cfg.start);
        if (!t) throw ScenarioError("bad --start value '" + cfg.start + "'");
        rt.set_start(*t);
    } else if (mode == ClockMode::Simulate && !events.empty()) {
        rt.set_start(events.front().time);
    }

    if (mode == ClockMode::Monitor) {
        for (const auto& ev : events)
            for (const auto& rec : rt.ingest(ev)) out.stream() << to_json_line(rec) << "\n";
    } else {
        for (const auto& ev : events) rt.ingest(ev);
        while (!rt.exhausted()) {
            std::vector<DeonticEvent> got;
            rt.advance_to_next_instant(&got);
            for (const auto& rec : got) out.stream() << to_json_line(rec) << "\n";
        }
    }
    print_summary(out.stream(), rt.log());
    if (cfg.trace) std::cerr << render_trace(rt.trace());
    return kExitOk;
}

void print_state(std::ostream& os, const Runtime& rt) {
    Pattern p;
    p.atoms = {Atom::cls("DeonticRelation", Term::variable("dr"))};
    auto drs = rt.kb().query(p);
    if (drs.empty()) {
        os << "no deontic relations\n";
        return;
    }
    for (const auto& b : drs) {
        const std::string dr = b.at("dr").as_resource().id;
        auto one = [&](const char* pred) {
            Pattern q;
            q.atoms = {Atom::prop(pred, Term::constant(Value::resource(dr)), Term::variable("x"))};
            std::vector<std::string> vals;
            for (const auto& r : rt.kb().query(q)) vals.push_back(r.at("x").display());
            return vals;
        };
        auto norms = one("isGenerated");
        os << dr << " norm=" << (norms.empty() ? "?" : norms[0]);
        std::string status;
        for (const auto& e : one("fulfilled")) status += " fulfilled-by=" + e;
        for (const auto& e : one("violated")) status += " violated-by=" + e;
        for (const auto& e : one("exceptionToDR")) status += " excepted-by=" + e;
        os << (status.empty() ? " active" : status) << "\n";
    }
}

int cmd_repl(const Config& cfg) {
    Inputs in = load_inputs(cfg);
    RuntimeOptions opts;
    opts.mode = ClockMode::Simulate;
    opts.budget = cfg.budget;
    Runtime rt(in.rules, in.schema, opts);
    rt.load_facts(in.base_facts);
    if (!cfg.start.empty()) {
        auto t = parse_timestamp(cfg.start);
        if (!t) throw ScenarioError("bad --start value '" + cfg.start + "'");
        rt.set_start(*t);
    }

    std::cout << "commands: event <json> | advance | state | whatif <json> | quit\n";
    std::string line;
    while (std::cout << "> " << std::flush, std::getline(std::cin, line)) {
        auto sp = line.find(' ');
        std::string cmd = line.substr(0, sp);
        std::string arg = sp == std::string::npos ? "" : line.substr(sp + 1);
        try {
            if (cmd.empty()) continue;
            if (cmd == "quit" || cmd == "exit") break;
            if (cmd == "event") {
                EventRecord ev = parse_event_json(arg);
                rt.ingest(ev);
                for (const auto& rec : rt.advance_to(ev.time))
                    std::cout << to_json_line(rec) << "\n";
            } else if (cmd == "advance") {
                std::vector<DeonticEvent> got;
                Timestamp t = rt.advance_to_next_instant(&got);
                std::cout << "now " << format_timestamp(t) << "\n";
                for (const auto& rec : got) std::cout << to_json_line(rec) << "\n";
            } else if (cmd == "state") {
                print_state(std::cout, rt);
            } else if (cmd == "whatif") {
                Runtime copy = rt;  // full working-memory snapshot
                EventRecord ev = parse_event_json(arg);
                copy.ingest(ev);
                auto got = copy.advance_to(ev.time);
                if (got.empty()) std::cout << "no deontic events\n";
                for (const auto& rec : got) std::cout << to_json_line(rec) << "\n";
            } else {
                std::cout << "unknown command '" << cmd << "'\n";
            }
        } catch (const FixpointBudgetExceeded& e) {
            std::cout << "error: " << e.what() << "\n";
        } catch (const Error& e) {
            std::cout << "error: " << e.what() << "\n";
        }
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"norm monitoring and simulation engine"};
    app.require_subcommand(1);

    Config cfg;
    auto add_common = [&](CLI::App* sub, bool needs_scenario) {
        sub->add_option("--norms", cfg.norm_files, "norm definition file(s)")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--schema", cfg.schema_files, "triple file(s): axioms and base facts")
            ->check(CLI::ExistingFile);
        if (needs_scenario) {
            sub->add_option("--scenario", cfg.scenario_file,
                            "event file (line-delimited JSON); standard input when omitted")
                ->check(CLI::ExistingFile);
            sub->add_option("--out", cfg.out_file, "write the deontic log here instead of stdout");
            sub->add_flag("--trace", cfg.trace, "print the rule firing trace to stderr");
            sub->add_option("--budget", cfg.budget, "firing budget per step");
            sub->add_option("--start", cfg.start, "enactment instant (xsd:dateTimeStamp)");
        }
    };

    auto* check = app.add_subcommand("check", "parse and validate norm files");
    add_common(check, false);
    auto* compile = app.add_subcommand("compile", "dump the compiled production rules");
    add_common(compile, false);
    compile->add_option("--out", cfg.out_file, "write the dump here instead of stdout");
    auto* run = app.add_subcommand("run", "monitor a timestamped event stream");
    add_common(run, true);
    run->add_option("--skew", cfg.skew, "tolerated event lateness (e.g. 30s, 5m)");
    auto* simulate = app.add_subcommand("simulate", "replay a scenario, auto-advancing the clock");
    add_common(simulate, true);
    auto* repl = app.add_subcommand("repl", "interactive what-if session");
    add_common(repl, false);
    repl->add_option("--budget", cfg.budget, "firing budget per step");
    repl->add_option("--start", cfg.start, "enactment instant (xsd:dateTimeStamp)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed()) return cmd_check(cfg);
        if (compile->parsed()) return cmd_compile(cfg);
        if (run->parsed()) return run_scenario(cfg, ClockMode::Monitor);
        if (simulate->parsed()) return run_scenario(cfg, ClockMode::Simulate);
        if (repl->parsed()) return cmd_repl(cfg);
    } catch (const FixpointBudgetExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBudget;
    } catch (const ScenarioError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitScenarioError;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNormError;
    }
    return kExitOk;
}
