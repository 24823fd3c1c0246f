// agsyn: command-line front end for the synthesis pipeline and its steps.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "agsyn/pipeline.hpp"

using namespace agsyn;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw InputError(out + ": cannot write file");
  f << text;
}

std::vector<std::string> split_events(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string e;
  while (std::getline(ss, e, ','))
    if (!e.empty()) out.push_back(e);
  return out;
}

// "agent=ev1,ev2" -> (agent, events)
std::pair<std::string, EventAlphabet> parse_override(const std::string& s) {
  auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) throw InputError("--assumption-alphabet expects agent=ev1,ev2, got '" + s + "'");
  return {s.substr(0, eq), EventAlphabet(split_events(s.substr(eq + 1)))};
}

std::string stem(const std::string& path) { return std::filesystem::path(path).stem().string(); }

struct Args {
  std::vector<std::string> inputs;
  std::string out;
  std::string events;
  std::string property;
  std::vector<std::string> overrides;
  std::string env, labeling, agent, real_env, schedule, trace_out;
  int max_rounds = -1;
  int check_depth = -1;
};

IntegratedPlan plan_agent(const Args& a, std::ostringstream& report) {
  Dfa mission = load_dfa(a.inputs.at(0));
  Environment env = load_environment(a.env);
  auto labels = load_labelings(a.labeling);
  if (!labels.count(a.agent)) throw InputError(a.labeling + ": no entry for agent " + a.agent);
  if (!env.initial.count(a.agent)) throw InputError(a.env + ": no initial region for agent " + a.agent);
  Dfa motion = motion_dfa(env, env.initial.at(a.agent));
  Dfa plan = synthesize_motion_plan(mission, labels.at(a.agent), motion, env.regions);
  auto ip = integrate(a.agent, mission, plan, labels.at(a.agent), motion, env.regions, a.check_depth < 0 ? 12 : a.check_depth);
  report << "motion_plan\n" << dfa_to_text(plan) << "\nintegrated\n" << dfa_to_text(ip.lp) << "\ndoor_profile\n"
         << dfa_to_text(ip.profile) << "\n";
  return ip;
}

PipelineConfig pipeline_config(const Args& a) {
  PipelineConfig cfg = load_pipeline_config(a.inputs.at(0));
  if (a.max_rounds >= 0) cfg.max_rounds = a.max_rounds;
  if (a.check_depth >= 0) cfg.check_depth = a.check_depth;
  for (const auto& o : a.overrides) {
    auto [agent, sigma] = parse_override(o);
    if (std::none_of(cfg.agents.begin(), cfg.agents.end(), [&](const auto& x) { return x.name == agent; }))
      throw InputError("--assumption-alphabet: unknown agent " + agent);
    cfg.assumption_alphabets[agent] = sigma;
  }
  if (!a.real_env.empty()) cfg.real_environment = load_environment(a.real_env);
  if (!a.schedule.empty()) cfg.door_schedule = load_door_schedule(a.schedule);
  return cfg;
}

int run(const std::string& cmd, const Args& a) {
  auto need = [&](std::size_t n) {
    if (a.inputs.size() < n) throw InputError(cmd + ": expected at least " + std::to_string(n) + " input file(s)");
  };
  if (cmd == "compose") {
    need(1);
    std::vector<Dfa> parts;
    for (const auto& f : a.inputs) parts.push_back(load_dfa(f));
    emit(dfa_to_text(minimize(parallel_compose(parts))), a.out);
    return kOk;
  }
  if (cmd == "project") {
    need(1);
    emit(dfa_to_text(minimize(project(load_dfa(a.inputs[0]), split_events(a.events)))), a.out);
    return kOk;
  }
  if (cmd == "complement") {
    need(1);
    emit(dfa_to_text(minimize(complement(load_dfa(a.inputs[0])))), a.out);
    return kOk;
  }
  if (cmd == "supc") {
    need(2);
    Dfa spec = load_dfa(a.inputs[0]);
    Dfa plant = load_dfa(a.inputs[1]);
    auto r = synthesize_supervisor({spec, plant_oracle(plant), plant, 12});
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
    emit(dfa_to_text(minimize(r.supervisor)), a.out);
    return is_empty(r.supervisor) ? kFailed : kOk;
  }
  if (cmd == "learn") {
    need(1);
    Dfa target = load_dfa(a.inputs[0]);
    DfaTeacher teacher(target);
    auto r = learn(teacher, target.alphabet());
    std::cerr << "equivalence_queries " << r.equivalence_queries << " membership_queries " << r.membership_queries << "\n";
    emit(dfa_to_text(r.dfa), a.out);
    return kOk;
  }
  if (cmd == "verify") {
    need(1);
    if (a.property.empty()) throw InputError("verify: --property is required");
    Dfa p = load_dfa(a.property);
    std::vector<Dfa> modules;
    std::vector<std::string> names;
    std::vector<EventAlphabet> sigmas;
    for (const auto& f : a.inputs) {
      modules.push_back(load_dfa(f));
      names.push_back(stem(f));
      sigmas.push_back(modules.back().alphabet());
    }
    EventAlphabet global = p.alphabet();
    for (const auto& s : sigmas) global = global.united(s);
    std::vector<EventAlphabet> alphabets(modules.size(), default_assumption_alphabet(sigmas, p, global));
    for (const auto& o : a.overrides) {
      auto [agent, sigma] = parse_override(o);
      auto it = std::find(names.begin(), names.end(), agent);
      if (it == names.end()) throw InputError("--assumption-alphabet: unknown module " + agent);
      alphabets[static_cast<std::size_t>(it - names.begin())] = sigma;
    }
    auto v = verify_composition(modules, p, alphabets);
    std::ostringstream out;
    out << "verdict " << to_string(v.kind) << "\n";
    if (v.kind == Verdict::Kind::refine) out << "module " << names[static_cast<std::size_t>(v.agent)] << "\n";
    if (v.kind != Verdict::Kind::holds) out << "counterexample " << to_string(v.counterexample) << "\n";
    emit(out.str(), a.out);
    return v.kind == Verdict::Kind::holds ? kOk : kFailed;
  }
  if (cmd == "plan") {
    need(1);
    std::ostringstream report;
    plan_agent(a, report);
    emit(report.str(), a.out);
    return kOk;
  }
  if (cmd == "replan") {
    need(1);
    if (a.real_env.empty()) throw InputError("replan: --real-env is required");
    std::ostringstream report;
    auto ip = plan_agent(a, report);
    auto r = replan(ip, load_environment(a.real_env));
    std::ostringstream out;
    for (const auto& act : r.actions) out << "action " << act << "\n";
    out << "integrated\n" << dfa_to_text(r.plan.lp) << "\ndoor_profile\n" << dfa_to_text(r.plan.profile) << "\n";
    emit(out.str(), a.out);
    return kOk;
  }
  if (cmd == "simulate" || cmd == "pipeline") {
    need(1);
    PipelineConfig cfg = pipeline_config(a);
    if (cmd == "simulate" && !cfg.real_environment) cfg.real_environment = cfg.environment;
    auto rep = run_pipeline(cfg);
    if (!a.trace_out.empty()) {
      if (!rep.simulation) throw InputError("--trace-out needs --real-env");
      emit(trace_to_text(rep.simulation->trace), a.trace_out);
    }
    if (cmd == "simulate") {
      if (!rep.success) {
        std::cerr << "infeasible " << rep.failed_stage << ": " << rep.failure << "\n";
        return kFailed;
      }
      if (a.trace_out.empty()) emit(trace_to_text(rep.simulation->trace), a.out);
      return kOk;
    }
    emit(rep.text, a.out);
    return rep.success ? kOk : kFailed;
  }
  throw InputError("unknown command " + cmd);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"agsyn: learning-based supervisor and motion plan synthesis"};
  app.require_subcommand(1);
  Args a;
  auto out_opt = [&](CLI::App* c) { c->add_option("-o,--out", a.out, "output file (default stdout)"); };

  auto* compose = app.add_subcommand("compose", "parallel composition of automata");
  compose->add_option("automata", a.inputs)->required()->check(CLI::ExistingFile);
  out_opt(compose);

  auto* proj = app.add_subcommand("project", "natural projection onto a sub-alphabet");
  proj->add_option("automaton", a.inputs)->required()->check(CLI::ExistingFile);
  proj->add_option("--events", a.events, "comma-separated target events")->required();
  out_opt(proj);

  auto* comp = app.add_subcommand("complement", "complement of the marked language");
  comp->add_option("automaton", a.inputs)->required()->check(CLI::ExistingFile);
  out_opt(comp);

  auto* supc = app.add_subcommand("supc", "supervisor for spec and plant by L*_LS");
  supc->add_option("files", a.inputs, "spec and plant")->required()->expected(2)->check(CLI::ExistingFile);
  out_opt(supc);

  auto* lrn = app.add_subcommand("learn", "L* against an automaton-backed teacher");
  lrn->add_option("target", a.inputs)->required()->check(CLI::ExistingFile);
  out_opt(lrn);

  auto* ver = app.add_subcommand("verify", "assume-guarantee check of modules against a property");
  ver->add_option("modules", a.inputs)->required()->check(CLI::ExistingFile);
  ver->add_option("--property", a.property)->required()->check(CLI::ExistingFile);
  ver->add_option("--assumption-alphabet", a.overrides, "module=ev1,ev2");
  out_opt(ver);

  auto plan_opts = [&](CLI::App* c) {
    c->add_option("mission", a.inputs, "mission plan automaton")->required()->check(CLI::ExistingFile);
    c->add_option("--env", a.env)->required()->check(CLI::ExistingFile);
    c->add_option("--labeling", a.labeling)->required()->check(CLI::ExistingFile);
    c->add_option("--agent", a.agent)->required();
    c->add_option("--check-depth", a.check_depth)->check(CLI::NonNegativeNumber);
    out_opt(c);
  };
  auto* plan = app.add_subcommand("plan", "motion plan, integrated plan and door profile for one agent");
  plan_opts(plan);
  auto* rpl = app.add_subcommand("replan", "adapt an agent's plan to the real environment");
  plan_opts(rpl);
  rpl->add_option("--real-env", a.real_env)->required()->check(CLI::ExistingFile);

  auto pipe_opts = [&](CLI::App* c) {
    c->add_option("config", a.inputs, "pipeline description")->required()->check(CLI::ExistingFile);
    c->add_option("--max-rounds", a.max_rounds)->check(CLI::NonNegativeNumber);
    c->add_option("--check-depth", a.check_depth)->check(CLI::NonNegativeNumber);
    c->add_option("--assumption-alphabet", a.overrides, "agent=ev1,ev2");
    c->add_option("--real-env", a.real_env)->check(CLI::ExistingFile);
    c->add_option("--schedule", a.schedule, "door schedule")->check(CLI::ExistingFile);
    c->add_option("--trace-out", a.trace_out);
    out_opt(c);
  };
  auto* sim = app.add_subcommand("simulate", "run the mission cycle and print the trace");
  pipe_opts(sim);
  auto* pipe = app.add_subcommand("pipeline", "full synthesis pipeline with report");
  pipe_opts(pipe);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }
  try {
    return run(app.get_subcommands().front()->get_name(), a);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kFailed;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
