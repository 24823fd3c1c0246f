#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "agsyn/cv_verification.hpp"
#include "agsyn/io.hpp"
#include "agsyn/motion_io.hpp"

namespace agsyn {

struct AgentConfig {
  std::string name;
  std::optional<Dfa> plant;
  std::optional<EventAlphabet> alphabet;  // plant-free agents only
};

struct PipelineConfig {
  std::vector<Dfa> mission;  // composed into L
  std::vector<AgentConfig> agents;
  Environment environment;
  std::map<std::string, Labeling> labeling;
  std::map<std::string, EventAlphabet> assumption_alphabets;
  std::optional<Environment> real_environment;
  std::vector<DoorChange> door_schedule;
  int check_depth = 12;
  int max_rounds = 100;
};

namespace detail {

inline std::string resolve(const std::filesystem::path& base, const std::string& file) {
  std::filesystem::path p(file);
  return (p.is_absolute() ? p : base / p).string();
}

}  // namespace detail

/// Reads a pipeline description; file names are relative to its directory.
inline PipelineConfig load_pipeline_config(const std::string& path) {
  const json j = load_json_file(path);
  const auto base = std::filesystem::path(path).parent_path();
  auto fail = [&](const std::string& msg) { return InputError(path + ": " + msg); };
  PipelineConfig cfg;
  try {
    for (const char* key : {"mission", "agents", "environment", "labeling"})
      if (!j.contains(key)) throw fail(std::string("missing field '") + key + "'");
    const auto& mission = j.at("mission");
    if (mission.is_string()) {
      cfg.mission.push_back(load_dfa(detail::resolve(base, mission.get<std::string>())));
    } else {
      for (const auto& f : mission) cfg.mission.push_back(load_dfa(detail::resolve(base, f.get<std::string>())));
    }
    if (cfg.mission.empty()) throw fail("no mission automaton");
    for (const auto& a : j.at("agents")) {
      AgentConfig ac;
      ac.name = a.at("name").get<std::string>();
      if (a.contains("plant")) ac.plant = load_dfa(detail::resolve(base, a.at("plant").get<std::string>()));
      if (a.contains("alphabet")) {
        std::vector<std::string> ctrl;
        if (a.contains("controllable")) ctrl = a.at("controllable").get<std::vector<std::string>>();
        ac.alphabet = EventAlphabet(a.at("alphabet").get<std::vector<std::string>>(), ctrl);
      }
      if (!ac.plant && !ac.alphabet) throw fail("agent " + ac.name + " needs a plant or an alphabet");
      for (const auto& other : cfg.agents)
        if (other.name == ac.name) throw fail("agent " + ac.name + " listed twice");
      cfg.agents.push_back(std::move(ac));
    }
    cfg.environment = load_environment(detail::resolve(base, j.at("environment").get<std::string>()));
    cfg.labeling = load_labelings(detail::resolve(base, j.at("labeling").get<std::string>()));
    if (j.contains("real_environment"))
      cfg.real_environment = load_environment(detail::resolve(base, j.at("real_environment").get<std::string>()));
    if (j.contains("door_schedule"))
      cfg.door_schedule = load_door_schedule(detail::resolve(base, j.at("door_schedule").get<std::string>()));
    if (j.contains("assumption_alphabets"))
      for (const auto& [agent, evs] : j.at("assumption_alphabets").items())
        cfg.assumption_alphabets[agent] = EventAlphabet(evs.get<std::vector<std::string>>());
    if (j.contains("check_depth")) cfg.check_depth = j.at("check_depth").get<int>();
    if (j.contains("max_rounds")) cfg.max_rounds = j.at("max_rounds").get<int>();
  } catch (const json::exception& e) {
    throw fail(e.what());
  }
  for (const auto& a : cfg.agents) {
    if (!cfg.labeling.count(a.name)) throw fail("labeling has no entry for agent " + a.name);
    if (!cfg.environment.initial.count(a.name)) throw fail("environment has no initial region for agent " + a.name);
  }
  for (const auto& [agent, sigma] : cfg.assumption_alphabets)
    if (std::none_of(cfg.agents.begin(), cfg.agents.end(), [&](const auto& a) { return a.name == agent; }))
      throw fail("assumption alphabet given for unknown agent " + agent);
  return cfg;
}

struct PipelineReport {
  bool success = false;
  std::string failed_stage;
  std::string failure;
  std::string text;
  RefineResult refine;
  std::vector<Dfa> motion_plans;
  std::vector<IntegratedPlan> integrated;
  std::vector<ReplanResult> replans;
  std::optional<SimulationResult> simulation;
  bool final_check = false;
};

/// Mission decomposition, synthesis with refinement, motion planning and,
/// given a real environment, replanning plus a simulated mission cycle.
inline PipelineReport run_pipeline(const PipelineConfig& cfg) {
  PipelineReport rep;
  std::ostringstream out;
  std::string stage = "input";
  auto section = [&](const std::string& name) {
    stage = name;
    out << "== " << name << "\n";
  };
  auto automaton = [&](const std::string& label, const Dfa& d) { out << label << "\n" << dfa_to_text(d) << "\n"; };
  try {
    std::vector<AgentModel> agents;
    std::vector<std::string> order;
    for (const auto& a : cfg.agents) {
      EventAlphabet sigma = a.plant ? a.plant->alphabet() : *a.alphabet;
      if (a.plant && a.alphabet && !(a.plant->alphabet().events() == a.alphabet->events()))
        throw InputError("agent " + a.name + ": alphabet differs from its plant");
      agents.push_back({a.name, sigma, a.plant});
      for (const auto& e : sigma.events())
        if (std::find(order.begin(), order.end(), e) == order.end()) order.push_back(e);
    }
    Dfa mission = cfg.mission.size() == 1 ? cfg.mission.front() : parallel_compose(cfg.mission);
    mission = reorder_alphabet(minimize(mission), order);

    out << "agents";
    for (const auto& a : agents) out << " " << a.name;
    out << "\nevents " << detail::quoted_list(mission.alphabet().events()) << "\n";
    out << "uncontrollable " << detail::quoted_list(global_uncontrollable(
                                    [&] {
                                      std::vector<EventAlphabet> s;
                                      for (const auto& a : agents) s.push_back(a.alphabet);
                                      return s;
                                    }(),
                                    mission.alphabet()))
        << "\n";
    out << "mission_states " << mission.num_states() << "\n";

    section("synthesis");
    RefineOptions opt;
    opt.max_rounds = cfg.max_rounds;
    for (const auto& a : agents) {
      auto it = cfg.assumption_alphabets.find(a.name);
      opt.assumption_alphabets.push_back(it == cfg.assumption_alphabets.end() ? std::nullopt
                                                                            : std::optional<EventAlphabet>(it->second));
    }
    rep.refine = verify_and_refine(agents, mission, opt);
    const auto& r = rep.refine;
    for (const auto& w : r.warnings) out << "warning " << w << "\n";
    for (std::size_t i = 0; i < agents.size(); ++i) automaton("initial_spec " + agents[i].name, r.initial_specs[i]);
    out << "rounds " << r.rounds << "\n";
    for (const auto& c : r.cuts)
      out << "cut round " << c.round << " agent " << agents[static_cast<std::size_t>(c.agent)].name << " counterexample "
          << to_string(c.counterexample) << " projected " << to_string(c.projected) << "\n";
    for (std::size_t k = 0; k < r.verify_stats.size(); ++k) {
      out << "verification " << k << " assumption_states";
      for (int s : r.verify_stats[k].assumption_states) out << " " << s;
      out << "\n";
    }
    for (std::size_t i = 0; i < agents.size(); ++i) {
      out << "assumption_alphabet " << agents[i].name << " " << detail::quoted_list(r.assumption_alphabets[i].events()) << "\n";
      automaton("spec " + agents[i].name, minimize(r.specs[i]));
      automaton("supervisor " + agents[i].name, minimize(r.supervisors[i]));
      automaton("plan " + agents[i].name, r.plans[i]);
    }

    section("motion");
    for (std::size_t i = 0; i < agents.size(); ++i) {
      const auto& name = agents[i].name;
      const auto& pi = cfg.labeling.at(name);
      Dfa motion = motion_dfa(cfg.environment, cfg.environment.initial.at(name));
      Dfa plan = synthesize_motion_plan(r.plans[i], pi, motion, cfg.environment.regions);
      rep.motion_plans.push_back(plan);
      rep.integrated.push_back(integrate(name, r.plans[i], plan, pi, motion, cfg.environment.regions, cfg.check_depth));
      automaton("motion_plan " + name, plan);
      automaton("integrated " + name, rep.integrated.back().lp);
      automaton("door_profile " + name, rep.integrated.back().profile);
    }

    section("final_check");
    std::vector<Dfa> joint;
    for (const auto& p : rep.integrated) joint.push_back(rename_regions(p, cfg.environment.regions));
    Dfa composed = parallel_compose(joint);
    auto bad = satisfaction_counterexample(composed, mission);
    if (bad) throw std::logic_error("joint integrated plans violate the mission: " + to_string(*bad));
    rep.final_check = true;
    out << "joint_plans_satisfy_mission holds\n";

    if (cfg.real_environment) {
      section("replan");
      for (const auto& p : rep.integrated) {
        rep.replans.push_back(replan(p, *cfg.real_environment));
        const auto& rp = rep.replans.back();
        for (const auto& a : rp.actions) out << "action " << p.agent << " " << a << "\n";
        if (auto v = clause_violation(rp.plan.lp, cfg.labeling.at(p.agent), p.home,
                                      run_language(motion_dfa(*cfg.real_environment, p.home), cfg.environment.regions),
                                      cfg.check_depth))
          throw std::logic_error(p.agent + ": replanned plan " + *v);
        automaton("replanned " + p.agent, rp.plan.lp);
        automaton("replanned_profile " + p.agent, rp.plan.profile);
      }
      section("simulation");
      rep.simulation = simulate(rep.integrated, cfg.environment, *cfg.real_environment, cfg.door_schedule);
      out << "replans " << rep.simulation->replans << "\n";
      for (const auto& a : rep.simulation->replan_actions) out << "action " << a << "\n";
      out << trace_to_text(rep.simulation->trace);
    }
    rep.success = true;
    out << "== result\nsuccess\n";
  } catch (const InfeasibleError& e) {
    rep.failed_stage = stage;
    rep.failure = e.what();
    out << "== result\ninfeasible " << stage << ": " << e.what() << "\n";
  }
  rep.text = out.str();
  return rep;
}

}  // namespace agsyn
