#include "bdisim/uav.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <stdexcept>

namespace bdisim::uav {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

using bdi::Term;

Term num(double v) { return Term::number(v); }
Term atom(std::string s) { return Term::atom(std::move(s)); }
Term var(std::string s) { return Term::var(std::move(s)); }
Term cmp(std::string f, std::vector<Term> args) {
  return Term::compound(std::move(f), std::move(args));
}

}  // namespace

void ScenarioConfig::validate() const {
  std::vector<std::string> problems;
  auto require = [&](bool ok, const char* msg) {
    if (!ok) problems.emplace_back(msg);
  };
  require(leader_radius > 0, "leader_radius_m must be positive");
  require(formation_radius > 0, "formation_radius_m must be positive");
  require(comm_range > 0, "comm_range_m must be positive");
  require(v_max > 0, "max_speed_mps must be positive");
  require(leader_period > 0, "leader_period_s must be positive");
  require(n_followers >= 0, "followers must be non-negative");
  require(arena_radius > 0, "arena_radius_m must be positive");
  require(frequency > 0, "frequency_hz must be positive");
  require(drift >= 0, "drift must be non-negative");
  require(duration > 0, "duration_s must be positive");
  require(repetitions > 0, "repetitions must be positive");
  if (!problems.empty()) {
    std::string joined;
    for (const auto& p : problems) {
      if (!joined.empty()) joined += "; ";
      joined += p;
    }
    throw std::invalid_argument("invalid scenario config: " + joined);
  }
}

int FormationState::claim(const std::string& follower) {
  auto it = assignment_.find(follower);
  if (it != assignment_.end()) return it->second;
  if (full()) throw std::logic_error("formation is full");
  int k = joined();
  assignment_.emplace(follower, k);
  return k;
}

Vec2 slot_point(Vec2 leader_pos, int k, int total, double formation_radius) {
  double theta = kTwoPi * k / total;
  return {leader_pos.x + formation_radius * std::cos(theta),
          leader_pos.y + formation_radius * std::sin(theta)};
}

std::map<std::string, Vec2> oracle_ideal_positions(
    Vec2 leader_pos, const FormationState& formation, const ScenarioConfig& cfg,
    const std::map<std::string, Vec2>& follower_positions) {
  int total = formation.total_slots();
  std::map<std::string, Vec2> out;
  std::vector<bool> claimed(static_cast<std::size_t>(std::max(total, 0)), false);

  if (cfg.oracle_matching == ScenarioConfig::OracleMatching::Fixed) {
    for (const auto& [name, k] : formation.assignment()) {
      if (follower_positions.count(name) == 0) continue;
      out[name] = slot_point(leader_pos, k, total, cfg.formation_radius);
      claimed[static_cast<std::size_t>(k)] = true;
    }
  }

  // Remaining followers take the nearest unclaimed slot, greedily in name
  // order (deterministic).
  for (const auto& [name, pos] : follower_positions) {
    if (out.count(name)) continue;
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int k = 0; k < total; ++k) {
      if (claimed[static_cast<std::size_t>(k)]) continue;
      double d = env::distance(pos, slot_point(leader_pos, k, total,
                                               cfg.formation_radius));
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    if (best < 0) {
      // More followers than slots; fall back to the nearest slot point.
      for (int k = 0; k < total; ++k) {
        double d = env::distance(pos, slot_point(leader_pos, k, total,
                                                 cfg.formation_radius));
        if (d < best_d) {
          best_d = d;
          best = k;
        }
      }
    } else {
      claimed[static_cast<std::size_t>(best)] = true;
    }
    out[name] = slot_point(leader_pos, best, total, cfg.formation_radius);
  }
  return out;
}

double formation_error(Vec2 leader_pos, const FormationState& formation,
                       const ScenarioConfig& cfg,
                       const std::map<std::string, Vec2>& follower_positions) {
  auto ideal = oracle_ideal_positions(leader_pos, formation, cfg,
                                      follower_positions);
  double sum = 0;
  for (const auto& [name, pos] : follower_positions) {
    double d = env::distance(pos, ideal.at(name));
    sum += d * d;
  }
  return sum;
}

std::shared_ptr<const bdi::AgentSpec> leader_spec(const ScenarioConfig&) {
  // The leader keeps one recurring goal: advance along the circle, invite
  // nearby agents, and hand out formation slots on request.
  return bdi::AgentSpecBuilder("leader")
      .goal(atom("move"))
      .plan(bdi::on_goal("move", atom("move"))
                .act("circleStep")
                .subgoal(atom("move"))
                .build())
      .plan(bdi::on_goal("assign", cmp("join", {var("F")}))
                .act("assignSlot", {var("F")})
                .build())
      .build();
}

std::shared_ptr<const bdi::AgentSpec> follower_spec(const ScenarioConfig& cfg,
                                                    const std::string& name) {
  double rf = cfg.formation_radius;
  Term lx = var("LX"), ly = var("LY"), k = var("K");
  Term invite = cmp("invite", {lx, ly, k});
  Term slot_pat = cmp("slot", {var("S"), var("N")});
  // Assigned position: leader + rf * (cos, sin)(2*pi*S/N), global frame.
  Term theta = cmp("/", {cmp("*", {num(kTwoPi), var("S")}), var("N")});
  Term tx = lx + num(rf) * bdi::t_cos(theta);
  Term ty = ly + num(rf) * bdi::t_sin(theta);

  auto request_body = [&](bdi::PlanBuilder& b) -> bdi::PlanBuilder& {
    return b.add_belief(cmp("requested_at", {var("T")}))
        .send(atom("leader"), env::Performative::Achieve,
              cmp("join", {atom(name)}))
        .add_belief(cmp("last_invite", {var("T")}));
  };

  bdi::PlanBuilder request = bdi::on_belief("request", invite);
  request.not_query(slot_pat)
      .not_query(cmp("requested_at", {var("T1")}))
      .query(cmp("time", {var("T")}));
  request_body(request);

  // A lost join request or slot reply would otherwise strand the follower;
  // repeat the request after a quiet window.
  bdi::PlanBuilder rerequest = bdi::on_belief("rerequest", invite);
  rerequest.not_query(slot_pat)
      .query(cmp("requested_at", {var("TR")}))
      .query(cmp("time", {var("T")}))
      .compare(cmp("-", {var("T"), var("TR")}), bdi::Cmp::Gt,
               num(cfg.rerequest_window()));
  request_body(rerequest);

  return bdi::AgentSpecBuilder(name)
      .plan(request.build())
      .plan(rerequest.build())
      .plan(bdi::on_belief("follow", invite)
                .query(slot_pat)
                .query(cmp("time", {var("T")}))
                .act("moveTo", {tx, ty})
                .add_belief(cmp("last_invite", {var("T")}))
                .build())
      .plan(bdi::on_belief("hover", cmp("time", {var("T")}))
                .query(cmp("last_invite", {var("T0")}))
                .compare(cmp("-", {var("T"), var("T0")}), bdi::Cmp::Gt,
                         num(cfg.invite_staleness()))
                .act("hover")
                .build())
      .build();
}

UavSpecs build_specs(const ScenarioConfig& cfg) {
  UavSpecs specs;
  specs.leader = leader_spec(cfg);
  for (int i = 1; i <= cfg.n_followers; ++i) {
    specs.followers.push_back(follower_spec(cfg, "f" + std::to_string(i)));
  }
  return specs;
}

void register_scenario_actions(env::ActionTable& actions,
                               const ScenarioConfig& cfg,
                               std::shared_ptr<FormationState> formation) {
  double omega = kTwoPi / cfg.leader_period;
  double radius = cfg.leader_radius;
  actions.add("circleStep", [omega, radius, formation](
                                env::ActionContext& ctx,
                                const std::vector<Term>&) {
    double angle = omega * ctx.now();
    ctx.move_to({radius * std::cos(angle), radius * std::sin(angle)});
    Vec2 p = ctx.self_position();
    ctx.broadcast(env::Performative::Tell,
                  cmp("invite", {num(p.x), num(p.y),
                                 num(static_cast<double>(formation->joined()))}));
  });
  actions.add("assignSlot", [formation](env::ActionContext& ctx,
                                        const std::vector<Term>& args) {
    if (args.size() != 1 || args[0].kind() != Term::Kind::Atom) {
      throw std::runtime_error("assignSlot expects one follower name");
    }
    const std::string& follower = args[0].name();
    int k;
    if (formation->has(follower)) {
      k = formation->slot_of(follower);  // idempotent: re-send the same slot
    } else if (!formation->full()) {
      k = formation->claim(follower);
    } else {
      return;
    }
    ctx.send(follower, env::Performative::Tell,
             cmp("slot", {num(static_cast<double>(k)),
                          num(static_cast<double>(formation->total_slots()))}));
  });
}

namespace {

dist::TimeDistribution sense_interval_dist(const ScenarioConfig& cfg) {
  if (cfg.weibull_mode == ScenarioConfig::WeibullMode::Frequency) {
    return dist::TimeDistribution::from_frequency_moments(
        cfg.frequency, cfg.frequency * cfg.drift);
  }
  return dist::TimeDistribution::from_moments(1.0 / cfg.frequency,
                                              cfg.drift / cfg.frequency);
}

sim::PhaseScheduler make_scheduler(const ScenarioConfig& cfg, double tau0) {
  sim::PhaseScheduler sched;
  double period = 1.0 / cfg.frequency;
  switch (cfg.granularity) {
    case sim::Granularity::AMA:
      sched.sense_dist = dist::TimeDistribution::dirac_comb(tau0, period);
      sched.deliberate_dist = dist::TimeDistribution::asap();
      sched.act_dist = dist::TimeDistribution::asap();
      break;
    case sim::Granularity::ACLI:
      sched.sense_dist = sense_interval_dist(cfg);
      sched.deliberate_dist = dist::TimeDistribution::asap();
      sched.act_dist = dist::TimeDistribution::asap();
      break;
    case sim::Granularity::ACLP:
      sched.sense_dist = sense_interval_dist(cfg);
      sched.deliberate_dist = dist::TimeDistribution::exponential(cfg.frequency);
      sched.act_dist = dist::TimeDistribution::exponential(cfg.frequency);
      break;
  }
  return sched;
}

}  // namespace

void validate_plan_actions(const env::ActionTable& actions,
                           const UavSpecs& specs) {
  std::vector<std::shared_ptr<const bdi::AgentSpec>> all = specs.followers;
  all.push_back(specs.leader);
  for (const auto& spec : all) {
    for (const bdi::Plan& plan : spec->plans) {
      for (const bdi::Step& step : plan.body) {
        if (step.kind == bdi::Step::Kind::Act && !actions.contains(step.action)) {
          throw std::invalid_argument("missing action: " + step.action +
                                      " (referenced by agent " + spec->name + ")");
        }
      }
    }
  }
}

UavSimulation build_simulation(const ScenarioConfig& cfg, std::uint64_t seed,
                               const UavSpecs& specs) {
  cfg.validate();
  UavSimulation out;
  out.sim = std::make_unique<sim::Simulation>(seed, cfg.comm_range, cfg.v_max);
  out.formation = std::make_shared<FormationState>(cfg.n_followers);
  out.samples = std::make_shared<std::vector<ErrorSample>>();
  register_scenario_actions(out.sim->actions(), cfg, out.formation);
  validate_plan_actions(out.sim->actions(), specs);

  sim::Simulation& s = *out.sim;
  double period = 1.0 / cfg.frequency;

  auto place_agent = [&](const std::shared_ptr<const bdi::AgentSpec>& spec,
                         Vec2 position) {
    sim::Device& dev = s.add_device(spec->name, position);
    double tau0 =
        s.root_rng().fork("tau0/" + spec->name).next_uniform() * period;
    s.add_agent(dev, spec, make_scheduler(cfg, tau0), tau0);
  };

  place_agent(specs.leader, {0, 0});
  for (const auto& follower : specs.followers) {
    des::RngStream rng = s.root_rng().fork("placement/" + follower->name);
    double r = cfg.arena_radius;
    Vec2 p;
    do {
      p = {(2 * rng.next_uniform() - 1) * r, (2 * rng.next_uniform() - 1) * r};
    } while (p.norm() > r);
    place_agent(follower, p);
  }

  // Metric sampler: sum of squared distance errors once per second.
  auto sample_fn = std::make_shared<std::function<void()>>();
  sim::Simulation* sp = out.sim.get();
  auto formation = out.formation;
  auto samples = out.samples;
  ScenarioConfig cfg_copy = cfg;
  std::function<void()>* fnp = sample_fn.get();
  *sample_fn = [sp, formation, samples, cfg_copy, fnp] {
    double t = sp->now();
    std::map<std::string, Vec2> positions;
    Vec2 leader_pos{0, 0};
    for (sim::Device* dev : sp->devices()) {
      if (dev->name == "leader") {
        leader_pos = dev->position_at_time(t);
      } else {
        positions[dev->name] = dev->position_at_time(t);
      }
    }
    samples->push_back(
        {t, formation_error(leader_pos, *formation, cfg_copy, positions)});
    sp->kernel().schedule(t + 1.0, "sampler", [fnp] { (*fnp)(); });
  };
  out.keepalive = sample_fn;
  sp->kernel().schedule(0.0, "sampler", [fnp] { (*fnp)(); });
  return out;
}

RunResult run_simulation(const ScenarioConfig& cfg, std::uint64_t seed) {
  UavSpecs specs = build_specs(cfg);
  UavSimulation us = build_simulation(cfg, seed, specs);
  RunResult result;
  result.events = us.sim->run_until(cfg.duration);
  result.samples = *us.samples;
  result.trace = us.sim->kernel().trace();
  return result;
}

ExperimentResult run_experiment(const ScenarioConfig& cfg,
                                const std::vector<std::uint64_t>& seeds) {
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw std::invalid_argument("experiment seeds must be distinct");
  }
  ExperimentResult result;
  result.seeds = seeds;
  for (std::uint64_t seed : seeds) {
    try {
      result.runs.push_back(run_simulation(cfg, seed).samples);
    } catch (const std::exception& e) {
      throw std::runtime_error("run with seed " + std::to_string(seed) +
                               " failed: " + e.what());
    }
  }
  if (result.runs.empty()) return result;

  std::size_t buckets = result.runs.front().size();
  for (std::size_t b = 0; b < buckets; ++b) {
    double sum = 0, sum_sq = 0;
    std::size_t n = 0;
    for (const auto& run : result.runs) {
      if (b >= run.size()) continue;
      sum += run[b].value;
      sum_sq += run[b].value * run[b].value;
      ++n;
    }
    Aggregate agg;
    agg.t = result.runs.front()[b].t;
    agg.mean = sum / static_cast<double>(n);
    agg.stddev = n > 1 ? std::sqrt(std::max(
                             0.0, (sum_sq - sum * sum / static_cast<double>(n)) /
                                      static_cast<double>(n - 1)))
                       : 0.0;
    result.aggregate.push_back(agg);
  }
  return result;
}

double mean_error(const std::vector<ErrorSample>& samples, double t_begin,
                  double t_end) {
  double sum = 0;
  std::size_t n = 0;
  for (const ErrorSample& s : samples) {
    if (s.t >= t_begin && s.t <= t_end) {
      sum += s.value;
      ++n;
    }
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

}  // namespace bdisim::uav
