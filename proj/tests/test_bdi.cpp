#include <doctest.h>

#include <utility>
#include <vector>

#include "bdisim/agent.hpp"

using namespace bdisim;
using bdi::Term;

namespace {

/// Environment double that records every interface crossing.
struct MockEnv final : env::EnvironmentHandle {
  std::vector<std::string> acted;
  std::vector<std::pair<std::string, std::string>> sent;  // (to, payload)
  std::vector<std::string> broadcasted;
  double t = 0;

  double now() override { return t; }
  double random_uniform() override { return 0.5; }
  std::vector<Term> perceive() override { return {}; }
  void act(const std::string& name, const std::vector<Term>& args) override {
    std::string entry = name;
    for (const Term& a : args) entry += ":" + a.to_string();
    acted.push_back(entry);
    if (name == "missing") throw env::UnknownActionError(name);
  }
  void send(const std::string& to, env::Performative,
            const bdi::Term& payload) override {
    sent.emplace_back(to, payload.to_string());
  }
  void broadcast(env::Performative, const bdi::Term& payload) override {
    broadcasted.push_back(payload.to_string());
  }
};

void cycle(bdi::AgentState& st, MockEnv& env,
           env::ExternalInput input = {}) {
  bdi::run_cycle(st, input, env);
}

Term atom(const char* s) { return Term::atom(s); }

}  // namespace

TEST_CASE("scripted agent reproduces the reference trace exactly") {
  auto spec =
      bdi::AgentSpecBuilder("scripted")
          .goal(atom("start"))
          .plan(bdi::on_goal("p_start", atom("start"))
                    .add_belief(Term::compound("ready", {Term::number(1)}))
                    .subgoal(atom("work"))
                    .build())
          .plan(bdi::on_goal("p_work", atom("work"))
                    .query(Term::compound("ready", {Term::var("X")}))
                    .act("ping", {Term::var("X")})
                    .build())
          .plan(bdi::on_belief("p_stop", atom("halt"))
                    .drop_belief(Term::compound("ready", {Term::var("X")}))
                    .build())
          .build();
  bdi::AgentState st = bdi::make_agent_state(spec);
  std::vector<std::string> trace;
  st.trace = &trace;
  MockEnv env;

  cycle(st, env);  // !start -> p_start, add ready(1)
  cycle(st, env);  // +ready(1) has no plan; resume intention -> subgoal work
  cycle(st, env);  // !work -> p_work -> ping(1)
  env::ExternalInput halt;
  halt.percepts.push_back(atom("halt"));
  cycle(st, env, halt);  // +halt -> p_stop -> drop ready

  std::vector<std::string> expected = {
      "event:!start",    "plan:p_start", "add:ready(1)",
      "event:+ready(1)", "subgoal:work",
      "event:!work",     "plan:p_work",  "act:ping",
      "event:+halt",     "plan:p_stop",  "drop:ready(X)",
  };
  CHECK(trace == expected);
  CHECK(env.acted == std::vector<std::string>{"ping:1"});
  CHECK(st.intentions.empty());
  CHECK(st.beliefs == std::vector<Term>{atom("halt")});
}

TEST_CASE("tail-recursive goals keep constant stack depth") {
  auto spec = bdi::AgentSpecBuilder("looper")
                  .goal(atom("loop"))
                  .plan(bdi::on_goal("p_loop", atom("loop"))
                            .act("step")
                            .subgoal(atom("loop"))
                            .build())
                  .build();
  bdi::AgentState st = bdi::make_agent_state(spec);
  MockEnv env;
  for (int i = 0; i < 300; ++i) cycle(st, env);
  REQUIRE(st.intentions.size() == 1);
  CHECK(st.intentions[0].stack.size() <= 2);
  CHECK(env.acted.size() == 150);  // one action every two cycles
}

TEST_CASE("percepts are authoritative per functor") {
  auto spec = bdi::AgentSpecBuilder("p").build();
  bdi::AgentState st = bdi::make_agent_state(spec);
  env::ExternalInput in1;
  in1.percepts.push_back(Term::compound("pos", {Term::number(1), Term::number(2)}));
  bdi::sense(st, in1);
  env::ExternalInput in2;
  in2.percepts.push_back(Term::compound("pos", {Term::number(3), Term::number(4)}));
  bdi::sense(st, in2);
  REQUIRE(st.beliefs.size() == 1);
  CHECK(st.beliefs[0] ==
        Term::compound("pos", {Term::number(3), Term::number(4)}));
}

TEST_CASE("beliefs with other functors survive percept reconciliation") {
  auto spec = bdi::AgentSpecBuilder("p").belief(atom("sticky")).build();
  bdi::AgentState st = bdi::make_agent_state(spec);
  env::ExternalInput in;
  in.percepts.push_back(Term::compound("time", {Term::number(1)}));
  bdi::sense(st, in);
  CHECK(st.beliefs.size() == 2);
}

TEST_CASE("tell messages upsert by functor and arity") {
  auto spec = bdi::AgentSpecBuilder("p").build();
  bdi::AgentState st = bdi::make_agent_state(spec);
  env::ExternalInput in;
  in.messages.push_back(
      {"peer", env::Performative::Tell,
       Term::compound("slot", {Term::number(1), Term::number(6)})});
  bdi::sense(st, in);
  env::ExternalInput in2;
  in2.messages.push_back(
      {"peer", env::Performative::Tell,
       Term::compound("slot", {Term::number(2), Term::number(6)})});
  bdi::sense(st, in2);
  REQUIRE(st.beliefs.size() == 1);
  CHECK(st.beliefs[0] ==
        Term::compound("slot", {Term::number(2), Term::number(6)}));
}

TEST_CASE("achieve messages become goal events") {
  auto spec = bdi::AgentSpecBuilder("p")
                  .plan(bdi::on_goal("p_go", atom("go")).act("done").build())
                  .build();
  bdi::AgentState st = bdi::make_agent_state(spec);
  MockEnv env;
  env::ExternalInput in;
  in.messages.push_back({"peer", env::Performative::Achieve, atom("go")});
  cycle(st, env, in);
  CHECK(env.acted == std::vector<std::string>{"done"});
}

TEST_CASE("non-ground percepts and payloads are rejected") {
  auto spec = bdi::AgentSpecBuilder("p").build();
  bdi::AgentState st = bdi::make_agent_state(spec);
  env::ExternalInput in;
  in.percepts.push_back(Term::compound("pos", {Term::var("X")}));
  CHECK_THROWS(bdi::sense(st, in));
}

TEST_CASE("goals without an applicable plan trigger failure handlers") {
  auto spec = bdi::AgentSpecBuilder("p")
                  .goal(atom("nope"))
                  .plan(bdi::PlanBuilder("p_recover", bdi::EventType::GoalFailed,
                                         atom("nope"))
                            .act("recover")
                            .build())
                  .build();
  bdi::AgentState st = bdi::make_agent_state(spec);
  MockEnv env;
  // One deliberation: !nope has no plan, fails, and the failure event is
  // picked up by the recovery plan in the same drain.
  cycle(st, env);
  CHECK(env.acted == std::vector<std::string>{"recover"});
  CHECK(st.events.empty());
}

TEST_CASE("superseded belief events are dropped, fresh ones handled") {
  auto spec = bdi::AgentSpecBuilder("p")
                  .plan(bdi::on_belief("p_t", Term::compound("v", {Term::var("X")}))
                            .act("use", {Term::var("X")})
                            .build())
                  .build();
  bdi::AgentState st = bdi::make_agent_state(spec);
  MockEnv env;
  env::ExternalInput in;
  // Two upserts in one sense: only the latest value may trigger a plan.
  in.messages.push_back({"a", env::Performative::Tell,
                         Term::compound("v", {Term::number(1)})});
  in.messages.push_back({"a", env::Performative::Tell,
                         Term::compound("v", {Term::number(2)})});
  bdi::sense(st, in);
  auto sel = bdi::deliberate(st);
  REQUIRE(sel.has_value());
  bdi::act(st, *sel, env);
  CHECK(env.acted == std::vector<std::string>{"use:2"});
  CHECK(st.events.empty());
}

TEST_CASE("unknown actions fail the intention with a GoalFailed event") {
  auto spec = bdi::AgentSpecBuilder("p")
                  .goal(atom("go"))
                  .plan(bdi::on_goal("p_go", atom("go")).act("missing").build())
                  .build();
  bdi::AgentState st = bdi::make_agent_state(spec);
  MockEnv env;
  cycle(st, env);
  CHECK(st.intentions.empty());
  REQUIRE(st.events.size() == 1);
  CHECK(bdi::describe(st.events.front()) == "fail!go");
}

TEST_CASE("round-robin alternates between live intentions") {
  auto spec = bdi::AgentSpecBuilder("p")
                  .goal(atom("a"))
                  .goal(atom("b"))
                  .plan(bdi::on_goal("p_a", atom("a"))
                            .act("a1").act("a2").act("a3").build())
                  .plan(bdi::on_goal("p_b", atom("b"))
                            .act("b1").act("b2").act("b3").build())
                  .build();
  bdi::AgentState st = bdi::make_agent_state(spec);
  MockEnv env;
  for (int i = 0; i < 6; ++i) cycle(st, env);
  CHECK(env.acted ==
        std::vector<std::string>{"a1", "b1", "a2", "b2", "a3", "b3"});
}

TEST_CASE("exactly one body step executes per act phase") {
  auto spec = bdi::AgentSpecBuilder("p")
                  .goal(atom("go"))
                  .plan(bdi::on_goal("p_go", atom("go"))
                            .act("one").act("two").build())
                  .build();
  bdi::AgentState st = bdi::make_agent_state(spec);
  MockEnv env;
  cycle(st, env);
  CHECK(st.steps_executed == 1);
  CHECK(env.acted.size() == 1);
  cycle(st, env);
  CHECK(st.steps_executed == 2);
  CHECK(env.acted.size() == 2);
}

TEST_CASE("send resolves the recipient and payload") {
  auto spec =
      bdi::AgentSpecBuilder("p")
          .goal(atom("go"))
          .plan(bdi::on_goal("p_go", atom("go"))
                    .send(atom("peer"), env::Performative::Tell,
                          Term::compound("info", {Term::number(1) + Term::number(2)}))
                    .build())
          .build();
  bdi::AgentState st = bdi::make_agent_state(spec);
  MockEnv env;
  cycle(st, env);
  REQUIRE(env.sent.size() == 1);
  CHECK(env.sent[0].first == "peer");
  CHECK(env.sent[0].second == "info(3)");
}
