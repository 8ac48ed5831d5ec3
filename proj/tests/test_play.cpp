#include "fixtures.hpp"

#include <atlnet/error.hpp>
#include <atlnet/play.hpp>

#include <gtest/gtest.h>

#include <fstream>

using namespace atlnet;

namespace
{
  play load_play(const net_system& net, const std::string& name)
  {
    std::ifstream in(fixture(name));
    return parse_play(net, in);
  }

  bool has_rule(const std::vector<diagnostic>& ds, const std::string& rule)
  {
    for (auto& d : ds)
      if (d.rule == rule)
        return true;
    return false;
  }

  net_strategy reference_strategy(const net_system& net)
  {
    net_strategy s;
    s.owner = 1;
    s.choice[net.make_marking({"p0", "p2"})] = {net.transition_index("t3")};
    s.choice[net.make_marking({"p1", "p2"})] = {net.transition_index("t2")};
    return s;
  }
} // namespace

TEST(Play, CycleFixtureIsValid)
{
  auto net = f4();
  auto p = load_play(net, "F4_cycle.play");
  EXPECT_TRUE(validate_play(net, p, 20).empty());
  auto q = load_play(net, "F4_concurrent.play");
  EXPECT_TRUE(validate_play(net, q, 20).empty());
}

// A cycle of t5 and t3 alone keeps t0 enabled forever without firing it.
TEST(Play, IgnoringAnEnabledEnvTransitionIsNotAPlay)
{
  auto net = f4();
  auto p = parse_play_string(net, "prefix: t3\ncycle: t5 t3\n");
  auto ds = validate_play(net, p, 10);
  ASSERT_EQ(ds.size(), 1u);
  EXPECT_EQ(ds[0].message, "uncontrollable event t0 addable");
}

TEST(Play, StoppingAfterT3)
{
  auto net = f4();
  auto ds = validate_play(net, parse_play_string(net, "prefix: t3\n"), 5);
  std::vector<std::string> msgs;
  for (auto& d : ds)
    msgs.push_back(d.message);
  EXPECT_NE(std::find(msgs.begin(), msgs.end(), "uncontrollable event t5 addable"), msgs.end());
}

TEST(Play, CoverageDiagnostic)
{
  auto net = load_net(fixture("handoff.net"));
  // the cut after b is missing; the deadlock-free run is cut short
  auto p = parse_play_string(net, "prefix: a\ncuts: 0\ncycle: b a\n");
  EXPECT_TRUE(validate_play(net, p, 10).empty());
  auto finite = parse_play_string(net, "prefix: a b\ncuts: 0 1\n");
  auto ds = validate_play(net, finite, 10);
  EXPECT_TRUE(has_rule(ds, "coverage"));
  EXPECT_EQ(ds.back().message, "event b (position 1) not covered by any cut");
}

TEST(Play, HorizonTooSmall)
{
  auto net = f4();
  EXPECT_THROW(validate_play(net, load_play(net, "F4_cycle.play"), 2), input_error);
}

TEST(Play, DeadlockPlay)
{
  auto net = load_net(fixture("idle.net"));
  EXPECT_TRUE(validate_play(net, load_play(net, "idle.play"), 1).empty());
}

TEST(Play, RoundTrip)
{
  auto net = f4();
  for (auto name : {"F4_cycle.play", "F4_concurrent.play"})
    {
      auto p = load_play(net, name);
      EXPECT_EQ(parse_play_string(net, print_play(net, p)), p);
    }
  // stutter markers are dropped
  EXPECT_EQ(parse_play_string(net, "prefix: - t3 -\ncycle: t0 - t5 t3 t1\n"),
            load_play(net, "F4_cycle.play"));
}

TEST(Consistency, ReferenceStrategyFiringT3First)
{
  auto net = f4();
  auto p = parse_play_string(net, "prefix: t3\ncycle: t0 t5 t2 t1 t4 t3\n");
  ASSERT_TRUE(validate_play(net, p, 20).empty());
  auto r = consistent_with(net, p, {reference_strategy(net)});
  EXPECT_TRUE(r.consistent) << (r.diagnostics.empty() ? "" : r.diagnostics[0].message);
}

TEST(Consistency, FinallyPostponed)
{
  auto net = f4();
  auto p = parse_play_string(net, "prefix:\ncycle: t0 t1\n");
  ASSERT_TRUE(validate_play(net, p, 4).empty());
  auto r = consistent_with(net, p, {reference_strategy(net)});
  EXPECT_FALSE(r.consistent);
  ASSERT_FALSE(r.diagnostics.empty());
  EXPECT_EQ(r.diagnostics.back().message, "user u finally postponed");
}

TEST(Consistency, EmptyProfileBindsNothing)
{
  auto net = f4();
  for (auto name : {"F4_cycle.play", "F4_concurrent.play"})
    EXPECT_TRUE(consistent_with(net, load_play(net, name), {}).consistent);
}

TEST(Consistency, UserEventNotAlone)
{
  auto net = f4();
  net_strategy s;
  s.owner = 1;
  s.choice[net.make_marking({"p1", "p2"})] = {net.transition_index("t3")};
  s.choice[net.make_marking({"p0", "p2"})] = {net.transition_index("t3")};
  auto r = consistent_with(net, load_play(net, "F4_concurrent.play"), {s});
  EXPECT_FALSE(r.consistent);
  EXPECT_EQ(r.diagnostics.front().rule, "alone");
}

TEST(Consistency, BadOwner)
{
  auto net = f4();
  net_strategy s;
  s.owner = 0;
  EXPECT_THROW(consistent_with(net, load_play(net, "F4_cycle.play"), {s}), input_error);
}

TEST(Refinement, Examples)
{
  auto net = f4();
  auto rt = build_run(net, {net.transition_index("t0"), net.transition_index("t3")});
  EXPECT_TRUE(is_maximal_refinement(rt.run, rt.cuts));
  EXPECT_FALSE(is_maximal_refinement(rt.run, {rt.cuts[0], rt.cuts[2]}));
  EXPECT_TRUE(is_maximal_refinement(rt.run, {rt.cuts[0]}));
  EXPECT_THROW(is_maximal_refinement(rt.run, {rt.cuts[2], rt.cuts[0]}), input_error);
}
