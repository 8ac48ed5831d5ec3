#include "fixtures.hpp"

#include <atlnet/error.hpp>
#include <atlnet/net.hpp>
#include <atlnet/random.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <set>

using namespace atlnet;

namespace
{
  std::set<std::string> names(const net_system& net, const std::vector<trans_id>& ts)
  {
    std::set<std::string> out;
    for (auto t : ts)
      out.insert(net.transitions()[t].name);
    return out;
  }
} // namespace

TEST(Net, F4IsValid)
{
  auto net = f4();
  EXPECT_TRUE(validate_net(net).empty());
  EXPECT_EQ(net.user_count(), 1u);
  EXPECT_EQ(net.format(net.initial()), "{p0,p2}");
}

TEST(Net, EmptyPresetDiagnostic)
{
  auto net = parse_net_string("net x\nlocations env\nplace p @env init\ntrans t @env pre post p\n");
  auto ds = validate_net(net);
  ASSERT_EQ(ds.size(), 1u);
  EXPECT_EQ(ds[0].message, "empty pre-set of t");
}

TEST(Net, DistributionDiagnostic)
{
  auto net = load_net(fixture("distribution.net"));
  auto ds = validate_net(net);
  ASSERT_EQ(ds.size(), 1u);
  EXPECT_EQ(ds[0].message, "distribution violated at (p,t)");
}

TEST(Net, EnabledSetExamples)
{
  auto net = f4();
  EXPECT_EQ(names(net, enabled_set(net, net.make_marking({"p0", "p2"}))),
            (std::set<std::string>{"t0", "t2", "t3"}));
  EXPECT_EQ(names(net, enabled_set(net, net.make_marking({"p1", "p3"}))),
            (std::set<std::string>{"t1", "t5"}));
  EXPECT_TRUE(enabled_set(net, marking{}).empty());
  EXPECT_THROW(enabled_set(net, marking({99})), input_error);
}

TEST(Net, FireExamples)
{
  auto net = f4();
  auto m = net.make_marking({"p0", "p2"});
  EXPECT_EQ(net.format(fire(net, m, net.transition_index("t3"))), "{p0,p3}");
  EXPECT_EQ(net.format(fire(net, m, net.transition_index("t0"))), "{p1,p2}");
  EXPECT_THROW(fire(net, net.make_marking({"p0", "p3"}), net.transition_index("t2")),
               precondition_error);
}

TEST(Net, ReachabilityExamples)
{
  auto net = f4();
  auto rg = compute_reachability(net);
  std::vector<std::string> states;
  for (auto& s : rg.states)
    states.push_back(net.format(s));
  EXPECT_EQ(states, (std::vector<std::string>{"{p0,p2}", "{p0,p3}", "{p0,p4}", "{p1,p2}",
                                              "{p1,p3}", "{p1,p4}"}));
  auto idle = load_net(fixture("idle.net"));
  auto ri = compute_reachability(idle);
  EXPECT_EQ(ri.states.size(), 1u);
  EXPECT_TRUE(ri.edges.empty());
  auto tg = compute_reachability(load_net(fixture("toggles.net")));
  EXPECT_EQ(tg.states.size(), 4u);
  EXPECT_EQ(tg.edges.size(), 8u);
  EXPECT_THROW(compute_reachability(load_net(fixture("toggles.net")), 3), resource_error);
}

TEST(Net, ContactFreeness)
{
  EXPECT_TRUE(check_contact_free(f4()).contact_free);
  auto c = load_net(fixture("contact.net"));
  auto r = check_contact_free(c);
  ASSERT_FALSE(r.contact_free);
  EXPECT_EQ(c.format(r.witness->at), "{p0,p1}");
  EXPECT_EQ(c.transitions()[r.witness->trans].name, "t");
  auto empty = parse_net_string("net e\nlocations env\nplace p @env\ntrans t @env pre p post p2\n"
                                "place p2 @env\n");
  EXPECT_TRUE(check_contact_free(empty).contact_free);
  EXPECT_THROW(require_well_formed(c), input_error);
}

TEST(Net, StructuralRelations)
{
  auto net = f4();
  auto t = [&](const char* n) { return net.transition_index(n); };
  EXPECT_EQ(structural_relation(net, t("t2"), t("t3")).kind, structural_kind::conflict);
  auto r = structural_relation(net, t("t0"), t("t3"), net.make_marking({"p0", "p2"}));
  EXPECT_EQ(r.kind, structural_kind::independent);
  ASSERT_TRUE(r.concurrent_at);
  EXPECT_TRUE(*r.concurrent_at);
  EXPECT_EQ(structural_relation(net, t("t0"), t("t1")).kind, structural_kind::neither);
  EXPECT_THROW(structural_relation(net, t("t0"), t("t0")), input_error);
}

TEST(Net, FixturesRoundTrip)
{
  for (auto& entry : std::filesystem::directory_iterator(ATLNET_FIXTURES))
    {
      if (entry.path().extension() != ".net")
        continue;
      auto a = load_net(entry.path().string());
      auto b = parse_net_string(print_net(a));
      EXPECT_EQ(a, b) << entry.path();
      EXPECT_EQ(print_net(a), print_net(b));
    }
}

TEST(Net, ParseErrors)
{
  EXPECT_THROW(parse_net_string("net x\nlocations u\n"), input_error);
  EXPECT_THROW(parse_net_string("net x\nlocations env\nplace p @nowhere\n"), input_error);
  EXPECT_THROW(parse_net_string("net x\nlocations env\nplace p @env\nplace p @env\n"), input_error);
  EXPECT_THROW(parse_net_string("net x\nlocations env\ntrans t @env pre q post q\n"), input_error);
}

// Graph and firing semantics agree; firing changes the marking size by
// the pre/post balance; relations are symmetric and exclusive.
TEST(NetProperty, SemanticsOnRandomNets)
{
  for (std::uint64_t seed = 1; seed <= 60; ++seed)
    {
      auto net = random_net(seed);
      ASSERT_TRUE(validate_net(net).empty());
      ASSERT_TRUE(check_contact_free(net).contact_free);
      auto rg = compute_reachability(net);
      for (std::size_t s = 0; s < rg.states.size(); ++s)
        {
          auto& m = rg.states[s];
          std::vector<trans_id> from_graph;
          for (auto& e : rg.out_edges(s))
            from_graph.push_back(e.trans);
          EXPECT_EQ(enabled_set(net, m), from_graph);
          for (auto t : from_graph)
            {
              auto n = fire(net, m, t);
              auto& tr = net.transitions()[t];
              EXPECT_EQ(n.size(), m.size() - tr.pre.size() + tr.post.size());
              EXPECT_TRUE(rg.index_of(n).has_value());
            }
        }
      for (trans_id a = 0; a < net.transitions().size(); ++a)
        for (trans_id b = a + 1; b < net.transitions().size(); ++b)
          {
            auto ab = structural_relation(net, a, b).kind;
            auto ba = structural_relation(net, b, a).kind;
            EXPECT_EQ(ab, ba);
          }
    }
}

TEST(NetProperty, RandomNetsAreDeterministic)
{
  for (std::uint64_t seed : {1u, 7u, 99u})
    EXPECT_EQ(print_net(random_net(seed)), print_net(random_net(seed)));
}
