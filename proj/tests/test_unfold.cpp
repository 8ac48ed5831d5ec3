#include "fixtures.hpp"

#include <atlnet/error.hpp>
#include <atlnet/random.hpp>
#include <atlnet/unfold.hpp>

#include <gtest/gtest.h>

#include <set>

using namespace atlnet;

namespace
{
  std::set<std::string> event_labels(const branching_process& bp)
  {
    std::set<std::string> out;
    for (auto& e : bp.events())
      out.insert(bp.net().transitions()[e.label].name);
    return out;
  }

  cut step(const branching_process& bp, const cut& c, const char* t)
  {
    auto e = event_for(bp, c, bp.net().transition_index(t));
    if (!e)
      throw precondition_error(std::string(t) + " not enabled");
    return cut_step(bp, c, *e);
  }

  // Brute-force oracle: events reached by firing sequences of at most
  // `depth` steps, identified by label and pre-condition set.
  std::size_t oracle_event_count(const branching_process& bp, unsigned depth)
  {
    std::set<event_id> seen;
    auto rec = [&](auto&& self, const cut& c, unsigned left) -> void {
      if (left == 0)
        return;
      for (auto e : enabled_events(bp, c))
        {
          seen.insert(e);
          self(self, cut_step(bp, c, e), left - 1);
        }
    };
    rec(rec, bp.initial_cut(), depth);
    return seen.size();
  }
} // namespace

TEST(Unfold, DepthZero)
{
  auto bp = unfold_prefix(f4(), 0);
  EXPECT_EQ(bp.conditions().size(), 2u);
  EXPECT_TRUE(bp.events().empty());
  EXPECT_EQ(bp.net().format(bp.marking_of(bp.initial_cut())), "{p0,p2}");
  EXPECT_TRUE(is_run(bp));
}

TEST(Unfold, DepthOne)
{
  auto bp = unfold_prefix(f4(), 1);
  EXPECT_EQ(event_labels(bp), (std::set<std::string>{"t0", "t2", "t3"}));
  EXPECT_FALSE(is_run(bp));
}

TEST(Unfold, DepthTwoMatchesOracle)
{
  auto bp = unfold_prefix(f4(), 2);
  EXPECT_EQ(bp.events().size(), 6u);
  EXPECT_EQ(oracle_event_count(bp, 2), bp.events().size());
}

TEST(Unfold, Relations)
{
  auto bp = unfold_prefix(f4(), 2);
  EXPECT_EQ(relation_query(bp, "t2#1", "t3#1"), relation::conflict);
  EXPECT_EQ(relation_query(bp, "t0#1", "t3#1"), relation::concurrent);
  EXPECT_EQ(relation_query(bp, "p0#1", "p0#1"), relation::equal);
  EXPECT_EQ(relation_query(bp, "t0#1", "t1#1"), relation::causal_le);
  EXPECT_EQ(relation_query(bp, "t1#1", "t0#1"), relation::causal_ge);
  // conflict is inherited along causality
  EXPECT_EQ(relation_query(bp, "t4#1", "t5#1"), relation::conflict);
  EXPECT_THROW(relation_query(bp, "t9#1", "t0#1"), input_error);
}

TEST(Unfold, CutSteps)
{
  auto bp = unfold_prefix(f4(), 2);
  auto& net = bp.net();
  auto g0 = bp.initial_cut();
  EXPECT_EQ(net.format(bp.marking_of(step(bp, g0, "t3"))), "{p0,p3}");
  EXPECT_EQ(net.format(bp.marking_of(step(bp, step(bp, g0, "t0"), "t3"))), "{p1,p3}");
  auto t4 = bp.find_event("t4#1");
  ASSERT_TRUE(t4);
  EXPECT_THROW(cut_step(bp, g0, *t4), precondition_error);
}

TEST(Unfold, CutOrder)
{
  auto bp = unfold_prefix(f4(), 2);
  auto g0 = bp.initial_cut();
  auto a = step(bp, g0, "t3");
  auto b = step(bp, g0, "t0");
  EXPECT_EQ(cut_order(bp, g0, a), cut_relation::lt);
  EXPECT_EQ(cut_order(bp, a, g0), cut_relation::gt);
  EXPECT_EQ(cut_order(bp, b, a), cut_relation::incomparable);
  EXPECT_EQ(cut_order(bp, a, a), cut_relation::eq);
  EXPECT_THROW(cut_order(bp, cut{{0}}, a), input_error);
}

TEST(Unfold, RunRestriction)
{
  auto bp = unfold_prefix(f4(), 1);
  auto t0 = bp.find_event("t0#1");
  ASSERT_TRUE(t0);
  EXPECT_TRUE(is_run(restrict_to(bp, {*t0})));
}

TEST(Unfold, DotHasCutEdges)
{
  auto bp = unfold_prefix(f4(), 1);
  auto dot = prefix_dot(bp, {bp.initial_cut()});
  EXPECT_NE(dot.find("digraph"), std::string::npos);
  EXPECT_NE(dot.find("dashed"), std::string::npos);
  EXPECT_EQ(dot, prefix_dot(unfold_prefix(f4(), 1), {bp.initial_cut()}));
}

// Every cut image is reachable; stepping gives a larger cut; relations
// partition pairs; firing sequences and event chains correspond.
TEST(UnfoldProperty, CutsAndSequences)
{
  std::vector<net_system> nets{f4(), load_net(fixture("pair.net"))};
  for (std::uint64_t s = 1; s <= 25; ++s)
    nets.push_back(random_net(s));
  for (auto& net : nets)
    {
      const unsigned depth = 3;
      auto bp = unfold_prefix(net, depth);
      auto rg = compute_reachability(net);
      std::size_t sequences = 0;
      auto rec = [&](auto&& self, const cut& c, const marking& m, unsigned left) -> void {
        ASSERT_TRUE(bp.is_cut(c));
        ASSERT_EQ(bp.marking_of(c), m);
        ASSERT_TRUE(rg.index_of(m));
        ++sequences;
        if (left == 0)
          return;
        auto es = enabled_events(bp, c);
        std::set<trans_id> labels;
        for (auto e : es)
          {
            labels.insert(bp.events()[e].label);
            auto n = cut_step(bp, c, e);
            EXPECT_EQ(cut_order(bp, c, n), cut_relation::lt);
          }
        // one event per enabled transition, none for disabled ones
        auto en = enabled_set(net, m);
        ASSERT_EQ(std::vector<trans_id>(labels.begin(), labels.end()), en);
        ASSERT_EQ(es.size(), en.size());
        for (auto e : es)
          self(self, cut_step(bp, c, e), fire(net, m, bp.events()[e].label), left - 1);
      };
      rec(rec, bp.initial_cut(), net.initial(), depth);
      EXPECT_GT(sequences, 0u);

      // every event's past, in index order, is a firing sequence
      for (event_id e = 0; e < bp.events().size(); ++e)
        {
          marking m = net.initial();
          for (event_id f = 0; f <= e; ++f)
            if (bp.causal_leq({true, f}, {true, e}))
              {
                ASSERT_TRUE(is_enabled(net, m, bp.events()[f].label));
                m = fire(net, m, bp.events()[f].label);
              }
          EXPECT_LE(bp.events()[e].depth, depth);
        }

      const auto n = bp.conditions().size() + bp.events().size();
      auto elem = [&](std::size_t i) {
        return i < bp.conditions().size() ? element{false, i}
                                          : element{true, i - bp.conditions().size()};
      };
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          {
            auto r = bp.relate(elem(i), elem(j));
            auto back = bp.relate(elem(j), elem(i));
            EXPECT_EQ(r == relation::equal, i == j);
            if (r == relation::causal_le)
              EXPECT_EQ(back, relation::causal_ge);
            else if (r == relation::conflict || r == relation::concurrent || r == relation::equal)
              EXPECT_EQ(back, r);
          }
    }
}
