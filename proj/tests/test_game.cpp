#include "fixtures.hpp"

#include <atlnet/error.hpp>
#include <atlnet/game.hpp>
#include <atlnet/random.hpp>
#include <atlnet/solver.hpp>

#include <gtest/gtest.h>

#include <fstream>

using namespace atlnet;

namespace
{
  struct f4_game
  {
    net_system net = f4();
    game_structure g = build_game(net);
    std::vector<fairness_constraint> fc = build_fairness(net, g);

    state_id q(std::initializer_list<const char*> ps) const
    {
      std::vector<std::string> v(ps.begin(), ps.end());
      return *g.index_of(net.make_marking(v));
    }

    // the scheduler hands the turn to `who`, who plays t ("" = stutter)
    game_step step(state_id s, player_id who, const std::string& t) const
    {
      game_step st{s, move_vector(g.player_count(), 0)};
      st.moves[g.scheduler()] = who;
      std::optional<trans_id> tr;
      if (!t.empty())
        tr = net.transition_index(t);
      st.moves[who] = *g.move_of(who, s, tr);
      return st;
    }

    // steps firing the sequence from a state, each by its owner
    std::vector<game_step> run(state_id s, std::initializer_list<const char*> ts) const
    {
      std::vector<game_step> out;
      for (auto t : ts)
        {
          auto who = g.owner(net.transition_index(t));
          out.push_back(step(s, who, t));
          s = g.tau(s, out.back().moves);
        }
      return out;
    }
  };

  std::size_t count_family(const std::vector<fairness_constraint>& fc,
                           fairness_constraint::family f)
  {
    return std::count_if(fc.begin(), fc.end(),
                         [&](const fairness_constraint& c) { return c.kind == f; });
  }

  lasso_computation states_only(std::vector<state_id> pre, std::vector<state_id> cyc)
  {
    lasso_computation l;
    for (auto q : pre)
      l.prefix.push_back({q, {}});
    for (auto q : cyc)
      l.cycle.push_back({q, {}});
    return l;
  }
} // namespace

TEST(Game, F4MoveCounts)
{
  f4_game f;
  auto& g = f.g;
  EXPECT_EQ(g.player_count(), 3u);
  EXPECT_EQ(g.state_count(), 6u);
  auto q = f.q({"p0", "p2"});
  EXPECT_EQ(g.d(0, q), 3u);
  EXPECT_EQ(move_name(f.net, g, 0, q, 0), "t2");
  EXPECT_EQ(move_name(f.net, g, 0, q, 1), "t3");
  EXPECT_EQ(move_name(f.net, g, 0, q, 2), "pass");
  EXPECT_EQ(g.d(g.env(), q), 1u);
  auto q03 = f.q({"p0", "p3"});
  EXPECT_EQ(g.d(g.env(), q03), 2u);
  EXPECT_EQ(g.d(0, q03), 1u);
  for (state_id s = 0; s < g.state_count(); ++s)
    EXPECT_EQ(g.d(g.scheduler(), s), 2u);
}

TEST(Game, DeadlockStutters)
{
  auto net = load_net(fixture("idle.net"));
  auto g = build_game(net);
  ASSERT_EQ(g.state_count(), 1u);
  EXPECT_EQ(g.d(g.env(), 0), 1u);
  EXPECT_EQ(move_name(net, g, g.env(), 0, 0), "stutter");
  EXPECT_EQ(g.tau(0, {0, 0, 1}), 0u);
  EXPECT_EQ(g.tau(0, {0, 0, 0}), 0u);
}

TEST(Game, RejectsBadInput)
{
  EXPECT_THROW(build_game(load_net(fixture("contact.net"))), input_error);
  EXPECT_THROW(build_game(load_net(fixture("pair.net")), true), input_error);
  f4_game f;
  EXPECT_THROW(f.g.tau(0, {0, 0}), precondition_error);
  EXPECT_THROW(f.g.tau(0, {5, 0, 0}), precondition_error);
}

TEST(Fairness, F4Families)
{
  f4_game f;
  EXPECT_EQ(count_family(f.fc, fairness_constraint::family::scheduler), 2u);
  // one per env transition: t0 t1 t4 t5
  EXPECT_EQ(count_family(f.fc, fairness_constraint::family::environment), 4u);
  EXPECT_EQ(count_family(f.fc, fairness_constraint::family::user_state), 0u);
  for (auto& c : f.fc)
    if (c.label == "t0#")
      {
        auto q = f.q({"p0", "p2"});
        ASSERT_EQ(c.c[q].size(), 1u);
        EXPECT_EQ(move_name(f.net, f.g, f.g.env(), q, c.c[q][0]), "t0");
        EXPECT_TRUE(c.c[f.q({"p1", "p3"})].empty());
      }
}

TEST(Fairness, ConflictingEnvMovesJoinTheConstraint)
{
  auto net = load_net(fixture("pair.net"));
  auto g = build_game(net);
  auto fc = build_fairness(net, g);
  auto q = *g.index_of(net.make_marking({"e1", "e2"}));
  for (auto& c : fc)
    if (c.label == "g#")
      {
        std::vector<std::string> moves;
        for (auto j : c.c[q])
          moves.push_back(move_name(net, g, g.env(), q, j));
        EXPECT_EQ(moves, (std::vector<std::string>{"g", "ra", "rb"}));
      }
}

TEST(Fairness, UserOnlyStates)
{
  auto net = load_net(fixture("handoff.net"));
  auto g = build_game(net);
  auto fc = build_fairness(net, g);
  ASSERT_EQ(count_family(fc, fairness_constraint::family::user_state), 1u);
  auto& c = *std::find_if(fc.begin(), fc.end(), [](const fairness_constraint& x) {
    return x.kind == fairness_constraint::family::user_state;
  });
  auto q0 = *g.index_of(net.make_marking({"q0"}));
  EXPECT_TRUE(c.enabled(q0));
  for (state_id s = 0; s < g.state_count(); ++s)
    if (s != q0)
      EXPECT_FALSE(c.enabled(s));

  // simplification: no family (c), no pass move where only the user moves
  auto gs = build_game(net, true);
  auto fs = build_fairness(net, gs);
  EXPECT_EQ(count_family(fs, fairness_constraint::family::user_state), 0u);
  EXPECT_EQ(gs.d(0, q0), 1u);
  EXPECT_EQ(move_name(net, gs, 0, q0, 0), "a");
}

TEST(Fairness, NoEnvTransitions)
{
  auto net = parse_net_string("net x\nlocations env u\nplace a @u init\nplace b @u\n"
                              "trans s @u pre a post b\ntrans r @u pre b post a\n");
  auto g = build_game(net);
  EXPECT_EQ(count_family(build_fairness(net, g), fairness_constraint::family::environment), 0u);
}

TEST(LassoFairness, EnvOnlyCycleStarvesTheUser)
{
  f4_game f;
  lasso_computation l;
  l.cycle = f.run(f.q({"p0", "p2"}), {"t0", "t1"});
  ASSERT_TRUE(check_lasso(f.g, l).empty());
  auto r = lasso_is_fair(f.g, f.fc, l);
  ASSERT_FALSE(r.fair);
  EXPECT_EQ(f.fc[r.violated.front()].label, "sched:u");
}

TEST(LassoFairness, AlternatingCycleIsFair)
{
  f4_game f;
  lasso_computation l;
  l.prefix = f.run(f.q({"p0", "p2"}), {"t3"});
  l.cycle = f.run(f.q({"p0", "p3"}), {"t0", "t5", "t3", "t1"});
  ASSERT_TRUE(check_lasso(f.g, l).empty());
  EXPECT_TRUE(lasso_is_fair(f.g, f.fc, l).fair);
  // without t0 the env constraint of t0 is never taken
  lasso_computation bad;
  bad.prefix = f.run(f.q({"p0", "p2"}), {"t3"});
  bad.cycle = f.run(f.q({"p0", "p3"}), {"t5", "t3"});
  auto r = lasso_is_fair(f.g, f.fc, bad);
  ASSERT_FALSE(r.fair);
  EXPECT_EQ(f.fc[r.violated.front()].label, "t0#");
}

TEST(LassoFairness, DeadlockStutterRound)
{
  auto net = load_net(fixture("idle.net"));
  auto g = build_game(net);
  auto fc = build_fairness(net, g);
  lasso_computation l;
  l.cycle = {{0, {0, 0, 0}}, {0, {0, 0, 1}}};
  EXPECT_TRUE(check_lasso(g, l).empty());
  EXPECT_TRUE(lasso_is_fair(g, fc, l).fair);
  l.cycle.pop_back();
  EXPECT_FALSE(lasso_is_fair(g, fc, l).fair);
}

TEST(StutterRemove, Examples)
{
  auto a = stutter_remove(states_only({0, 0, 1, 1, 1}, {2}));
  EXPECT_EQ(a.prefix, (std::vector<state_id>{0, 1}));
  EXPECT_EQ(a.cycle, (std::vector<state_id>{2}));
  EXPECT_TRUE(a.terminal());
  auto b = stutter_remove(states_only({0, 1}, {2, 3}));
  EXPECT_EQ(b.prefix, (std::vector<state_id>{0, 1}));
  EXPECT_EQ(b.cycle, (std::vector<state_id>{2, 3}));
  EXPECT_FALSE(b.terminal());
  auto c = stutter_remove(states_only({}, {0, 0, 0}));
  EXPECT_TRUE(c.terminal());
  EXPECT_TRUE(c.prefix.empty());
  // rotations and unrollings of the same word coincide
  EXPECT_EQ(stutter_remove(states_only({0, 1}, {2, 1})), stutter_remove(states_only({0}, {1, 2})));
  EXPECT_EQ(stutter_remove(states_only({}, {1, 2, 1, 2})), stutter_remove(states_only({1, 2, 2}, {1, 2})));
}

TEST(Translation, ComputationToPlay)
{
  f4_game f;
  lasso_computation l;
  l.prefix = f.run(f.q({"p0", "p2"}), {"t3"});
  l.cycle = f.run(f.q({"p0", "p3"}), {"t0", "t5", "t3", "t1"});
  auto p = computation_to_play(f.net, f.g, f.fc, l);
  EXPECT_EQ(print_play(f.net, p), "prefix: t3\ncycle: t0 t5 t3 t1\n");
  auto u = unroll(f.net, p, 1);
  std::vector<std::string> ms;
  for (auto& m : u.markings)
    ms.push_back(f.net.format(m));
  EXPECT_EQ(ms, (std::vector<std::string>{"{p0,p2}", "{p0,p3}", "{p1,p3}", "{p1,p2}", "{p1,p3}",
                                          "{p0,p3}"}));
  EXPECT_TRUE(validate_play(f.net, p, 20).empty());

  // stutters add no events
  auto s = l;
  s.cycle.insert(s.cycle.begin() + 1, f.step(s.cycle[1].state, 0, ""));
  EXPECT_EQ(computation_to_play(f.net, f.g, f.fc, s), p);

  lasso_computation unfair;
  unfair.cycle = f.run(f.q({"p0", "p2"}), {"t0", "t1"});
  EXPECT_THROW(computation_to_play(f.net, f.g, f.fc, unfair), precondition_error);
}

TEST(Translation, DeadlockComputationToPlay)
{
  auto net = load_net(fixture("idle.net"));
  auto g = build_game(net);
  auto fc = build_fairness(net, g);
  lasso_computation l;
  l.cycle = {{0, {0, 0, 0}}, {0, {0, 0, 1}}};
  auto p = computation_to_play(net, g, fc, l);
  EXPECT_TRUE(p.prefix.empty());
  EXPECT_TRUE(p.finite());
}

TEST(Translation, PlayToComputations)
{
  f4_game f;
  std::ifstream in(fixture("F4_concurrent.play"));
  auto p = parse_play(f.net, in);
  auto ls = play_to_computations(f.net, f.g, f.fc, p);
  ASSERT_EQ(ls.size(), 2u);
  auto first = [&](const lasso_computation& l) {
    std::string s;
    for (auto& st : l.prefix)
      {
        auto a = st.moves[f.g.scheduler()];
        s += move_name(f.net, f.g, a, st.state, st.moves[a]) + " ";
      }
    return s;
  };
  EXPECT_EQ(first(ls[0]).substr(0, 6), "t0 t3 ");
  EXPECT_EQ(first(ls[1]).substr(0, 6), "t3 t0 ");

  // one event per gap: one computation
  std::ifstream in2(fixture("F4_cycle.play"));
  EXPECT_EQ(play_to_computations(f.net, f.g, f.fc, parse_play(f.net, in2)).size(), 1u);

  auto idle = load_net(fixture("idle.net"));
  auto gi = build_game(idle);
  auto fi = build_fairness(idle, gi);
  auto li = play_to_computations(idle, gi, fi, parse_play_string(idle, "prefix:\n"));
  ASSERT_EQ(li.size(), 1u);
  EXPECT_TRUE(stutter_remove(li[0]).terminal());
  EXPECT_TRUE(lasso_is_fair(gi, fi, li[0]).fair);
}

TEST(Translation, StarvedUserGetsAStutter)
{
  // the user owns no transition, so the play never schedules it
  auto net = parse_net_string("net s\nlocations env u\nplace a @env init\nplace b @env\n"
                              "place c @u init\ntrans x @env pre a post b\n"
                              "trans y @env pre b post a\n");
  auto g = build_game(net);
  auto fc = build_fairness(net, g);
  auto p = parse_play_string(net, "cycle: x y\n");
  ASSERT_TRUE(validate_play(net, p, 12).empty());
  auto ls = play_to_computations(net, g, fc, p);
  ASSERT_EQ(ls.size(), 1u);
  EXPECT_TRUE(lasso_is_fair(g, fc, ls[0]).fair);
  EXPECT_EQ(ls[0].cycle.size(), 3u);
}

TEST(Export, DotAndTable)
{
  f4_game f;
  auto dot = game_dot(f.net, f.g);
  EXPECT_EQ(std::count(dot.begin(), dot.end(), '\n') > 6, true);
  for (state_id q = 0; q < 6; ++q)
    EXPECT_NE(dot.find("q" + std::to_string(q) + " [label="), std::string::npos);
  EXPECT_EQ(dot, game_dot(f.net, build_game(f.net)));
  auto table = game_table(f.net, f.g, f.fc);
  EXPECT_NE(table.find("<3, sched:u>"), std::string::npos);
  EXPECT_NE(table.find("<2, t0#>"), std::string::npos);
}

// Construction invariants and turn-based determinism, on random nets.
TEST(GameProperty, ConstructionInvariants)
{
  for (std::uint64_t seed = 1; seed <= 40; ++seed)
    {
      auto net = random_net(seed);
      auto g = build_game(net);
      const auto k = net.user_count();
      ASSERT_EQ(g.player_count(), k + 2);
      for (state_id q = 0; q < g.state_count(); ++q)
        {
          auto en = enabled_set(net, g.state(q));
          EXPECT_EQ(g.d(g.scheduler(), q), k + 1);
          EXPECT_EQ(g.d(g.scheduler(), q), g.player_count() - 1);
          std::size_t env = 0;
          for (player_id a = 0; a < k; ++a)
            {
              std::size_t r = std::count_if(en.begin(), en.end(), [&](trans_id t) {
                return net.transitions()[t].location == a + 1;
              });
              EXPECT_EQ(g.d(a, q), r + 1);
            }
          for (auto t : en)
            env += net.transitions()[t].location == env_location;
          EXPECT_EQ(g.d(g.env(), q), std::max<std::size_t>(env, 1));
          EXPECT_EQ(state_props(net, g.state(q)).size(), g.state(q).size());

          // all move vectors
          move_vector v(g.player_count(), 0);
          for (;;)
            {
              auto a = v[g.scheduler()];
              EXPECT_EQ(g.tau(q, v), g.succ(q, a, v[a]));
              auto& mv = g.moves(a, q)[v[a]];
              EXPECT_EQ(g.tau(q, v), mv.trans ? *g.index_of(fire(net, g.state(q), *mv.trans)) : q);
              std::size_t i = 0;
              while (i < v.size() && ++v[i] == g.d(i, q))
                v[i++] = 0;
              if (i == v.size())
                break;
            }
        }
    }
}

// Fair computations translate to valid plays; valid plays translate back
// to at least one fair computation whose cut markings agree.
TEST(GameProperty, TranslationsOnRandomLassos)
{
  std::mt19937_64 rng(11);
  for (std::uint64_t seed = 1; seed <= 30; ++seed)
    {
      auto net = random_net(seed);
      auto g = build_game(net);
      auto fc = build_fairness(net, g);
      for (int i = 0; i < 5; ++i)
        {
          auto l = sample_fair_lasso(g, fc, rng);
          ASSERT_TRUE(l);
          ASSERT_TRUE(check_lasso(g, *l).empty());
          ASSERT_TRUE(lasso_is_fair(g, fc, *l).fair);
          auto p = computation_to_play(net, g, fc, *l);
          auto ds = validate_play(net, p, p.prefix.size() + 2 * p.cycle.size());
          EXPECT_TRUE(ds.empty()) << seed << ": " << (ds.empty() ? "" : ds[0].message);
        }
      for (int i = 0; i < 5; ++i)
        {
          auto p = random_play(net, g, fc, rng);
          if (!p)
            continue;
          auto ls = play_to_computations(net, g, fc, *p);
          ASSERT_FALSE(ls.empty());
          bool fair = false;
          auto u = unroll(net, *p, 1);
          for (auto& l : ls)
            {
              ASSERT_TRUE(check_lasso(g, l).empty());
              fair = fair || lasso_is_fair(g, fc, l).fair;
              // states at the cut positions of the play
              std::vector<marking> seen{g.state(l.prefix.empty() ? l.cycle[0].state : l.prefix[0].state)};
              std::vector<game_step> all(l.prefix);
              all.insert(all.end(), l.cycle.begin(), l.cycle.end());
              for (auto& st : all)
                {
                  auto n = g.tau(st.state, st.moves);
                  if (n != st.state)
                    seen.push_back(g.state(n));
                }
              for (auto c : u.cut_positions)
                if (c < seen.size())
                  EXPECT_EQ(seen[c], u.markings[c]);
            }
          EXPECT_TRUE(fair);
        }
    }
}
