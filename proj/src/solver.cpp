#include <atlnet/solver.hpp>

#include <atlnet/error.hpp>

#include <algorithm>
#include <deque>
#include <functional>
#include <random>
#include <istream>
#include <sstream>

namespace atlnet
{
  game_profile first_profile(const game_structure& g)
  {
    game_profile p;
    p.choice.assign(g.user_count(), std::vector<move_id>(g.state_count(), 0));
    return p;
  }

  void check_profile(const game_structure& g, const game_profile& p)
  {
    if (p.choice.size() != g.user_count())
      throw input_error("profile covers " + std::to_string(p.choice.size()) + " users, game has "
                        + std::to_string(g.user_count()));
    for (player_id a = 0; a < g.user_count(); ++a)
      {
        if (p.choice[a].size() != g.state_count())
          throw input_error("profile of user " + std::to_string(a + 1) + " has the wrong size");
        for (state_id q = 0; q < g.state_count(); ++q)
          if (p.choice[a][q] >= g.d(a, q))
            throw input_error("profile move out of range at state " + std::to_string(q));
      }
  }

  path_goal goal_of(const net_system& net, const game_structure& g, const path_formula& pf)
  {
    path_goal goal;
    goal.op = pf.op;
    if (pf.op == temporal_op::next)
      throw input_error("the next operator is outside the supported fragment");
    for (state_id q = 0; q < g.state_count(); ++q)
      {
        auto l = state_props(net, g.state(q));
        goal.right.push_back(holds(*pf.right, l));
        if (pf.op == temporal_op::until)
          goal.left.push_back(holds(*pf.left, l));
      }
    return goal;
  }

  namespace
  {
    // Monitor of the violation of a path goal. Values: G: 0 ok, 1 bad;
    // U: 0 waiting, 1 done, 2 failed; none: 0.
    struct monitor
    {
      const path_goal* goal = nullptr; // null: trivial monitor

      std::size_t size() const
      {
        if (!goal)
          return 1;
        return goal->op == temporal_op::globally ? 2 : 3;
      }

      std::size_t read(std::size_t m, state_id q) const
      {
        if (!goal)
          return 0;
        if (goal->op == temporal_op::globally)
          return m == 1 || !goal->right[q] ? 1 : 0;
        if (m != 0)
          return m;
        if (goal->right[q])
          return 1;
        return goal->left[q] ? 0 : 2;
      }

      bool violating(std::size_t m) const
      {
        if (!goal)
          return true;
        return goal->op == temporal_op::globally ? m == 1 : m != 1;
      }
    };

    struct pedge
    {
      std::size_t to;
      player_id who;
      move_id move;
    };

    struct product
    {
      const game_structure& g;
      const game_profile* profile; // null: users unrestricted
      monitor mon;

      std::size_t vertex(state_id q, std::size_t m) const { return q * mon.size() + m; }
      state_id state(std::size_t v) const { return v / mon.size(); }
      std::size_t mstate(std::size_t v) const { return v % mon.size(); }

      std::vector<pedge> out(std::size_t v) const
      {
        std::vector<pedge> es;
        auto q = state(v);
        auto m = mstate(v);
        for (player_id a = 0; a <= g.user_count(); ++a)
          {
            if (a < g.user_count() && profile)
              {
                auto j = profile->choice[a][q];
                es.push_back({vertex(g.succ(q, a, j), mon.read(m, g.succ(q, a, j))), a, j});
              }
            else
              for (move_id j = 0; j < g.d(a, q); ++j)
                es.push_back({vertex(g.succ(q, a, j), mon.read(m, g.succ(q, a, j))), a, j});
          }
        return es;
      }

      game_step step(std::size_t v, const pedge& e) const
      {
        game_step s{state(v), move_vector(g.player_count(), 0)};
        for (player_id a = 0; profile && a < g.user_count(); ++a)
          s.moves[a] = profile->choice[a][s.state];
        s.moves[e.who] = e.move;
        s.moves[g.scheduler()] = e.who;
        return s;
      }
    };

    bool edge_takes(const game_structure& g, const fairness_constraint& c, state_id q,
                    player_id who, move_id j)
    {
      if (c.player == g.scheduler())
        return c.contains(q, who);
      return who == c.player && c.contains(q, j);
    }

    struct explored
    {
      std::vector<std::size_t> order;               // reachable vertices in BFS order
      std::map<std::size_t, std::size_t> index;     // vertex -> position in order
      std::vector<std::vector<pedge>> adj;          // by position
      std::vector<std::optional<std::size_t>> from; // BFS parent position
      std::vector<pedge> via;                       // edge from the parent
    };

    explored explore(const product& pr, std::size_t v0)
    {
      explored x;
      x.order.push_back(v0);
      x.index[v0] = 0;
      x.from.push_back(std::nullopt);
      x.via.push_back({});
      for (std::size_t i = 0; i < x.order.size(); ++i)
        {
          x.adj.push_back(pr.out(x.order[i]));
          for (auto& e : x.adj[i])
            if (x.index.emplace(e.to, x.order.size()).second)
              {
                x.order.push_back(e.to);
                x.from.push_back(i);
                x.via.push_back(e);
              }
        }
      return x;
    }

    // Tarjan over positions satisfying `inside`; components listed in
    // discovery order of their roots.
    std::vector<std::vector<std::size_t>> sccs(const explored& x,
                                               const std::vector<bool>& inside)
    {
      const auto n = x.order.size();
      std::vector<std::size_t> idx(n, SIZE_MAX), low(n, 0);
      std::vector<bool> on(n, false);
      std::vector<std::size_t> stack;
      std::vector<std::vector<std::size_t>> out;
      std::size_t counter = 0;
      struct frame
      {
        std::size_t v, next;
      };
      for (std::size_t s = 0; s < n; ++s)
        {
          if (!inside[s] || idx[s] != SIZE_MAX)
            continue;
          std::vector<frame> call{{s, 0}};
          idx[s] = low[s] = counter++;
          stack.push_back(s);
          on[s] = true;
          while (!call.empty())
            {
              auto& f = call.back();
              if (f.next < x.adj[f.v].size())
                {
                  auto w = x.index.at(x.adj[f.v][f.next++].to);
                  if (!inside[w])
                    continue;
                  if (idx[w] == SIZE_MAX)
                    {
                      idx[w] = low[w] = counter++;
                      stack.push_back(w);
                      on[w] = true;
                      call.push_back({w, 0});
                    }
                  else if (on[w])
                    low[f.v] = std::min(low[f.v], idx[w]);
                  continue;
                }
              auto v = f.v;
              call.pop_back();
              if (!call.empty())
                low[call.back().v] = std::min(low[call.back().v], low[v]);
              if (low[v] == idx[v])
                {
                  std::vector<std::size_t> comp;
                  std::size_t w;
                  do
                    {
                      w = stack.back();
                      stack.pop_back();
                      on[w] = false;
                      comp.push_back(w);
                    }
                  while (w != v);
                  std::sort(comp.begin(), comp.end());
                  out.push_back(std::move(comp));
                }
            }
        }
      return out;
    }

    // Shortest path inside `allowed` from position s to a position
    // satisfying target, as (position, edge) pairs.
    std::vector<std::pair<std::size_t, pedge>> path_to(const explored& x, std::size_t s,
                                                       const std::vector<bool>& allowed,
                                                       const std::function<bool(std::size_t)>& target,
                                                       bool nonempty)
    {
      if (!nonempty && target(s))
        return {};
      std::map<std::size_t, std::pair<std::size_t, pedge>> parent;
      std::deque<std::size_t> todo{s};
      std::vector<bool> seen(x.order.size(), false);
      if (!nonempty)
        seen[s] = true;
      while (!todo.empty())
        {
          auto v = todo.front();
          todo.pop_front();
          for (auto& e : x.adj[v])
            {
              auto w = x.index.at(e.to);
              if (!allowed[w] || seen[w])
                continue;
              seen[w] = true;
              parent[w] = {v, e};
              if (target(w))
                {
                  std::vector<std::pair<std::size_t, pedge>> p;
                  for (auto u = w;;)
                    {
                      auto [pv, pe] = parent.at(u);
                      p.push_back({pv, pe});
                      u = pv;
                      if (u == s && (p.size() > 0))
                        break;
                    }
                  std::reverse(p.begin(), p.end());
                  return p;
                }
              todo.push_back(w);
            }
        }
      throw std::logic_error("path_to: target unreachable inside component");
    }

    // Witness of a constraint inside a component: a vertex where it is
    // disabled, or an internal edge taking it.
    struct witness
    {
      std::size_t v;
      std::optional<pedge> e;
    };

    struct fair_component
    {
      std::vector<std::size_t> members;
      std::vector<bool> in;
      std::vector<witness> ws;
    };

    // Nontrivial components inside the violating region of the monitor in
    // which every constraint has a witness. Any cycle of a component that
    // fails a constraint fails it too, so this is exact.
    std::vector<fair_component> fair_components(const product& pr,
                                                const std::vector<fairness_constraint>& fc,
                                                const explored& x, bool first_only)
    {
      const auto n = x.order.size();
      std::vector<bool> inside(n);
      for (std::size_t i = 0; i < n; ++i)
        inside[i] = pr.mon.violating(pr.mstate(x.order[i]));
      std::vector<fair_component> out;
      for (auto& comp : sccs(x, inside))
        {
          fair_component fcmp{comp, std::vector<bool>(n, false), {}};
          for (auto v : comp)
            fcmp.in[v] = true;
          bool nontrivial = comp.size() > 1;
          for (auto& e : x.adj[comp.front()])
            nontrivial = nontrivial || x.index.at(e.to) == comp.front();
          if (!nontrivial)
            continue;
          bool fair = true;
          for (auto& c : fc)
            {
              std::optional<witness> w;
              for (auto v : comp)
                if (!c.enabled(pr.state(x.order[v])))
                  {
                    w = witness{v, std::nullopt};
                    break;
                  }
              for (std::size_t i = 0; !w && i < comp.size(); ++i)
                for (auto& e : x.adj[comp[i]])
                  if (fcmp.in[x.index.at(e.to)]
                      && edge_takes(pr.g, c, pr.state(x.order[comp[i]]), e.who, e.move))
                    {
                      w = witness{comp[i], e};
                      break;
                    }
              if (!w)
                {
                  fair = false;
                  break;
                }
              fcmp.ws.push_back(*w);
            }
          if (!fair)
            continue;
          out.push_back(std::move(fcmp));
          if (first_only)
            break;
        }
      return out;
    }

    // Lasso reaching the component and cycling through all its witnesses.
    // With an rng, the entry, witness order and some detours are random.
    lasso_computation build_lasso(const product& pr, const explored& x, const fair_component& fcmp,
                                  std::mt19937_64* rng)
    {
      const auto n = x.order.size();
      lasso_computation l;
      auto entry = rng ? fcmp.members[(*rng)() % fcmp.members.size()] : fcmp.members.front();
      std::size_t cur = 0;
      auto walk = [&](std::vector<game_step>& steps, const std::vector<bool>& allowed,
                      std::size_t len) {
        for (std::size_t i = 0; i < len; ++i)
          {
            std::vector<const pedge*> es;
            for (auto& e : x.adj[cur])
              if (allowed[x.index.at(e.to)])
                es.push_back(&e);
            if (es.empty())
              return;
            auto& e = *es[(*rng)() % es.size()];
            steps.push_back(pr.step(x.order[cur], e));
            cur = x.index.at(e.to);
          }
      };
      auto append = [&](std::vector<game_step>& steps,
                        const std::vector<std::pair<std::size_t, pedge>>& p) {
        for (auto& [v, e] : p)
          {
            steps.push_back(pr.step(x.order[v], e));
            cur = x.index.at(e.to);
          }
      };
      std::vector<bool> all(n, true);
      if (rng)
        {
          // stay where the component is still reachable
          std::vector<std::vector<std::size_t>> rev(n);
          for (std::size_t v = 0; v < n; ++v)
            for (auto& e : x.adj[v])
              rev[x.index.at(e.to)].push_back(v);
          std::vector<bool> reach(n, false);
          std::vector<std::size_t> todo(fcmp.members);
          for (auto v : todo)
            reach[v] = true;
          while (!todo.empty())
            {
              auto v = todo.back();
              todo.pop_back();
              for (auto u : rev[v])
                if (!reach[u])
                  {
                    reach[u] = true;
                    todo.push_back(u);
                  }
            }
          walk(l.prefix, reach, (*rng)() % 4);
        }
      append(l.prefix, path_to(x, cur, all, [&](std::size_t u) { return u == entry; }, false));
      if (rng)
        walk(l.cycle, fcmp.in, (*rng)() % 4);
      auto ws = fcmp.ws;
      if (rng)
        for (std::size_t i = ws.size(); i > 1; --i)
          std::swap(ws[i - 1], ws[(*rng)() % i]);
      for (auto& w : ws)
        {
          append(l.cycle, path_to(x, cur, fcmp.in, [&](std::size_t u) { return u == w.v; }, false));
          if (w.e)
            append(l.cycle, {{w.v, *w.e}});
        }
      append(l.cycle, path_to(x, cur, fcmp.in, [&](std::size_t u) { return u == entry; },
                              l.cycle.empty()));
      return l;
    }

    std::optional<lasso_computation> fair_cycle(const product& pr,
                                                const std::vector<fairness_constraint>& fc,
                                                std::size_t v0, bool want_lasso)
    {
      auto x = explore(pr, v0);
      auto comps = fair_components(pr, fc, x, true);
      if (comps.empty())
        return std::nullopt;
      if (!want_lasso)
        return lasso_computation{};
      return build_lasso(pr, x, comps.front(), nullptr);
    }
  } // namespace

  std::optional<lasso_computation> sample_fair_lasso(const game_structure& g,
                                                     const std::vector<fairness_constraint>& fc,
                                                     std::mt19937_64& rng,
                                                     const game_profile* profile)
  {
    if (profile)
      check_profile(g, *profile);
    product pr{g, profile, monitor{}};
    auto x = explore(pr, pr.vertex(g.initial(), 0));
    auto comps = fair_components(pr, fc, x, false);
    if (comps.empty())
      return std::nullopt;
    return build_lasso(pr, x, comps[rng() % comps.size()], &rng);
  }

  bool has_fair_computation(const game_structure& g, const std::vector<fairness_constraint>& fc,
                            const game_profile& profile, state_id q0)
  {
    product pr{g, &profile, monitor{}};
    return fair_cycle(pr, fc, pr.vertex(q0, 0), false).has_value();
  }

  profile_check verify_profile(const game_structure& g, const std::vector<fairness_constraint>& fc,
                               const game_profile& profile, const path_goal& goal, state_id q0)
  {
    if (q0 >= g.state_count())
      throw input_error("state " + std::to_string(q0) + " is not a state of the game");
    check_profile(g, profile);
    if (goal.right.size() != g.state_count()
        || (goal.op == temporal_op::until && goal.left.size() != g.state_count()))
      throw input_error("path goal does not match the game");
    profile_check r;
    if (!has_fair_computation(g, fc, profile, q0))
      {
        r.vacuous = true;
        return r;
      }
    product pr{g, &profile, monitor{&goal}};
    r.counterexample = fair_cycle(pr, fc, pr.vertex(q0, pr.mon.read(0, q0)), true);
    r.winning = !r.counterexample;
    return r;
  }

  profile_check verify_profile(const net_system& net, const game_structure& g,
                               const std::vector<fairness_constraint>& fc,
                               const game_profile& profile, const path_formula& pf,
                               state_id q0)
  {
    return verify_profile(g, fc, profile, goal_of(net, g, pf), q0);
  }

  namespace
  {
    struct decision
    {
      state_id q;
      player_id a;
    };

    std::vector<bool> reachable_states(const game_structure& g, const game_profile* p,
                                       state_id q0)
    {
      std::vector<bool> seen(g.state_count(), false);
      std::vector<state_id> todo{q0};
      seen[q0] = true;
      while (!todo.empty())
        {
          auto q = todo.back();
          todo.pop_back();
          for (player_id a = 0; a <= g.user_count(); ++a)
            for (move_id j = 0; j < g.d(a, q); ++j)
              {
                if (p && a < g.user_count() && p->choice[a][q] != j)
                  continue;
                auto w = g.succ(q, a, j);
                if (!seen[w])
                  {
                    seen[w] = true;
                    todo.push_back(w);
                  }
              }
        }
      return seen;
    }

    std::vector<decision> decision_points(const game_structure& g, state_id q0)
    {
      auto r = reachable_states(g, nullptr, q0);
      std::vector<decision> out;
      for (state_id q = 0; q < g.state_count(); ++q)
        for (player_id a = 0; r[q] && a < g.user_count(); ++a)
          if (g.d(a, q) > 1)
            out.push_back({q, a});
      return out;
    }

    void check_space(const std::vector<std::vector<move_id>>& allowed, std::size_t bound,
                     const char* engine_hint)
    {
      std::size_t space = 1;
      for (auto& a : allowed)
        {
          if (space > bound / a.size())
            throw resource_error("profile space exceeds the bound of " + std::to_string(bound)
                                 + engine_hint);
          space *= a.size();
        }
      if (space > bound)
        throw resource_error("profile space exceeds the bound of " + std::to_string(bound)
                             + engine_hint);
    }

    // Canonical odometer over the decision points; the first point is the
    // most significant digit. A losing profile loses regardless of the
    // choices at states it cannot reach, so those digits are skipped.
    verdict search(const game_structure& g, const std::vector<fairness_constraint>& fc,
                   const path_goal& goal, state_id q0, const std::vector<decision>& points,
                   const std::vector<std::vector<move_id>>& allowed)
    {
      verdict v;
      std::vector<std::size_t> digit(points.size(), 0);
      auto p = first_profile(g);
      for (;;)
        {
          for (std::size_t i = 0; i < points.size(); ++i)
            p.choice[points[i].a][points[i].q] = allowed[i][digit[i]];
          auto r = verify_profile(g, fc, p, goal, q0);
          ++v.profiles_checked;
          if (r.winning)
            {
              v.satisfied = true;
              v.witness = p;
              v.counterexample.reset();
              return v;
            }
          if (r.counterexample)
            v.counterexample = r.counterexample;
          auto reach = reachable_states(g, &p, q0);
          std::size_t i = points.size();
          while (i > 0 && !reach[points[i - 1].q])
            --i;
          // increment digit i-1, carrying towards the front
          while (i > 0 && ++digit[i - 1] == allowed[i - 1].size())
            --i;
          if (i == 0)
            break;
          for (auto j = i; j < points.size(); ++j)
            digit[j] = 0;
        }
      return v;
    }
  } // namespace

  verdict synthesize_enumerate(const game_structure& g, const std::vector<fairness_constraint>& fc,
                               const path_goal& goal, state_id q0, std::size_t profile_bound)
  {
    if (q0 >= g.state_count())
      throw input_error("state " + std::to_string(q0) + " is not a state of the game");
    auto points = decision_points(g, q0);
    std::vector<std::vector<move_id>> allowed;
    for (auto& d : points)
      {
        allowed.emplace_back(g.d(d.a, d.q));
        for (move_id j = 0; j < allowed.back().size(); ++j)
          allowed.back()[j] = j;
      }
    check_space(allowed, profile_bound, "; try the fixpoint engine");
    auto v = search(g, fc, goal, q0, points, allowed);
    if (!v.satisfied)
      v.certificate = "all " + std::to_string(v.profiles_checked)
                      + " candidate profiles lose (states unreachable under a profile skipped)";
    return v;
  }

  namespace
  {
    // Two-player arena: opponent vertices O(q,m), where the scheduler
    // picks a player and the env its move, and user vertices U(q,m,a).
    struct arena
    {
      const game_structure& g;
      monitor mon;
      std::size_t no; // number of opponent vertices

      struct aedge
      {
        std::size_t to;
        player_id who;
        std::optional<move_id> move; // nullopt: scheduler hands the turn to a user
      };

      std::vector<std::vector<aedge>> out;
      std::vector<std::vector<std::pair<std::size_t, std::size_t>>> in; // (source, edge index)

      arena(const game_structure& game, const path_goal& goal)
        : g(game)
        , mon{&goal}
      {
        no = g.state_count() * mon.size();
        out.resize(no + no * g.user_count());
        for (state_id q = 0; q < g.state_count(); ++q)
          for (std::size_t m = 0; m < mon.size(); ++m)
            {
              auto o = q * mon.size() + m;
              for (move_id j = 0; j < g.d(g.env(), q); ++j)
                {
                  auto w = g.succ(q, g.env(), j);
                  out[o].push_back({w * mon.size() + mon.read(m, w), g.env(), j});
                }
              for (player_id a = 0; a < g.user_count(); ++a)
                {
                  auto u = no + o * g.user_count() + a;
                  out[o].push_back({u, a, std::nullopt});
                  for (move_id j = 0; j < g.d(a, q); ++j)
                    {
                      auto w = g.succ(q, a, j);
                      out[u].push_back({w * mon.size() + mon.read(m, w), a, j});
                    }
                }
            }
        in.resize(out.size());
        for (std::size_t v = 0; v < out.size(); ++v)
          for (std::size_t i = 0; i < out[v].size(); ++i)
            in[out[v][i].to].push_back({v, i});
      }

      bool opponent(std::size_t v) const { return v < no; }
      state_id state(std::size_t v) const
      {
        return (v < no ? v : (v - no) / g.user_count()) / mon.size();
      }
      std::size_t mstate(std::size_t v) const
      {
        return (v < no ? v : (v - no) / g.user_count()) % mon.size();
      }

      bool good(const fairness_constraint& c, std::size_t v, const aedge& e) const
      {
        auto q = state(v);
        if (!c.enabled(q))
          return true;
        if (c.player == g.scheduler())
          return opponent(v) && c.contains(q, e.who);
        return e.move && e.who == c.player && c.contains(q, *e.move);
      }

      // Opponent attractor: least Y containing `base` vertices and closed
      // under the controllable predecessor, restricted to `safe`. An edge
      // in `edge_ok` counts as leading into Y.
      std::vector<bool> attractor(const std::vector<bool>& safe, const std::vector<bool>& base,
                                  const std::function<bool(std::size_t, std::size_t)>& edge_ok) const
      {
        const auto n = out.size();
        std::vector<bool> y(n, false);
        std::vector<std::size_t> missing(n, 0);
        std::vector<std::size_t> todo;
        auto add = [&](std::size_t v) {
          if (!y[v] && safe[v])
            {
              y[v] = true;
              todo.push_back(v);
            }
        };
        for (std::size_t v = 0; v < n; ++v)
          {
            if (!safe[v])
              continue;
            if (base[v])
              {
                add(v);
                continue;
              }
            std::size_t ok = 0;
            for (std::size_t i = 0; i < out[v].size(); ++i)
              ok += edge_ok(v, i) ? 1 : 0;
            missing[v] = out[v].size() - ok;
            if (opponent(v) ? ok > 0 : missing[v] == 0)
              add(v);
          }
        while (!todo.empty())
          {
            auto w = todo.back();
            todo.pop_back();
            for (auto [v, i] : in[w])
              {
                if (y[v] || !safe[v] || edge_ok(v, i))
                  continue;
                if (opponent(v) || --missing[v] == 0)
                  add(v);
              }
          }
        return y;
      }

      // Vertices from which the opponent forces a fair play staying in safe.
      std::vector<bool> fair_within(const std::vector<bool>& safe,
                                    const std::vector<fairness_constraint>& fc) const
      {
        const auto n = out.size();
        std::vector<bool> z = safe;
        const std::vector<bool> none(n, false);
        for (;;)
          {
            std::vector<bool> next = safe;
            for (auto& c : fc)
              {
                auto y = attractor(safe, none, [&](std::size_t v, std::size_t i) {
                  auto& e = out[v][i];
                  return z[e.to] && good(c, v, e);
                });
                for (std::size_t v = 0; v < n; ++v)
                  next[v] = next[v] && y[v];
              }
            if (fc.empty())
              {
                // no constraint: any infinite play in safe will do
                next = attractor(safe, none, [&](std::size_t v, std::size_t i) {
                  return z[out[v][i].to];
                });
              }
            if (next == z)
              return z;
            z = std::move(next);
          }
      }
    };
  } // namespace

  verdict synthesize_fixpoint(const game_structure& g, const std::vector<fairness_constraint>& fc,
                              const path_goal& goal, state_id q0, std::size_t profile_bound)
  {
    if (q0 >= g.state_count())
      throw input_error("state " + std::to_string(q0) + " is not a state of the game");
    arena ar(g, goal);
    const auto n = ar.out.size();
    std::vector<bool> opp;
    std::vector<bool> safe(n);
    for (std::size_t v = 0; v < n; ++v)
      safe[v] = ar.mon.violating(ar.mstate(v));
    if (goal.op == temporal_op::until)
      opp = ar.fair_within(safe, fc);
    else
      {
        auto r = ar.fair_within(safe, fc);
        opp = ar.attractor(std::vector<bool>(n, true), r,
                           [](std::size_t, std::size_t) { return false; });
      }
    auto v0 = q0 * ar.mon.size() + ar.mon.read(0, q0);
    verdict v;
    if (opp[v0])
      {
        v.certificate = "env and scheduler force a fair violating computation against every "
                        "user strategy (fair-game fixpoint)";
        // a concrete lasso against the first profile
        auto r = verify_profile(g, fc, first_profile(g), goal, q0);
        v.counterexample = r.counterexample;
        return v;
      }
    auto points = decision_points(g, q0);
    std::vector<std::vector<move_id>> allowed;
    for (auto& d : points)
      {
        std::vector<move_id> ok;
        for (move_id j = 0; j < g.d(d.a, d.q); ++j)
          for (std::size_t m = 0; m < ar.mon.size(); ++m)
            {
              auto u = ar.no + (d.q * ar.mon.size() + m) * g.user_count() + d.a;
              if (!opp[u] && !opp[ar.out[u][j].to])
                {
                  ok.push_back(j);
                  break;
                }
            }
        if (ok.empty())
          ok.push_back(0);
        allowed.push_back(std::move(ok));
      }
    check_space(allowed, profile_bound, " after fixpoint pruning");
    v = search(g, fc, goal, q0, points, allowed);
    if (!v.satisfied && !v.counterexample)
      v.counterexample = verify_profile(g, fc, first_profile(g), goal, q0).counterexample;
    if (!v.satisfied)
      v.certificate = "no memoryless profile among the moves kept by the fair-game fixpoint wins ("
                      + std::to_string(v.profiles_checked) + " checked)";
    return v;
  }

  const char* to_string(engine e)
  {
    return e == engine::enumerate ? "enumerate" : "fixpoint";
  }

  namespace
  {
    std::vector<bool> label(const net_system& net, const game_structure& g,
                            const std::vector<fairness_constraint>& fc, const formula& f,
                            engine e, std::size_t bound, verdict& v,
                            std::optional<state_id> root_state, verdict* root)
    {
      const auto nq = g.state_count();
      std::vector<bool> r(nq, false);
      switch (f.k)
        {
        case formula::kind::truth:
        case formula::kind::prop:
          for (state_id q = 0; q < nq; ++q)
            r[q] = holds(f, state_props(net, g.state(q)));
          break;
        case formula::kind::negation:
          r = label(net, g, fc, *f.args[0], e, bound, v, std::nullopt, nullptr);
          r.flip();
          break;
        case formula::kind::disjunction:
        case formula::kind::conjunction:
          {
            auto a = label(net, g, fc, *f.args[0], e, bound, v, std::nullopt, nullptr);
            auto b = label(net, g, fc, *f.args[1], e, bound, v, std::nullopt, nullptr);
            for (state_id q = 0; q < nq; ++q)
              r[q] = f.k == formula::kind::disjunction ? a[q] || b[q] : a[q] && b[q];
            break;
          }
        case formula::kind::coalition:
          {
            path_goal goal;
            goal.op = f.op;
            if (f.op == temporal_op::until)
              {
                goal.left = label(net, g, fc, *f.args[0], e, bound, v, std::nullopt, nullptr);
                goal.right = label(net, g, fc, *f.args[1], e, bound, v, std::nullopt, nullptr);
              }
            else
              goal.right = label(net, g, fc, *f.args[0], e, bound, v, std::nullopt, nullptr);
            for (state_id q = 0; q < nq; ++q)
              {
                auto res = e == engine::enumerate ? synthesize_enumerate(g, fc, goal, q, bound)
                                                  : synthesize_fixpoint(g, fc, goal, q, bound);
                r[q] = res.satisfied;
                v.profiles_checked += res.profiles_checked;
                if (root && root_state == q)
                  {
                    root->witness = res.witness;
                    root->counterexample = res.counterexample;
                    root->certificate = res.certificate;
                  }
              }
            break;
          }
        }
      v.state_sets[print_formula(f)] = r;
      return r;
    }
  } // namespace

  verdict model_check(const net_system& net, const game_structure& g,
                      const std::vector<fairness_constraint>& fc, const formula& f, state_id q0,
                      engine e, std::size_t profile_bound)
  {
    auto violations = check_fragment(f, net);
    if (!violations.empty())
      {
        std::string msg = "formula outside the supported fragment:";
        for (auto& s : violations)
          msg += " " + s + ";";
        msg.pop_back();
        throw input_error(msg);
      }
    if (q0 >= g.state_count())
      throw input_error("state " + std::to_string(q0) + " is not a state of the game");
    verdict v;
    auto r = label(net, g, fc, f, e, profile_bound, v, q0, &v);
    v.satisfied = r[q0];
    if (v.satisfied)
      v.counterexample.reset();
    else
      v.witness.reset();
    return v;
  }

  game_profile net_to_game(const net_system& net, const game_structure& g,
                           const std::vector<net_strategy>& strategies)
  {
    auto p = first_profile(g);
    std::vector<bool> seen(g.user_count(), false);
    for (player_id a = 0; a < g.user_count(); ++a)
      for (state_id q = 0; q < g.state_count(); ++q)
        p.choice[a][q] = g.move_of(a, q, std::nullopt).value_or(0);
    for (auto& s : strategies)
      {
        if (s.owner == env_location || s.owner > g.user_count())
          throw input_error("strategy owner " + std::to_string(s.owner) + " is not a user");
        auto a = s.owner - 1;
        if (seen[a])
          throw input_error("two strategies for user " + net.locations()[s.owner]);
        seen[a] = true;
        for (auto& [m, ts] : s.choice)
          {
            auto q = g.index_of(m);
            if (!q)
              throw input_error("strategy references unknown state " + net.format(m));
            if (ts.empty())
              continue;
            auto t = *ts.begin();
            auto j = g.move_of(a, *q, t);
            if (!j)
              throw input_error("transition " + net.transitions().at(t).name
                                + " is not a move of " + net.locations()[s.owner] + " at "
                                + net.format(m));
            p.choice[a][*q] = *j;
          }
      }
    return p;
  }

  std::vector<net_strategy> game_to_net(const net_system& net, const game_structure& g,
                                        const game_profile& p)
  {
    (void)net;
    check_profile(g, p);
    std::vector<net_strategy> out;
    for (player_id a = 0; a < g.user_count(); ++a)
      {
        net_strategy s;
        s.owner = a + 1;
        for (state_id q = 0; q < g.state_count(); ++q)
          if (auto t = g.moves(a, q)[p.choice[a][q]].trans)
            s.choice[g.state(q)] = {*t};
        out.push_back(std::move(s));
      }
    return out;
  }

  history_strategy cut_strategy_to_history(const branching_process& bp,
                                           const std::map<cut, std::set<trans_id>>& strategy,
                                           std::size_t bound)
  {
    auto& net = bp.net();
    history_strategy out;
    for (auto& [c, ts] : strategy)
      {
        if (!bp.is_cut(c))
          throw input_error("strategy key is not a cut of the prefix");
        if (ts.empty())
          continue;
        auto t = *ts.begin();
        auto conf = bp.configuration(c);
        std::vector<bool> used(conf.size(), false);
        std::vector<marking> hist{net.initial()};
        std::size_t produced = 0;
        auto rec = [&](auto&& self) -> void {
          if (produced >= bound)
            return;
          if (hist.size() == conf.size() + 1)
            {
              out[hist] = t;
              ++produced;
              return;
            }
          for (std::size_t i = 0; i < conf.size(); ++i)
            {
              if (used[i])
                continue;
              bool ready = true;
              for (std::size_t j = 0; j < conf.size() && ready; ++j)
                if (!used[j] && j != i
                    && bp.causal_leq({true, conf[j]}, {true, conf[i]}))
                  ready = false;
              if (!ready)
                continue;
              used[i] = true;
              hist.push_back(fire(net, hist.back(), bp.events()[conf[i]].label));
              self(self);
              hist.pop_back();
              used[i] = false;
            }
        };
        rec(rec);
      }
    return out;
  }

  bounded_check check_bounded_plays(const net_system& net, const game_structure& g,
                                    const std::vector<fairness_constraint>& fc,
                                    const std::vector<net_strategy>& strategies,
                                    const path_goal& goal, unsigned horizon)
  {
    auto profile = net_to_game(net, g, strategies);
    auto bp = unfold_prefix(net, horizon);
    monitor mon{&goal};
    std::vector<const net_strategy*> by_user(g.user_count(), nullptr);
    for (auto& s : strategies)
      by_user[s.owner - 1] = &s;
    static const std::set<trans_id> none;

    bounded_check res;
    std::set<std::tuple<marking, std::size_t, unsigned>> memo;
    std::map<state_id, bool> fair_from;
    std::vector<trans_id> seq;
    auto continues = [&](state_id q) {
      auto it = fair_from.find(q);
      if (it == fair_from.end())
        it = fair_from.emplace(q, has_fair_computation(g, fc, profile, q)).first;
      return it->second;
    };
    auto rec = [&](auto&& self, const cut& c, std::size_t m, unsigned left) -> bool {
      auto mk = bp.marking_of(c);
      if (!memo.insert({mk, m, left}).second)
        return true;
      auto q = *g.index_of(mk);
      bool failed = goal.op == temporal_op::globally ? m == 1 : m == 2;
      if (failed)
        {
          if (continues(q))
            {
              res.violation = seq;
              return false;
            }
          return true;
        }
      if (goal.op == temporal_op::until && m == 1)
        return true;
      if (enabled_set(net, mk).empty())
        {
          // deadlock: the play ends and U never got its target
          if (goal.op == temporal_op::until)
            {
              res.violation = seq;
              return false;
            }
          return true;
        }
      if (left == 0)
        return true;
      for (auto e : enabled_events(bp, c))
        {
          auto t = bp.events()[e].label;
          auto loc = net.transitions()[t].location;
          if (loc != env_location)
            {
              auto* s = by_user[loc - 1];
              auto& chosen = s ? s->at(mk) : none;
              if (!chosen.count(t))
                continue;
            }
          auto next = cut_step(bp, c, e);
          seq.push_back(t);
          auto w = *g.index_of(bp.marking_of(next));
          if (!self(self, next, mon.read(m, w), left - 1))
            return false;
          seq.pop_back();
        }
      return true;
    };
    res.ok = rec(rec, bp.initial_cut(), mon.read(0, g.initial()), horizon);
    res.plays = memo.size();
    return res;
  }

  std::string print_profile(const net_system& net, const game_structure& g, const game_profile& p)
  {
    std::ostringstream os;
    for (player_id a = 0; a < g.user_count(); ++a)
      for (state_id q = 0; q < g.state_count(); ++q)
        {
          auto& mv = g.moves(a, q)[p.choice[a][q]];
          if (g.d(a, q) < 2 && !mv.trans)
            continue;
          os << "strategy " << net.locations()[a + 1] << ": " << net.format(g.state(q)) << " -> "
             << (mv.trans ? net.transitions()[*mv.trans].name : "pass") << "\n";
        }
    return os.str();
  }

  std::vector<net_strategy> parse_strategies(const net_system& net, std::istream& in)
  {
    std::vector<net_strategy> out(net.user_count());
    for (std::size_t a = 0; a < out.size(); ++a)
      out[a].owner = a + 1;
    std::string line;
    std::size_t no = 0;
    auto fail = [&](const std::string& what) {
      throw input_error("strategy line " + std::to_string(no) + ": " + what);
    };
    while (std::getline(in, line))
      {
        ++no;
        if (auto h = line.find('#'); h != std::string::npos)
          line.erase(h);
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw))
          continue;
        if (kw != "strategy")
          fail("expected 'strategy'");
        std::string rest;
        std::getline(ls, rest);
        auto colon = rest.find(':');
        auto arrow = rest.find("->");
        if (colon == std::string::npos || arrow == std::string::npos || arrow < colon)
          fail("expected 'strategy <user>: <marking> -> <transition|pass>'");
        auto trim = [](std::string s) {
          auto b = s.find_first_not_of(" \t");
          auto e = s.find_last_not_of(" \t\r");
          return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        auto user = trim(rest.substr(0, colon));
        auto mk = trim(rest.substr(colon + 1, arrow - colon - 1));
        auto tr = trim(rest.substr(arrow + 2));
        auto loc = net.find_location(user);
        if (!loc || *loc == env_location)
          fail("unknown user '" + user + "'");
        marking m;
        try
          {
            m = net.parse_marking(mk);
          }
        catch (const input_error& e)
          {
            fail(e.what());
          }
        auto& slot = out[*loc - 1].choice[m];
        if (tr == "pass")
          continue;
        auto t = net.find_transition(tr);
        if (!t || net.transitions()[*t].location != *loc)
          fail("'" + tr + "' is not a transition of " + user);
        slot.insert(*t);
      }
    return out;
  }

  std::string describe_verdict(const net_system& net, const game_structure& g, const verdict& v)
  {
    std::ostringstream os;
    os << (v.satisfied ? "SATISFIED" : "UNSATISFIED") << "\n";
    os << "profiles checked: " << v.profiles_checked << "\n";
    if (v.witness)
      os << "witness:\n" << print_profile(net, g, *v.witness);
    if (!v.certificate.empty())
      os << "reason: " << v.certificate << "\n";
    if (v.counterexample)
      os << "counterexample:\n" << print_lasso(net, g, *v.counterexample);
    return os.str();
  }
} // namespace atlnet
