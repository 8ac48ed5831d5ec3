#include <atlnet/game.hpp>

#include <atlnet/error.hpp>

#include <algorithm>
#include <map>
#include <sstream>

namespace atlnet
{
  game_structure::game_structure(const net_system& net, const reachability_graph& rg,
                                 bool single_user_simplification)
    : k_(net.user_count())
    , simplified_(single_user_simplification)
    , states_(rg.states)
    , initial_(rg.initial)
  {
    if (simplified_ && k_ != 1)
      throw input_error("the single-user simplification needs exactly one user, net has "
                        + std::to_string(k_));
    for (auto& t : net.transitions())
      owner_.push_back(t.location == env_location ? k_ : t.location - 1);

    table_.assign(states_.size(), std::vector<std::vector<game_move>>(k_ + 1));
    for (state_id q = 0; q < states_.size(); ++q)
      {
        for (auto& e : rg.out_edges(q))
          table_[q][owner_[e.trans]].push_back({e.trans, e.target});
        for (auto& row : table_[q])
          std::sort(row.begin(), row.end(),
                    [](const game_move& a, const game_move& b) { return *a.trans < *b.trans; });
        bool only_users = table_[q][k_].empty();
        for (player_id a = 0; a < k_; ++a)
          {
            bool drop = simplified_ && only_users && !table_[q][a].empty();
            if (!drop)
              table_[q][a].push_back({std::nullopt, q});
          }
        if (table_[q][k_].empty())
          table_[q][k_].push_back({std::nullopt, q});
      }
  }

  std::optional<state_id> game_structure::index_of(const marking& m) const
  {
    auto it = std::lower_bound(states_.begin(), states_.end(), m);
    if (it == states_.end() || *it != m)
      return std::nullopt;
    return static_cast<state_id>(it - states_.begin());
  }

  std::size_t game_structure::d(player_id a, state_id q) const
  {
    if (a == scheduler())
      return k_ + 1;
    return moves(a, q).size();
  }

  const std::vector<game_move>& game_structure::moves(player_id a, state_id q) const
  {
    if (a > k_ || q >= states_.size())
      throw precondition_error("no move table for player " + std::to_string(a + 1)
                               + " at state " + std::to_string(q));
    return table_[q][a];
  }

  std::optional<move_id> game_structure::move_of(player_id a, state_id q,
                                                 std::optional<trans_id> t) const
  {
    auto& ms = moves(a, q);
    for (move_id j = 0; j < ms.size(); ++j)
      if (ms[j].trans == t)
        return j;
    return std::nullopt;
  }

  state_id game_structure::succ(state_id q, player_id a, move_id j) const
  {
    auto& ms = moves(a, q);
    if (j >= ms.size())
      throw precondition_error("move " + std::to_string(j) + " out of range for player "
                               + std::to_string(a + 1));
    return ms[j].target;
  }

  state_id game_structure::tau(state_id q, const move_vector& v) const
  {
    if (v.size() != player_count())
      throw precondition_error("move vector has " + std::to_string(v.size())
                               + " components, expected " + std::to_string(player_count()));
    for (player_id a = 0; a < player_count(); ++a)
      if (v[a] >= d(a, q))
        throw precondition_error("component " + std::to_string(a + 1)
                                 + " of the move vector is out of range");
    return succ(q, v[scheduler()], v[v[scheduler()]]);
  }

  player_id game_structure::owner(trans_id t) const
  {
    return owner_.at(t);
  }

  bool game_structure::user_only(state_id q) const
  {
    if (table_.at(q)[k_].front().trans)
      return false;
    for (player_id a = 0; a < k_; ++a)
      if (table_[q][a].front().trans)
        return true;
    return false;
  }

  game_structure build_game(const net_system& net, bool single_user_simplification,
                            std::size_t bound)
  {
    require_well_formed(net, bound);
    return game_structure(net, compute_reachability(net, bound), single_user_simplification);
  }

  bool fairness_constraint::contains(state_id q, move_id j) const
  {
    auto& s = c.at(q);
    return std::binary_search(s.begin(), s.end(), j);
  }

  std::vector<fairness_constraint> build_fairness(const net_system& net,
                                                  const game_structure& g)
  {
    std::vector<fairness_constraint> out;
    const auto nq = g.state_count();
    const auto k = g.user_count();

    for (player_id j = 0; j <= k; ++j)
      {
        fairness_constraint c;
        c.kind = fairness_constraint::family::scheduler;
        c.player = g.scheduler();
        c.label = "sched:" + player_name(net, g, j);
        c.c.assign(nq, {j});
        out.push_back(std::move(c));
      }

    auto conflict = [&](trans_id a, trans_id b) {
      auto& pa = net.transitions()[a].pre;
      auto& pb = net.transitions()[b].pre;
      return std::any_of(pa.begin(), pa.end(), [&](place_id p) {
        return std::find(pb.begin(), pb.end(), p) != pb.end();
      });
    };

    // Only uncontrollable t: a user transition cannot be a move of the env.
    for (trans_id t = 0; t < net.transitions().size(); ++t)
      {
        if (g.owner(t) != g.env())
          continue;
        fairness_constraint c;
        c.kind = fairness_constraint::family::environment;
        c.player = g.env();
        c.label = net.transitions()[t].name + "#";
        c.c.resize(nq);
        bool any = false;
        for (state_id q = 0; q < nq; ++q)
          {
            if (!g.move_of(g.env(), q, t))
              continue;
            any = true;
            auto& ms = g.moves(g.env(), q);
            for (move_id j = 0; j < ms.size(); ++j)
              if (ms[j].trans && (*ms[j].trans == t || conflict(t, *ms[j].trans)))
                c.c[q].push_back(j);
          }
        if (any)
          out.push_back(std::move(c));
      }

    if (g.simplified())
      return out;
    for (state_id q = 0; q < nq; ++q)
      {
        if (!g.user_only(q))
          continue;
        for (player_id a = 0; a < k; ++a)
          {
            fairness_constraint c;
            c.kind = fairness_constraint::family::user_state;
            c.player = a;
            c.label = net.format(g.state(q)) + ":" + player_name(net, g, a);
            c.c.resize(nq);
            auto& ms = g.moves(a, q);
            for (move_id j = 0; j < ms.size(); ++j)
              if (ms[j].trans)
                c.c[q].push_back(j);
            if (!c.c[q].empty())
              out.push_back(std::move(c));
          }
      }
    return out;
  }

  bool taken(const game_structure& g, const fairness_constraint& c, const game_step& s)
  {
    auto sched = s.moves.at(g.scheduler());
    if (c.player == g.scheduler())
      return c.contains(s.state, sched);
    return sched == c.player && c.contains(s.state, s.moves.at(c.player));
  }

  std::vector<std::string> check_lasso(const game_structure& g, const lasso_computation& l)
  {
    std::vector<std::string> out;
    if (l.cycle.empty())
      {
        out.push_back("empty cycle");
        return out;
      }
    std::vector<game_step> all(l.prefix);
    all.insert(all.end(), l.cycle.begin(), l.cycle.end());
    if (all.front().state != g.initial())
      out.push_back("computation does not start at the initial state");
    for (std::size_t i = 0; i < all.size(); ++i)
      {
        auto& s = all[i];
        if (s.state >= g.state_count())
          {
            out.push_back("step " + std::to_string(i) + ": unknown state");
            return out;
          }
        state_id next;
        try
          {
            next = g.tau(s.state, s.moves);
          }
        catch (const precondition_error& e)
          {
            out.push_back("step " + std::to_string(i) + ": " + e.what());
            continue;
          }
        state_id expect = i + 1 < all.size() ? all[i + 1].state : l.cycle.front().state;
        if (next != expect)
          out.push_back("step " + std::to_string(i)
                        + (i + 1 < all.size() ? ": successor mismatch" : ": cycle does not close"));
      }
    return out;
  }

  fairness_result lasso_is_fair(const game_structure& g,
                                const std::vector<fairness_constraint>& fc,
                                const lasso_computation& l)
  {
    fairness_result r;
    for (std::size_t i = 0; i < fc.size(); ++i)
      {
        bool ok = std::any_of(l.cycle.begin(), l.cycle.end(), [&](const game_step& s) {
          return !fc[i].enabled(s.state) || taken(g, fc[i], s);
        });
        if (!ok)
          r.violated.push_back(i);
      }
    r.fair = r.violated.empty();
    return r;
  }

  state_lasso canonical_state_lasso(std::vector<state_id> prefix, std::vector<state_id> cycle)
  {
    if (cycle.empty())
      throw input_error("state lasso with an empty cycle");
    auto collapse = [](std::vector<state_id>& v) {
      v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    collapse(cycle);
    while (cycle.size() > 1 && cycle.front() == cycle.back())
      cycle.pop_back();
    collapse(prefix);
    if (!prefix.empty() && prefix.back() == cycle.front())
      prefix.pop_back();
    // primitive root
    for (std::size_t p = 1; p <= cycle.size(); ++p)
      {
        if (cycle.size() % p)
          continue;
        bool periodic = true;
        for (std::size_t i = p; i < cycle.size() && periodic; ++i)
          periodic = cycle[i] == cycle[i - p];
        if (periodic)
          {
            cycle.resize(p);
            break;
          }
      }
    while (!prefix.empty() && prefix.back() == cycle.back())
      {
        prefix.pop_back();
        std::rotate(cycle.rbegin(), cycle.rbegin() + 1, cycle.rend());
      }
    return {std::move(prefix), std::move(cycle)};
  }

  state_lasso stutter_remove(const lasso_computation& l)
  {
    std::vector<state_id> p, c;
    for (auto& s : l.prefix)
      p.push_back(s.state);
    for (auto& s : l.cycle)
      c.push_back(s.state);
    return canonical_state_lasso(std::move(p), std::move(c));
  }

  play computation_to_play(const net_system& net, const game_structure& g,
                           const std::vector<fairness_constraint>& fc,
                           const lasso_computation& l)
  {
    auto problems = check_lasso(g, l);
    if (!problems.empty())
      throw input_error("malformed computation: " + problems.front());
    if (!lasso_is_fair(g, fc, l).fair)
      throw precondition_error("computation is not fair");
    (void)net;
    auto events = [&](const std::vector<game_step>& steps) {
      std::vector<trans_id> out;
      for (auto& s : steps)
        {
          auto a = s.moves[g.scheduler()];
          if (auto t = g.moves(a, s.state)[s.moves[a]].trans)
            out.push_back(*t);
        }
      return out;
    };
    auto pre = events(l.prefix);
    auto cyc = events(l.cycle);
    return make_play(pre, cyc);
  }

  namespace
  {
    // Orders of the events of one gap compatible with their causal
    // dependencies, starting with the given one.
    void linearizations(const net_system& net, const marking& from,
                        const std::vector<trans_id>& gap, std::size_t cap,
                        std::vector<std::vector<trans_id>>& out)
    {
      const auto n = gap.size();
      std::vector<std::vector<std::size_t>> deps(n);
      for (std::size_t j = 0; j < n; ++j)
        {
          auto& tj = net.transitions()[gap[j]];
          for (std::size_t i = 0; i < j; ++i)
            {
              auto& ti = net.transitions()[gap[i]];
              auto meets = [](const std::vector<place_id>& a, const std::vector<place_id>& b) {
                return std::any_of(a.begin(), a.end(), [&](place_id p) {
                  return std::find(b.begin(), b.end(), p) != b.end();
                });
              };
              if (meets(ti.post, tj.pre) || meets(ti.pre, tj.post) || meets(ti.pre, tj.pre)
                  || meets(ti.post, tj.post))
                deps[j].push_back(i);
            }
        }
      std::vector<bool> used(n, false);
      std::vector<trans_id> cur;
      auto rec = [&](auto&& self, const marking& m) -> void {
        if (out.size() >= cap)
          return;
        if (cur.size() == n)
          {
            out.push_back(cur);
            return;
          }
        for (std::size_t j = 0; j < n; ++j)
          {
            if (used[j])
              continue;
            bool ready = std::all_of(deps[j].begin(), deps[j].end(),
                                     [&](std::size_t i) { return used[i]; });
            if (!ready || !is_enabled(net, m, gap[j]))
              continue;
            used[j] = true;
            cur.push_back(gap[j]);
            self(self, fire(net, m, gap[j]));
            cur.pop_back();
            used[j] = false;
          }
      };
      rec(rec, from);
    }

    struct segment
    {
      marking from;
      std::vector<std::vector<trans_id>> orders;
    };

    std::vector<segment> split(const net_system& net, const std::vector<trans_id>& events,
                               const std::vector<std::size_t>& bounds, marking m,
                               std::size_t cap)
    {
      std::vector<segment> out;
      for (std::size_t i = 0; i + 1 < bounds.size(); ++i)
        {
          std::vector<trans_id> gap(events.begin() + bounds[i], events.begin() + bounds[i + 1]);
          if (gap.empty())
            continue;
          segment s{m, {}};
          linearizations(net, m, gap, cap, s.orders);
          for (auto t : gap)
            m = fire(net, m, t);
          out.push_back(std::move(s));
        }
      return out;
    }

    game_step step_for(const game_structure& g, state_id q, player_id a,
                       std::optional<trans_id> t)
    {
      game_step s{q, move_vector(g.player_count(), 0)};
      s.moves[g.scheduler()] = a;
      auto j = g.move_of(a, q, t);
      if (!j)
        throw precondition_error("move not available in the game");
      s.moves[a] = *j;
      return s;
    }
  } // namespace

  std::vector<lasso_computation> play_to_computations(
    const net_system& net, const game_structure& g, const std::vector<fairness_constraint>& fc,
    const play& p, std::size_t bound)
  {
    if (bound == 0)
      throw resource_error("linearization bound is zero");
    auto diags = validate_play(net, p, p.prefix.size() + 2 * p.cycle.size());
    if (!diags.empty())
      throw precondition_error("not a play: " + diags.front().message);

    std::vector<segment> pre, cyc;
    if (p.finite())
      {
        auto bounds = p.prefix_cuts;
        if (bounds.back() != p.prefix.size())
          bounds.push_back(p.prefix.size());
        pre = split(net, p.prefix, bounds, net.initial(), bound);
      }
    else
      {
        auto u = unroll(net, p, 2);
        std::size_t a = p.prefix.size() + p.cycle_cuts.front();
        auto bounds = p.prefix_cuts;
        if (bounds.back() != a)
          bounds.push_back(a);
        pre = split(net, u.events, bounds, net.initial(), bound);
        std::vector<std::size_t> cb;
        for (auto off : p.cycle_cuts)
          cb.push_back(a + off - p.cycle_cuts.front());
        cb.push_back(a + p.cycle.size());
        cyc = split(net, u.events, cb, u.markings[a], bound);
      }

    std::vector<segment*> segs;
    for (auto& s : pre)
      segs.push_back(&s);
    for (auto& s : cyc)
      segs.push_back(&s);

    std::vector<lasso_computation> out;
    std::vector<std::size_t> digit(segs.size(), 0);
    bool any_fair = false;
    for (;;)
      {
        lasso_computation l;
        state_id q = g.initial();
        for (std::size_t i = 0; i < segs.size(); ++i)
          {
            auto& steps = i < pre.size() ? l.prefix : l.cycle;
            for (auto t : segs[i]->orders[digit[i]])
              {
                steps.push_back(step_for(g, q, g.owner(t), t));
                q = g.succ(q, g.owner(t), steps.back().moves[g.owner(t)]);
              }
          }
        if (l.cycle.empty())
          // deadlock: every player stutters in turn
          for (player_id a = 0; a <= g.user_count(); ++a)
            l.cycle.push_back(step_for(g, q, a, std::nullopt));
        else
          for (player_id a = 0; a <= g.user_count(); ++a)
            {
              bool scheduled = std::any_of(l.cycle.begin(), l.cycle.end(), [&](const game_step& s) {
                return s.moves[g.scheduler()] == a;
              });
              if (scheduled)
                continue;
              for (std::size_t i = 0; i < l.cycle.size(); ++i)
                if (g.move_of(a, l.cycle[i].state, std::nullopt))
                  {
                    l.cycle.insert(l.cycle.begin() + i, step_for(g, l.cycle[i].state, a, std::nullopt));
                    break;
                  }
            }
        any_fair = any_fair || lasso_is_fair(g, fc, l).fair;
        out.push_back(std::move(l));
        if (out.size() >= bound)
          break;
        std::size_t i = segs.size();
        while (i > 0 && ++digit[i - 1] == segs[i - 1]->orders.size())
          digit[--i] = 0;
        if (i == 0)
          break;
      }
    if (!any_fair)
      throw resource_error("no fair sequentialization among the first "
                           + std::to_string(out.size()) + " computations");
    return out;
  }

  label_lasso labels_of(const net_system& net, const game_structure& g,
                        const lasso_computation& l)
  {
    label_lasso r;
    for (auto& s : l.prefix)
      r.positions.push_back(state_props(net, g.state(s.state)));
    r.cycle_start = r.positions.size();
    for (auto& s : l.cycle)
      r.positions.push_back(state_props(net, g.state(s.state)));
    return r;
  }

  std::string player_name(const net_system& net, const game_structure& g, player_id a)
  {
    if (a < g.user_count())
      return net.locations()[a + 1];
    return a == g.env() ? "env" : "scheduler";
  }

  std::string move_name(const net_system& net, const game_structure& g, player_id a,
                        state_id q, move_id j)
  {
    if (a == g.scheduler())
      return "turn:" + player_name(net, g, j);
    auto& m = g.moves(a, q).at(j);
    if (m.trans)
      return net.transitions()[*m.trans].name;
    return a == g.env() ? "stutter" : "pass";
  }

  std::string game_dot(const net_system& net, const game_structure& g)
  {
    std::ostringstream os;
    os << "digraph game {\n  rankdir=LR;\n  node [shape=ellipse];\n";
    for (state_id q = 0; q < g.state_count(); ++q)
      {
        os << "  q" << q << " [label=\"" << net.format(g.state(q)) << "\"";
        if (q == g.initial())
          os << ", penwidth=2";
        os << "];\n";
      }
    for (state_id q = 0; q < g.state_count(); ++q)
      for (player_id a = 0; a <= g.user_count(); ++a)
        for (move_id j = 0; j < g.d(a, q); ++j)
          os << "  q" << q << " -> q" << g.succ(q, a, j) << " [label=\"" << player_name(net, g, a)
             << ":" << move_name(net, g, a, q, j) << "\"];\n";
    os << "}\n";
    return os.str();
  }

  std::string game_table(const net_system& net, const game_structure& g,
                         const std::vector<fairness_constraint>& fc)
  {
    std::ostringstream os;
    os << "players " << g.player_count() << ":";
    for (player_id a = 0; a < g.player_count(); ++a)
      os << " " << a + 1 << "=" << player_name(net, g, a);
    os << "\nstates " << g.state_count() << "\n";
    for (state_id q = 0; q < g.state_count(); ++q)
      {
        os << "q" << q << " " << net.format(g.state(q)) << (q == g.initial() ? " initial" : "")
           << "\n";
        for (player_id a = 0; a < g.player_count(); ++a)
          {
            os << "  d_" << a + 1 << " = " << g.d(a, q) << ":";
            for (move_id j = 0; j < g.d(a, q); ++j)
              os << " " << move_name(net, g, a, q, j);
            os << "\n";
          }
      }
    os << "constraints " << fc.size() << "\n";
    for (auto& c : fc)
      {
        os << "<" << c.player + 1 << ", " << c.label << ">";
        for (state_id q = 0; q < g.state_count(); ++q)
          {
            if (c.c[q].empty())
              continue;
            os << " " << net.format(g.state(q)) << "={";
            for (std::size_t i = 0; i < c.c[q].size(); ++i)
              os << (i ? "," : "") << move_name(net, g, c.player, q, c.c[q][i]);
            os << "}";
          }
        os << "\n";
      }
    return os.str();
  }

  std::string print_lasso(const net_system& net, const game_structure& g,
                          const lasso_computation& l)
  {
    auto line = [&](const char* key, const std::vector<game_step>& steps) {
      std::string s = key;
      for (auto& st : steps)
        {
          auto a = st.moves[g.scheduler()];
          auto& m = g.moves(a, st.state)[st.moves[a]];
          s += " ";
          s += m.trans ? net.transitions()[*m.trans].name : "-";
        }
      return s + "\n";
    };
    std::string out = line("prefix:", l.prefix) + line("cycle:", l.cycle);
    out += "# states:";
    for (auto& st : l.prefix)
      out += " " + net.format(g.state(st.state));
    out += " |";
    for (auto& st : l.cycle)
      out += " " + net.format(g.state(st.state));
    return out + "\n";
  }
} // namespace atlnet
