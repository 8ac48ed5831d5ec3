#include <atlnet/play.hpp>

#include <atlnet/error.hpp>

#include <algorithm>
#include <sstream>

namespace atlnet
{
  namespace
  {
    std::vector<std::size_t> every_position(std::size_t from, std::size_t to)
    {
      std::vector<std::size_t> v;
      for (auto i = from; i <= to; ++i)
        v.push_back(i);
      return v;
    }

    const std::set<trans_id> no_choice;
  } // namespace

  play make_play(const std::vector<trans_id>& prefix, const std::vector<trans_id>& cycle)
  {
    play p;
    p.prefix = prefix;
    p.prefix_cuts = every_position(0, prefix.size());
    p.cycle = cycle;
    if (!cycle.empty())
      p.cycle_cuts = every_position(1, cycle.size());
    return p;
  }

  const std::set<trans_id>& net_strategy::at(const marking& m) const
  {
    auto it = choice.find(m);
    return it == choice.end() ? no_choice : it->second;
  }

  play parse_play(const net_system& net, std::istream& in)
  {
    play p;
    bool have_cuts = false, have_cycle_cuts = false;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line))
      {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos)
          line.erase(h);
        auto colon = line.find(':');
        if (line.find_first_not_of(" \t\r") == std::string::npos)
          continue;
        if (colon == std::string::npos)
          throw input_error("line " + std::to_string(lineno) + ": expected '<key>: ...'");
        std::string key = line.substr(0, colon);
        key.erase(0, key.find_first_not_of(" \t"));
        key.erase(key.find_last_not_of(" \t") + 1);
        std::istringstream rest(line.substr(colon + 1));
        std::vector<std::string> toks;
        for (std::string tok; rest >> tok;)
          toks.push_back(tok);

        auto transitions = [&]() {
          std::vector<trans_id> ts;
          for (auto& tok : toks)
            if (tok != "-")
              ts.push_back(net.transition_index(tok));
          return ts;
        };
        auto numbers = [&]() {
          std::vector<std::size_t> ns;
          for (auto& tok : toks)
            {
              std::size_t used = 0;
              unsigned long v = 0;
              try
                {
                  v = std::stoul(tok, &used);
                }
              catch (const std::exception&)
                {
                  used = 0;
                }
              if (used != tok.size())
                throw input_error("line " + std::to_string(lineno) + ": bad cut position '"
                                  + tok + "'");
              ns.push_back(v);
            }
          return ns;
        };

        if (key == "prefix")
          p.prefix = transitions();
        else if (key == "cycle")
          p.cycle = transitions();
        else if (key == "cuts")
          {
            p.prefix_cuts = numbers();
            have_cuts = true;
          }
        else if (key == "cycle-cuts")
          {
            p.cycle_cuts = numbers();
            have_cycle_cuts = true;
          }
        else
          throw input_error("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
      }
    if (!have_cuts)
      p.prefix_cuts = every_position(0, p.prefix.size());
    if (!have_cycle_cuts && !p.cycle.empty())
      p.cycle_cuts = every_position(1, p.cycle.size());
    return p;
  }

  play parse_play_string(const net_system& net, const std::string& text)
  {
    std::istringstream in(text);
    return parse_play(net, in);
  }

  std::string print_play(const net_system& net, const play& p)
  {
    std::ostringstream os;
    auto names = [&](const std::vector<trans_id>& ts) {
      for (auto t : ts)
        os << ' ' << net.transitions()[t].name;
      os << '\n';
    };
    auto nums = [&](const std::vector<std::size_t>& ns) {
      for (auto n : ns)
        os << ' ' << n;
      os << '\n';
    };
    os << "prefix:";
    names(p.prefix);
    if (p.prefix_cuts != every_position(0, p.prefix.size()))
      {
        os << "cuts:";
        nums(p.prefix_cuts);
      }
    if (!p.cycle.empty())
      {
        os << "cycle:";
        names(p.cycle);
        if (p.cycle_cuts != every_position(1, p.cycle.size()))
          {
            os << "cycle-cuts:";
            nums(p.cycle_cuts);
          }
      }
    return os.str();
  }

  unrolled_play unroll(const net_system& net, const play& p, std::size_t iterations)
  {
    unrolled_play u;
    u.events = p.prefix;
    u.cut_positions = p.prefix_cuts;
    if (!p.cycle.empty())
      for (std::size_t i = 0; i < iterations; ++i)
        {
          for (auto o : p.cycle_cuts)
            u.cut_positions.push_back(u.events.size() + o);
          u.events.insert(u.events.end(), p.cycle.begin(), p.cycle.end());
        }
    u.markings.push_back(net.initial());
    for (auto t : u.events)
      u.markings.push_back(fire(net, u.markings.back(), t));
    return u;
  }

  std::set<marking> compatible_markings(const net_system& net, const marking& from,
                                        const std::vector<trans_id>& between)
  {
    const auto k = between.size();
    if (k > 20)
      throw resource_error("more than 20 events between two cuts");

    // deps[j]: events of the segment that produced a token consumed by j.
    std::vector<std::uint32_t> deps(k, 0);
    std::map<place_id, std::size_t> producer;
    for (std::size_t j = 0; j < k; ++j)
      {
        auto& tr = net.transitions()[between[j]];
        for (auto pl : tr.pre)
          if (auto it = producer.find(pl); it != producer.end())
            {
              deps[j] |= std::uint32_t{1} << it->second;
              producer.erase(it);
            }
        for (auto pl : tr.post)
          producer[pl] = j;
      }

    std::set<marking> out;
    std::set<std::uint32_t> seen{0};
    std::vector<std::uint32_t> todo{0};
    while (!todo.empty())
      {
        auto s = todo.back();
        todo.pop_back();
        marking m = from;
        for (std::size_t j = 0; j < k; ++j)
          if (s & (std::uint32_t{1} << j))
            m = fire(net, m, between[j]);
        out.insert(m);
        for (std::size_t j = 0; j < k; ++j)
          {
            std::uint32_t bit = std::uint32_t{1} << j;
            if (!(s & bit) && (deps[j] & s) == deps[j] && seen.insert(s | bit).second)
              todo.push_back(s | bit);
          }
      }
    return out;
  }

  std::vector<diagnostic> validate_play(const net_system& net, const play& p,
                                        std::size_t horizon)
  {
    if (horizon < p.prefix.size() + p.cycle.size())
      throw input_error("horizon " + std::to_string(horizon)
                        + " is smaller than the represented play (prefix + one cycle = "
                        + std::to_string(p.prefix.size() + p.cycle.size()) + " events)");

    std::vector<diagnostic> out;
    auto& ts = net.transitions();

    if (p.prefix_cuts.empty() || p.prefix_cuts.front() != 0)
      out.push_back({"cuts", "cut sequence must start at the initial cut"});
    for (std::size_t i = 0; i < p.prefix_cuts.size(); ++i)
      {
        if (p.prefix_cuts[i] > p.prefix.size())
          out.push_back({"cuts", "cut position " + std::to_string(p.prefix_cuts[i])
                                   + " lies beyond the prefix"});
        if (i && p.prefix_cuts[i] <= p.prefix_cuts[i - 1])
          out.push_back({"cuts", "cut sequence is not increasing"});
      }
    if (p.cycle.empty() && !p.cycle_cuts.empty())
      out.push_back({"cuts", "cycle cuts given without a cycle"});
    for (std::size_t i = 0; i < p.cycle_cuts.size(); ++i)
      {
        if (p.cycle_cuts[i] == 0 || p.cycle_cuts[i] > p.cycle.size())
          out.push_back({"cuts", "cycle cut offset " + std::to_string(p.cycle_cuts[i])
                                   + " outside [1, cycle length]"});
        if (i && p.cycle_cuts[i] <= p.cycle_cuts[i - 1])
          out.push_back({"cuts", "cycle cut offsets are not increasing"});
      }
    if (!out.empty())
      return out;

    // The run must be a firing sequence of the net.
    marking m = net.initial();
    std::vector<trans_id> seq = p.prefix;
    seq.insert(seq.end(), p.cycle.begin(), p.cycle.end());
    marking cycle_start;
    for (std::size_t i = 0; i < seq.size(); ++i)
      {
        if (i == p.prefix.size())
          cycle_start = m;
        if (!is_enabled(net, m, seq[i]))
          {
            out.push_back({"run", "transition " + ts[seq[i]].name + " not enabled at "
                                    + net.format(m) + " (position " + std::to_string(i) + ")"});
            return out;
          }
        m = fire(net, m, seq[i]);
      }
    if (p.cycle.empty())
      cycle_start = m;
    else if (m != cycle_start)
      {
        out.push_back({"lasso", "cycle does not return to its start marking "
                                  + net.format(cycle_start)});
        return out;
      }

    // Cut order along the materialised run, up to the horizon.
    std::size_t iterations = 1;
    if (!p.cycle.empty())
      iterations = std::max<std::size_t>(1, (horizon - p.prefix.size()) / p.cycle.size());
    auto u = unroll(net, p, iterations);
    auto rt = build_run(net, u.events);
    for (std::size_t i = 0; i + 1 < u.cut_positions.size(); ++i)
      {
        auto& a = rt.cuts[u.cut_positions[i]];
        auto& b = rt.cuts[u.cut_positions[i + 1]];
        if (cut_order(rt.run, a, b) != cut_relation::lt)
          out.push_back({"cuts", "cut sequence is not increasing at position "
                                   + std::to_string(u.cut_positions[i + 1])});
      }

    if (p.cycle.empty())
      {
        for (auto t : enabled_set(net, m))
          {
            if (!net.is_user_transition(t))
              out.push_back({"uncontrollable-addable",
                             "uncontrollable event " + ts[t].name + " addable"});
            else
              out.push_back({"controllable-addable",
                             "controllable event " + ts[t].name + " addable to a finite run"});
          }
        std::size_t last = p.prefix_cuts.back();
        for (std::size_t i = last; i < p.prefix.size(); ++i)
          out.push_back({"coverage", "event " + ts[p.prefix[i]].name + " (position "
                                       + std::to_string(i) + ") not covered by any cut"});
      }
    else
      {
        // Conditions never consumed during the cycle stay in every later cut;
        // an uncontrollable transition whose pre-set lies among them can
        // always be added to the run.
        std::set<place_id> persistent(cycle_start.places.begin(), cycle_start.places.end());
        for (auto t : p.cycle)
          for (auto pl : ts[t].pre)
            persistent.erase(pl);
        for (trans_id t = 0; t < ts.size(); ++t)
          {
            if (net.is_user_transition(t))
              continue;
            bool addable = std::all_of(ts[t].pre.begin(), ts[t].pre.end(),
                                       [&](place_id pl) { return persistent.count(pl) > 0; });
            if (addable)
              out.push_back({"uncontrollable-addable",
                             "uncontrollable event " + ts[t].name + " addable"});
          }
        if (p.cycle_cuts.empty())
          out.push_back({"coverage", "cycle events not covered by any cut"});
      }
    return out;
  }

  consistency_result consistent_with(const net_system& net, const play& p,
                                     const std::vector<net_strategy>& profile)
  {
    auto& ts = net.transitions();
    std::map<location_id, const net_strategy*> by_owner;
    for (auto& s : profile)
      {
        if (s.owner == env_location || s.owner >= net.locations().size())
          throw input_error("strategy owner " + std::to_string(s.owner)
                            + " is not a user location of the net");
        by_owner[s.owner] = &s;
        for (auto& [mk, choice] : s.choice)
          for (auto t : choice)
            {
              if (t >= ts.size() || ts[t].location != s.owner)
                throw input_error("strategy of " + net.locations()[s.owner]
                                  + " chooses a transition it does not own");
              if (!is_enabled(net, mk, t))
                throw input_error("strategy of " + net.locations()[s.owner] + " chooses "
                                  + ts[t].name + " which is disabled at " + net.format(mk));
            }
      }

    consistency_result r;
    auto u = unroll(net, p, p.cycle.empty() ? 0 : 2);

    // (1) every controlled event occurs alone between two cuts, chosen by
    // the owner's strategy at the first of them.
    for (std::size_t i = 0; i < u.events.size(); ++i)
      {
        auto t = u.events[i];
        auto it = by_owner.find(ts[t].location);
        if (it == by_owner.end())
          continue;
        auto next = std::lower_bound(u.cut_positions.begin(), u.cut_positions.end(), i + 1);
        if (next == u.cut_positions.end() || next == u.cut_positions.begin())
          continue; // not covered by the represented horizon
        auto before = *(next - 1);
        if (*next - before != 1)
          {
            r.consistent = false;
            r.diagnostics.push_back({"alone", "event " + ts[t].name + " (position "
                                                + std::to_string(i)
                                                + ") is not the only event between its cuts"});
          }
        else if (!it->second->at(u.markings[before]).count(t))
          {
            r.consistent = false;
            r.diagnostics.push_back({"strategy", "event " + ts[t].name + " not chosen by "
                                                   + net.locations()[ts[t].location] + " at "
                                                   + net.format(u.markings[before])});
          }
      }

    // (2) no owner finally postponed.
    for (auto& [owner, strat] : by_owner)
      {
        bool postponed = false;
        if (p.cycle.empty())
          postponed = !strat->at(u.markings.back()).empty();
        else
          {
            bool moves = std::any_of(p.cycle.begin(), p.cycle.end(),
                                     [&, o = owner](trans_id t) { return ts[t].location == o; });
            if (!moves)
              {
                // One period of cuts, starting at the first cycle cut.
                std::size_t anchor = p.prefix.size() + p.cycle_cuts.front();
                std::vector<std::size_t> period;
                for (auto c : u.cut_positions)
                  if (c >= anchor && c <= anchor + p.cycle.size())
                    period.push_back(c);
                postponed = true;
                for (std::size_t j = 0; postponed && j + 1 < period.size(); ++j)
                  {
                    std::vector<trans_id> between(u.events.begin() + period[j],
                                                  u.events.begin() + period[j + 1]);
                    for (auto& mk : compatible_markings(net, u.markings[period[j]], between))
                      if (strat->at(mk).empty())
                        {
                          postponed = false;
                          break;
                        }
                  }
              }
          }
        if (postponed)
          {
            r.consistent = false;
            r.diagnostics.push_back({"postponed", "user " + net.locations()[owner]
                                                    + " finally postponed"});
          }
      }
    return r;
  }

  bool is_maximal_refinement(const branching_process& bp, const std::vector<cut>& delta)
  {
    for (std::size_t i = 0; i + 1 < delta.size(); ++i)
      if (cut_order(bp, delta[i], delta[i + 1]) != cut_relation::lt)
        throw input_error("is_maximal_refinement: cut sequence is not increasing");
    for (std::size_t i = 0; i + 1 < delta.size(); ++i)
      {
        auto a = bp.configuration(delta[i]);
        auto b = bp.configuration(delta[i + 1]);
        if (b.size() != a.size() + 1)
          return false;
      }
    return true;
  }
} // namespace atlnet
