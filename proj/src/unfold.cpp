#include <atlnet/unfold.hpp>

#include <atlnet/error.hpp>

#include <algorithm>
#include <bit>
#include <map>
#include <sstream>

namespace atlnet
{
  std::size_t bitset::count() const
  {
    std::size_t n = 0;
    for (auto w : words_)
      n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  std::vector<std::size_t> bitset::members() const
  {
    std::vector<std::size_t> out;
    for (std::size_t w = 0; w < words_.size(); ++w)
      for (unsigned b = 0; b < 64; ++b)
        if ((words_[w] >> b) & 1u)
          out.push_back(w * 64 + b);
    return out;
  }

  const char* to_string(relation r)
  {
    switch (r)
      {
      case relation::equal:
        return "equal";
      case relation::causal_le:
        return "causal_le";
      case relation::causal_ge:
        return "causal_ge";
      case relation::conflict:
        return "conflict";
      case relation::concurrent:
        return "concurrent";
      }
    return "?";
  }

  const char* to_string(cut_relation r)
  {
    switch (r)
      {
      case cut_relation::lt:
        return "lt";
      case cut_relation::gt:
        return "gt";
      case cut_relation::eq:
        return "eq";
      case cut_relation::incomparable:
        return "incomparable";
      }
    return "?";
  }

  branching_process::branching_process(const net_system& net)
    : net_(std::make_shared<const net_system>(net)), place_occ_(net.places().size(), 0), trans_occ_(net.transitions().size(), 0)
  {
    for (auto p : net.initial().places)
      {
        condition c;
        c.label = p;
        c.id = net.places()[p].name + "#" + std::to_string(++place_occ_[p]);
        initial_.conditions.push_back(conds_.size());
        conds_.push_back(std::move(c));
        cond_past_.emplace_back();
        cond_conf_.emplace_back();
      }
  }

  event_id branching_process::add_event(trans_id t, std::vector<cond_id> pre)
  {
    std::sort(pre.begin(), pre.end());
    event_id e = events_.size();

    bitset past, conf, direct;
    past.set(e);
    unsigned depth = 0;
    for (auto b : pre)
      {
        past.merge(cond_past_[b]);
        conf.merge(cond_conf_[b]);
        depth = std::max(depth, conds_[b].depth);
        for (auto other : conds_[b].post)
          direct.set(other);
      }
    conf.merge(direct);

    // Everything that already has a directly conflicting event in its past
    // is now in conflict with e as well.
    // Those are exactly the futures of the direct conflicts.
    std::vector<event_id> todo;
    std::vector<bool> seen(events_.size(), false);
    for (auto b : pre)
      for (auto other : conds_[b].post)
        if (!seen[other])
          {
            seen[other] = true;
            todo.push_back(other);
          }
    while (!todo.empty())
      {
        auto i = todo.back();
        todo.pop_back();
        event_conf_[i].set(e);
        for (auto c : events_[i].post)
          {
            cond_conf_[c].set(e);
            for (auto next : conds_[c].post)
              if (!seen[next])
                {
                  seen[next] = true;
                  todo.push_back(next);
                }
          }
      }

    event ev;
    ev.label = t;
    ev.id = net_->transitions()[t].name + "#" + std::to_string(++trans_occ_[t]);
    ev.pre = pre;
    ev.depth = depth + 1;
    for (auto b : pre)
      conds_[b].post.push_back(e);

    for (auto p : net_->transitions()[t].post)
      {
        condition c;
        c.label = p;
        c.id = net_->places()[p].name + "#" + std::to_string(++place_occ_[p]);
        c.pre = e;
        c.depth = ev.depth;
        ev.post.push_back(conds_.size());
        conds_.push_back(std::move(c));
        cond_past_.push_back(past);
        cond_conf_.push_back(conf);
      }
    events_.push_back(std::move(ev));
    event_past_.push_back(std::move(past));
    event_conf_.push_back(std::move(conf));
    return e;
  }

  std::optional<cond_id> branching_process::find_condition(const std::string& id) const
  {
    for (cond_id b = 0; b < conds_.size(); ++b)
      if (conds_[b].id == id)
        return b;
    return std::nullopt;
  }

  std::optional<event_id> branching_process::find_event(const std::string& id) const
  {
    for (event_id e = 0; e < events_.size(); ++e)
      if (events_[e].id == id)
        return e;
    return std::nullopt;
  }

  element branching_process::parse_element(const std::string& id) const
  {
    if (auto b = find_condition(id))
      return {false, *b};
    if (auto e = find_event(id))
      return {true, *e};
    throw input_error("unknown element '" + id + "' of the branching process");
  }

  const bitset& branching_process::past_of(element x) const
  {
    return x.is_event ? event_past_.at(x.index) : cond_past_.at(x.index);
  }

  const bitset& branching_process::conflict_of(element x) const
  {
    return x.is_event ? event_conf_.at(x.index) : cond_conf_.at(x.index);
  }

  bool branching_process::causal_leq(element x, element y) const
  {
    if (x == y)
      return true;
    const auto& py = past_of(y);
    if (x.is_event)
      return py.test(x.index);
    for (auto e : conds_.at(x.index).post)
      if (py.test(e))
        return true;
    return false;
  }

  bool branching_process::in_conflict(element x, element y) const
  {
    return conflict_of(x).intersects(past_of(y));
  }

  relation branching_process::relate(element x, element y) const
  {
    if (x == y)
      return relation::equal;
    if (causal_leq(x, y))
      return relation::causal_le;
    if (causal_leq(y, x))
      return relation::causal_ge;
    if (in_conflict(x, y))
      return relation::conflict;
    return relation::concurrent;
  }

  bool branching_process::concurrent(cond_id a, cond_id b) const
  {
    return a != b && relate({false, a}, {false, b}) == relation::concurrent;
  }

  bool branching_process::is_co_set(const std::vector<cond_id>& cs) const
  {
    for (std::size_t i = 0; i < cs.size(); ++i)
      for (std::size_t j = i + 1; j < cs.size(); ++j)
        if (!concurrent(cs[i], cs[j]))
          return false;
    return true;
  }

  bool branching_process::is_cut(const cut& c) const
  {
    for (auto b : c.conditions)
      if (b >= conds_.size())
        return false;
    if (!std::is_sorted(c.conditions.begin(), c.conditions.end())
        || std::adjacent_find(c.conditions.begin(), c.conditions.end()) != c.conditions.end())
      return false;
    if (!is_co_set(c.conditions))
      return false;
    for (cond_id b = 0; b < conds_.size(); ++b)
      {
        if (std::binary_search(c.conditions.begin(), c.conditions.end(), b))
          continue;
        bool co_all = std::all_of(c.conditions.begin(), c.conditions.end(),
                                  [&](cond_id x) { return concurrent(b, x); });
        if (co_all)
          return false;
      }
    return true;
  }

  bool branching_process::enabled_at(const cut& c, event_id e) const
  {
    auto& pre = events_.at(e).pre;
    return std::includes(c.conditions.begin(), c.conditions.end(), pre.begin(), pre.end());
  }

  marking branching_process::marking_of(const cut& c) const
  {
    std::vector<place_id> ps;
    for (auto b : c.conditions)
      ps.push_back(conds_.at(b).label);
    return marking(ps);
  }

  std::vector<event_id> branching_process::configuration(const cut& c) const
  {
    bitset all;
    for (auto b : c.conditions)
      all.merge(cond_past_.at(b));
    return all.members();
  }

  branching_process unfold_prefix(const net_system& net, unsigned depth, std::size_t bound)
  {
    branching_process bp(net);
    for (unsigned d = 1; d <= depth; ++d)
      {
        // Conditions of depth <= d-1, grouped by label; snapshot before the
        // layer so new conditions do not feed events of the same layer.
        std::vector<std::vector<cond_id>> by_place(net.places().size());
        for (cond_id b = 0; b < bp.conditions().size(); ++b)
          by_place[bp.conditions()[b].label].push_back(b);

        std::vector<std::pair<trans_id, std::vector<cond_id>>> layer;
        for (trans_id t = 0; t < net.transitions().size(); ++t)
          {
            auto& pre = net.transitions()[t].pre;
            std::vector<cond_id> pick;
            auto rec = [&](auto& self, std::size_t i, bool fresh) -> void {
              if (i == pre.size())
                {
                  if (fresh)
                    layer.emplace_back(t, pick);
                  return;
                }
              for (auto b : by_place[pre[i]])
                {
                  bool ok = std::all_of(pick.begin(), pick.end(),
                                        [&](cond_id x) { return bp.concurrent(x, b); });
                  if (!ok)
                    continue;
                  pick.push_back(b);
                  self(self, i + 1, fresh || bp.conditions()[b].depth + 1 == d);
                  pick.pop_back();
                }
            };
            rec(rec, 0, false);
          }
        if (layer.empty())
          break;
        for (auto& [t, pre] : layer)
          {
            bp.add_event(t, pre);
            if (bp.events().size() + bp.conditions().size() > bound)
              throw resource_error("unfolding prefix exceeds the bound of "
                                   + std::to_string(bound) + " elements");
          }
      }
    return bp;
  }

  relation relation_query(const branching_process& bp, const std::string& x,
                          const std::string& y)
  {
    return bp.relate(bp.parse_element(x), bp.parse_element(y));
  }

  cut cut_step(const branching_process& bp, const cut& c, event_id e)
  {
    if (e >= bp.events().size())
      throw input_error("unknown event index " + std::to_string(e));
    if (!bp.enabled_at(c, e))
      throw precondition_error("event " + bp.events()[e].id + " is not enabled at the cut");
    auto& ev = bp.events()[e];
    std::vector<cond_id> next;
    std::set_difference(c.conditions.begin(), c.conditions.end(), ev.pre.begin(), ev.pre.end(),
                        std::back_inserter(next));
    next.insert(next.end(), ev.post.begin(), ev.post.end());
    std::sort(next.begin(), next.end());
    return cut{next};
  }

  cut_relation cut_order(const branching_process& bp, const cut& a, const cut& b)
  {
    if (!bp.is_cut(a) || !bp.is_cut(b))
      throw input_error("cut_order: argument is not a cut of the branching process");
    if (a == b)
      return cut_relation::eq;
    auto le = [&](cond_id x, cond_id y) { return bp.causal_leq({false, x}, {false, y}); };
    auto less = [&](const cut& g1, const cut& g2) {
      for (auto y : g2.conditions)
        if (std::none_of(g1.conditions.begin(), g1.conditions.end(),
                         [&](cond_id x) { return le(x, y); }))
          return false;
      for (auto x : g1.conditions)
        if (std::none_of(g2.conditions.begin(), g2.conditions.end(),
                         [&](cond_id y) { return le(x, y); }))
          return false;
      for (auto x : g1.conditions)
        for (auto y : g2.conditions)
          if (x != y && le(x, y))
            return true;
      return false;
    };
    if (less(a, b))
      return cut_relation::lt;
    if (less(b, a))
      return cut_relation::gt;
    return cut_relation::incomparable;
  }

  bool is_run(const branching_process& bp)
  {
    // Conflict needs two distinct events sharing a precondition; without
    // such a pair no two elements can be in conflict.
    for (auto& c : bp.conditions())
      if (c.post.size() > 1)
        return false;
    return true;
  }

  std::vector<event_id> enabled_events(const branching_process& bp, const cut& c)
  {
    std::vector<event_id> out;
    for (auto b : c.conditions)
      for (auto e : bp.conditions().at(b).post)
        if (bp.enabled_at(c, e))
          out.push_back(e);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  std::optional<event_id> event_for(const branching_process& bp, const cut& c, trans_id t)
  {
    for (auto e : enabled_events(bp, c))
      if (bp.events()[e].label == t)
        return e;
    return std::nullopt;
  }

  run_trace build_run(const net_system& net, const std::vector<trans_id>& seq)
  {
    run_trace rt{branching_process(net), {}};
    cut current = rt.run.initial_cut();
    marking m = net.initial();
    rt.cuts.push_back(current);
    for (auto t : seq)
      {
        m = fire(net, m, t); // throws when t is disabled
        std::vector<cond_id> pre;
        for (auto b : current.conditions)
          if (std::binary_search(net.transitions()[t].pre.begin(),
                                 net.transitions()[t].pre.end(), rt.run.conditions()[b].label))
            pre.push_back(b);
        auto e = rt.run.add_event(t, pre);
        current = cut_step(rt.run, current, e);
        rt.cuts.push_back(current);
      }
    return rt;
  }

  branching_process restrict_to(const branching_process& bp, const std::vector<event_id>& es)
  {
    std::vector<event_id> keep = es;
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());

    branching_process out(bp.net());
    std::map<cond_id, cond_id> cmap;
    for (std::size_t i = 0; i < bp.initial_cut().conditions.size(); ++i)
      cmap[bp.initial_cut().conditions[i]] = out.initial_cut().conditions[i];
    // Event indices respect causality, so pre-events are mapped first.
    for (auto e : keep)
      {
        auto& ev = bp.events().at(e);
        std::vector<cond_id> pre;
        for (auto b : ev.pre)
          {
            auto it = cmap.find(b);
            if (it == cmap.end())
              throw input_error("restrict_to: event set is not causally closed at "
                                + ev.id);
            pre.push_back(it->second);
          }
        auto ne = out.add_event(ev.label, pre);
        for (std::size_t i = 0; i < ev.post.size(); ++i)
          cmap[ev.post[i]] = out.events()[ne].post[i];
      }
    return out;
  }

  std::string prefix_dot(const branching_process& bp, const std::vector<cut>& cuts)
  {
    std::ostringstream os;
    os << "digraph \"" << bp.net().name() << "_unfolding\" {\n";
    for (auto& c : bp.conditions())
      os << "  \"" << c.id << "\" [shape=circle, label=\"" << c.id << "\"];\n";
    for (auto& e : bp.events())
      os << "  \"" << e.id << "\" [shape=box, label=\"" << e.id << "\"];\n";
    for (auto& e : bp.events())
      {
        for (auto b : e.pre)
          os << "  \"" << bp.conditions()[b].id << "\" -> \"" << e.id << "\";\n";
        for (auto b : e.post)
          os << "  \"" << e.id << "\" -> \"" << bp.conditions()[b].id << "\";\n";
      }
    for (std::size_t i = 0; i < cuts.size(); ++i)
      {
        os << "  \"cut" << i << "\" [shape=plaintext, label=\"cut " << i << "\"];\n";
        for (auto b : cuts[i].conditions)
          os << "  \"cut" << i << "\" -> \"" << bp.conditions()[b].id
             << "\" [style=dashed, arrowhead=none];\n";
      }
    os << "}\n";
    return os.str();
  }
} // namespace atlnet
