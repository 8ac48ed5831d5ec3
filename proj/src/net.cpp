#include <atlnet/net.hpp>

#include <atlnet/error.hpp>

#include <algorithm>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>

namespace atlnet
{
  namespace
  {
    std::vector<std::string> tokenize(const std::string& line)
    {
      std::vector<std::string> out;
      std::istringstream ss(line);
      std::string tok;
      while (ss >> tok)
        out.push_back(tok);
      return out;
    }

    std::string located(const std::string& tok, std::size_t lineno)
    {
      return "line " + std::to_string(lineno) + ": " + tok;
    }

    std::string strip_at(const std::string& tok, std::size_t lineno)
    {
      if (tok.size() < 2 || tok[0] != '@')
        throw input_error(located("expected @<location>, got '" + tok + "'", lineno));
      return tok.substr(1);
    }

    std::string join_places(const net_system& net, const std::vector<place_id>& ps)
    {
      std::string s;
      for (auto p : ps)
        {
          if (!s.empty())
            s += ' ';
          s += net.places()[p].name;
        }
      return s;
    }
  } // namespace

  marking::marking(std::vector<place_id> ps)
    : places(std::move(ps))
  {
    std::sort(places.begin(), places.end());
    places.erase(std::unique(places.begin(), places.end()), places.end());
  }

  bool marking::contains(place_id p) const
  {
    return std::binary_search(places.begin(), places.end(), p);
  }

  net_system::net_system(const net_description& d)
    : name_(d.name), locations_(d.locations)
  {
    if (locations_.empty() || locations_.front() != "env")
      throw input_error("the first location must be 'env'");
    {
      std::set<std::string> seen;
      for (auto& l : locations_)
        if (!seen.insert(l).second)
          throw input_error("duplicate location '" + l + "'");
    }

    auto loc_of = [&](const std::string& l) {
      auto it = std::find(locations_.begin(), locations_.end(), l);
      if (it == locations_.end())
        throw input_error("unknown location '" + l + "'");
      return static_cast<location_id>(it - locations_.begin());
    };

    std::vector<net_description::place_decl> pds = d.places;
    std::sort(pds.begin(), pds.end(),
              [](auto& a, auto& b) { return a.name < b.name; });
    for (std::size_t i = 0; i + 1 < pds.size(); ++i)
      if (pds[i].name == pds[i + 1].name)
        throw input_error("duplicate place '" + pds[i].name + "'");

    std::vector<place_id> init;
    for (auto& pd : pds)
      {
        if (pd.initial)
          init.push_back(places_.size());
        places_.push_back({pd.name, loc_of(pd.location)});
      }
    initial_ = marking(init);

    std::vector<net_description::trans_decl> tds = d.transitions;
    std::sort(tds.begin(), tds.end(),
              [](auto& a, auto& b) { return a.name < b.name; });
    for (std::size_t i = 0; i + 1 < tds.size(); ++i)
      if (tds[i].name == tds[i + 1].name)
        throw input_error("duplicate transition '" + tds[i].name + "'");

    for (auto& td : tds)
      {
        transition t;
        t.name = td.name;
        t.location = loc_of(td.location);
        auto resolve = [&](const std::vector<std::string>& names) {
          std::vector<place_id> ids;
          for (auto& n : names)
            {
              auto p = find_place(n);
              if (!p)
                throw input_error("transition '" + td.name + "' refers to unknown place '"
                                  + n + "'");
              ids.push_back(*p);
            }
          return marking(ids).places;
        };
        t.pre = resolve(td.pre);
        t.post = resolve(td.post);
        transitions_.push_back(std::move(t));
      }
  }

  std::optional<place_id> net_system::find_place(const std::string& n) const
  {
    auto it = std::lower_bound(places_.begin(), places_.end(), n,
                               [](const place& p, const std::string& s) { return p.name < s; });
    if (it == places_.end() || it->name != n)
      return std::nullopt;
    return static_cast<place_id>(it - places_.begin());
  }

  std::optional<trans_id> net_system::find_transition(const std::string& n) const
  {
    auto it = std::lower_bound(transitions_.begin(), transitions_.end(), n,
                               [](const transition& t, const std::string& s) { return t.name < s; });
    if (it == transitions_.end() || it->name != n)
      return std::nullopt;
    return static_cast<trans_id>(it - transitions_.begin());
  }

  std::optional<location_id> net_system::find_location(const std::string& n) const
  {
    auto it = std::find(locations_.begin(), locations_.end(), n);
    if (it == locations_.end())
      return std::nullopt;
    return static_cast<location_id>(it - locations_.begin());
  }

  place_id net_system::place_index(const std::string& n) const
  {
    if (auto p = find_place(n))
      return *p;
    throw input_error("unknown place '" + n + "'");
  }

  trans_id net_system::transition_index(const std::string& n) const
  {
    if (auto t = find_transition(n))
      return *t;
    throw input_error("unknown transition '" + n + "'");
  }

  marking net_system::make_marking(const std::vector<std::string>& names) const
  {
    std::vector<place_id> ids;
    for (auto& n : names)
      ids.push_back(place_index(n));
    return marking(ids);
  }

  std::string net_system::format(const marking& m) const
  {
    std::string s = "{";
    for (std::size_t i = 0; i < m.places.size(); ++i)
      {
        if (i)
          s += ',';
        s += m.places[i] < places_.size() ? places_[m.places[i]].name : "?";
      }
    return s + "}";
  }

  marking net_system::parse_marking(const std::string& text) const
  {
    std::string body = text;
    auto first = body.find_first_not_of(" \t");
    auto last = body.find_last_not_of(" \t");
    if (first == std::string::npos)
      throw input_error("empty marking text");
    body = body.substr(first, last - first + 1);
    if (body.size() < 2 || body.front() != '{' || body.back() != '}')
      throw input_error("marking must be written as {p,q,...}: '" + text + "'");
    body = body.substr(1, body.size() - 2);
    std::vector<std::string> names;
    std::string cur;
    for (char c : body + ",")
      {
        if (c == ',')
          {
            if (!cur.empty())
              names.push_back(cur);
            cur.clear();
          }
        else if (c != ' ' && c != '\t')
          cur += c;
      }
    return make_marking(names);
  }

  net_description net_system::describe() const
  {
    net_description d;
    d.name = name_;
    d.locations = locations_;
    for (place_id p = 0; p < places_.size(); ++p)
      d.places.push_back({places_[p].name, locations_[places_[p].location],
                          initial_.contains(p)});
    for (auto& t : transitions_)
      {
        net_description::trans_decl td{t.name, locations_[t.location], {}, {}};
        for (auto p : t.pre)
          td.pre.push_back(places_[p].name);
        for (auto p : t.post)
          td.post.push_back(places_[p].name);
        d.transitions.push_back(std::move(td));
      }
    return d;
  }

  net_system parse_net(std::istream& in)
  {
    net_description d;
    d.locations.clear();
    bool have_locations = false;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line))
      {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos)
          line.erase(h);
        auto toks = tokenize(line);
        if (toks.empty())
          continue;
        const auto& kw = toks[0];
        if (kw == "net")
          {
            if (toks.size() != 2)
              throw input_error(located("expected 'net <name>'", lineno));
            d.name = toks[1];
          }
        else if (kw == "locations")
          {
            if (have_locations)
              throw input_error(located("duplicate 'locations' line", lineno));
            have_locations = true;
            d.locations.assign(toks.begin() + 1, toks.end());
          }
        else if (kw == "place")
          {
            if (toks.size() < 3 || toks.size() > 4)
              throw input_error(located("expected 'place <id> @<location> [init]'", lineno));
            net_description::place_decl pd{toks[1], strip_at(toks[2], lineno), false};
            if (toks.size() == 4)
              {
                if (toks[3] != "init")
                  throw input_error(located("unexpected '" + toks[3] + "'", lineno));
                pd.initial = true;
              }
            d.places.push_back(pd);
          }
        else if (kw == "trans")
          {
            if (toks.size() < 4)
              throw input_error(
                located("expected 'trans <id> @<location> pre <id>+ post <id>+'", lineno));
            net_description::trans_decl td{toks[1], strip_at(toks[2], lineno), {}, {}};
            if (toks[3] != "pre")
              throw input_error(located("expected 'pre'", lineno));
            std::size_t i = 4;
            for (; i < toks.size() && toks[i] != "post"; ++i)
              td.pre.push_back(toks[i]);
            if (i == toks.size())
              throw input_error(located("expected 'post'", lineno));
            for (++i; i < toks.size(); ++i)
              td.post.push_back(toks[i]);
            d.transitions.push_back(td);
          }
        else
          throw input_error(located("unknown declaration '" + kw + "'", lineno));
      }
    if (!have_locations)
      throw input_error("missing 'locations' line");
    try
      {
        return net_system(d);
      }
    catch (const input_error& e)
      {
        throw input_error(std::string("invalid net: ") + e.what());
      }
  }

  net_system parse_net_string(const std::string& text)
  {
    std::istringstream in(text);
    return parse_net(in);
  }

  net_system load_net(const std::string& path)
  {
    std::ifstream in(path);
    if (!in)
      throw input_error("cannot read net file '" + path + "'");
    return parse_net(in);
  }

  std::string print_net(const net_system& net)
  {
    std::ostringstream os;
    os << "net " << net.name() << '\n';
    os << "locations";
    for (auto& l : net.locations())
      os << ' ' << l;
    os << '\n';
    for (place_id p = 0; p < net.places().size(); ++p)
      {
        auto& pl = net.places()[p];
        os << "place " << pl.name << " @" << net.locations()[pl.location];
        if (net.initial().contains(p))
          os << " init";
        os << '\n';
      }
    for (auto& t : net.transitions())
      {
        os << "trans " << t.name << " @" << net.locations()[t.location] << " pre";
        if (!t.pre.empty())
          os << ' ' << join_places(net, t.pre);
        os << " post";
        if (!t.post.empty())
          os << ' ' << join_places(net, t.post);
        os << '\n';
      }
    return os.str();
  }

  std::vector<diagnostic> validate_net(const net_system& net)
  {
    std::vector<diagnostic> out;
    for (auto& t : net.transitions())
      {
        if (t.pre.empty())
          out.push_back({"non-empty-pre", "empty pre-set of " + t.name});
        if (t.post.empty())
          out.push_back({"non-empty-post", "empty post-set of " + t.name});
        for (auto p : t.pre)
          if (net.places()[p].location != t.location)
            out.push_back({"distribution", "distribution violated at (" + net.places()[p].name
                                               + "," + t.name + ")"});
      }
    for (auto& t : net.transitions())
      if (net.find_place(t.name))
        out.push_back({"disjoint-ids", "identifier " + t.name
                                         + " used for both a place and a transition"});
    for (auto p : net.initial().places)
      if (p >= net.places().size())
        out.push_back({"initial-marking", "initial marking refers to an unknown place"});
    return out;
  }

  namespace
  {
    void check_marking(const net_system& net, const marking& m)
    {
      for (auto p : m.places)
        if (p >= net.places().size())
          throw input_error("marking refers to unknown place index " + std::to_string(p));
    }

    bool subset(const std::vector<place_id>& a, const marking& m)
    {
      return std::all_of(a.begin(), a.end(), [&](place_id p) { return m.contains(p); });
    }

    bool disjoint(const std::vector<place_id>& a, const marking& m)
    {
      return std::none_of(a.begin(), a.end(), [&](place_id p) { return m.contains(p); });
    }
  } // namespace

  bool is_enabled(const net_system& net, const marking& m, trans_id t)
  {
    auto& tr = net.transitions().at(t);
    return subset(tr.pre, m) && disjoint(tr.post, m);
  }

  std::vector<trans_id> enabled_set(const net_system& net, const marking& m)
  {
    check_marking(net, m);
    std::vector<trans_id> out;
    for (trans_id t = 0; t < net.transitions().size(); ++t)
      if (is_enabled(net, m, t))
        out.push_back(t);
    return out;
  }

  marking fire(const net_system& net, const marking& m, trans_id t)
  {
    check_marking(net, m);
    if (t >= net.transitions().size())
      throw input_error("unknown transition index " + std::to_string(t));
    if (!is_enabled(net, m, t))
      throw precondition_error("transition " + net.transitions()[t].name
                               + " is not enabled at " + net.format(m));
    auto& tr = net.transitions()[t];
    std::vector<place_id> next;
    for (auto p : m.places)
      if (!std::binary_search(tr.pre.begin(), tr.pre.end(), p))
        next.push_back(p);
    next.insert(next.end(), tr.post.begin(), tr.post.end());
    return marking(next);
  }

  std::optional<std::size_t> reachability_graph::index_of(const marking& m) const
  {
    auto it = std::lower_bound(states.begin(), states.end(), m);
    if (it == states.end() || *it != m)
      return std::nullopt;
    return static_cast<std::size_t>(it - states.begin());
  }

  std::vector<reach_edge> reachability_graph::out_edges(std::size_t s) const
  {
    auto lo = std::lower_bound(edges.begin(), edges.end(), reach_edge{s, 0, 0});
    std::vector<reach_edge> out;
    for (; lo != edges.end() && lo->source == s; ++lo)
      out.push_back(*lo);
    return out;
  }

  reachability_graph compute_reachability(const net_system& net, std::size_t bound)
  {
    std::set<marking> seen{net.initial()};
    std::deque<marking> todo{net.initial()};
    std::vector<std::tuple<marking, trans_id, marking>> raw;
    while (!todo.empty())
      {
        marking m = std::move(todo.front());
        todo.pop_front();
        for (auto t : enabled_set(net, m))
          {
            marking n = fire(net, m, t);
            if (seen.insert(n).second)
              {
                if (seen.size() > bound)
                  throw resource_error("reachable state count exceeds the bound of "
                                       + std::to_string(bound));
                todo.push_back(n);
              }
            raw.emplace_back(m, t, std::move(n));
          }
      }
    reachability_graph rg;
    rg.states.assign(seen.begin(), seen.end());
    rg.initial = *rg.index_of(net.initial());
    for (auto& [m, t, n] : raw)
      rg.edges.push_back({*rg.index_of(m), t, *rg.index_of(n)});
    std::sort(rg.edges.begin(), rg.edges.end());
    return rg;
  }

  contact_result check_contact_free(const net_system& net, std::size_t bound)
  {
    // Exploration only follows enabled transitions, so a contact situation
    // shows up as a transition whose pre-set is marked but which is disabled.
    auto rg = compute_reachability(net, bound);
    for (auto& m : rg.states)
      for (trans_id t = 0; t < net.transitions().size(); ++t)
        {
          auto& tr = net.transitions()[t];
          if (subset(tr.pre, m) && !disjoint(tr.post, m))
            return {false, contact_witness{m, t}};
        }
    return {true, std::nullopt};
  }

  structural_result structural_relation(const net_system& net, trans_id t1, trans_id t2,
                                        const std::optional<marking>& m)
  {
    if (t1 == t2)
      throw input_error("structural_relation needs two distinct transitions");
    auto& a = net.transitions().at(t1);
    auto& b = net.transitions().at(t2);

    auto intersects = [](const std::vector<place_id>& x, const std::vector<place_id>& y) {
      for (auto p : x)
        if (std::binary_search(y.begin(), y.end(), p))
          return true;
      return false;
    };
    auto neighbourhood = [](const transition& t) {
      std::vector<place_id> n = t.pre;
      n.insert(n.end(), t.post.begin(), t.post.end());
      return marking(n).places;
    };

    structural_result r;
    if (intersects(a.pre, b.pre))
      r.kind = structural_kind::conflict;
    else if (!intersects(neighbourhood(a), neighbourhood(b)))
      r.kind = structural_kind::independent;
    else
      r.kind = structural_kind::neither;

    if (m)
      {
        check_marking(net, *m);
        r.concurrent_at = r.kind == structural_kind::independent && is_enabled(net, *m, t1)
                          && is_enabled(net, *m, t2);
      }
    return r;
  }

  const char* to_string(structural_kind k)
  {
    switch (k)
      {
      case structural_kind::independent:
        return "independent";
      case structural_kind::conflict:
        return "conflict";
      case structural_kind::neither:
        return "neither";
      }
    return "?";
  }

  std::string reachability_dot(const net_system& net, const reachability_graph& rg)
  {
    std::ostringstream os;
    os << "digraph \"" << net.name() << "_reach\" {\n";
    for (std::size_t s = 0; s < rg.states.size(); ++s)
      {
        os << "  s" << s << " [label=\"" << net.format(rg.states[s]) << "\"";
        if (s == rg.initial)
          os << ", peripheries=2";
        os << "];\n";
      }
    for (auto& e : rg.edges)
      os << "  s" << e.source << " -> s" << e.target << " [label=\""
         << net.transitions()[e.trans].name << "\"];\n";
    os << "}\n";
    return os.str();
  }

  void require_well_formed(const net_system& net, std::size_t bound)
  {
    auto diags = validate_net(net);
    if (!diags.empty())
      {
        std::string msg = "net is not valid:";
        for (auto& d : diags)
          msg += "\n  " + d.message;
        throw input_error(msg);
      }
    auto cf = check_contact_free(net, bound);
    if (!cf.contact_free)
      throw input_error("net is not contact-free: " + net.transitions()[cf.witness->trans].name
                        + " has a marked post-set at " + net.format(cf.witness->at));
  }
} // namespace atlnet
