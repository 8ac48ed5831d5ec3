#include <atlnet/atl.hpp>
#include <atlnet/error.hpp>
#include <atlnet/game.hpp>
#include <atlnet/net.hpp>
#include <atlnet/play.hpp>
#include <atlnet/random.hpp>
#include <atlnet/solver.hpp>
#include <atlnet/unfold.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace atlnet;

namespace
{
  enum exit_code
  {
    ok = 0,
    unsatisfied = 1,
    bad_input = 2,
    out_of_bounds = 3,
    disagreement = 4
  };

  struct options
  {
    std::string net_path;
    std::string formula;
    std::string formula_file;
    std::string play_path;
    std::string strategy_path;
    std::string out;
    std::string what = "game";
    std::string engine_name = "enumerate";
    unsigned depth = 3;
    std::size_t state_bound = default_state_bound;
    std::size_t profile_bound = default_profile_bound;
    std::size_t linearization_bound = default_linearization_bound;
    bool single_user = false;
    bool dot = false;
    bool json = false;
    std::uint64_t seed = 1;
    std::size_t places = 6, transitions = 6, users = 2;
  };

  std::size_t env_bound(const char* var, std::size_t fallback)
  {
    const char* v = std::getenv(var);
    if (!v || !*v)
      return fallback;
    try
      {
        std::size_t pos = 0;
        auto x = std::stoull(v, &pos);
        if (pos != std::string(v).size() || x == 0)
          throw std::invalid_argument(v);
        return x;
      }
    catch (const std::exception&)
      {
        throw input_error(std::string(var) + " must be a positive integer");
      }
  }

  // key: value summary block
  struct summary
  {
    std::vector<std::pair<std::string, std::string>> rows;
    void add(std::string k, std::string v) { rows.emplace_back(std::move(k), std::move(v)); }
    void print(std::ostream& os) const
    {
      os << "---\n";
      for (auto& [k, v] : rows)
        os << k << ": " << v << "\n";
    }
  };

  void emit(const options& o, const std::string& text)
  {
    if (o.out.empty())
      {
        std::cout << text;
        return;
      }
    std::ofstream f(o.out, std::ios::binary);
    if (!f)
      throw input_error("cannot write " + o.out);
    f << text;
    if (!f)
      throw input_error("cannot write " + o.out);
  }

  net_system load(const options& o)
  {
    return load_net(o.net_path);
  }

  std::string diagnostics_text(const net_system& net, std::size_t bound, bool& valid)
  {
    std::ostringstream os;
    auto ds = validate_net(net);
    for (auto& d : ds)
      os << "error [" << d.rule << "] " << d.message << "\n";
    valid = ds.empty();
    if (valid)
      {
        auto c = check_contact_free(net, bound);
        if (!c.contact_free)
          {
            valid = false;
            os << "error [contact] transition " << net.transitions()[c.witness->trans].name
               << " is enabled by its pre-set at " << net.format(c.witness->at)
               << " but its post-set is marked\n";
          }
      }
    return os.str();
  }

  int cmd_validate(const options& o)
  {
    auto net = load(o);
    bool valid = false;
    auto text = diagnostics_text(net, o.state_bound, valid);
    std::cout << text;
    if (valid)
      std::cout << "valid: " << net.name() << " (" << net.places().size() << " places, "
                << net.transitions().size() << " transitions, " << net.user_count()
                << " users), contact-free\n";
    if (o.json)
      {
        summary s;
        s.add("command", "validate");
        s.add("valid", valid ? "true" : "false");
        s.print(std::cout);
      }
    return valid ? ok : bad_input;
  }

  // Runs the validation and stops with exit 2 on problems.
  void require_valid(const net_system& net, const options& o)
  {
    bool valid = false;
    auto text = diagnostics_text(net, o.state_bound, valid);
    if (!valid)
      throw input_error("invalid net:\n" + text);
  }

  int cmd_reach(const options& o)
  {
    auto net = load(o);
    require_valid(net, o);
    auto rg = compute_reachability(net, o.state_bound);
    if (o.dot)
      {
        emit(o, reachability_dot(net, rg));
        return ok;
      }
    std::ostringstream os;
    os << "states " << rg.states.size() << "\n";
    for (std::size_t i = 0; i < rg.states.size(); ++i)
      os << "  " << net.format(rg.states[i]) << (i == rg.initial ? " initial" : "") << "\n";
    os << "edges " << rg.edges.size() << "\n";
    for (auto& e : rg.edges)
      os << "  " << net.format(rg.states[e.source]) << " -" << net.transitions()[e.trans].name
         << "-> " << net.format(rg.states[e.target]) << "\n";
    emit(o, os.str());
    if (o.json)
      {
        summary s;
        s.add("command", "reach");
        s.add("states", std::to_string(rg.states.size()));
        s.add("edges", std::to_string(rg.edges.size()));
        s.print(std::cout);
      }
    return ok;
  }

  int cmd_unfold(const options& o)
  {
    auto net = load(o);
    require_valid(net, o);
    auto bp = unfold_prefix(net, o.depth, o.state_bound);
    if (o.dot)
      {
        emit(o, prefix_dot(bp));
        return ok;
      }
    std::ostringstream os;
    os << "conditions " << bp.conditions().size() << "\n";
    for (auto& c : bp.conditions())
      os << "  " << c.id << " depth " << c.depth << "\n";
    os << "events " << bp.events().size() << "\n";
    for (auto& e : bp.events())
      {
        os << "  " << e.id << " depth " << e.depth << " pre";
        for (auto c : e.pre)
          os << " " << bp.conditions()[c].id;
        os << " post";
        for (auto c : e.post)
          os << " " << bp.conditions()[c].id;
        os << "\n";
      }
    emit(o, os.str());
    return ok;
  }

  game_structure make_game(const net_system& net, const options& o)
  {
    require_valid(net, o);
    return build_game(net, o.single_user, o.state_bound);
  }

  int cmd_build_game(const options& o)
  {
    auto net = load(o);
    auto g = make_game(net, o);
    auto fc = build_fairness(net, g);
    emit(o, o.dot ? game_dot(net, g) : game_table(net, g, fc));
    if (o.json)
      {
        summary s;
        s.add("command", "build-game");
        s.add("players", std::to_string(g.player_count()));
        s.add("states", std::to_string(g.state_count()));
        s.add("constraints", std::to_string(fc.size()));
        s.print(std::cout);
      }
    return ok;
  }

  std::vector<std::string> formulas_of(const options& o)
  {
    std::vector<std::string> out;
    if (!o.formula.empty())
      out.push_back(o.formula);
    if (!o.formula_file.empty())
      {
        std::ifstream in(o.formula_file);
        if (!in)
          throw input_error("cannot read " + o.formula_file);
        std::string line;
        while (std::getline(in, line))
          {
            auto b = line.find_first_not_of(" \t\r");
            if (b == std::string::npos || line[b] == '#')
              continue;
            out.push_back(line.substr(b));
          }
      }
    if (out.empty())
      throw input_error("no formula given (use --formula or --formula-file)");
    return out;
  }

  engine parse_engine(const std::string& s, bool& both)
  {
    both = s == "both";
    if (s == "enumerate" || both)
      return engine::enumerate;
    if (s == "fixpoint")
      return engine::fixpoint;
    throw input_error("unknown engine '" + s + "' (enumerate, fixpoint, both)");
  }

  int check_one(const net_system& net, const game_structure& g,
                const std::vector<fairness_constraint>& fc, const std::string& text,
                const options& o, bool synthesize, std::ostringstream& report)
  {
    auto f = parse_formula(text);
    auto violations = check_fragment(*f, net);
    if (!violations.empty())
      {
        std::string msg = "formula '" + text + "' is outside the supported fragment:";
        for (auto& v : violations)
          msg += "\n  " + v;
        throw input_error(msg);
      }
    if (synthesize && f->k != formula::kind::coalition)
      throw input_error("synthesize needs a formula whose outermost operator is a coalition");
    bool both = false;
    auto e = parse_engine(o.engine_name, both);
    auto v = model_check(net, g, fc, *f, g.initial(), e, o.profile_bound);
    std::optional<verdict> second;
    if (both)
      second = model_check(net, g, fc, *f, g.initial(), engine::fixpoint, o.profile_bound);

    report << "formula: " << print_formula(*f) << "\n";
    report << describe_verdict(net, g, v);
    int code = v.satisfied ? ok : unsatisfied;
    if (second)
      {
        bool agree = second->satisfied == v.satisfied && second->state_sets == v.state_sets;
        report << "fixpoint engine: " << (second->satisfied ? "SATISFIED" : "UNSATISFIED")
               << (agree ? " (agrees)" : " (DISAGREES)") << "\n";
        if (!agree)
          code = disagreement;
      }
    if (!o.out.empty())
      {
        std::ofstream file(o.out, std::ios::binary);
        if (!file)
          throw input_error("cannot write " + o.out);
        if (synthesize && v.witness)
          file << print_profile(net, g, *v.witness);
        else if (!synthesize && v.counterexample)
          file << print_lasso(net, g, *v.counterexample);
      }
    if (o.json)
      {
        summary s;
        s.add("command", synthesize ? "synthesize" : "check");
        s.add("formula", print_formula(*f));
        s.add("engine", o.engine_name);
        s.add("satisfied", v.satisfied ? "true" : "false");
        if (second)
          s.add("agreement", code == disagreement ? "false" : "true");
        s.add("profiles_checked", std::to_string(v.profiles_checked));
        s.add("states", std::to_string(g.state_count()));
        s.add("witness", v.witness ? "true" : "false");
        s.add("counterexample", v.counterexample ? "true" : "false");
        std::ostringstream ss;
        s.print(ss);
        report << ss.str();
      }
    return code;
  }

  int cmd_check(const options& o, bool synthesize)
  {
    auto net = load(o);
    auto g = make_game(net, o);
    auto fc = build_fairness(net, g);
    int worst = ok;
    auto fs = formulas_of(o);
    if (fs.size() > 1 && !o.out.empty())
      throw input_error("--out needs a single formula");
    for (auto& text : fs)
      {
        std::ostringstream report;
        int code = check_one(net, g, fc, text, o, synthesize, report);
        std::cout << report.str();
        worst = std::max(worst, code);
      }
    return worst;
  }

  int cmd_translate(const options& o)
  {
    auto net = load(o);
    auto g = make_game(net, o);
    auto fc = build_fairness(net, g);
    if (o.play_path.empty() == o.strategy_path.empty())
      throw input_error("translate needs exactly one of --play or --strategy");
    std::ostringstream os;
    if (!o.play_path.empty())
      {
        std::ifstream in(o.play_path);
        if (!in)
          throw input_error("cannot read " + o.play_path);
        auto p = parse_play(net, in);
        auto ds = validate_play(net, p, p.prefix.size() + 2 * p.cycle.size());
        for (auto& d : ds)
          os << "error [" << d.rule << "] " << d.message << "\n";
        if (!ds.empty())
          {
            std::cout << os.str();
            return bad_input;
          }
        auto ls = play_to_computations(net, g, fc, p, o.linearization_bound);
        os << "computations " << ls.size() << "\n";
        for (std::size_t i = 0; i < ls.size(); ++i)
          {
            auto fr = lasso_is_fair(g, fc, ls[i]);
            os << "# computation " << i << (fr.fair ? " fair" : " unfair") << "\n"
               << print_lasso(net, g, ls[i]);
          }
      }
    else
      {
        std::ifstream in(o.strategy_path);
        if (!in)
          throw input_error("cannot read " + o.strategy_path);
        auto strategies = parse_strategies(net, in);
        auto profile = net_to_game(net, g, strategies);
        os << "# game profile:\n" << print_profile(net, g, profile);
        os << "# back on the net (singletons):\n";
        for (auto& s : game_to_net(net, g, profile))
          for (auto& [m, ts] : s.choice)
            for (auto t : ts)
              os << "strategy " << net.locations()[s.owner] << ": " << net.format(m) << " -> "
                 << net.transitions()[t].name << "\n";
      }
    emit(o, os.str());
    return ok;
  }

  int cmd_export(const options& o)
  {
    auto net = load(o);
    require_valid(net, o);
    std::string text;
    if (o.what == "reach")
      {
        auto rg = compute_reachability(net, o.state_bound);
        text = reachability_dot(net, rg);
      }
    else if (o.what == "unfolding")
      text = prefix_dot(unfold_prefix(net, o.depth, o.state_bound));
    else if (o.what == "game" || o.what == "fairness")
      {
        auto g = build_game(net, o.single_user, o.state_bound);
        if (o.what == "game")
          text = o.dot ? game_dot(net, g) : game_table(net, g, build_fairness(net, g));
        else
          text = game_table(net, g, build_fairness(net, g));
      }
    else
      throw input_error("unknown artifact '" + o.what + "' (reach, unfolding, game, fairness)");
    emit(o, text);
    return ok;
  }

  int cmd_random(const options& o)
  {
    random_net_params p;
    p.max_places = o.places;
    p.max_transitions = o.transitions;
    p.max_users = o.users;
    emit(o, print_net(random_net(o.seed, p)));
    return ok;
  }
} // namespace

int main(int argc, char** argv)
{
  options o;
  CLI::App app{"Games on unfoldings of distributed nets: validation, game construction, "
               "ATL checking and strategy synthesis"};
  app.require_subcommand(1);

  auto net_arg = [&](CLI::App* c) { c->add_option("net", o.net_path, "net file")->required(); };
  auto bounds = [&](CLI::App* c) {
    c->add_option("--state-bound", o.state_bound, "reachable state bound")
      ->check(CLI::PositiveNumber);
  };
  auto game_flags = [&](CLI::App* c) {
    c->add_flag("--single-user-simplification", o.single_user,
                "drop the pass move in user-only states (single-user nets)");
  };
  auto json = [&](CLI::App* c) { c->add_flag("--json", o.json, "append a key: value summary"); };
  auto out = [&](CLI::App* c) { c->add_option("--out", o.out, "output file"); };

  auto* validate = app.add_subcommand("validate", "check net well-formedness and contact-freeness");
  net_arg(validate);
  bounds(validate);
  json(validate);

  auto* reach = app.add_subcommand("reach", "reachability graph");
  net_arg(reach);
  bounds(reach);
  json(reach);
  reach->add_flag("--dot", o.dot, "DOT output");
  out(reach);

  auto* unfold = app.add_subcommand("unfold", "unfolding prefix up to a causal depth");
  net_arg(unfold);
  bounds(unfold);
  unfold->add_option("--depth", o.depth, "causal depth")->check(CLI::NonNegativeNumber);
  unfold->add_flag("--dot", o.dot, "DOT output");
  out(unfold);

  auto* game = app.add_subcommand("build-game", "game structure and fairness constraints");
  net_arg(game);
  bounds(game);
  game_flags(game);
  json(game);
  game->add_flag("--dot", o.dot, "DOT output");
  out(game);

  auto formula_flags = [&](CLI::App* c) {
    c->add_option("--formula", o.formula, "ATL formula");
    c->add_option("--formula-file", o.formula_file, "file with one formula per line");
    c->add_option("--engine", o.engine_name, "enumerate, fixpoint or both")
      ->check(CLI::IsMember({"enumerate", "fixpoint", "both"}));
    c->add_option("--profile-bound", o.profile_bound, "bound on enumerated profiles")
      ->check(CLI::PositiveNumber);
  };
  auto* check = app.add_subcommand("check", "model check formulas at the initial state");
  net_arg(check);
  bounds(check);
  game_flags(check);
  formula_flags(check);
  json(check);
  check->add_option("--out", o.out, "write the counterexample lasso here");

  auto* synth = app.add_subcommand("synthesize", "synthesize a memoryless winning strategy");
  net_arg(synth);
  bounds(synth);
  game_flags(synth);
  formula_flags(synth);
  json(synth);
  synth->add_option("--out", o.out, "write the witness strategy here");

  auto* translate = app.add_subcommand("translate", "play -> computations, or net strategy -> game profile");
  net_arg(translate);
  bounds(translate);
  game_flags(translate);
  translate->add_option("--play", o.play_path, "play file");
  translate->add_option("--strategy", o.strategy_path, "strategy file");
  translate->add_option("--linearization-bound", o.linearization_bound, "cap on computations")
    ->check(CLI::PositiveNumber);
  out(translate);

  auto* exp = app.add_subcommand("export", "write an artifact");
  net_arg(exp);
  bounds(exp);
  game_flags(exp);
  exp->add_option("--what", o.what, "reach, unfolding, game or fairness");
  exp->add_option("--depth", o.depth, "unfolding depth");
  exp->add_flag("--dot", o.dot, "DOT output for the game (reach and unfolding are always DOT)");
  out(exp);

  auto* rnd = app.add_subcommand("random", "print a random valid net");
  rnd->add_option("--seed", o.seed, "seed");
  rnd->add_option("--places", o.places, "maximum places")->check(CLI::Range(2, 12));
  rnd->add_option("--transitions", o.transitions, "maximum transitions")->check(CLI::Range(1, 12));
  rnd->add_option("--users", o.users, "maximum users")->check(CLI::Range(1, 4));
  out(rnd);

  try
    {
      o.state_bound = env_bound("ATLNET_STATE_BOUND", o.state_bound);
      o.profile_bound = env_bound("ATLNET_PROFILE_BOUND", o.profile_bound);
      app.parse(argc, argv);
    }
  catch (const CLI::ParseError& e)
    {
      int code = app.exit(e);
      return code == 0 ? ok : bad_input;
    }
  catch (const input_error& e)
    {
      std::cerr << "error: " << e.what() << "\n";
      return bad_input;
    }

  try
    {
      if (validate->parsed())
        return cmd_validate(o);
      if (reach->parsed())
        return cmd_reach(o);
      if (unfold->parsed())
        return cmd_unfold(o);
      if (game->parsed())
        return cmd_build_game(o);
      if (check->parsed())
        return cmd_check(o, false);
      if (synth->parsed())
        return cmd_check(o, true);
      if (translate->parsed())
        return cmd_translate(o);
      if (exp->parsed())
        return cmd_export(o);
      if (rnd->parsed())
        return cmd_random(o);
    }
  catch (const resource_error& e)
    {
      std::cerr << "resource bound: " << e.what() << "\n";
      return out_of_bounds;
    }
  catch (const std::exception& e)
    {
      std::cerr << "error: " << e.what() << "\n";
      return bad_input;
    }
  return bad_input;
}
