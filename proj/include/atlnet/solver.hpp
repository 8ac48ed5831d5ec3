#pragma once

#include <atlnet/atl.hpp>
#include <atlnet/game.hpp>
#include <atlnet/play.hpp>
#include <atlnet/unfold.hpp>

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace atlnet
{
  /// Memoryless strategies of all users: choice[a][q] is the move of
  /// user a at state q.
  struct game_profile
  {
    std::vector<std::vector<move_id>> choice;

    bool operator==(const game_profile&) const = default;
  };

  // Every user takes move 0 everywhere.
  game_profile first_profile(const game_structure& g);
  void check_profile(const game_structure& g, const game_profile& p); // throws input_error

  /// Path objective over state predicates, indexed by state.
  struct path_goal
  {
    temporal_op op = temporal_op::globally;
    std::vector<bool> left; // until only
    std::vector<bool> right;
  };

  path_goal goal_of(const net_system& net, const game_structure& g, const path_formula& pf);

  struct profile_check
  {
    bool winning = false;
    bool vacuous = false; // no fair computation at all under the profile
    std::optional<lasso_computation> counterexample;
  };

  profile_check verify_profile(const game_structure& g, const std::vector<fairness_constraint>& fc,
                               const game_profile& profile, const path_goal& goal, state_id q0);
  profile_check verify_profile(const net_system& net, const game_structure& g,
                               const std::vector<fairness_constraint>& fc,
                               const game_profile& profile, const path_formula& pf,
                               state_id q0);

  // True iff some fair computation from q0 is compatible with the profile.
  bool has_fair_computation(const game_structure& g, const std::vector<fairness_constraint>& fc,
                            const game_profile& profile, state_id q0);

  // Random fair computation from the initial state, users restricted to
  // the profile when one is given. Empty when no fair computation exists.
  std::optional<lasso_computation> sample_fair_lasso(const game_structure& g,
                                                     const std::vector<fairness_constraint>& fc,
                                                     std::mt19937_64& rng,
                                                     const game_profile* profile = nullptr);

  inline constexpr std::size_t default_profile_bound = 10000000;

  struct verdict
  {
    bool satisfied = false;
    std::optional<game_profile> witness;
    std::optional<lasso_computation> counterexample;
    std::string certificate; // how an unsatisfied verdict was reached
    std::size_t profiles_checked = 0;
    // model_check only: states where each subformula holds, keyed by its print form
    std::map<std::string, std::vector<bool>> state_sets;
  };

  verdict synthesize_enumerate(const game_structure& g, const std::vector<fairness_constraint>& fc,
                               const path_goal& goal, state_id q0,
                               std::size_t profile_bound = default_profile_bound);

  verdict synthesize_fixpoint(const game_structure& g, const std::vector<fairness_constraint>& fc,
                              const path_goal& goal, state_id q0,
                              std::size_t profile_bound = default_profile_bound);

  enum class engine
  {
    enumerate,
    fixpoint
  };

  const char* to_string(engine e);

  // Bottom-up labelling. Throws input_error listing the fragment
  // violations when the formula is outside the supported fragment.
  verdict model_check(const net_system& net, const game_structure& g,
                      const std::vector<fairness_constraint>& fc, const formula& f, state_id q0,
                      engine e, std::size_t profile_bound = default_profile_bound);

  // Net strategies -> game profile: least transition of each choice set,
  // the pass move for empty sets.
  game_profile net_to_game(const net_system& net, const game_structure& g,
                           const std::vector<net_strategy>& strategies);
  // Game profile -> net strategies: singleton sets, empty for pass.
  std::vector<net_strategy> game_to_net(const net_system& net, const game_structure& g,
                                        const game_profile& p);

  /// History-keyed strategy: stutter-free marking sequences from the
  /// initial marking mapped to a transition.
  using history_strategy = std::map<std::vector<marking>, trans_id>;

  // Lifts a cut-keyed strategy of one user to histories: every
  // sequentialization of the configuration below a cut gets the least
  // transition chosen at that cut.
  history_strategy cut_strategy_to_history(const branching_process& bp,
                                           const std::map<cut, std::set<trans_id>>& strategy,
                                           std::size_t bound = default_linearization_bound);

  struct bounded_check
  {
    bool ok = true;
    std::size_t plays = 0; // distinct (marking, monitor, depth) nodes explored
    std::vector<trans_id> violation; // firing sequence of a violating play prefix
  };

  // Explores the plays on the unfolding prefix consistent with the net
  // strategies up to a number of events, and reports a prefix that already
  // violates the goal and extends to a fair play.
  bounded_check check_bounded_plays(const net_system& net, const game_structure& g,
                                    const std::vector<fairness_constraint>& fc,
                                    const std::vector<net_strategy>& strategies,
                                    const path_goal& goal, unsigned horizon);

  std::string print_profile(const net_system& net, const game_structure& g, const game_profile& p);
  // `strategy <user>: <marking> -> <transition|pass>`
  std::vector<net_strategy> parse_strategies(const net_system& net, std::istream& in);

  std::string describe_verdict(const net_system& net, const game_structure& g, const verdict& v);
} // namespace atlnet
