#pragma once

#include <atlnet/atl.hpp>
#include <atlnet/net.hpp>
#include <atlnet/play.hpp>

#include <optional>
#include <string>
#include <vector>

namespace atlnet
{
  using state_id = std::size_t;
  using player_id = std::size_t; // 0-based: users 0..k-1, env k, scheduler k+1
  using move_id = std::size_t;
  using move_vector = std::vector<move_id>;

  struct game_move
  {
    std::optional<trans_id> trans; // nullopt: the move keeps the state (∅ / stutter)
    state_id target = 0;
  };

  /// Turn-based asynchronous game structure of a distributed net.
  /// Each state is a reachable marking; the scheduler's move j hands the
  /// turn to player j.
  class game_structure
  {
  public:
    game_structure(const net_system& net, const reachability_graph& rg,
                   bool single_user_simplification);

    std::size_t user_count() const { return k_; }
    std::size_t player_count() const { return k_ + 2; }
    player_id env() const { return k_; }
    player_id scheduler() const { return k_ + 1; }
    bool simplified() const { return simplified_; }

    std::size_t state_count() const { return states_.size(); }
    const std::vector<marking>& states() const { return states_; }
    const marking& state(state_id q) const { return states_.at(q); }
    state_id initial() const { return initial_; }
    std::optional<state_id> index_of(const marking& m) const;

    std::size_t d(player_id a, state_id q) const;
    // Move list of a non-scheduler player at q.
    const std::vector<game_move>& moves(player_id a, state_id q) const;
    std::optional<move_id> move_of(player_id a, state_id q, std::optional<trans_id> t) const;

    state_id tau(state_id q, const move_vector& v) const;
    // State reached when the scheduler picks a and a plays j.
    state_id succ(state_id q, player_id a, move_id j) const;

    // Player owning a transition: users by location, the env otherwise.
    player_id owner(trans_id t) const;
    bool user_only(state_id q) const;

  private:
    std::size_t k_;
    bool simplified_;
    std::vector<marking> states_;
    state_id initial_ = 0;
    // table_[q][a]: moves of player a (a < k+1) at q
    std::vector<std::vector<std::vector<game_move>>> table_;
    std::vector<player_id> owner_;
  };

  // Builds the game over the reachable markings. The simplification is
  // only available for single-user nets.
  game_structure build_game(const net_system& net, bool single_user_simplification = false,
                            std::size_t bound = default_state_bound);

  struct fairness_constraint
  {
    enum class family
    {
      scheduler,   // <k+2, c_j>
      environment, // <k+1, c_t#>
      user_state   // <a, c_q>
    };

    family kind = family::scheduler;
    player_id player = 0;
    std::string label;
    std::vector<std::vector<move_id>> c; // c[q], sorted

    bool enabled(state_id q) const { return !c.at(q).empty(); }
    bool contains(state_id q, move_id j) const;
  };

  std::vector<fairness_constraint> build_fairness(const net_system& net,
                                                  const game_structure& g);

  struct game_step
  {
    state_id state = 0;
    move_vector moves;
  };

  /// prefix then cycle forever; the cycle returns to its first state.
  struct lasso_computation
  {
    std::vector<game_step> prefix;
    std::vector<game_step> cycle;
  };

  // A step in which a constraint is taken: the scheduler (or the player
  // itself) selects a move of c(q).
  bool taken(const game_structure& g, const fairness_constraint& c, const game_step& s);

  // Well-formedness: valid moves, consecutive states related by tau,
  // cycle non-empty and closed. Returns the problems found.
  std::vector<std::string> check_lasso(const game_structure& g, const lasso_computation& l);

  struct fairness_result
  {
    bool fair = true;
    std::vector<std::size_t> violated; // indices into the constraint list
  };

  fairness_result lasso_is_fair(const game_structure& g,
                                const std::vector<fairness_constraint>& fc,
                                const lasso_computation& l);

  /// State sequence with equal neighbours collapsed. `terminal` marks
  /// the finite case: the last state repeats forever.
  struct state_lasso
  {
    std::vector<state_id> prefix;
    std::vector<state_id> cycle;
    bool terminal() const { return cycle.size() == 1; }
    bool operator==(const state_lasso&) const = default;
  };

  // Canonical: two lassos denoting the same infinite stutter-free state
  // sequence give equal results.
  state_lasso stutter_remove(const lasso_computation& l);
  state_lasso canonical_state_lasso(std::vector<state_id> prefix, std::vector<state_id> cycle);

  play computation_to_play(const net_system& net, const game_structure& g,
                           const std::vector<fairness_constraint>& fc,
                           const lasso_computation& l);

  inline constexpr std::size_t default_linearization_bound = 1000;

  // Sequentializations of a play as computations. At least one of them is
  // fair; stutters are inserted where a player would otherwise starve.
  std::vector<lasso_computation> play_to_computations(
    const net_system& net, const game_structure& g, const std::vector<fairness_constraint>& fc,
    const play& p, std::size_t bound = default_linearization_bound);

  label_lasso labels_of(const net_system& net, const game_structure& g,
                        const lasso_computation& l);

  std::string player_name(const net_system& net, const game_structure& g, player_id a);
  std::string move_name(const net_system& net, const game_structure& g, player_id a,
                        state_id q, move_id j);

  std::string game_dot(const net_system& net, const game_structure& g);
  std::string game_table(const net_system& net, const game_structure& g,
                         const std::vector<fairness_constraint>& fc);
  std::string print_lasso(const net_system& net, const game_structure& g,
                          const lasso_computation& l);
} // namespace atlnet
