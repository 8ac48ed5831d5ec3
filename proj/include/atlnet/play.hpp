#pragma once

#include <atlnet/net.hpp>
#include <atlnet/unfold.hpp>

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace atlnet
{
  /// A play at desk scale: a firing sequence (the run) plus the positions
  /// where cuts are taken. An optional cycle repeats forever after the
  /// prefix. Cut positions count fired events: prefix cuts lie in
  /// [0, prefix.size()], cycle cut offsets lie in [1, cycle.size()] and
  /// are repeated on every iteration of the cycle.
  struct play
  {
    std::vector<trans_id> prefix;
    std::vector<std::size_t> prefix_cuts{0};
    std::vector<trans_id> cycle;
    std::vector<std::size_t> cycle_cuts;

    bool finite() const { return cycle.empty(); }
    bool operator==(const play&) const = default;
  };

  // Cuts after every event: the maximal refinement of the sequence.
  play make_play(const std::vector<trans_id>& prefix, const std::vector<trans_id>& cycle = {});

  // Play files:
  //   prefix: t3 t0
  //   cuts: 0 1 2          (optional, default: after every event)
  //   cycle: t5 t3         (optional)
  //   cycle-cuts: 1 2      (optional, default: after every event)
  // A '-' token is a stutter step and is dropped, so lasso files written by
  // the solver read back as the plays they induce.
  play parse_play(const net_system& net, std::istream& in);
  play parse_play_string(const net_system& net, const std::string& text);
  std::string print_play(const net_system& net, const play& p);

  /// Memoryless strategy on the net: marking -> set of owner transitions.
  struct net_strategy
  {
    location_id owner = 1;
    std::map<marking, std::set<trans_id>> choice;

    const std::set<trans_id>& at(const marking& m) const;
  };

  // Events of the play laid out up to a number of cycle iterations,
  // with the cut positions that fall inside that horizon.
  struct unrolled_play
  {
    std::vector<trans_id> events;
    std::vector<std::size_t> cut_positions;
    std::vector<marking> markings; // marking after each event count 0..events.size()
  };

  unrolled_play unroll(const net_system& net, const play& p, std::size_t iterations);

  std::vector<diagnostic> validate_play(const net_system& net, const play& p,
                                        std::size_t horizon);

  struct consistency_result
  {
    bool consistent = true;
    std::vector<diagnostic> diagnostics;
  };

  consistency_result consistent_with(const net_system& net, const play& p,
                                     const std::vector<net_strategy>& profile);

  bool is_maximal_refinement(const branching_process& bp, const std::vector<cut>& delta);

  // Markings of every cut lying between two cuts of a run, i.e. those
  // obtained by firing a causally closed subset of the events in between.
  std::set<marking> compatible_markings(const net_system& net, const marking& from,
                                        const std::vector<trans_id>& between);
} // namespace atlnet
