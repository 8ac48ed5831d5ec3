#pragma once

#include <atlnet/net.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace atlnet
{
  using cond_id = std::size_t;
  using event_id = std::size_t;

  // Growable bitset used for causal pasts and conflict sets.
  class bitset
  {
  public:
    bool test(std::size_t i) const
    {
      auto w = i / 64;
      return w < words_.size() && ((words_[w] >> (i % 64)) & 1u);
    }
    void set(std::size_t i)
    {
      auto w = i / 64;
      if (w >= words_.size())
        words_.resize(w + 1, 0);
      words_[w] |= std::uint64_t{1} << (i % 64);
    }
    void merge(const bitset& o)
    {
      if (o.words_.size() > words_.size())
        words_.resize(o.words_.size(), 0);
      for (std::size_t i = 0; i < o.words_.size(); ++i)
        words_[i] |= o.words_[i];
    }
    bool intersects(const bitset& o) const
    {
      auto n = std::min(words_.size(), o.words_.size());
      for (std::size_t i = 0; i < n; ++i)
        if (words_[i] & o.words_[i])
          return true;
      return false;
    }
    std::size_t count() const;
    std::vector<std::size_t> members() const;

  private:
    std::vector<std::uint64_t> words_;
  };

  struct condition
  {
    std::string id; // "<place>#<occurrence>"
    place_id label;
    std::optional<event_id> pre;
    std::vector<event_id> post;
    unsigned depth = 0;
  };

  struct event
  {
    std::string id; // "<transition>#<occurrence>"
    trans_id label;
    std::vector<cond_id> pre; // sorted
    std::vector<cond_id> post;
    unsigned depth = 0;
  };

  // Elements are addressed uniformly: conditions first, then events.
  struct element
  {
    bool is_event = false;
    std::size_t index = 0;

    bool operator==(const element&) const = default;
  };

  enum class relation
  {
    equal,
    causal_le, // x F+ y
    causal_ge,
    conflict,
    concurrent
  };

  const char* to_string(relation r);

  /// A cut is a set of conditions, stored sorted.
  struct cut
  {
    std::vector<cond_id> conditions;

    bool operator==(const cut&) const = default;
    auto operator<=>(const cut&) const = default;
  };

  enum class cut_relation
  {
    lt,
    gt,
    eq,
    incomparable
  };

  const char* to_string(cut_relation r);

  /// Branching process of a net system: an occurrence net labelled by
  /// places and transitions. Built either as an unfolding prefix or as the
  /// process (run) of a firing sequence.
  class branching_process
  {
  public:
    explicit branching_process(const net_system& net);

    const net_system& net() const { return *net_; }
    const std::vector<condition>& conditions() const { return conds_; }
    const std::vector<event>& events() const { return events_; }
    const cut& initial_cut() const { return initial_; }

    // Appends an event labelled t consuming the given co-set of
    // conditions. The caller guarantees the labels match •t.
    event_id add_event(trans_id t, std::vector<cond_id> pre);

    std::optional<cond_id> find_condition(const std::string& id) const;
    std::optional<event_id> find_event(const std::string& id) const;
    element parse_element(const std::string& id) const; // throws input_error

    bool causal_leq(element x, element y) const; // x F* y
    bool in_conflict(element x, element y) const;
    relation relate(element x, element y) const;
    bool concurrent(cond_id a, cond_id b) const;

    bool is_co_set(const std::vector<cond_id>& cs) const;
    bool is_cut(const cut& c) const;
    bool enabled_at(const cut& c, event_id e) const;

    marking marking_of(const cut& c) const;

    // Events strictly before the cut: the configuration it closes.
    std::vector<event_id> configuration(const cut& c) const;

  private:
    const bitset& past_of(element x) const;
    const bitset& conflict_of(element x) const;

    std::shared_ptr<const net_system> net_; // owned copy
    std::vector<condition> conds_;
    std::vector<event> events_;
    // Causal past (events e with e F* x) for every condition and event.
    std::vector<bitset> cond_past_, event_past_;
    // Events in conflict with some event of the causal past.
    std::vector<bitset> cond_conf_, event_conf_;
    std::vector<std::size_t> place_occ_, trans_occ_;
    cut initial_;
  };

  inline constexpr std::size_t default_prefix_bound = 100000;

  /// Prefix of the unfolding holding every event of causal depth <= depth.
  branching_process unfold_prefix(const net_system& net, unsigned depth,
                                  std::size_t bound = default_prefix_bound);

  relation relation_query(const branching_process& bp, const std::string& x,
                          const std::string& y);

  cut cut_step(const branching_process& bp, const cut& c, event_id e);
  cut_relation cut_order(const branching_process& bp, const cut& a, const cut& b);
  bool is_run(const branching_process& bp);

  std::vector<event_id> enabled_events(const branching_process& bp, const cut& c);

  // Event of bp enabled at c and labelled t, if any (unique in a run or
  // an unfolding of an elementary net, since cuts carry distinct labels).
  std::optional<event_id> event_for(const branching_process& bp, const cut& c, trans_id t);

  // Process of a firing sequence from the initial marking, with the cut
  // reached after each prefix of the sequence (size = seq.size() + 1).
  struct run_trace
  {
    branching_process run;
    std::vector<cut> cuts;
  };

  run_trace build_run(const net_system& net, const std::vector<trans_id>& seq);

  // Sub-process restricted to the given events and their conditions.
  branching_process restrict_to(const branching_process& bp, const std::vector<event_id>& es);

  std::string prefix_dot(const branching_process& bp, const std::vector<cut>& cuts = {});
} // namespace atlnet
