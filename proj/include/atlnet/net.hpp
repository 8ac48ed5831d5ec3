#pragma once

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace atlnet
{
  using place_id = std::size_t;
  using trans_id = std::size_t;
  using location_id = std::size_t;

  // Location 0 is always the environment; users are 1..k.
  inline constexpr location_id env_location = 0;

  /// A set of places, stored as sorted place indices. Since place indices
  /// follow the lexicographic order of place names, the default ordering
  /// of markings is the ordering of their sorted name lists.
  struct marking
  {
    std::vector<place_id> places;

    marking() = default;
    explicit marking(std::vector<place_id> ps);

    bool contains(place_id p) const;
    bool empty() const { return places.empty(); }
    std::size_t size() const { return places.size(); }

    auto operator<=>(const marking&) const = default;
    bool operator==(const marking&) const = default;
  };

  struct place
  {
    std::string name;
    location_id location = env_location;

    bool operator==(const place&) const = default;
  };

  struct transition
  {
    std::string name;
    location_id location = env_location;
    std::vector<place_id> pre;
    std::vector<place_id> post;

    bool operator==(const transition&) const = default;
  };

  // Name-level description, as written in a net file.
  struct net_description
  {
    struct place_decl
    {
      std::string name;
      std::string location;
      bool initial = false;
    };
    struct trans_decl
    {
      std::string name;
      std::string location;
      std::vector<std::string> pre;
      std::vector<std::string> post;
    };

    std::string name = "net";
    std::vector<std::string> locations{"env"};
    std::vector<place_decl> places;
    std::vector<trans_decl> transitions;
  };

  /// Elementary distributed net system. Places and transitions are kept
  /// sorted by name, so indices give the canonical enumeration order.
  class net_system
  {
  public:
    explicit net_system(const net_description& d);

    const std::string& name() const { return name_; }
    const std::vector<std::string>& locations() const { return locations_; }
    const std::vector<place>& places() const { return places_; }
    const std::vector<transition>& transitions() const { return transitions_; }
    const marking& initial() const { return initial_; }

    std::size_t user_count() const { return locations_.size() - 1; }
    bool is_user_transition(trans_id t) const
    {
      return transitions_[t].location != env_location;
    }

    std::optional<place_id> find_place(const std::string& n) const;
    std::optional<trans_id> find_transition(const std::string& n) const;
    std::optional<location_id> find_location(const std::string& n) const;

    place_id place_index(const std::string& n) const;      // throws input_error
    trans_id transition_index(const std::string& n) const; // throws input_error

    marking make_marking(const std::vector<std::string>& names) const;
    std::string format(const marking& m) const; // "{p0,p2}"
    marking parse_marking(const std::string& text) const;

    net_description describe() const;

    bool operator==(const net_system&) const = default;

  private:
    std::string name_;
    std::vector<std::string> locations_;
    std::vector<place> places_;
    std::vector<transition> transitions_;
    marking initial_;
  };

  net_system parse_net(std::istream& in);
  net_system parse_net_string(const std::string& text);
  net_system load_net(const std::string& path);
  std::string print_net(const net_system& net);

  struct diagnostic
  {
    std::string rule;
    std::string message;
  };

  std::vector<diagnostic> validate_net(const net_system& net);

  std::vector<trans_id> enabled_set(const net_system& net, const marking& m);
  bool is_enabled(const net_system& net, const marking& m, trans_id t);
  marking fire(const net_system& net, const marking& m, trans_id t);

  struct reach_edge
  {
    std::size_t source;
    trans_id trans;
    std::size_t target;

    auto operator<=>(const reach_edge&) const = default;
  };

  inline constexpr std::size_t default_state_bound = 100000;

  struct reachability_graph
  {
    std::vector<marking> states; // sorted
    std::vector<reach_edge> edges; // sorted by (source, trans)
    std::size_t initial = 0;

    std::optional<std::size_t> index_of(const marking& m) const;
    std::vector<reach_edge> out_edges(std::size_t s) const;
  };

  reachability_graph compute_reachability(const net_system& net,
                                          std::size_t bound = default_state_bound);

  struct contact_witness
  {
    marking at;
    trans_id trans;
  };

  struct contact_result
  {
    bool contact_free = true;
    std::optional<contact_witness> witness;
  };

  contact_result check_contact_free(const net_system& net,
                                    std::size_t bound = default_state_bound);

  enum class structural_kind
  {
    independent,
    conflict,
    neither
  };

  struct structural_result
  {
    structural_kind kind = structural_kind::neither;
    std::optional<bool> concurrent_at;
  };

  structural_result structural_relation(const net_system& net, trans_id t1, trans_id t2,
                                        const std::optional<marking>& m = std::nullopt);

  const char* to_string(structural_kind k);

  std::string reachability_dot(const net_system& net, const reachability_graph& rg);

  // Throws input_error with the validation diagnostics, or when the net is
  // not contact-free (every later construction assumes it is).
  void require_well_formed(const net_system& net, std::size_t bound = default_state_bound);
} // namespace atlnet
