#pragma once

#include <atlnet/game.hpp>
#include <atlnet/net.hpp>
#include <atlnet/play.hpp>

#include <cstdint>
#include <optional>
#include <random>

namespace atlnet
{
  struct random_net_params
  {
    std::size_t max_places = 6;
    std::size_t max_transitions = 6;
    std::size_t max_users = 2;
    std::size_t max_attempts = 10000;
  };

  // Valid, contact-free distributed net drawn by rejection sampling; the
  // same seed gives the same net. Every user owns a place and a transition.
  net_system random_net(std::uint64_t seed, const random_net_params& params = {});

  // Valid play with at most max_events events in prefix + cycle, obtained
  // from a random fair computation by merging some of its cut gaps.
  std::optional<play> random_play(const net_system& net, const game_structure& g,
                                  const std::vector<fairness_constraint>& fc, std::mt19937_64& rng,
                                  std::size_t max_events = 6, std::size_t attempts = 50);
} // namespace atlnet
