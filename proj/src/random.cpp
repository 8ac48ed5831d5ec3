#include <atlnet/random.hpp>

#include <atlnet/error.hpp>
#include <atlnet/solver.hpp>

#include <algorithm>

namespace atlnet
{
  namespace
  {
    // rng() % n rather than the std distributions, whose output differs
    // between standard libraries.
    std::size_t pick(std::mt19937_64& rng, std::size_t n)
    {
      return static_cast<std::size_t>(rng() % n);
    }

    std::vector<std::size_t> subset(std::mt19937_64& rng, std::vector<std::size_t> pool,
                                    std::size_t size)
    {
      for (std::size_t i = pool.size(); i > 1; --i)
        std::swap(pool[i - 1], pool[pick(rng, i)]);
      pool.resize(std::min(size, pool.size()));
      std::sort(pool.begin(), pool.end());
      return pool;
    }

    std::optional<net_system> attempt(std::mt19937_64& rng, const random_net_params& p)
    {
      const auto k = 1 + pick(rng, p.max_users);
      const auto np = std::max<std::size_t>(k + 1, 2 + pick(rng, p.max_places - 1));
      const auto nt = std::max<std::size_t>(k, 1 + pick(rng, p.max_transitions));
      if (np > p.max_places || nt > p.max_transitions)
        return std::nullopt;

      net_description d;
      d.name = "random";
      for (std::size_t a = 1; a <= k; ++a)
        d.locations.push_back("u" + std::to_string(a));
      std::vector<std::size_t> loc(np);
      for (std::size_t i = 0; i < np; ++i)
        loc[i] = i < k ? i + 1 : pick(rng, k + 1);
      std::vector<std::size_t> all(np);
      for (std::size_t i = 0; i < np; ++i)
        all[i] = i;
      for (std::size_t i = 0; i < np; ++i)
        d.places.push_back({"p" + std::to_string(i), d.locations[loc[i]], pick(rng, 2) == 0});

      for (std::size_t t = 0; t < nt; ++t)
        {
          std::size_t l = t < k ? t + 1 : loc[pick(rng, np)];
          std::vector<std::size_t> mine;
          for (std::size_t i = 0; i < np; ++i)
            if (loc[i] == l)
              mine.push_back(i);
          auto pre = subset(rng, mine, 1 + pick(rng, 2));
          std::vector<std::size_t> rest;
          for (auto i : all)
            if (!std::binary_search(pre.begin(), pre.end(), i))
              rest.push_back(i);
          if (rest.empty())
            return std::nullopt;
          auto post = subset(rng, rest, 1 + pick(rng, 2));
          net_description::trans_decl td{"t" + std::to_string(t), d.locations[l], {}, {}};
          for (auto i : pre)
            td.pre.push_back("p" + std::to_string(i));
          for (auto i : post)
            td.post.push_back("p" + std::to_string(i));
          d.transitions.push_back(std::move(td));
        }

      net_system net(d);
      if (!validate_net(net).empty() || net.initial().empty())
        return std::nullopt;
      if (!check_contact_free(net).contact_free)
        return std::nullopt;
      if (enabled_set(net, net.initial()).empty())
        return std::nullopt;
      return net;
    }
  } // namespace

  net_system random_net(std::uint64_t seed, const random_net_params& params)
  {
    if (params.max_places < 2 || params.max_transitions < 1 || params.max_users < 1
        || params.max_places <= params.max_users || params.max_transitions < params.max_users)
      throw input_error("random net sizes out of range");
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < params.max_attempts; ++i)
      if (auto n = attempt(rng, params))
        return *n;
    throw resource_error("no valid contact-free net after " + std::to_string(params.max_attempts)
                         + " attempts (seed " + std::to_string(seed) + ")");
  }

  std::optional<play> random_play(const net_system& net, const game_structure& g,
                                  const std::vector<fairness_constraint>& fc, std::mt19937_64& rng,
                                  std::size_t max_events, std::size_t attempts)
  {
    for (std::size_t i = 0; i < attempts; ++i)
      {
        auto l = sample_fair_lasso(g, fc, rng);
        if (!l)
          return std::nullopt;
        auto p = computation_to_play(net, g, fc, *l);
        if (p.prefix.size() + p.cycle.size() > max_events)
          continue;
        // drop some intermediate cuts; the ends stay
        auto thin = [&](std::vector<std::size_t>& cuts, std::size_t keep_front) {
          std::vector<std::size_t> out;
          for (std::size_t j = 0; j < cuts.size(); ++j)
            if (j < keep_front || j + 1 == cuts.size() || pick(rng, 2) == 0)
              out.push_back(cuts[j]);
          cuts = out;
        };
        thin(p.prefix_cuts, 1);
        if (!p.finite())
          thin(p.cycle_cuts, 0);
        if (validate_play(net, p, p.prefix.size() + 2 * p.cycle.size()).empty())
          return p;
      }
    return std::nullopt;
  }
} // namespace atlnet
