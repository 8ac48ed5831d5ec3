#pragma once

#include <atlnet/net.hpp>

#include <memory>
#include <set>
#include <string>
#include <vector>

namespace atlnet
{
  enum class temporal_op
  {
    next,
    globally,
    until // F phi is stored as until(true, phi)
  };

  struct formula;
  using formula_ptr = std::shared_ptr<const formula>;

  /// ATL formula tree. Propositions are place names.
  struct formula
  {
    enum class kind
    {
      truth,
      prop,
      negation,
      disjunction,
      conjunction,
      coalition
    };

    kind k = kind::truth;
    std::string prop;
    std::vector<std::string> users; // coalition members, sorted
    temporal_op op = temporal_op::globally;
    std::vector<formula_ptr> args;

    bool operator==(const formula& o) const;
  };

  formula_ptr make_true();
  formula_ptr make_prop(std::string p);
  formula_ptr make_not(formula_ptr f);
  formula_ptr make_or(formula_ptr a, formula_ptr b);
  formula_ptr make_and(formula_ptr a, formula_ptr b);
  formula_ptr make_coalition(std::vector<std::string> users, temporal_op op,
                             std::vector<formula_ptr> args);

  /// Grammar:
  ///   f    := and ('|' and)*
  ///   and  := un ('&' un)*
  ///   un   := '!' un | '<<' ids '>>' temp | 'true' | id | '(' f ')'
  ///   temp := 'G' un | 'F' un | 'X' un | 'U' '(' f ',' f ')'
  /// Errors carry the 1-based column of the offending token.
  formula_ptr parse_formula(const std::string& text);
  std::string print_formula(const formula& f);

  bool same_formula(const formula_ptr& a, const formula_ptr& b);

  std::vector<std::string> check_fragment(const formula& f, const net_system& net);

  bool has_coalition(const formula& f);

  using labels = std::set<std::string>;

  labels state_props(const net_system& net, const marking& m);

  // Boolean evaluation of a coalition-free formula against a label set.
  bool holds(const formula& f, const labels& l);

  /// Outermost temporal operator of a coalition formula with its operands,
  /// the operands being coalition-free state formulas.
  struct path_formula
  {
    temporal_op op = temporal_op::globally;
    formula_ptr left;  // until only
    formula_ptr right; // operand of G / X, second operand of U
  };

  path_formula make_globally(formula_ptr f);
  path_formula make_until(formula_ptr l, formula_ptr r);
  path_formula make_eventually(formula_ptr f);

  // Path formula of a coalition node whose operands are coalition-free.
  path_formula path_of(const formula& coalition_node);

  /// Label lasso: positions[cycle_start..] repeat forever.
  struct label_lasso
  {
    std::vector<labels> positions;
    std::size_t cycle_start = 0;
  };

  bool path_satisfies(const label_lasso& lambda, const path_formula& pf);
} // namespace atlnet
