#include <atlnet/atl.hpp>

#include <atlnet/error.hpp>

#include <algorithm>
#include <cctype>

namespace atlnet
{
  bool formula::operator==(const formula& o) const
  {
    if (k != o.k || prop != o.prop || users != o.users || args.size() != o.args.size())
      return false;
    if (k == kind::coalition && op != o.op)
      return false;
    for (std::size_t i = 0; i < args.size(); ++i)
      if (!(*args[i] == *o.args[i]))
        return false;
    return true;
  }

  bool same_formula(const formula_ptr& a, const formula_ptr& b)
  {
    return a && b && *a == *b;
  }

  formula_ptr make_true()
  {
    return std::make_shared<formula>();
  }

  formula_ptr make_prop(std::string p)
  {
    auto f = std::make_shared<formula>();
    f->k = formula::kind::prop;
    f->prop = std::move(p);
    return f;
  }

  formula_ptr make_not(formula_ptr a)
  {
    auto f = std::make_shared<formula>();
    f->k = formula::kind::negation;
    f->args = {std::move(a)};
    return f;
  }

  formula_ptr make_or(formula_ptr a, formula_ptr b)
  {
    auto f = std::make_shared<formula>();
    f->k = formula::kind::disjunction;
    f->args = {std::move(a), std::move(b)};
    return f;
  }

  formula_ptr make_and(formula_ptr a, formula_ptr b)
  {
    auto f = std::make_shared<formula>();
    f->k = formula::kind::conjunction;
    f->args = {std::move(a), std::move(b)};
    return f;
  }

  formula_ptr make_coalition(std::vector<std::string> users, temporal_op op,
                             std::vector<formula_ptr> args)
  {
    auto f = std::make_shared<formula>();
    f->k = formula::kind::coalition;
    std::sort(users.begin(), users.end());
    users.erase(std::unique(users.begin(), users.end()), users.end());
    f->users = std::move(users);
    f->op = op;
    f->args = std::move(args);
    return f;
  }

  namespace
  {
    struct token
    {
      enum class type
      {
        ident,
        lcoal, // <<
        rcoal, // >>
        lpar,
        rpar,
        comma,
        bang,
        bar,
        amp,
        end
      };
      type t;
      std::string text;
      std::size_t column; // 1-based
    };

    std::vector<token> lex(const std::string& s)
    {
      std::vector<token> out;
      std::size_t i = 0;
      auto err = [&](std::size_t col, const std::string& what) {
        throw input_error("syntax error at column " + std::to_string(col) + ": " + what);
      };
      while (i < s.size())
        {
          char c = s[i];
          if (std::isspace(static_cast<unsigned char>(c)))
            {
              ++i;
              continue;
            }
          std::size_t col = i + 1;
          if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
            {
              std::size_t j = i;
              while (j < s.size()
                     && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'
                         || s[j] == '.'))
                ++j;
              out.push_back({token::type::ident, s.substr(i, j - i), col});
              i = j;
              continue;
            }
          if (s.compare(i, 2, "<<") == 0)
            {
              out.push_back({token::type::lcoal, "<<", col});
              i += 2;
              continue;
            }
          if (s.compare(i, 2, ">>") == 0)
            {
              out.push_back({token::type::rcoal, ">>", col});
              i += 2;
              continue;
            }
          token::type t;
          switch (c)
            {
            case '(':
              t = token::type::lpar;
              break;
            case ')':
              t = token::type::rpar;
              break;
            case ',':
              t = token::type::comma;
              break;
            case '!':
              t = token::type::bang;
              break;
            case '|':
              t = token::type::bar;
              break;
            case '&':
              t = token::type::amp;
              break;
            default:
              err(col, std::string("unexpected character '") + c + "'");
            }
          out.push_back({t, std::string(1, c), col});
          ++i;
        }
      out.push_back({token::type::end, "", s.size() + 1});
      return out;
    }

    class parser
    {
    public:
      explicit parser(std::vector<token> toks)
        : toks_(std::move(toks))
      {
      }

      formula_ptr parse()
      {
        auto f = disjunction();
        if (peek().t != token::type::end)
          fail("unexpected '" + peek().text + "'");
        return f;
      }

    private:
      const token& peek() const { return toks_[pos_]; }
      const token& take() { return toks_[pos_++]; }

      [[noreturn]] void fail(const std::string& what) const
      {
        auto& t = peek();
        std::string w = t.t == token::type::end ? "unexpected end of input" : what;
        throw input_error("syntax error at column " + std::to_string(t.column) + ": " + w);
      }

      void expect(token::type t, const char* what)
      {
        if (peek().t != t)
          fail(std::string("expected ") + what);
        ++pos_;
      }

      formula_ptr disjunction()
      {
        auto f = conjunction();
        while (peek().t == token::type::bar)
          {
            ++pos_;
            f = make_or(f, conjunction());
          }
        return f;
      }

      formula_ptr conjunction()
      {
        auto f = unary();
        while (peek().t == token::type::amp)
          {
            ++pos_;
            f = make_and(f, unary());
          }
        return f;
      }

      formula_ptr unary()
      {
        auto& t = peek();
        switch (t.t)
          {
          case token::type::bang:
            ++pos_;
            return make_not(unary());
          case token::type::lpar:
            {
              ++pos_;
              auto f = disjunction();
              expect(token::type::rpar, "')'");
              return f;
            }
          case token::type::lcoal:
            return coalition();
          case token::type::ident:
            ++pos_;
            if (t.text == "true")
              return make_true();
            return make_prop(t.text);
          default:
            fail("unexpected '" + t.text + "'");
          }
      }

      formula_ptr coalition()
      {
        expect(token::type::lcoal, "'<<'");
        std::vector<std::string> users;
        if (peek().t == token::type::ident)
          {
            users.push_back(take().text);
            while (peek().t == token::type::comma)
              {
                ++pos_;
                if (peek().t != token::type::ident)
                  fail("expected a user name");
                users.push_back(take().text);
              }
          }
        expect(token::type::rcoal, "'>>'");
        if (peek().t != token::type::ident)
          fail("expected a temporal operator (X, G, F, U)");
        auto& op = take();
        if (op.text == "G")
          return make_coalition(users, temporal_op::globally, {unary()});
        if (op.text == "X")
          return make_coalition(users, temporal_op::next, {unary()});
        if (op.text == "F")
          return make_coalition(users, temporal_op::until, {make_true(), unary()});
        if (op.text == "U")
          {
            expect(token::type::lpar, "'('");
            auto a = disjunction();
            expect(token::type::comma, "','");
            auto b = disjunction();
            expect(token::type::rpar, "')'");
            return make_coalition(users, temporal_op::until, {a, b});
          }
        --pos_;
        fail("unknown operator '" + op.text + "'");
      }

      std::vector<token> toks_;
      std::size_t pos_ = 0;
    };

    std::string print_rec(const formula& f, int ctx)
    {
      // ctx: 0 = top / or operand, 1 = and operand, 2 = unary operand
      switch (f.k)
        {
        case formula::kind::truth:
          return "true";
        case formula::kind::prop:
          return f.prop;
        case formula::kind::negation:
          return "!" + print_rec(*f.args[0], 2);
        case formula::kind::disjunction:
          {
            auto s = print_rec(*f.args[0], 0) + " | " + print_rec(*f.args[1], 1);
            return ctx > 0 ? "(" + s + ")" : s;
          }
        case formula::kind::conjunction:
          {
            auto s = print_rec(*f.args[0], 1) + " & " + print_rec(*f.args[1], 2);
            return ctx > 1 ? "(" + s + ")" : s;
          }
        case formula::kind::coalition:
          {
            std::string s = "<<";
            for (std::size_t i = 0; i < f.users.size(); ++i)
              s += (i ? "," : "") + f.users[i];
            s += ">> ";
            switch (f.op)
              {
              case temporal_op::next:
                s += "X " + print_rec(*f.args[0], 2);
                break;
              case temporal_op::globally:
                s += "G " + print_rec(*f.args[0], 2);
                break;
              case temporal_op::until:
                if (f.args[0]->k == formula::kind::truth)
                  s += "F " + print_rec(*f.args[1], 2);
                else
                  s += "U(" + print_rec(*f.args[0], 0) + ", " + print_rec(*f.args[1], 0) + ")";
                break;
              }
            // A coalition swallows everything to its right, so parenthesise
            // it whenever something could follow.
            return ctx > 0 ? "(" + s + ")" : s;
          }
        }
      return "?";
    }

    void fragment_rec(const formula& f, const net_system& net, const std::vector<std::string>& all,
                      std::vector<std::string>& out)
    {
      if (f.k == formula::kind::prop && !net.find_place(f.prop))
        out.push_back("unknown proposition '" + f.prop + "'");
      if (f.k == formula::kind::coalition)
        {
          if (f.op == temporal_op::next)
            out.push_back("X operator");
          for (auto& u : f.users)
            if (std::find(all.begin(), all.end(), u) == all.end())
              out.push_back("unknown user '" + u + "'");
          if (f.users != all)
            {
              std::string s = "sub-coalition {";
              for (std::size_t i = 0; i < f.users.size(); ++i)
                s += (i ? "," : "") + f.users[i];
              out.push_back(s + "}");
            }
        }
      for (auto& a : f.args)
        fragment_rec(*a, net, all, out);
    }
  } // namespace

  formula_ptr parse_formula(const std::string& text)
  {
    return parser(lex(text)).parse();
  }

  std::string print_formula(const formula& f)
  {
    return print_rec(f, 0);
  }

  std::vector<std::string> check_fragment(const formula& f, const net_system& net)
  {
    std::vector<std::string> all(net.locations().begin() + 1, net.locations().end());
    std::sort(all.begin(), all.end());
    std::vector<std::string> out;
    fragment_rec(f, net, all, out);
    return out;
  }

  bool has_coalition(const formula& f)
  {
    if (f.k == formula::kind::coalition)
      return true;
    return std::any_of(f.args.begin(), f.args.end(),
                       [](const formula_ptr& a) { return has_coalition(*a); });
  }

  labels state_props(const net_system& net, const marking& m)
  {
    labels l;
    for (auto p : m.places)
      l.insert(net.places().at(p).name);
    return l;
  }

  bool holds(const formula& f, const labels& l)
  {
    switch (f.k)
      {
      case formula::kind::truth:
        return true;
      case formula::kind::prop:
        return l.count(f.prop) > 0;
      case formula::kind::negation:
        return !holds(*f.args[0], l);
      case formula::kind::disjunction:
        return holds(*f.args[0], l) || holds(*f.args[1], l);
      case formula::kind::conjunction:
        return holds(*f.args[0], l) && holds(*f.args[1], l);
      case formula::kind::coalition:
        throw input_error("holds: coalition subformula must be labelled first");
      }
    return false;
  }

  path_formula make_globally(formula_ptr f)
  {
    return {temporal_op::globally, nullptr, std::move(f)};
  }

  path_formula make_until(formula_ptr l, formula_ptr r)
  {
    return {temporal_op::until, std::move(l), std::move(r)};
  }

  path_formula make_eventually(formula_ptr f)
  {
    return make_until(make_true(), std::move(f));
  }

  path_formula path_of(const formula& c)
  {
    if (c.k != formula::kind::coalition)
      throw input_error("path_of: not a coalition formula");
    if (c.op == temporal_op::until)
      return make_until(c.args[0], c.args[1]);
    return {c.op, nullptr, c.args[0]};
  }

  bool path_satisfies(const label_lasso& lambda, const path_formula& pf)
  {
    auto& pos = lambda.positions;
    if (pos.empty() || lambda.cycle_start >= pos.size())
      throw input_error("path_satisfies: empty lasso or cycle start out of range");
    switch (pf.op)
      {
      case temporal_op::globally:
        return std::all_of(pos.begin(), pos.end(),
                           [&](const labels& l) { return holds(*pf.right, l); });
      case temporal_op::until:
        // Prefix plus one pass of the cycle sees every distinct position.
        for (auto& l : pos)
          {
            if (holds(*pf.right, l))
              return true;
            if (!holds(*pf.left, l))
              return false;
          }
        return false;
      case temporal_op::next:
        return holds(*pf.right, pos.size() > 1 ? pos[1] : pos[lambda.cycle_start]);
      }
    return false;
  }
} // namespace atlnet
