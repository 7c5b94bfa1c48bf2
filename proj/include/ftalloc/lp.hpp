#pragma once

// Exact rational two-phase simplex for small dense programs. Bland's rule
// guarantees termination and makes the returned vertex deterministic.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ftalloc/errors.hpp"
#include "ftalloc/rational.hpp"

namespace ftalloc {

enum class Relation { le, ge, eq };
enum class Sense { maximize, minimize };
enum class LpStatus { optimal, infeasible, unbounded };

inline std::string to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
  }
  return "unknown";
}

struct Constraint {
  std::vector<Rational> coeffs;
  Relation rel;
  Rational rhs;
};

struct LinearProgram {
  std::vector<std::string> variables;
  std::vector<bool> nonneg;
  std::vector<Constraint> constraints;
  std::optional<std::vector<Rational>> objective;
  Sense sense = Sense::maximize;

  std::size_t add_variable(std::string name, bool non_negative = true) {
    variables.push_back(std::move(name));
    nonneg.push_back(non_negative);
    return variables.size() - 1;
  }

  void add_constraint(std::vector<Rational> coeffs, Relation rel, Rational rhs) {
    constraints.push_back({std::move(coeffs), rel, std::move(rhs)});
  }

  void set_objective(std::vector<Rational> coeffs, Sense s) {
    objective = std::move(coeffs);
    sense = s;
  }

  std::size_t num_variables() const { return variables.size(); }

  void validate() const {
    if (nonneg.size() != variables.size()) throw InvalidInput("LP: variable metadata mismatch");
    for (const auto& c : constraints)
      if (c.coeffs.size() != variables.size())
        throw InvalidInput("LP: constraint row length differs from variable count");
    if (objective && objective->size() != variables.size())
      throw InvalidInput("LP: objective length differs from variable count");
  }
};

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  std::vector<Rational> x;  // a basic feasible solution when status == optimal
  Rational objective_value; // in the program's own sense
};

namespace detail {

class Tableau {
public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows, std::vector<Rational>(cols + 1)), basis_(rows) {}

  Rational& at(std::size_t r, std::size_t c) { return a_[r][c]; }
  Rational& rhs(std::size_t r) { return a_[r][cols_]; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::vector<std::size_t>& basis() { return basis_; }

  // Maximizes cost . x over columns with allowed[c] set. Returns false if
  // unbounded.
  bool optimize(const std::vector<Rational>& cost, const std::vector<bool>& allowed) {
    std::vector<Rational> reduced(cols_);
    for (std::size_t c = 0; c < cols_; ++c) {
      reduced[c] = cost[c];
      for (std::size_t r = 0; r < rows_; ++r)
        if (sgn(a_[r][c]) != 0 && sgn(cost[basis_[r]]) != 0) reduced[c] -= cost[basis_[r]] * a_[r][c];
    }
    while (true) {
      std::size_t enter = cols_;
      for (std::size_t c = 0; c < cols_; ++c)
        if (allowed[c] && sgn(reduced[c]) > 0) {
          enter = c;
          break;
        }
      if (enter == cols_) return true;

      std::size_t leave = rows_;
      Rational best_ratio;
      for (std::size_t r = 0; r < rows_; ++r) {
        if (sgn(a_[r][enter]) <= 0) continue;
        Rational ratio = a_[r][cols_] / a_[r][enter];
        if (leave == rows_ || ratio < best_ratio ||
            (ratio == best_ratio && basis_[r] < basis_[leave])) {
          leave = r;
          best_ratio = std::move(ratio);
        }
      }
      if (leave == rows_) return false;
      pivot(leave, enter, &reduced);
    }
  }

  void pivot(std::size_t pr, std::size_t pc, std::vector<Rational>* reduced = nullptr) {
    const Rational piv = a_[pr][pc];
    for (std::size_t c = 0; c <= cols_; ++c)
      if (sgn(a_[pr][c]) != 0) a_[pr][c] /= piv;
    for (std::size_t r = 0; r < rows_; ++r) {
      if (r == pr || sgn(a_[r][pc]) == 0) continue;
      const Rational f = a_[r][pc];
      for (std::size_t c = 0; c <= cols_; ++c)
        if (sgn(a_[pr][c]) != 0) a_[r][c] -= f * a_[pr][c];
    }
    if (reduced && sgn((*reduced)[pc]) != 0) {
      const Rational f = (*reduced)[pc];
      for (std::size_t c = 0; c < cols_; ++c)
        if (sgn(a_[pr][c]) != 0) (*reduced)[c] -= f * a_[pr][c];
    }
    basis_[pr] = pc;
  }

  void drop_row(std::size_t r) {
    a_.erase(a_.begin() + static_cast<std::ptrdiff_t>(r));
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
    --rows_;
  }

private:
  std::size_t rows_, cols_;
  std::vector<std::vector<Rational>> a_;
  std::vector<std::size_t> basis_;
};

} // namespace detail

inline LpResult lp_solve(const LinearProgram& lp) {
  lp.validate();
  const std::size_t nv = lp.num_variables();
  const std::size_t m = lp.constraints.size();

  // Column layout: structural (free variables split in two), slacks, artificials.
  std::vector<std::size_t> plus_col(nv), minus_col(nv, SIZE_MAX);
  std::size_t col = 0;
  for (std::size_t j = 0; j < nv; ++j) {
    plus_col[j] = col++;
    if (!lp.nonneg[j]) minus_col[j] = col++;
  }
  std::vector<std::size_t> slack_col(m, SIZE_MAX);
  for (std::size_t i = 0; i < m; ++i)
    if (lp.constraints[i].rel != Relation::eq) slack_col[i] = col++;

  // A row keeps its slack as the starting basic column when the slack has a +1
  // coefficient after sign normalization; every other row gets an artificial.
  std::vector<bool> flip(m), needs_art(m);
  std::size_t n_art = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& c = lp.constraints[i];
    flip[i] = c.rhs < 0;
    int slack_sign = c.rel == Relation::le ? 1 : (c.rel == Relation::ge ? -1 : 0);
    if (flip[i]) slack_sign = -slack_sign;
    needs_art[i] = slack_sign != 1;
    if (needs_art[i]) ++n_art;
  }
  const std::size_t art_begin = col;
  const std::size_t total = col + n_art;

  detail::Tableau t(m, total);
  std::size_t next_art = art_begin;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& c = lp.constraints[i];
    const Rational sign = flip[i] ? -1 : 1;
    for (std::size_t j = 0; j < nv; ++j) {
      if (sgn(c.coeffs[j]) == 0) continue;
      t.at(i, plus_col[j]) = sign * c.coeffs[j];
      if (minus_col[j] != SIZE_MAX) t.at(i, minus_col[j]) = -sign * c.coeffs[j];
    }
    if (slack_col[i] != SIZE_MAX) t.at(i, slack_col[i]) = sign * (c.rel == Relation::le ? 1 : -1);
    t.rhs(i) = sign * c.rhs;
    if (needs_art[i]) {
      t.at(i, next_art) = 1;
      t.basis()[i] = next_art++;
    } else {
      t.basis()[i] = slack_col[i];
    }
  }

  LpResult result;
  std::vector<bool> allowed(total, true);

  if (n_art > 0) {
    std::vector<Rational> phase1(total);
    for (std::size_t c = art_begin; c < total; ++c) phase1[c] = -1;
    t.optimize(phase1, allowed);
    Rational infeasibility = 0;
    for (std::size_t r = 0; r < t.rows(); ++r)
      if (t.basis()[r] >= art_begin) infeasibility += t.rhs(r);
    if (infeasibility > 0) {
      result.status = LpStatus::infeasible;
      return result;
    }
    // Pivot zero-level artificials out of the basis; rows where that is
    // impossible are linearly dependent and can be dropped.
    for (std::size_t r = 0; r < t.rows();) {
      if (t.basis()[r] < art_begin) {
        ++r;
        continue;
      }
      std::size_t pc = art_begin;
      for (std::size_t c = 0; c < art_begin; ++c)
        if (sgn(t.at(r, c)) != 0) {
          pc = c;
          break;
        }
      if (pc == art_begin) {
        t.drop_row(r);
      } else {
        t.pivot(r, pc);
        ++r;
      }
    }
    for (std::size_t c = art_begin; c < total; ++c) allowed[c] = false;
  }

  std::vector<Rational> cost(total);
  if (lp.objective) {
    const Rational dir = lp.sense == Sense::maximize ? 1 : -1;
    for (std::size_t j = 0; j < nv; ++j) {
      cost[plus_col[j]] = dir * (*lp.objective)[j];
      if (minus_col[j] != SIZE_MAX) cost[minus_col[j]] = -dir * (*lp.objective)[j];
    }
    if (!t.optimize(cost, allowed)) {
      result.status = LpStatus::unbounded;
      return result;
    }
  }

  std::vector<Rational> colval(total);
  for (std::size_t r = 0; r < t.rows(); ++r) colval[t.basis()[r]] = t.rhs(r);
  result.status = LpStatus::optimal;
  result.x.assign(nv, Rational(0));
  for (std::size_t j = 0; j < nv; ++j) {
    result.x[j] = colval[plus_col[j]];
    if (minus_col[j] != SIZE_MAX) result.x[j] -= colval[minus_col[j]];
  }
  if (lp.objective)
    for (std::size_t j = 0; j < nv; ++j) result.objective_value += (*lp.objective)[j] * result.x[j];
  return result;
}

// Convenience: true iff the constraint system has a solution.
inline bool lp_feasible(const LinearProgram& lp) {
  LinearProgram copy = lp;
  copy.objective.reset();
  return lp_solve(copy).status == LpStatus::optimal;
}

} // namespace ftalloc
