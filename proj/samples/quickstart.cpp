// Solve a small instance, then compare against the uniform split and the
// exact optimum.

#include <iostream>

#include "ftalloc/ftalloc.hpp"

int main() {
  using namespace ftalloc;
  std::vector<Rational> p = {parse_rational("9/10"), parse_rational("9/10"), parse_rational("9/10"),
                             parse_rational("9/10"), parse_rational("9/10")};
  Rational theta = parse_rational("5/12");

  SolverConfig cfg;
  cfg.seed = 1;
  auto rep = solve(p, theta, parse_rational("1/20"), parse_rational("1/20"), cfg);
  std::cout << "solver    " << rep.provenance << "  Obj = " << to_string(*rep.exact_input) << '\n';

  auto base = uniform_split_baseline(p, theta);
  std::cout << "uniform   k=" << base.best_k << "  Obj = " << to_string(base.value) << '\n';

  auto opt = brute_force_optimum(p, theta);
  std::cout << "optimum   Obj = " << to_string(opt.opt_value) << '\n';
  return *rep.exact_input > base.value ? 0 : 1;
}
