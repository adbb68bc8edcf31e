#pragma once

// Seeded generator of small closed programs for property tests. Programs may
// get stuck or loop; callers bound exploration.

#include <random>
#include <string>
#include <vector>

namespace pceks::testing {

class ProgramGen {
 public:
  explicit ProgramGen(std::uint32_t seed) : rng_(seed) {}

  std::string program(int depth = 3) {
    fresh_ = 0;
    std::vector<std::string> scope;
    return expr(depth, scope);
  }

 private:
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  std::string fresh() { return "v" + std::to_string(fresh_++); }

  std::string expr(int depth, std::vector<std::string>& scope) {
    int choice = depth <= 0 ? 2 + pick(2) : pick(4);
    if (choice == 0) {
      std::string v = fresh();
      std::string binding = cexp(depth - 1, scope);
      scope.push_back(v);
      std::string body = expr(depth - 1, scope);
      scope.pop_back();
      return "(let ((" + v + " " + binding + ")) " + body + ")";
    }
    if (choice == 1 || choice == 2) return cexp(depth - 1, scope);
    return aexp(depth - 1, scope);
  }

  std::string cexp(int depth, std::vector<std::string>& scope) {
    switch (pick(depth <= 0 ? 2 : 8)) {
      case 0: return "(" + lambda(depth, scope, 1) + " " + aexp(depth, scope) + ")";
      case 1: {
        std::string f = scope.empty() ? lambda(depth, scope, 1) : scope[pick(static_cast<int>(scope.size()))];
        return "(" + f + " " + aexp(depth, scope) + ")";
      }
      case 2: return "(callcc " + lambda(depth, scope, 1) + ")";
      case 3:
        if (!scope.empty())
          return "(set! " + scope[pick(static_cast<int>(scope.size()))] + " " + aexp(depth, scope) + ")";
        return "(spawn " + expr(depth, scope) + ")";
      case 4: return "(if " + aexp(depth, scope) + " " + cexp(depth - 1, scope) + " " + cexp(depth - 1, scope) + ")";
      case 5:
        if (!scope.empty())
          return "(cas " + scope[pick(static_cast<int>(scope.size()))] + " " + aexp(depth, scope) + " " +
                 aexp(depth, scope) + ")";
        return "(join " + aexp(depth, scope) + ")";
      case 6: return "(spawn " + expr(depth, scope) + ")";
      default: return "(join " + aexp(depth, scope) + ")";
    }
  }

  std::string lambda(int depth, std::vector<std::string>& scope, int arity) {
    std::string params;
    std::size_t mark = scope.size();
    for (int i = 0; i < arity; ++i) {
      std::string v = fresh();
      params += (i ? " " : "") + v;
      scope.push_back(v);
    }
    std::string body = expr(depth, scope);
    scope.resize(mark);
    return "(lambda (" + params + ") " + body + ")";
  }

  std::string aexp(int depth, std::vector<std::string>& scope) {
    switch (pick(depth <= 0 ? 3 : 4)) {
      case 0:
        if (!scope.empty()) return scope[pick(static_cast<int>(scope.size()))];
        return std::to_string(pick(3));
      case 1: return std::to_string(pick(3) - 1);
      case 2: return pick(2) ? "#t" : "#f";
      default: return lambda(depth - 1, scope, 1 + pick(2));
    }
  }

  std::mt19937 rng_;
  int fresh_ = 0;
};

}  // namespace pceks::testing
