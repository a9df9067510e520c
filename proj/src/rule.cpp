#include <algorithm>
#include <deque>
#include <functional>

#include "solar/rule.hpp"

namespace solar {

bool same_structure(const Rule& a, const Rule& b) { return a.head == b.head && a.body == b.body; }

std::set<std::string> RuleVariables::all() const {
  std::set<std::string> out = head;
  out.insert(positive.begin(), positive.end());
  out.insert(negated.begin(), negated.end());
  out.insert(compared.begin(), compared.end());
  return out;
}

namespace {

void add_vars(const Term& t, std::set<std::string>& into) {
  if (auto v = std::get_if<Variable>(&t)) into.insert(v->name);
}

void add_vars(const Atom& a, std::set<std::string>& into) {
  for (const auto& t : a.terms) add_vars(t, into);
}

}  // namespace

RuleVariables collect_variables(const Rule& rule) {
  RuleVariables vars;
  add_vars(rule.head, vars.head);
  for (const auto& lit : rule.body) {
    if (auto a = std::get_if<Atom>(&lit)) {
      add_vars(*a, vars.positive);
    } else if (auto n = std::get_if<Negation>(&lit)) {
      add_vars(n->atom, vars.negated);
    } else {
      const auto& c = std::get<Comparison>(lit);
      add_vars(c.lhs, vars.compared);
      add_vars(c.rhs, vars.compared);
    }
  }
  return vars;
}

bool is_safe(const Rule& rule) {
  auto vars = collect_variables(rule);
  auto covered = [&](const std::set<std::string>& s) {
    return std::includes(vars.positive.begin(), vars.positive.end(), s.begin(), s.end());
  };
  return !rule.body.empty() && covered(vars.head) && covered(vars.negated) && covered(vars.compared);
}

StratificationError::StratificationError(std::vector<std::string> cycle)
    : Error(ErrorCode::NotStratifiable,
            [&] {
              std::string msg = "cycle through negation:";
              for (const auto& p : cycle) msg += " " + p;
              return msg;
            }()),
      cycle_(std::move(cycle)) {}

int Stratification::level_of(const std::string& predicate) const {
  auto it = level.find(predicate);
  return it == level.end() ? 0 : it->second;
}

Stratification stratify(const std::vector<Rule>& rules) {
  // Node ids in sorted predicate order keep the result deterministic.
  std::set<std::string> names;
  for (const auto& r : rules) {
    names.insert(r.head.predicate);
    for (const auto& lit : r.body) {
      if (auto a = std::get_if<Atom>(&lit)) names.insert(a->predicate);
      if (auto n = std::get_if<Negation>(&lit)) names.insert(n->atom.predicate);
    }
  }
  std::vector<std::string> preds(names.begin(), names.end());
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < preds.size(); ++i) index[preds[i]] = static_cast<int>(i);

  struct Edge {
    int to;
    bool negative;
  };
  std::vector<std::vector<Edge>> edges(preds.size());
  for (const auto& r : rules) {
    int head = index[r.head.predicate];
    for (const auto& lit : r.body) {
      if (auto a = std::get_if<Atom>(&lit)) edges[head].push_back({index[a->predicate], false});
      if (auto n = std::get_if<Negation>(&lit)) edges[head].push_back({index[n->atom.predicate], true});
    }
  }

  // Tarjan; components are emitted dependencies-first.
  const int n = static_cast<int>(preds.size());
  std::vector<int> order(n, -1), low(n, 0), comp(n, -1);
  std::vector<bool> on_stack(n, false);
  std::vector<int> stack;
  std::vector<std::vector<int>> components;
  int counter = 0;
  std::function<void(int)> visit = [&](int v) {
    order[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (const auto& e : edges[v]) {
      if (order[e.to] < 0) {
        visit(e.to);
        low[v] = std::min(low[v], low[e.to]);
      } else if (on_stack[e.to]) {
        low[v] = std::min(low[v], order[e.to]);
      }
    }
    if (low[v] == order[v]) {
      std::vector<int> members;
      int w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp[w] = static_cast<int>(components.size());
        members.push_back(w);
      } while (w != v);
      components.push_back(std::move(members));
    }
  };
  for (int v = 0; v < n; ++v)
    if (order[v] < 0) visit(v);

  // A negative edge inside a component closes a cycle through negation.
  for (int v = 0; v < n; ++v) {
    for (const auto& e : edges[v]) {
      if (!e.negative || comp[e.to] != comp[v]) continue;
      // Shortest path e.to -> v inside the component.
      std::vector<int> parent(n, -1);
      std::deque<int> queue{e.to};
      parent[e.to] = e.to;
      while (!queue.empty() && parent[v] < 0) {
        int u = queue.front();
        queue.pop_front();
        for (const auto& f : edges[u]) {
          if (comp[f.to] == comp[v] && parent[f.to] < 0) {
            parent[f.to] = u;
            queue.push_back(f.to);
          }
        }
      }
      std::vector<std::string> path;
      for (int u = v; u != e.to; u = parent[u]) path.push_back(preds[u]);
      path.push_back(preds[e.to]);
      std::reverse(path.begin(), path.end());
      std::vector<std::string> cycle{preds[v]};
      cycle.insert(cycle.end(), path.begin(), path.end());
      throw StratificationError(std::move(cycle));
    }
  }

  std::vector<int> comp_level(components.size(), 0);
  for (std::size_t c = 0; c < components.size(); ++c) {
    int level = 0;
    for (int v : components[c]) {
      for (const auto& e : edges[v]) {
        if (comp[e.to] == static_cast<int>(c)) continue;
        level = std::max(level, comp_level[comp[e.to]] + (e.negative ? 1 : 0));
      }
    }
    comp_level[c] = level;
  }

  Stratification result;
  int top = -1;
  for (int v = 0; v < n; ++v) {
    int level = comp_level[comp[v]];
    result.level[preds[v]] = level;
    top = std::max(top, level);
  }
  result.strata.resize(static_cast<std::size_t>(top + 1));
  for (int v = 0; v < n; ++v) result.strata[comp_level[comp[v]]].push_back(preds[v]);
  return result;
}

}  // namespace solar
