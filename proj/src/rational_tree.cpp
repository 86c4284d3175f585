#include "treesolve/rational_tree.hpp"

#include <map>
#include <set>

#include "treesolve/errors.hpp"

namespace treesolve {

bool rational_tree_equal(const RationalTree& a, const RationalTree& b) {
  std::set<std::pair<uint32_t, uint32_t>> seen;
  std::vector<std::pair<uint32_t, uint32_t>> work{{a.root, b.root}};
  while (!work.empty()) {
    auto [x, y] = work.back();
    work.pop_back();
    if (!seen.insert({x, y}).second) continue;
    const auto& nx = a.nodes[x];
    const auto& ny = b.nodes[y];
    if (nx.gen != ny.gen) return false;
    for (size_t i = 0; i < nx.children.size(); ++i)
      work.push_back({nx.children[i], ny.children[i]});
  }
  return true;
}

bool is_finite_tree(const RationalTree& a) {
  // Iterative DFS with colors: 0 unvisited, 1 on stack, 2 done.
  std::vector<int> color(a.nodes.size(), 0);
  std::vector<std::pair<uint32_t, size_t>> stack{{a.root, 0}};
  color[a.root] = 1;
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    const auto& ch = a.nodes[node].children;
    if (next == ch.size()) {
      color[node] = 2;
      stack.pop_back();
      continue;
    }
    uint32_t c = ch[next++];
    if (color[c] == 1) return false;
    if (color[c] == 0) {
      color[c] = 1;
      stack.emplace_back(c, 0);
    }
  }
  return true;
}

namespace {

uint32_t build_nodes(const Term& t, const Signature& sig,
                     const SortAnalysis* analysis,
                     std::map<std::string, uint32_t>& uvar_nodes,
                     RationalTree& out) {
  if (t.is_variable()) {
    const Var& v = t.var();
    auto it = uvar_nodes.find(v.name);
    if (it != uvar_nodes.end()) return it->second;
    if (!analysis)
      throw SortError("cannot build a tree from open term (variable '" +
                      v.name + "')");
    const auto& eqs = analysis->unique_tree_eqs[v.sort.index];
    if (eqs.empty())
      throw SortError("variable '" + v.name +
                      "' has no unique-tree equation to resolve it");
    // Allocate one node per u variable of the equation set, then wire them.
    uint32_t first = UINT32_MAX;
    for (const auto& e : eqs) {
      if (uvar_nodes.count(e.lhs.name)) continue;
      uint32_t id = static_cast<uint32_t>(out.nodes.size());
      out.nodes.push_back({e.gen, {}});
      uvar_nodes[e.lhs.name] = id;
      if (e.lhs.name == v.name) first = id;
    }
    for (const auto& e : eqs)
      out.nodes[uvar_nodes[e.lhs.name]].children = {uvar_nodes[e.arg.name]};
    if (first == UINT32_MAX) first = uvar_nodes.at(v.name);
    return first;
  }
  if (t.is_selector())
    throw SortError("cannot build a tree from a selector application");
  uint32_t id = static_cast<uint32_t>(out.nodes.size());
  out.nodes.push_back({t.gen(), {}});
  for (const Term& a : t.args()) {
    // The recursive call may reallocate out.nodes; index afterwards.
    uint32_t child = build_nodes(a, sig, analysis, uvar_nodes, out);
    out.nodes[id].children.push_back(child);
  }
  return id;
}

} // namespace

RationalTree tree_from_term(const Term& t, const Signature& sig) {
  RationalTree out;
  std::map<std::string, uint32_t> uvars;
  out.root = build_nodes(t, sig, nullptr, uvars, out);
  return out;
}

RationalTree tree_from_term(const Term& t, const Signature& sig,
                            const SortAnalysis& analysis) {
  RationalTree out;
  std::map<std::string, uint32_t> uvars;
  out.root = build_nodes(t, sig, &analysis, uvars, out);
  return out;
}

std::vector<RationalTree> enumerate_domain(const Signature& sig,
                                           const SortAnalysis& analysis,
                                           SortId sort) {
  if (!analysis.finite_domain(sort))
    throw InfiniteDomainError("sort '" + sig.sort_name(sort) +
                              "' has infinitely many trees");
  std::vector<RationalTree> out;
  for (const Term& t : analysis.fin_inhabitants[sort.index])
    out.push_back(tree_from_term(t, sig));
  for (const Term& t : analysis.infin_inhabitants[sort.index])
    out.push_back(tree_from_term(t, sig, analysis));
  return out;
}

namespace {

void render(const RationalTree& a, uint32_t node, const Signature& sig,
            std::map<uint32_t, std::string>& open, int& counter,
            std::string& out) {
  auto it = open.find(node);
  if (it != open.end()) {
    if (it->second.empty()) it->second = "%" + std::to_string(counter++);
    out += it->second;
    return;
  }
  open[node] = "";
  const auto& n = a.nodes[node];
  std::string body;
  const std::string& name = sig.generator(n.gen).name;
  if (n.children.empty()) {
    body = name;
  } else {
    body = "(" + name;
    for (uint32_t c : n.children) {
      body += " ";
      render(a, c, sig, open, counter, body);
    }
    body += ")";
  }
  if (!open[node].empty()) body = "(mu " + open[node] + " " + body + ")";
  open.erase(node);
  out += body;
}

} // namespace

std::string to_string(const RationalTree& a, const Signature& sig) {
  std::map<uint32_t, std::string> open;
  int counter = 0;
  std::string out;
  render(a, a.root, sig, open, counter, out);
  return out;
}

} // namespace treesolve
