#include "treesolve/term.hpp"

namespace treesolve {

Term Term::variable(Var v) {
  Term t;
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::Variable;
  n->var = std::move(v);
  t.node_ = std::move(n);
  return t;
}

Term Term::app(GenId g, std::vector<Term> args) {
  Term t;
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::App;
  n->gen = g;
  n->args = std::move(args);
  t.node_ = std::move(n);
  return t;
}

Term Term::selector(std::string name, SortId result, Term arg) {
  Term t;
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::SelApp;
  n->sel_name = std::move(name);
  n->sel_sort = result;
  n->args.push_back(std::move(arg));
  t.node_ = std::move(n);
  return t;
}

SortId Term::sort(const Signature& sig) const {
  switch (node_->kind) {
    case TermKind::Variable: return node_->var.sort;
    case TermKind::App: return sig.generator(node_->gen).result_sort;
    case TermKind::SelApp: return node_->sel_sort;
  }
  return SortId{};
}

bool Term::equal(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  if (a.node_->kind != b.node_->kind) return false;
  switch (a.node_->kind) {
    case TermKind::Variable: return a.node_->var == b.node_->var;
    case TermKind::App:
      if (a.node_->gen != b.node_->gen) return false;
      break;
    case TermKind::SelApp:
      if (a.node_->sel_name != b.node_->sel_name) return false;
      break;
  }
  if (a.node_->args.size() != b.node_->args.size()) return false;
  for (size_t i = 0; i < a.node_->args.size(); ++i)
    if (!equal(a.node_->args[i], b.node_->args[i])) return false;
  return true;
}

void collect_variables(const Term& t, std::vector<Var>& out) {
  if (t.is_variable()) {
    out.push_back(t.var());
    return;
  }
  for (const Term& a : t.args()) collect_variables(a, out);
}

bool selector_free(const Term& t) {
  if (t.is_selector()) return false;
  if (t.is_variable()) return true;
  for (const Term& a : t.args())
    if (!selector_free(a)) return false;
  return true;
}

Term substitute(const Term& t, const Var& v, const Term& r) {
  if (t.is_variable()) return t.var() == v ? r : t;
  std::vector<Term> args;
  args.reserve(t.args().size());
  bool changed = false;
  for (const Term& a : t.args()) {
    Term sub = substitute(a, v, r);
    changed = changed || sub != a;
    args.push_back(std::move(sub));
  }
  if (!changed) return t;
  if (t.is_selector()) return Term::selector(t.sel_name(), t.sel_sort(), args[0]);
  return Term::app(t.gen(), std::move(args));
}

std::string to_string(const Term& t, const Signature& sig) {
  if (t.is_variable()) return t.var().name;
  std::string head = t.is_selector() ? t.sel_name() : sig.generator(t.gen()).name;
  if (t.args().empty()) return head;
  std::string out = "(" + head;
  for (const Term& a : t.args()) out += " " + to_string(a, sig);
  return out + ")";
}

} // namespace treesolve
