#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "treesolve/errors.hpp"

namespace treesolve {

/// Index of a sort within its Signature.
struct SortId {
  uint32_t index = UINT32_MAX;
  bool valid() const { return index != UINT32_MAX; }
  friend bool operator==(SortId a, SortId b) { return a.index == b.index; }
  friend bool operator!=(SortId a, SortId b) { return a.index != b.index; }
  friend bool operator<(SortId a, SortId b) { return a.index < b.index; }
};

/// Index of a generator within its Signature.
struct GenId {
  uint32_t index = UINT32_MAX;
  bool valid() const { return index != UINT32_MAX; }
  friend bool operator==(GenId a, GenId b) { return a.index == b.index; }
  friend bool operator!=(GenId a, GenId b) { return a.index != b.index; }
  friend bool operator<(GenId a, GenId b) { return a.index < b.index; }
};

struct Generator {
  std::string name;
  std::vector<SortId> arg_sorts;
  SortId result_sort;

  size_t arity() const { return arg_sorts.size(); }
};

/// A finitely generated multi-sorted signature: sorts plus generators.
/// Sorts and generators keep their declaration order; lookups are by name.
class Signature {
public:
  SortId add_sort(const std::string& name);
  GenId add_generator(const std::string& name,
                      const std::vector<SortId>& arg_sorts, SortId result);

  size_t sort_count() const { return sort_names_.size(); }
  size_t generator_count() const { return generators_.size(); }

  const std::string& sort_name(SortId s) const {
    return sort_names_.at(s.index);
  }
  const Generator& generator(GenId g) const {
    return generators_.at(g.index);
  }
  /// Generators producing sort s, in declaration order.
  const std::vector<GenId>& generators_of(SortId s) const {
    return by_result_.at(s.index);
  }

  std::optional<SortId> find_sort(const std::string& name) const;
  std::optional<GenId> find_generator(const std::string& name) const;

  /// Checks that every sort has at least two generators and that all
  /// argument sorts are declared. Throws SignatureError otherwise.
  void validate() const;

private:
  std::vector<std::string> sort_names_;
  std::vector<Generator> generators_;
  std::vector<std::vector<GenId>> by_result_;
};

/// Set of sorts, indexed by SortId.
class SortSet {
public:
  SortSet() = default;
  explicit SortSet(size_t n) : bits_(n, false) {}

  bool contains(SortId s) const {
    return s.index < bits_.size() && bits_[s.index];
  }
  void insert(SortId s) { grow(s), bits_[s.index] = true; }
  void erase(SortId s) { grow(s), bits_[s.index] = false; }
  size_t count() const;
  std::vector<SortId> members() const;

  friend bool operator==(const SortSet& a, const SortSet& b) {
    return a.members() == b.members();
  }

private:
  void grow(SortId s) {
    if (s.index >= bits_.size()) bits_.resize(s.index + 1, false);
  }
  std::vector<bool> bits_;
};

} // namespace treesolve
