#include "treesolve/signature.hpp"

#include <unordered_map>
#include <unordered_set>

namespace treesolve {

SortId Signature::add_sort(const std::string& name) {
  if (find_sort(name))
    throw SignatureError("duplicate sort '" + name + "'");
  SortId id{static_cast<uint32_t>(sort_names_.size())};
  sort_names_.push_back(name);
  by_result_.emplace_back();
  return id;
}

GenId Signature::add_generator(const std::string& name,
                               const std::vector<SortId>& arg_sorts,
                               SortId result) {
  if (find_generator(name))
    throw SignatureError("duplicate generator '" + name + "'");
  if (!result.valid() || result.index >= sort_names_.size())
    throw SignatureError("generator '" + name + "' has unknown result sort");
  for (SortId a : arg_sorts)
    if (!a.valid() || a.index >= sort_names_.size())
      throw SignatureError("generator '" + name + "' has unknown argument sort");
  GenId id{static_cast<uint32_t>(generators_.size())};
  generators_.push_back(Generator{name, arg_sorts, result});
  by_result_[result.index].push_back(id);
  return id;
}

std::optional<SortId> Signature::find_sort(const std::string& name) const {
  for (uint32_t i = 0; i < sort_names_.size(); ++i)
    if (sort_names_[i] == name) return SortId{i};
  return std::nullopt;
}

std::optional<GenId> Signature::find_generator(const std::string& name) const {
  for (uint32_t i = 0; i < generators_.size(); ++i)
    if (generators_[i].name == name) return GenId{i};
  return std::nullopt;
}

void Signature::validate() const {
  if (sort_names_.empty()) throw SignatureError("signature declares no sorts");
  for (uint32_t i = 0; i < sort_names_.size(); ++i) {
    size_t n = by_result_[i].size();
    if (n == 0)
      throw SignatureError("sort '" + sort_names_[i] +
                           "' has no generators; every sort needs at least two");
    if (n == 1)
      throw SignatureError(
          "sort '" + sort_names_[i] + "' has a single generator '" +
          generators_[by_result_[i][0].index].name +
          "'; sorts with exactly one generator are not supported");
  }
}

size_t SortSet::count() const {
  size_t n = 0;
  for (bool b : bits_) n += b;
  return n;
}

std::vector<SortId> SortSet::members() const {
  std::vector<SortId> out;
  for (uint32_t i = 0; i < bits_.size(); ++i)
    if (bits_[i]) out.push_back(SortId{i});
  return out;
}

} // namespace treesolve
