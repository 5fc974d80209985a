/* Copyright 2026 The DISC Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "disc/constraint_set.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <sstream>

#include "disc/error.hpp"

namespace disc {

namespace {
constexpr int kNoSym = std::numeric_limits<int>::max();
}

int ConstraintSet::node_of_sym(int sym_id) {
  if (sym_id < 0) throw InternalError("negative symbol id");
  auto it = sym_nodes_.find(sym_id);
  if (it != sym_nodes_.end()) return it->second;
  int node = static_cast<int>(parent_.size());
  parent_.push_back(node);
  const_value_.push_back(-1);
  min_sym_.push_back(sym_id);
  sym_nodes_.emplace(sym_id, node);
  return node;
}

int ConstraintSet::node_of_const(int64_t value) {
  auto it = const_nodes_.find(value);
  if (it != const_nodes_.end()) return it->second;
  int node = static_cast<int>(parent_.size());
  parent_.push_back(node);
  const_value_.push_back(value);
  min_sym_.push_back(kNoSym);
  const_nodes_.emplace(value, node);
  return node;
}

int ConstraintSet::find(int node) const {
  while (parent_[node] != node) node = parent_[node];
  return node;
}

int ConstraintSet::find_and_compress(int node) {
  int root = node;
  while (parent_[root] != root) root = parent_[root];
  while (parent_[node] != root) {
    int next = parent_[node];
    parent_[node] = root;
    node = next;
  }
  return root;
}

void ConstraintSet::union_dims(const SymbolicDim& a, const SymbolicDim& b,
                               const std::string& context) {
  int na = a.is_sym() ? node_of_sym(a.sym_id()) : node_of_const(a.size());
  int nb = b.is_sym() ? node_of_sym(b.sym_id()) : node_of_const(b.size());
  int ra = find_and_compress(na), rb = find_and_compress(nb);
  if (ra == rb) return;
  bool ca = const_value_[ra] >= 0, cb = const_value_[rb] >= 0;
  if (ca && cb) {
    throw CompileError("contradiction at " + context + ": " +
                       std::to_string(const_value_[ra]) + " != " +
                       std::to_string(const_value_[rb]));
  }
  // Constant roots win so the class keeps its value; the canonical
  // representative exposed to callers is the smallest symbol id, tracked
  // separately, so root choice never leaks into results.
  int root = ca ? ra : cb ? rb : std::min(ra, rb);
  int child = root == ra ? rb : ra;
  parent_[child] = root;
  min_sym_[root] = std::min(min_sym_[root], min_sym_[child]);
  rebuild_key_classes();
}

std::optional<int64_t> ConstraintSet::const_of(int sym_id) const {
  auto it = sym_nodes_.find(sym_id);
  if (it == sym_nodes_.end()) return std::nullopt;
  int r = find(it->second);
  if (const_value_[r] >= 0) return const_value_[r];
  return std::nullopt;
}

int ConstraintSet::rep_of(int sym_id) const {
  auto it = sym_nodes_.find(sym_id);
  if (it == sym_nodes_.end()) return sym_id;
  return min_sym_[find(it->second)];
}

SymbolicDim ConstraintSet::canonical(const SymbolicDim& d) const {
  if (d.is_const()) return d;
  if (auto c = const_of(d.sym_id())) return SymbolicDim::Const(*c);
  return SymbolicDim::Sym(rep_of(d.sym_id()));
}

bool ConstraintSet::same_dim(const SymbolicDim& a, const SymbolicDim& b) const {
  return canonical(a) == canonical(b);
}

bool ConstraintSet::same_dims(const ShapeVector& a, const ShapeVector& b) const {
  if (a.rank() != b.rank()) return false;
  for (int i = 0; i < a.rank(); ++i)
    if (!same_dim(a.dims[i], b.dims[i])) return false;
  return true;
}

std::string ConstraintSet::size_key(const ShapeVector& a) const {
  int64_t const_prod = 1;
  std::vector<int> reps;
  for (const auto& d : a.dims) {
    SymbolicDim c = canonical(d);
    if (c.is_const()) {
      if (c.size() == 0) return "0|";
      const_prod *= c.size();
    } else {
      reps.push_back(c.sym_id());
    }
  }
  std::sort(reps.begin(), reps.end());
  std::ostringstream os;
  os << const_prod << "|";
  for (int r : reps) os << "s" << r << "*";
  return os.str();
}

void ConstraintSet::link_size(const ShapeVector& a, const ShapeVector& b) {
  size_links_.emplace_back(a, b);
  rebuild_key_classes();
}

void ConstraintSet::rebuild_key_classes() {
  key_rep_.clear();
  std::map<std::string, std::string> parent;
  auto find_key = [&](std::string k) {
    while (true) {
      auto it = parent.find(k);
      if (it == parent.end() || it->second == k) return k;
      k = it->second;
    }
  };
  for (const auto& [a, b] : size_links_) {
    std::string ka = find_key(size_key(a));
    std::string kb = find_key(size_key(b));
    if (ka == kb) continue;
    std::string root = std::min(ka, kb);
    std::string child = ka == root ? kb : ka;
    parent[child] = root;
    parent.try_emplace(root, root);
  }
  for (const auto& [k, _] : parent) key_rep_[k] = find_key(k);
}

std::string ConstraintSet::key_class(const std::string& key) const {
  auto it = key_rep_.find(key);
  return it == key_rep_.end() ? key : it->second;
}

bool ConstraintSet::same_size(const ShapeVector& a, const ShapeVector& b) const {
  std::string ka = size_key(a), kb = size_key(b);
  if (ka == kb) return true;
  return key_class(ka) == key_class(kb);
}

std::string ConstraintSet::dump() const {
  std::ostringstream os;
  std::map<int, std::vector<std::string>> classes;
  for (const auto& [sym, node] : sym_nodes_)
    classes[find(node)].push_back("s" + std::to_string(sym));
  for (const auto& [value, node] : const_nodes_)
    classes[find(node)].push_back(std::to_string(value));
  std::vector<std::vector<std::string>> rows;
  for (auto& [root, members] : classes) {
    if (members.size() < 2) continue;
    std::sort(members.begin(), members.end());
    rows.push_back(members);
  }
  std::sort(rows.begin(), rows.end());
  for (const auto& members : rows) {
    os << "dims:";
    for (const auto& m : members) os << " " << m;
    os << "\n";
  }
  std::map<std::string, std::set<std::string>> size_classes;
  for (const auto& [a, b] : size_links_) {
    std::string ka = size_key(a), kb = size_key(b);
    std::string root = key_class(ka);
    size_classes[root].insert(ka);
    size_classes[root].insert(kb);
  }
  for (const auto& [root, keys] : size_classes) {
    os << "size:";
    for (const auto& k : keys) os << " {" << k << "}";
    os << "\n";
  }
  return os.str();
}

std::string ConstraintSet::partition_fingerprint(int num_symbols) const {
  std::ostringstream os;
  for (int s = 0; s < num_symbols; ++s) {
    if (auto c = const_of(s))
      os << "s" << s << "=" << *c << ";";
    else
      os << "s" << s << "=s" << rep_of(s) << ";";
  }
  std::map<std::string, std::set<std::string>> groups;
  for (const auto& [a, b] : size_links_) {
    std::string ka = size_key(a), kb = size_key(b);
    groups[key_class(ka)].insert(ka);
    groups[key_class(ka)].insert(kb);
  }
  for (const auto& [root, keys] : groups) {
    os << "|";
    for (const auto& k : keys) os << k << "~";
  }
  return os.str();
}

}  // namespace disc
