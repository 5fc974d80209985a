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

#ifndef DISC_CONSTRAINT_SET_HPP_
#define DISC_CONSTRAINT_SET_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "disc/shape.hpp"

namespace disc {

// Compile-time shape constraints. Two kinds:
//   - dimension-size equality: union-find over symbol ids and interned
//     constants. Unifying two distinct constants is a contradiction.
//   - tensor-size equality: canonical size-product keys (constants folded,
//     symbol representatives sorted) linked pairwise by recorded equalities
//     (reshape-style). Keys are recomputed lazily after unions since
//     representatives may change.
//
// Products of distinct symbols are equal only via recorded links, never by
// factoring; that incompleteness is accepted.
class ConstraintSet {
 public:
  ConstraintSet() = default;

  // Dimension-size equality ---------------------------------------------

  // Records dim a == dim b. `context` names the op for contradiction errors.
  void union_dims(const SymbolicDim& a, const SymbolicDim& b, const std::string& context);

  bool same_dim(const SymbolicDim& a, const SymbolicDim& b) const;

  // Constant value a symbol is proven equal to, if any.
  std::optional<int64_t> const_of(int sym_id) const;

  // Smallest symbol id in the class (the canonical representative when the
  // class carries no constant).
  int rep_of(int sym_id) const;

  // Canonical form of one dim: Const if the class carries a constant,
  // otherwise the representative symbol.
  SymbolicDim canonical(const SymbolicDim& d) const;

  bool same_dims(const ShapeVector& a, const ShapeVector& b) const;

  // Tensor-size equality -------------------------------------------------

  // Records numel(a) == numel(b) (e.g. reshape input/output).
  void link_size(const ShapeVector& a, const ShapeVector& b);

  bool same_size(const ShapeVector& a, const ShapeVector& b) const;

  // Canonical size-product key: "<const product>|s<rep>*..." ("0|" when any
  // dim is the constant zero).
  std::string size_key(const ShapeVector& a) const;

  // ----------------------------------------------------------------------

  // One line per dim class, then one line per size class.
  std::string dump() const;

  // Canonical partition fingerprint over the given symbol universe; equal
  // strings mean equal provable-equality structure.
  std::string partition_fingerprint(int num_symbols) const;

  int num_size_links() const { return static_cast<int>(size_links_.size()); }

 private:
  int node_of_sym(int sym_id);      // registers on demand (mutations only)
  int node_of_const(int64_t value); // interns on demand (mutations only)
  int find(int node) const;         // pure read: no path compression
  int find_and_compress(int node);

  // Union-find nodes, registered in first-touch order. The exposed
  // representative is the smallest symbol id in a class (tracked in
  // min_sym_), so touch order never leaks into results. Queries never
  // mutate: once construction finishes, the set is safe for concurrent
  // read-only use.
  std::vector<int> parent_;
  std::vector<int64_t> const_value_;  // per node: value or -1
  std::vector<int> min_sym_;
  std::map<int, int> sym_nodes_;
  std::map<int64_t, int> const_nodes_;

  std::vector<std::pair<ShapeVector, ShapeVector>> size_links_;

  // Union-find over canonical size keys, rebuilt eagerly after every
  // union/link (representatives may change).
  std::map<std::string, std::string> key_rep_;
  void rebuild_key_classes();
  std::string key_class(const std::string& key) const;
};

}  // namespace disc

#endif  // DISC_CONSTRAINT_SET_HPP_
