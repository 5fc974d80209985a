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

#include "disc/fusion.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "disc/error.hpp"
#include "disc/shape_analysis.hpp"

namespace disc {

uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string digest_hex(const std::string& s) {
  uint64_t h = fnv1a64(s);
  char buf[17];
  snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool is_fusible_kind(DhloOpKind k) {
  return is_elementwise_binary(k) || is_elementwise_unary(k) || is_reduce(k) ||
         k == DhloOpKind::kDynamicBroadcastInDim || k == DhloOpKind::kDynamicSlice;
}

namespace {

struct GraphIndex {
  const DhloGraph& g;
  std::map<std::string, int> op_index;          // op id -> position
  std::vector<std::vector<int>> value_users;    // op index -> consumer op indices
  std::vector<std::vector<int>> value_defs;     // op index -> producer op indices

  explicit GraphIndex(const DhloGraph& graph) : g(graph) {
    for (size_t i = 0; i < g.ops.size(); ++i) op_index[g.ops[i].id] = static_cast<int>(i);
    value_users.resize(g.ops.size());
    value_defs.resize(g.ops.size());
    for (size_t i = 0; i < g.ops.size(); ++i) {
      for (const auto& arg : g.ops[i].inputs) {
        auto it = op_index.find(arg);
        if (it == op_index.end()) continue;
        value_defs[i].push_back(it->second);
        value_users[it->second].push_back(static_cast<int>(i));
      }
    }
  }
};

// Membership rules for a candidate set: at most one reduce; every non-reduce
// member same_size with the space (the reduce input for reduce-root groups);
// the post-reduce side is broadcasts of the reduce result plus at most one
// elementwise epilogue.
bool members_valid(const GraphIndex& gi, const ConstraintSet& cs, const std::set<int>& members) {
  const DhloGraph& g = gi.g;
  int reduce = -1;
  for (int m : members) {
    if (is_reduce(g.ops[m].kind)) {
      if (reduce >= 0) return false;
      reduce = m;
    }
  }
  ShapeVector space;
  if (reduce >= 0)
    space = g.value_shape(g.ops[reduce].inputs[0]);
  else
    space = g.ops[*members.begin()].shape;

  for (int m : members) {
    const DhloOp& op = g.ops[m];
    if (m == reduce) {
      if (!cs.same_size(g.value_shape(op.inputs[0]), space)) return false;
    } else if (!cs.same_size(op.shape, space)) {
      return false;
    }
  }

  if (reduce >= 0) {
    // Ops reachable from the reduce within the group.
    std::set<int> post;
    std::vector<int> work = {reduce};
    while (!work.empty()) {
      int cur = work.back();
      work.pop_back();
      for (int user : gi.value_users[cur]) {
        if (!members.count(user) || post.count(user)) continue;
        post.insert(user);
        work.push_back(user);
      }
    }
    int epilogue_count = 0;
    for (int p : post) {
      const DhloOp& op = g.ops[p];
      if (op.kind == DhloOpKind::kDynamicBroadcastInDim) {
        // Only broadcasts of the reduce result itself.
        if (op.inputs[0] != g.ops[reduce].id) return false;
      } else if (is_elementwise_binary(op.kind) || is_elementwise_unary(op.kind)) {
        if (++epilogue_count > 1) return false;
      } else {
        return false;  // no second reduce / slice after the root
      }
    }
  }
  return true;
}

// Convex: no dependency path between two members leaves and re-enters.
// Dependencies include index plumbing chains.
bool convex(const GraphIndex& gi, const std::set<int>& members) {
  int n = static_cast<int>(gi.g.ops.size());
  // forward[i]: i depends (transitively) on some member.
  std::vector<char> from_member(n, 0), to_member(n, 0);
  for (int i = 0; i < n; ++i) {
    if (members.count(i)) {
      from_member[i] = 1;
      continue;
    }
    for (int d : gi.value_defs[i])
      if (from_member[d]) {
        from_member[i] = 1;
        break;
      }
  }
  for (int i = n - 1; i >= 0; --i) {
    if (members.count(i)) {
      to_member[i] = 1;
      continue;
    }
    for (int u : gi.value_users[i])
      if (to_member[u]) {
        to_member[i] = 1;
        break;
      }
  }
  // A non-member that both depends on a member and feeds a member sits on a
  // path that leaves and re-enters the group.
  for (int i = 0; i < n; ++i)
    if (!members.count(i) && from_member[i] && to_member[i]) return false;
  return true;
}

}  // namespace

std::vector<FusionGroup> fuse(const DhloGraph& g, const ConstraintSet& cs) {
  GraphIndex gi(g);
  int n = static_cast<int>(g.ops.size());

  auto fusible = [&](int i) {
    return g.ops[i].etype == ElementType::kF32 && is_fusible_kind(g.ops[i].kind);
  };

  // Sibling adjacency: dynamic_slice ops reading the same data operand (the
  // lowered form of Split); injected constraints are what make these
  // mergeable.
  std::map<std::string, std::vector<int>> slices_by_source;
  for (int i = 0; i < n; ++i)
    if (g.ops[i].kind == DhloOpKind::kDynamicSlice && fusible(i))
      slices_by_source[g.ops[i].inputs[0]].push_back(i);

  auto neighbors = [&](const std::set<int>& members) {
    std::set<int> result;
    for (int m : members) {
      for (int d : gi.value_defs[m])
        if (fusible(d)) result.insert(d);
      for (int u : gi.value_users[m])
        if (fusible(u)) result.insert(u);
      if (g.ops[m].kind == DhloOpKind::kDynamicSlice) {
        auto it = slices_by_source.find(g.ops[m].inputs[0]);
        if (it != slices_by_source.end())
          for (int s : it->second) result.insert(s);
      }
    }
    for (int m : members) result.erase(m);
    return result;
  };

  std::vector<char> claimed(n, 0);
  std::vector<FusionGroup> groups;

  for (int seed = n - 1; seed >= 0; --seed) {
    if (claimed[seed] || !fusible(seed)) continue;
    std::set<int> members = {seed};
    bool grew = true;
    while (grew) {
      grew = false;
      std::set<int> cands = neighbors(members);
      for (int c : cands) {  // std::set iterates ascending: smallest index first
        if (claimed[c]) continue;
        std::set<int> trial = members;
        trial.insert(c);
        if (!members_valid(gi, cs, trial)) continue;
        if (!convex(gi, trial)) continue;
        members = std::move(trial);
        grew = true;
        break;
      }
    }

    FusionGroup group;
    group.id = static_cast<int>(groups.size());
    for (int m : members) {
      claimed[m] = 1;
      group.members.push_back(g.ops[m].id);
      if (is_reduce(g.ops[m].kind)) {
        group.root = RootKind::kReduceRoot;
        group.reduce_member = g.ops[m].id;
      }
    }

    std::set<std::string> member_ids(group.members.begin(), group.members.end());
    std::set<std::string> seen_inputs;
    for (int m : members) {
      const DhloOp& op = g.ops[m];
      // f32 data operands only; index operands resolve through registers.
      size_t data_args = op.kind == DhloOpKind::kDynamicSlice ? 1
                         : op.kind == DhloOpKind::kDynamicBroadcastInDim ? 1
                                                                         : op.inputs.size();
      for (size_t a = 0; a < data_args; ++a) {
        const std::string& arg = op.inputs[a];
        if (member_ids.count(arg) || seen_inputs.count(arg)) continue;
        seen_inputs.insert(arg);
        group.external_inputs.push_back(arg);
      }
    }
    for (int m : members) {
      const DhloOp& op = g.ops[m];
      bool external = false;
      for (int u : gi.value_users[m])
        if (!members.count(u) && g.ops[u].etype == ElementType::kF32 &&
            is_compute_op(g.ops[u].kind))
          external = true;
      for (const auto& out : g.outputs) external = external || out == op.id;
      if (external) group.external_outputs.push_back(op.id);
    }
    group.signature = pattern_signature(g, group.members);
    groups.push_back(std::move(group));
  }

  // Groups were discovered in reverse order; report them in schedule order.
  std::reverse(groups.begin(), groups.end());
  for (size_t i = 0; i < groups.size(); ++i) groups[i].id = static_cast<int>(i);
  return groups;
}

namespace {

void signature_for_op(std::ostringstream& os, const DhloOp& op,
                      const std::map<std::string, int>& member_ord,
                      std::map<std::string, int>& external_ord) {
  os << dhlo_kind_name(op.kind) << "/r" << op.shape.rank();
  if (!op.dims_attr.empty()) {
    os << "/a[";
    for (size_t i = 0; i < op.dims_attr.size(); ++i) os << (i ? "," : "") << op.dims_attr[i];
    os << "]";
  }
  if (op.kind == DhloOpKind::kConcat) os << "/x" << op.axis;
  if (op.kind == DhloOpKind::kExtractDim) os << "/i" << op.index;
  if (op.kind == DhloOpKind::kScalarArith) os << "/" << scalar_arith_name(op.arith);
  os << "(";
  for (size_t i = 0; i < op.inputs.size(); ++i) {
    if (i) os << ",";
    auto it = member_ord.find(op.inputs[i]);
    if (it != member_ord.end()) {
      os << "m" << it->second;
    } else {
      auto [pos, inserted] = external_ord.emplace(op.inputs[i],
                                                  static_cast<int>(external_ord.size()));
      os << "e" << pos->second;
    }
  }
  os << ");";
}

}  // namespace

std::string pattern_signature(const DhloGraph& g, const std::vector<std::string>& member_ids) {
  std::map<std::string, int> member_ord;
  for (size_t i = 0; i < member_ids.size(); ++i)
    member_ord[member_ids[i]] = static_cast<int>(i);
  std::map<std::string, int> external_ord;
  std::ostringstream os;
  for (const auto& id : member_ids) {
    const DhloOp* op = g.find_op(id);
    if (!op) throw InternalError("signature: unknown member " + id);
    signature_for_op(os, *op, member_ord, external_ord);
  }
  return os.str();
}

std::string whole_graph_signature(const DhloGraph& g) {
  std::vector<std::string> ids;
  ids.reserve(g.ops.size());
  for (const auto& op : g.ops) ids.push_back(op.id);
  std::ostringstream os;
  os << pattern_signature(g, ids);

  // Input ranks plus the symbol-sharing partition (symbol identity is
  // excluded, the sharing structure is not: it changes what is provable).
  std::map<int, int> sym_ord;
  os << "|inputs:";
  for (const auto& in : g.inputs) {
    os << "[";
    for (const auto& d : in.shape.dims) {
      if (d.is_const()) {
        os << "c" << d.size() << ",";
      } else {
        auto [pos, _] = sym_ord.emplace(d.sym_id(), static_cast<int>(sym_ord.size()));
        os << "p" << pos->second << ",";
      }
    }
    os << "]";
  }

  // Literal contents are semantics, not shapes.
  os << "|literals:";
  for (const auto& op : g.ops) {
    if (op.kind != DhloOpKind::kConstant) continue;
    std::ostringstream lit;
    lit << op.id << ":";
    for (int64_t d : op.literal.dims) lit << d << ",";
    lit << ":";
    if (op.literal.etype == ElementType::kF32)
      for (float f : op.literal.f32) lit << f << ",";
    else
      for (int64_t v : op.literal.i64) lit << v << ",";
    os << digest_hex(lit.str());
  }

  std::map<std::string, int> op_ord;
  for (size_t i = 0; i < g.ops.size(); ++i) op_ord[g.ops[i].id] = static_cast<int>(i);
  os << "|outputs:";
  for (const auto& out : g.outputs) {
    auto it = op_ord.find(out);
    if (it != op_ord.end())
      os << "m" << it->second << ",";
    else {
      for (size_t i = 0; i < g.inputs.size(); ++i)
        if (g.inputs[i].id == out) os << "in" << i << ",";
    }
  }
  return os.str();
}

std::vector<KernelSpec> specialize(const DhloGraph& g, const std::vector<FusionGroup>& groups,
                                   const ConstraintSet& cs) {
  (void)cs;
  std::vector<KernelSpec> specs;
  for (const auto& group : groups) {
    KernelSpec spec;
    spec.kernel_id = group.id;
    spec.group = group;

    bool has_broadcast = false;
    for (const auto& id : group.members)
      if (g.find_op(id)->kind == DhloOpKind::kDynamicBroadcastInDim) has_broadcast = true;

    int next = 0;
    KernelVersion vec;
    vec.id = next++;
    vec.vectorized4 = true;
    vec.guards = {GuardKind::kTotalDivisibleBy4};
    if (has_broadcast) vec.guards.insert(vec.guards.begin(), GuardKind::kBroadcastIdentity);
    spec.versions.push_back(vec);

    if (has_broadcast) {
      KernelVersion nb;
      nb.id = next++;
      nb.guards = {GuardKind::kBroadcastIdentity};
      spec.versions.push_back(nb);
    }

    KernelVersion scalar;
    scalar.id = next++;
    scalar.implicit_broadcast = has_broadcast;
    scalar.guards = {GuardKind::kAlways};
    spec.versions.push_back(scalar);

    specs.push_back(std::move(spec));
  }
  return specs;
}

}  // namespace disc
