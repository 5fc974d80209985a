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

#ifndef DISC_FUSION_HPP_
#define DISC_FUSION_HPP_

#include <string>
#include <vector>

#include "disc/constraint_set.hpp"
#include "disc/dhlo.hpp"

namespace disc {

enum class RootKind { kElementwiseLoop, kReduceRoot };

// A connected, convex set of memory-intensive ops compiled into one kernel.
// matmul, concat and index plumbing are never members; compute-intensive ops
// go through library calls instead.
struct FusionGroup {
  int id{0};
  std::vector<std::string> members;  // op ids in topological order
  RootKind root{RootKind::kElementwiseLoop};
  std::string reduce_member;                   // reduce-root groups
  std::vector<std::string> external_inputs;    // f32 values read from outside
  std::vector<std::string> external_outputs;   // member results visible outside
  std::string signature;                       // shape-agnostic pattern key
};

// Shape-agnostic pattern key: topology, op kinds, ranks and integer attrs;
// deliberately excludes every concrete dim value and every symbol id.
std::string pattern_signature(const DhloGraph& g, const std::vector<std::string>& member_ids);

// Whole-graph key for the plan cache. Adds what soundness requires beyond
// the pattern: constant literal contents, the symbol-sharing partition of
// graph-input dims, and the output list.
std::string whole_graph_signature(const DhloGraph& g);

uint64_t fnv1a64(const std::string& s);
std::string digest_hex(const std::string& s);

// True for kinds that may join a fusion group (elementwise, unary, reduce,
// broadcast, slice over f32 data).
bool is_fusible_kind(DhloOpKind k);

// Greedy growth over reverse-topological order; absorbs a neighbor iff the
// op-class table permits it, same_size is proven via the constraint set, and
// the group stays convex. Smallest-topological-index candidate first. Every
// fusible op lands in exactly one group (singletons allowed).
std::vector<FusionGroup> fuse(const DhloGraph& g, const ConstraintSet& cs);

// Kernel versions with runtime selection. Guards are ordered; the effective
// guard of a version conjoins the negation of all earlier ones, so exactly
// one version matches any concrete shape and the last (scalar) catches all.
enum class GuardKind {
  kTotalDivisibleBy4,   // group element count % 4 == 0
  kBroadcastIdentity,   // every broadcast member is a no-op at runtime
  kAlways,
};

struct KernelVersion {
  int id{0};
  bool vectorized4{false};
  bool implicit_broadcast{false};
  std::vector<GuardKind> guards;  // conjunction; empty means always
};

struct KernelSpec {
  int kernel_id{0};
  FusionGroup group;
  std::vector<KernelVersion> versions;  // ordered, last is scalar catch-all
  // Launch config rule: tile from {256, 1024} by total-elements threshold
  // (>= 2^16 selects 1024).
  static int64_t tile_for(int64_t total) { return total >= (int64_t{1} << 16) ? 1024 : 256; }
};

std::vector<KernelSpec> specialize(const DhloGraph& g, const std::vector<FusionGroup>& groups,
                                   const ConstraintSet& cs);

}  // namespace disc

#endif  // DISC_FUSION_HPP_
