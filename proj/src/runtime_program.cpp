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

#include "disc/runtime_program.hpp"

#include <json.hpp>
#include <set>

#include "disc/error.hpp"

namespace disc {

using nlohmann::json;

const char* instr_kind_name(InstrKind k) {
  switch (k) {
    case InstrKind::kBindInput: return "bind_input";
    case InstrKind::kEvalShape: return "eval_shape";
    case InstrKind::kAlloc: return "alloc";
    case InstrKind::kDealloc: return "dealloc";
    case InstrKind::kAlias: return "alias";
    case InstrKind::kSelectVersion: return "select_version";
    case InstrKind::kComputeLaunch: return "compute_launch";
    case InstrKind::kLaunch: return "launch";
    case InstrKind::kLibraryCall: return "library_call";
    case InstrKind::kBindOutput: return "bind_output";
  }
  return "?";
}

namespace {

json ref_to_json(const ScalarRef& r) {
  if (r.is_const) return json{{"c", r.value}};
  return json{{"r", r.reg}};
}

ScalarRef ref_from_json(const json& j) {
  if (j.contains("c")) return ScalarRef::Const(j["c"].get<int64_t>());
  return ScalarRef::Reg(j["r"].get<int>());
}

json refs_to_json(const std::vector<ScalarRef>& refs) {
  json a = json::array();
  for (const auto& r : refs) a.push_back(ref_to_json(r));
  return a;
}

std::vector<ScalarRef> refs_from_json(const json& j) {
  std::vector<ScalarRef> out;
  for (const auto& e : j) out.push_back(ref_from_json(e));
  return out;
}

const char* shape_instr_name(ShapeInstrKind k) {
  switch (k) {
    case ShapeInstrKind::kReadInputDim: return "read_input_dim";
    case ShapeInstrKind::kReadScalar: return "read_scalar";
    case ShapeInstrKind::kLoadConst: return "load_const";
    case ShapeInstrKind::kBinOp: return "bin_op";
    case ShapeInstrKind::kBindDim: return "bind_dim";
  }
  return "?";
}

ShapeInstrKind shape_instr_from_name(const std::string& s) {
  if (s == "read_input_dim") return ShapeInstrKind::kReadInputDim;
  if (s == "read_scalar") return ShapeInstrKind::kReadScalar;
  if (s == "load_const") return ShapeInstrKind::kLoadConst;
  if (s == "bin_op") return ShapeInstrKind::kBinOp;
  if (s == "bind_dim") return ShapeInstrKind::kBindDim;
  throw ParseError("bad shape instruction kind: " + s);
}

const char* binop_name(ShapeBinOp op) {
  switch (op) {
    case ShapeBinOp::kAdd: return "add";
    case ShapeBinOp::kSub: return "sub";
    case ShapeBinOp::kMul: return "mul";
    case ShapeBinOp::kDivFloor: return "div";
    case ShapeBinOp::kCeilDiv: return "ceil_div";
    case ShapeBinOp::kMax: return "max";
  }
  return "?";
}

ShapeBinOp binop_from_name(const std::string& s) {
  if (s == "add") return ShapeBinOp::kAdd;
  if (s == "sub") return ShapeBinOp::kSub;
  if (s == "mul") return ShapeBinOp::kMul;
  if (s == "div") return ShapeBinOp::kDivFloor;
  if (s == "ceil_div") return ShapeBinOp::kCeilDiv;
  if (s == "max") return ShapeBinOp::kMax;
  throw ParseError("bad shape binop: " + s);
}

const char* guard_name(GuardTest::Kind k) {
  switch (k) {
    case GuardTest::Kind::kTotalDivisibleBy4: return "total_div4";
    case GuardTest::Kind::kRefEqual: return "eq";
    case GuardTest::Kind::kNever: return "never";
    case GuardTest::Kind::kAlways: return "always";
  }
  return "?";
}

GuardTest::Kind guard_from_name(const std::string& s) {
  if (s == "total_div4") return GuardTest::Kind::kTotalDivisibleBy4;
  if (s == "eq") return GuardTest::Kind::kRefEqual;
  if (s == "never") return GuardTest::Kind::kNever;
  if (s == "always") return GuardTest::Kind::kAlways;
  throw ParseError("bad guard kind: " + s);
}

json tape_to_json(const TapeInstr& t) {
  json j;
  j["op"] = t.op_id;
  j["kind"] = dhlo_kind_name(t.kind);
  json args = json::array();
  for (const auto& a : t.args)
    args.push_back(json{{"k", a.kind == TapeRef::Kind::kExternal ? "e" : "m"}, {"i", a.index}});
  j["args"] = args;
  j["out_dims"] = refs_to_json(t.out_dims);
  if (!t.dims.empty()) j["dims"] = t.dims;
  if (!t.slice_starts.empty()) {
    j["starts"] = refs_to_json(t.slice_starts);
    j["strides"] = refs_to_json(t.slice_strides);
  }
  if (t.kind == DhloOpKind::kDynamicPad) {
    j["low"] = refs_to_json(t.pad_low);
    j["high"] = refs_to_json(t.pad_high);
    j["interior"] = refs_to_json(t.pad_interior);
    j["value"] = t.pad_value;
  }
  if (t.kind == DhloOpKind::kConcat) j["axis"] = t.axis;
  return j;
}

TapeInstr tape_from_json(const json& j) {
  TapeInstr t;
  t.op_id = j.at("op").get<std::string>();
  auto kind = dhlo_kind_from_name(j.at("kind").get<std::string>());
  if (!kind) throw ParseError("bad tape kind");
  t.kind = *kind;
  for (const auto& a : j.at("args")) {
    TapeRef r;
    r.kind = a.at("k").get<std::string>() == "e" ? TapeRef::Kind::kExternal
                                                 : TapeRef::Kind::kMember;
    r.index = a.at("i").get<int>();
    t.args.push_back(r);
  }
  t.out_dims = refs_from_json(j.at("out_dims"));
  if (j.contains("dims")) t.dims = j["dims"].get<std::vector<int64_t>>();
  if (j.contains("starts")) {
    t.slice_starts = refs_from_json(j["starts"]);
    t.slice_strides = refs_from_json(j["strides"]);
  }
  if (j.contains("low")) {
    t.pad_low = refs_from_json(j["low"]);
    t.pad_high = refs_from_json(j["high"]);
    t.pad_interior = refs_from_json(j["interior"]);
    t.pad_value = j["value"].get<float>();
  }
  t.axis = j.value("axis", int64_t{0});
  return t;
}

}  // namespace

std::string plan_to_json(const CompiledPlan& plan) {
  json j;
  j["plan_version"] = plan.plan_version;
  j["graph"] = plan.graph_name;
  j["signature"] = plan.signature_digest;
  j["eager_op_count"] = plan.eager_op_count;

  json inputs = json::array();
  for (const auto& in : plan.inputs)
    inputs.push_back(json{{"id", in.id}, {"declared", in.declared}, {"dims", refs_to_json(in.dims)}});
  j["inputs"] = inputs;

  json outputs = json::array();
  for (const auto& out : plan.outputs)
    outputs.push_back(json{{"id", out.id}, {"buffer", out.buffer}, {"dims", refs_to_json(out.dims)}});
  j["outputs"] = outputs;

  json sp;
  sp["num_regs"] = plan.shape_program.num_regs;
  json sym_reg = json::array();
  for (const auto& [sym, reg] : plan.shape_program.sym_reg)
    sym_reg.push_back(json{{"sym", sym}, {"reg", reg}});
  sp["sym_reg"] = sym_reg;
  json sinstrs = json::array();
  for (const auto& si : plan.shape_program.instrs) {
    json e;
    e["k"] = shape_instr_name(si.kind);
    switch (si.kind) {
      case ShapeInstrKind::kReadInputDim:
        e["dest"] = si.dest;
        e["input"] = si.input;
        e["axis"] = si.axis;
        break;
      case ShapeInstrKind::kReadScalar:
        e["dest"] = si.dest;
        e["tensor"] = si.tensor;
        e["index"] = si.index;
        break;
      case ShapeInstrKind::kLoadConst:
        e["dest"] = si.dest;
        e["value"] = si.value;
        break;
      case ShapeInstrKind::kBinOp:
        e["dest"] = si.dest;
        e["op"] = binop_name(si.op);
        e["lhs"] = si.lhs;
        e["rhs"] = si.rhs;
        break;
      case ShapeInstrKind::kBindDim:
        e["sym"] = si.sym;
        e["lhs"] = si.lhs;
        break;
    }
    sinstrs.push_back(e);
  }
  sp["instrs"] = sinstrs;
  j["shape_program"] = sp;

  j["literals"] = plan.literals;

  json kernels = json::array();
  for (const auto& k : plan.kernels) {
    json e;
    e["id"] = k.kernel_id;
    e["name"] = k.name;
    e["root"] = k.root == RootKind::kReduceRoot ? "reduce" : "loop";
    e["standalone"] = k.standalone;
    json tape = json::array();
    for (const auto& t : k.tape) tape.push_back(tape_to_json(t));
    e["tape"] = tape;
    json ext = json::array();
    for (const auto& dims : k.external_input_dims) ext.push_back(refs_to_json(dims));
    e["external_input_dims"] = ext;
    e["outputs"] = k.output_tape_indices;
    e["space"] = refs_to_json(k.space_dims);
    json versions = json::array();
    for (const auto& v : k.versions) {
      json vj;
      vj["id"] = v.id;
      vj["vectorized4"] = v.vectorized4;
      vj["implicit_broadcast"] = v.implicit_broadcast;
      json guards = json::array();
      for (const auto& gt : v.guards) {
        json gj;
        gj["k"] = guard_name(gt.kind);
        if (gt.kind == GuardTest::Kind::kRefEqual) {
          gj["a"] = ref_to_json(gt.a);
          gj["b"] = ref_to_json(gt.b);
        }
        guards.push_back(gj);
      }
      vj["guards"] = guards;
      versions.push_back(vj);
    }
    e["versions"] = versions;
    e["pattern"] = k.signature;
    kernels.push_back(e);
  }
  j["kernels"] = kernels;

  json instrs = json::array();
  for (const auto& in : plan.instrs) {
    json e;
    e["k"] = instr_kind_name(in.kind);
    switch (in.kind) {
      case InstrKind::kBindInput:
      case InstrKind::kBindOutput:
        e["io"] = in.a;
        e["buffer"] = in.b;
        break;
      case InstrKind::kEvalShape:
        e["from"] = in.a;
        e["to"] = in.b;
        break;
      case InstrKind::kAlloc: {
        e["buffer"] = in.b;
        json s;
        s["const_elems"] = in.size.const_elems;
        s["regs"] = in.size.regs;
        e["size"] = s;
        break;
      }
      case InstrKind::kDealloc:
        e["buffer"] = in.b;
        if (in.reserve) e["reserve"] = true;
        break;
      case InstrKind::kAlias:
        e["source"] = in.a;
        e["buffer"] = in.b;
        break;
      case InstrKind::kSelectVersion:
      case InstrKind::kComputeLaunch:
        e["kernel"] = in.a;
        break;
      case InstrKind::kLaunch:
        e["kernel"] = in.a;
        e["inputs"] = in.arg_bufs;
        e["outputs"] = in.out_bufs;
        if (in.fixed_version >= 0) e["version"] = in.fixed_version;
        if (in.fixed_tile >= 0) {
          e["tile"] = in.fixed_tile;
          e["blocks"] = in.fixed_blocks;
        }
        break;
      case InstrKind::kLibraryCall:
        e["inputs"] = in.arg_bufs;
        e["outputs"] = in.out_bufs;
        e["dims"] = refs_to_json(in.lib_dims);
        break;
    }
    instrs.push_back(e);
  }
  j["instrs"] = instrs;
  j["num_buffers"] = plan.num_buffers;
  j["buffer_values"] = plan.buffer_values;
  return j.dump(2);
}

CompiledPlan plan_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("plan json: ") + e.what());
  }
  CompiledPlan plan;
  plan.plan_version = j.at("plan_version").get<int>();
  if (plan.plan_version != 1)
    throw ParseError("unsupported plan version " + std::to_string(plan.plan_version));
  plan.graph_name = j.value("graph", "");
  plan.signature_digest = j.value("signature", "");
  plan.eager_op_count = j.value("eager_op_count", int64_t{0});
  for (const auto& in : j.at("inputs")) {
    CompiledPlan::PlanInput pi;
    pi.id = in.at("id").get<std::string>();
    pi.declared = in.at("declared").get<std::vector<std::string>>();
    pi.dims = refs_from_json(in.at("dims"));
    plan.inputs.push_back(pi);
  }
  for (const auto& out : j.at("outputs")) {
    CompiledPlan::PlanOutput po;
    po.id = out.at("id").get<std::string>();
    po.buffer = out.at("buffer").get<int>();
    po.dims = refs_from_json(out.at("dims"));
    plan.outputs.push_back(po);
  }
  const auto& sp = j.at("shape_program");
  plan.shape_program.num_regs = sp.at("num_regs").get<int>();
  for (const auto& e : sp.at("sym_reg"))
    plan.shape_program.sym_reg[e.at("sym").get<int>()] = e.at("reg").get<int>();
  for (const auto& e : sp.at("instrs")) {
    ShapeInstr si;
    si.kind = shape_instr_from_name(e.at("k").get<std::string>());
    switch (si.kind) {
      case ShapeInstrKind::kReadInputDim:
        si.dest = e.at("dest").get<int>();
        si.input = e.at("input").get<int>();
        si.axis = e.at("axis").get<int>();
        break;
      case ShapeInstrKind::kReadScalar:
        si.dest = e.at("dest").get<int>();
        si.tensor = e.at("tensor").get<std::string>();
        si.index = e.at("index").get<int>();
        break;
      case ShapeInstrKind::kLoadConst:
        si.dest = e.at("dest").get<int>();
        si.value = e.at("value").get<int64_t>();
        break;
      case ShapeInstrKind::kBinOp:
        si.dest = e.at("dest").get<int>();
        si.op = binop_from_name(e.at("op").get<std::string>());
        si.lhs = e.at("lhs").get<int>();
        si.rhs = e.at("rhs").get<int>();
        break;
      case ShapeInstrKind::kBindDim:
        si.sym = e.at("sym").get<int>();
        si.lhs = e.at("lhs").get<int>();
        break;
    }
    plan.shape_program.instrs.push_back(si);
  }
  plan.literals =
      j.at("literals").get<std::map<std::string, std::vector<int64_t>>>();
  for (const auto& e : j.at("kernels")) {
    KernelArtifact k;
    k.kernel_id = e.at("id").get<int>();
    k.name = e.at("name").get<std::string>();
    k.root = e.at("root").get<std::string>() == "reduce" ? RootKind::kReduceRoot
                                                         : RootKind::kElementwiseLoop;
    k.standalone = e.at("standalone").get<bool>();
    for (const auto& t : e.at("tape")) k.tape.push_back(tape_from_json(t));
    for (const auto& d : e.at("external_input_dims"))
      k.external_input_dims.push_back(refs_from_json(d));
    k.output_tape_indices = e.at("outputs").get<std::vector<int>>();
    k.space_dims = refs_from_json(e.at("space"));
    for (const auto& vj : e.at("versions")) {
      VersionArtifact v;
      v.id = vj.at("id").get<int>();
      v.vectorized4 = vj.at("vectorized4").get<bool>();
      v.implicit_broadcast = vj.at("implicit_broadcast").get<bool>();
      for (const auto& gj : vj.at("guards")) {
        GuardTest gt;
        gt.kind = guard_from_name(gj.at("k").get<std::string>());
        if (gt.kind == GuardTest::Kind::kRefEqual) {
          gt.a = ref_from_json(gj.at("a"));
          gt.b = ref_from_json(gj.at("b"));
        }
        v.guards.push_back(gt);
      }
      k.versions.push_back(v);
    }
    k.signature = e.value("pattern", "");
    plan.kernels.push_back(std::move(k));
  }
  for (const auto& e : j.at("instrs")) {
    Instr in;
    std::string k = e.at("k").get<std::string>();
    if (k == "bind_input") {
      in.kind = InstrKind::kBindInput;
      in.a = e.at("io").get<int>();
      in.b = e.at("buffer").get<int>();
    } else if (k == "bind_output") {
      in.kind = InstrKind::kBindOutput;
      in.a = e.at("io").get<int>();
      in.b = e.at("buffer").get<int>();
    } else if (k == "eval_shape") {
      in.kind = InstrKind::kEvalShape;
      in.a = e.at("from").get<int>();
      in.b = e.at("to").get<int>();
    } else if (k == "alloc") {
      in.kind = InstrKind::kAlloc;
      in.b = e.at("buffer").get<int>();
      in.size.const_elems = e.at("size").at("const_elems").get<int64_t>();
      in.size.regs = e.at("size").at("regs").get<std::vector<int>>();
    } else if (k == "dealloc") {
      in.kind = InstrKind::kDealloc;
      in.b = e.at("buffer").get<int>();
      in.reserve = e.value("reserve", false);
    } else if (k == "alias") {
      in.kind = InstrKind::kAlias;
      in.a = e.at("source").get<int>();
      in.b = e.at("buffer").get<int>();
    } else if (k == "select_version") {
      in.kind = InstrKind::kSelectVersion;
      in.a = e.at("kernel").get<int>();
    } else if (k == "compute_launch") {
      in.kind = InstrKind::kComputeLaunch;
      in.a = e.at("kernel").get<int>();
    } else if (k == "launch") {
      in.kind = InstrKind::kLaunch;
      in.a = e.at("kernel").get<int>();
      in.arg_bufs = e.at("inputs").get<std::vector<int>>();
      in.out_bufs = e.at("outputs").get<std::vector<int>>();
      in.fixed_version = e.value("version", -1);
      in.fixed_tile = e.value("tile", int64_t{-1});
      in.fixed_blocks = e.value("blocks", int64_t{-1});
    } else if (k == "library_call") {
      in.kind = InstrKind::kLibraryCall;
      in.arg_bufs = e.at("inputs").get<std::vector<int>>();
      in.out_bufs = e.at("outputs").get<std::vector<int>>();
      in.lib_dims = refs_from_json(e.at("dims"));
    } else {
      throw ParseError("bad instruction kind: " + k);
    }
    plan.instrs.push_back(in);
  }
  plan.num_buffers = j.at("num_buffers").get<int>();
  plan.buffer_values = j.value("buffer_values", std::vector<std::string>{});
  return plan;
}

std::vector<std::string> check_plan(const CompiledPlan& plan) {
  std::vector<std::string> diags;
  std::set<int> written_regs;
  std::set<int> live_bufs;
  std::set<int> dead_bufs;
  std::set<int> selected, launch_computed;

  auto reg_ok = [&](const ScalarRef& r) { return r.is_const || written_regs.count(r.reg); };
  auto use_buf = [&](int b, const char* what, size_t at) {
    if (!live_bufs.count(b))
      diags.push_back("instr " + std::to_string(at) + ": " + what + " uses buffer " +
                      std::to_string(b) + " that is not live");
  };

  for (size_t i = 0; i < plan.instrs.size(); ++i) {
    const Instr& in = plan.instrs[i];
    switch (in.kind) {
      case InstrKind::kBindInput:
        live_bufs.insert(in.b);
        break;
      case InstrKind::kEvalShape:
        for (int k = in.a; k < in.b; ++k) {
          const ShapeInstr& si = plan.shape_program.instrs[k];
          if (si.kind == ShapeInstrKind::kBinOp &&
              (!written_regs.count(si.lhs) || !written_regs.count(si.rhs)))
            diags.push_back("shape instr " + std::to_string(k) + ": register read before write");
          if (si.kind == ShapeInstrKind::kBindDim && !written_regs.count(si.lhs))
            diags.push_back("shape instr " + std::to_string(k) + ": bind from unwritten register");
          if (si.dest >= 0) written_regs.insert(si.dest);
        }
        break;
      case InstrKind::kAlloc:
        for (int r : in.size.regs)
          if (!written_regs.count(r))
            diags.push_back("instr " + std::to_string(i) + ": alloc size register unwritten");
        live_bufs.insert(in.b);
        break;
      case InstrKind::kDealloc:
        use_buf(in.b, "dealloc", i);
        live_bufs.erase(in.b);
        dead_bufs.insert(in.b);
        break;
      case InstrKind::kAlias:
        if (!dead_bufs.count(in.a))
          diags.push_back("instr " + std::to_string(i) + ": alias source " +
                          std::to_string(in.a) + " is not dead");
        dead_bufs.erase(in.a);
        live_bufs.insert(in.b);
        break;
      case InstrKind::kSelectVersion:
        selected.insert(in.a);
        break;
      case InstrKind::kComputeLaunch:
        launch_computed.insert(in.a);
        break;
      case InstrKind::kLaunch: {
        for (int b : in.arg_bufs) use_buf(b, "launch input", i);
        for (int b : in.out_bufs) use_buf(b, "launch output", i);
        if (in.fixed_version < 0 && !selected.count(in.a))
          diags.push_back("instr " + std::to_string(i) + ": launch without version selection");
        if (in.fixed_tile < 0 && !launch_computed.count(in.a))
          diags.push_back("instr " + std::to_string(i) + ": launch without launch config");
        const KernelArtifact& k = plan.kernels.at(in.a);
        for (const auto& dims : k.external_input_dims)
          for (const auto& d : dims)
            if (!reg_ok(d))
              diags.push_back("instr " + std::to_string(i) + ": kernel dim register unwritten");
        break;
      }
      case InstrKind::kLibraryCall:
        for (int b : in.arg_bufs) use_buf(b, "library input", i);
        for (int b : in.out_bufs) use_buf(b, "library output", i);
        for (const auto& d : in.lib_dims)
          if (!reg_ok(d))
            diags.push_back("instr " + std::to_string(i) + ": library dim register unwritten");
        break;
      case InstrKind::kBindOutput:
        use_buf(in.b, "bind_output", i);
        break;
    }
  }
  return diags;
}

}  // namespace disc
