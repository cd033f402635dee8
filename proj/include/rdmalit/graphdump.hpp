/*
 * Copyright (c) 2026, the rdma-lit authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef RDMALIT_GRAPHDUMP_HPP_
#define RDMALIT_GRAPHDUMP_HPP_

#include <sstream>

#include "rdmalit/exec.hpp"

namespace rdmalit {

inline const char* op_name(Op op) {
  switch (op) {
    case Op::CpuWrite: return "write";
    case Op::CpuRead: return "read";
    case Op::CpuCas: return "cas";
    case Op::Mfence: return "mfence";
    case Op::Put: return "put";
    case Op::Get: return "get";
    case Op::Wait: return "wait";
    case Op::Rfence: return "rfence";
    case Op::Rcas: return "rcas";
    case Op::Rfaa: return "rfaa";
    case Op::Poll: return "poll";
    case Op::GFence: return "gfence";
    case Op::BrlWrite: return "brlwrite";
    case Op::BrlRead: return "brlread";
    case Op::BrlBcast: return "bcast";
    case Op::BrlWait: return "brlwait";
    case Op::AcqWl: return "acq_wl";
    case Op::RelWl: return "rel_wl";
    case Op::AcqSl: return "acq_sl";
    case Op::RelSl: return "rel_sl";
    case Op::AcqNl: return "acq_nl";
    case Op::RelNl: return "rel_nl";
    case Op::ScWrite: return "scwrite";
    case Op::ScRead: return "scread";
    case Op::ScCas: return "sccas";
    case Op::ScFaa: return "scfaa";
    case Op::SetAdd: return "setadd";
    case Op::SetRemove: return "setremove";
    case Op::SetIsEmpty: return "setisempty";
  }
  return "?";
}

/// One-candidate dump: events, subevents with values, and every witness
/// relation, one section per relation, deterministically ordered.
inline std::string dump_candidate(const Candidate& c) {
  const LitmusTest& t = *c.test;
  std::ostringstream os;
  os << "events\n";
  for (const UEvent& e : c.sx->events) {
    os << "  e" << e.eid << " t" << e.thread << " " << op_name(e.op);
    if (e.loc >= 0) os << " " << t.locations[e.loc].name;
    if (e.loc2 >= 0) os << " " << t.locations[e.loc2].name;
    if (e.wid >= 0) os << " wid=" << t.wids[e.wid];
    if (e.node > 0) os << " n" << e.node;
    os << "\n";
  }
  os << "subevents\n";
  for (int s = 0; s < c.nsubs(); ++s) {
    const Sub& sub = c.subs[s];
    os << "  s" << s << " e" << sub.ev << " " << to_string(sub.stamp);
    if (sub.loc >= 0) {
      os << " " << t.locations[sub.loc].name;
      if (sub.copy_node > 0) os << "@" << sub.copy_node;
    }
    if (sub.rd) {
      auto v = c.cells.value(sub.vr);
      os << " vr=" << (v ? std::to_string(*v) : "?");
    }
    if (sub.wr) {
      auto v = c.cells.value(sub.vw);
      os << " vw=" << (v ? std::to_string(*v) : "?");
    }
    os << "\n";
  }
  os << "rf\n";
  for (int s = 0; s < c.nsubs(); ++s)
    if (c.subs[s].rd)
      os << "  " << (c.rf[s] >= 0 ? "s" + std::to_string(c.rf[s]) : "init") << " -> s" << s
         << "\n";
  os << "mo\n";
  for (const auto& [key, order] : c.mo) {
    if (order.empty()) continue;
    os << "  " << t.locations[static_cast<int>(key >> 8)].name;
    if (key & 0xff) os << "@" << (key & 0xff);
    os << ":";
    for (int s : order) os << " s" << s;
    os << "\n";
  }
  os << "nfo\n";
  for (auto [a, b] : c.nfo) os << "  s" << a << " -> s" << b << "\n";
  os << "rao\n";
  for (const auto& [node, order] : c.rao) {
    os << "  n" << node << ":";
    for (int s : order) os << " s" << s;
    os << "\n";
  }
  os << "lo\n";
  for (const auto& [loc, order] : c.lo) {
    os << "  " << t.locations[loc].name << ":";
    for (int e : order) os << " e" << e;
    os << "\n";
  }
  os << "success\n ";
  for (std::size_t ev = 0; ev < c.success.size(); ++ev)
    os << " e" << ev << "=" << int(c.success[ev]);
  os << "\n";
  return os.str();
}

}  // namespace rdmalit

#endif  // RDMALIT_GRAPHDUMP_HPP_
