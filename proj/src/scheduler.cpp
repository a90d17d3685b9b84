// Copyright 2026 The qpnr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qpnr/scheduler.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <tuple>

namespace qpnr {

namespace {

constexpr BlockId kNowhere = MovementGraph::kNone;
constexpr int kNoTask = -1;
constexpr int kEvictTask = -2;

/// Movement precedence, smaller first: (class, -priority, instruction,
/// push depth, qubit).
using Rank = std::tuple<int, Time, int, int, int>;

struct QubitState {
  BlockId block = 0;
  bool moving = false;
  BlockId hop_to = kNowhere;
  bool in_gate = false;
  /// Instruction being served, kEvictTask while clearing a path, or kNoTask.
  int task = kNoTask;
  BlockId dest = kNowhere;
  /// Temporary side step taken to let a more urgent ion pass.
  BlockId detour = kNowhere;
  /// Block of the ion that asked this one to move; avoided when routing.
  BlockId shun = kNowhere;
  /// Precedence borrowed from the ion that pushed this one.
  std::optional<Rank> lent;
  /// Route chosen around a stuck block; kept through forced passes.
  bool keep_route = false;
  std::vector<BlockId> route;
  bool route_valid = false;
  bool in_route = false;
  std::optional<Direction> last_dir;
  int route_id = -1;
  Time blocked_since = -1;

  [[nodiscard]] BlockId target() const { return detour != kNowhere ? detour : dest; }
  [[nodiscard]] bool idle() const {
    return task == kNoTask && !moving && !in_gate;
  }
};

enum class InstrState { Waiting, Ready, Assigned, Running, Done };

enum EventKind { kHopEnd = 0, kGateEnd = 1 };
using Event = std::tuple<Time, int, int>;

class Simulator {
public:
  Simulator(const InstructionSequence& seq, const Layout& layout,
            const MovementGraph& graph, const std::vector<BlockId>& initial,
            const PriorityMap& priorities,
            const std::optional<GateAssignment>& assignment,
            const SchedulerOptions& options);

  ScheduleResult run();

private:
  using Key = std::pair<Time, InstrId>;
  Key key(InstrId i) const { return {-prio_[static_cast<std::size_t>(i)], i}; }

  void process_events(Time t);
  void assign();
  void move(Time t, bool forced);
  void start_gates(Time t);
  bool back_off();
  bool push(QubitIndex q, const std::vector<BlockId>& avoid, BlockId shun,
            const Rank& by);
  void clear_detour(QubitState& s);
  void forget_route(QubitState& s);
  bool can_enter(const QubitState& s, BlockId next) const;
  bool waiting_at_dest(const QubitState& s) const;
  Rank rank(QubitIndex q) const;
  const std::vector<Time>& distances(QubitIndex q);
  std::vector<Time> block_penalties(bool hard) const;
  void note(InstrId i, const std::string& resource);
  std::string block_label(BlockId b) const;
  DeadlockReport deadlock(Time t, std::string reason) const;
  ScheduleResult serial(Time t);
  bool bring(QubitIndex q, BlockId g, InstrId i, Time& t);
  bool relocate(QubitIndex o, const std::vector<BlockId>& keep_clear, Time& t,
                int depth = 3);
  void walk(QubitIndex q, const std::vector<BlockId>& hops, Time& t);
  ScheduleResult finish();

  QubitState& qs(QubitIndex q) { return qubits_[static_cast<std::size_t>(q)]; }
  const QubitState& qs(QubitIndex q) const {
    return qubits_[static_cast<std::size_t>(q)];
  }
  const Instruction& instr(InstrId i) const { return seq_[i]; }
  bool is_operand(InstrId i, QubitIndex q) const {
    const auto& ops = instr(i).operands;
    return std::find(ops.begin(), ops.end(), q) != ops.end();
  }

  const InstructionSequence& seq_;
  const Layout& layout_;
  const MovementGraph& g_;
  const PriorityMap& prio_;
  bool annotated_ = false;
  Time penalty_ = 0;
  long max_idle_rounds_ = 0;
  bool serial_fallback_ = true;
  long idle_rounds_ = 0;

  std::vector<QubitState> qubits_;
  std::vector<InstrState> state_;
  std::vector<int> remaining_;
  std::vector<std::vector<InstrId>> successors_;
  std::vector<Time> ready_time_;
  std::vector<BlockId> loc_;
  std::vector<std::string> resource_;
  std::vector<char> deferred_;
  std::set<Key> ready_;
  std::set<Key> assigned_;
  std::size_t done_ = 0;

  std::vector<std::vector<QubitIndex>> occ_;
  std::vector<InstrId> reserved_;
  std::vector<char> executing_;
  /// Ions heading to a block as an eviction or detour target.
  std::vector<int> incoming_;
  /// Unfinished annotated instructions per gate location.
  std::vector<int> pending_work_;

  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
  std::vector<std::optional<std::vector<Time>>> dist_cache_;
  int next_route_id_ = 0;
  long pushes_ = 0;
  /// Last resort before backing off: ignore shunned blocks and let ions push
  /// more urgent ones that are still travelling.
  bool desperate_ = false;
  /// Desperate rounds since the last gate finished.
  std::size_t desperate_rounds_ = 0;
  Schedule out_;
};

Simulator::Simulator(const InstructionSequence& seq, const Layout& layout,
                     const MovementGraph& graph,
                     const std::vector<BlockId>& initial,
                     const PriorityMap& priorities,
                     const std::optional<GateAssignment>& assignment,
                     const SchedulerOptions& options)
    : seq_(seq), layout_(layout), g_(graph), prio_(priorities),
      annotated_(assignment.has_value()) {
  const std::size_t n = seq.size();
  const std::size_t blocks = layout.size();
  if (graph.size() != blocks) {
    throw std::invalid_argument("movement graph does not match layout");
  }
  if (priorities.size() != n) {
    throw std::invalid_argument("priority map does not cover the sequence");
  }
  if (initial.size() != seq.num_qubits()) {
    throw std::invalid_argument("initial placement must place every qubit");
  }
  penalty_ = options.congestion_penalty > 0 ? options.congestion_penalty
                                            : 5 * graph.tech().t_straight;
  max_idle_rounds_ = options.max_idle_rounds;
  serial_fallback_ = options.serial_fallback;

  occ_.assign(blocks, {});
  reserved_.assign(blocks, -1);
  executing_.assign(blocks, 0);
  incoming_.assign(blocks, 0);
  pending_work_.assign(blocks, 0);

  qubits_.resize(initial.size());
  for (std::size_t q = 0; q < initial.size(); ++q) {
    const BlockId b = initial[q];
    if (b < 0 || static_cast<std::size_t>(b) >= blocks) {
      throw std::invalid_argument("initial placement outside the layout");
    }
    if (!occ_[static_cast<std::size_t>(b)].empty()) {
      throw std::invalid_argument("two qubits placed on block " +
                                  std::to_string(b));
    }
    occ_[static_cast<std::size_t>(b)].push_back(static_cast<QubitIndex>(q));
    qubits_[q].block = b;
  }

  loc_.assign(n, kNowhere);
  if (annotated_) {
    for (std::size_t i = 0; i < n; ++i) {
      auto it = assignment->find(static_cast<InstrId>(i));
      if (it == assignment->end()) {
        throw std::invalid_argument("instruction " + std::to_string(i) +
                                    " has no gate assignment");
      }
      auto b = layout.find_gate(it->second);
      if (!b) {
        throw std::invalid_argument("unknown gate location " + it->second);
      }
      loc_[i] = *b;
      ++pending_work_[static_cast<std::size_t>(*b)];
    }
  }

  const auto dataflow = build_dataflow(seq);
  state_.assign(n, InstrState::Waiting);
  remaining_.assign(n, 0);
  successors_.assign(n, {});
  ready_time_.assign(n, 0);
  resource_.assign(n, {});
  deferred_.assign(n, 0);
  for (const auto& arc : dataflow.arcs()) {
    if (!dataflow.is_input(arc.from)) {
      ++remaining_[static_cast<std::size_t>(arc.to)];
      successors_[static_cast<std::size_t>(arc.from)].push_back(arc.to);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (remaining_[i] == 0) {
      state_[i] = InstrState::Ready;
      ready_.insert(key(static_cast<InstrId>(i)));
    }
  }
  out_.initial = initial;
  out_.gates.resize(n);
}

std::string Simulator::block_label(BlockId b) const {
  const auto& blk = layout_.block(b);
  if (!blk.name.empty()) {
    return blk.name;
  }
  return "(" + std::to_string(blk.position.col) + "," +
         std::to_string(blk.position.row) + ")";
}

void Simulator::note(InstrId i, const std::string& resource) {
  if (i >= 0 && resource_[static_cast<std::size_t>(i)].empty()) {
    resource_[static_cast<std::size_t>(i)] = resource;
  }
}

bool Simulator::waiting_at_dest(const QubitState& s) const {
  return s.task >= 0 && !s.moving && s.detour == kNowhere && s.block == s.dest;
}

Rank Simulator::rank(QubitIndex q) const {
  const auto& s = qs(q);
  if (s.lent) {
    return *s.lent;
  }
  if (s.task >= 0) {
    return {1, -prio_[static_cast<std::size_t>(s.task)], s.task, 0, q};
  }
  return {2, 0, 0, 0, q};
}

// Ions that will not leave soon cost more; `hard` walls off running gates.
std::vector<Time> Simulator::block_penalties(bool hard) const {
  std::vector<Time> pen(occ_.size(), 0);
  for (std::size_t b = 0; b < occ_.size(); ++b) {
    Time p = 0;
    for (QubitIndex q : occ_[b]) {
      const auto& s = qs(q);
      if (s.in_gate) {
        p = std::max(p, hard ? kUnreachable : 3 * penalty_);
      } else if (waiting_at_dest(s)) {
        p = std::max(p, 3 * penalty_);
      } else {
        p = std::max(p, penalty_);
      }
    }
    pen[b] = p;
  }
  return pen;
}

const std::vector<Time>& Simulator::distances(QubitIndex q) {
  auto& slot = dist_cache_[static_cast<std::size_t>(q)];
  if (!slot) {
    const auto& s = qs(q);
    const auto pen = block_penalties(false);
    RouteCosts costs{pen, {}, s.in_route ? s.last_dir : std::nullopt};
    slot = distances_from(g_, s.moving ? s.hop_to : s.block, costs);
  }
  return *slot;
}

void Simulator::forget_route(QubitState& s) {
  s.route.clear();
  s.route_valid = false;
  s.in_route = false;
  s.last_dir.reset();
  s.blocked_since = -1;
  s.keep_route = false;
}

void Simulator::clear_detour(QubitState& s) {
  if (s.detour != kNowhere) {
    --incoming_[static_cast<std::size_t>(s.detour)];
    s.detour = kNowhere;
    s.route_valid = false;
  }
}

void Simulator::process_events(Time t) {
  while (!events_.empty() && std::get<0>(events_.top()) == t) {
    const auto [time, kind, id] = events_.top();
    events_.pop();
    if (kind == kHopEnd) {
      auto& s = qs(id);
      auto& from = occ_[static_cast<std::size_t>(s.block)];
      from.erase(std::find(from.begin(), from.end(), id));
      s.block = s.hop_to;
      s.hop_to = kNowhere;
      s.moving = false;
      if (s.detour != kNowhere && s.block == s.detour) {
        clear_detour(s);
        s.shun = kNowhere;
        s.lent.reset();
        forget_route(s);
      } else if (s.detour == kNowhere && s.block == s.dest) {
        forget_route(s);
        s.shun = kNowhere;
        s.lent.reset();
        if (s.task == kEvictTask) {
          --incoming_[static_cast<std::size_t>(s.dest)];
          s.task = kNoTask;
          s.dest = kNowhere;
        }
      }
      continue;
    }
    const auto i = static_cast<std::size_t>(id);
    state_[i] = InstrState::Done;
    ++done_;
    idle_rounds_ = 0;
    desperate_rounds_ = 0;
    std::fill(deferred_.begin(), deferred_.end(), 0);
    const BlockId b = loc_[i];
    executing_[static_cast<std::size_t>(b)] = 0;
    reserved_[static_cast<std::size_t>(b)] = -1;
    if (annotated_) {
      --pending_work_[static_cast<std::size_t>(b)];
    }
    for (QubitIndex q : instr(id).operands) {
      auto& s = qs(q);
      s.in_gate = false;
      s.task = kNoTask;
      s.dest = kNowhere;
    }
    for (InstrId succ : successors_[i]) {
      if (--remaining_[static_cast<std::size_t>(succ)] == 0) {
        state_[static_cast<std::size_t>(succ)] = InstrState::Ready;
        ready_time_[static_cast<std::size_t>(succ)] = t;
        ready_.insert(key(succ));
      }
    }
  }
}

bool Simulator::push(QubitIndex q, const std::vector<BlockId>& avoid,
                     BlockId shun, const Rank& by) {
  auto& s = qs(q);
  // Partners meeting at a gate stay together until the gate has run.
  const auto bi = static_cast<std::size_t>(s.block);
  if (s.moving || s.in_gate ||
      (s.task >= 0 && reserved_[bi] == s.task && occ_[bi].size() > 1)) {
    return false;
  }
  // An ion already stepping aside is re-targeted around the new pusher.
  const BlockId old_detour = s.detour;
  const bool evicting = s.task == kEvictTask;
  if (old_detour != kNowhere) {
    --incoming_[static_cast<std::size_t>(old_detour)];
    s.detour = kNowhere;
  } else if (evicting) {
    --incoming_[static_cast<std::size_t>(s.dest)];
    s.task = kNoTask;
  }
  const bool idle = s.task == kNoTask;
  // First look for a spot reachable through empty blocks only, then accept
  // paths through other ions that may in turn be pushed.
  auto pen = block_penalties(true);
  for (std::size_t bi = 0; bi < occ_.size(); ++bi) {
    if (!occ_[bi].empty() && static_cast<BlockId>(bi) != s.block) {
      pen[bi] = kUnreachable;
    }
  }
  if (shun != kNowhere) {
    pen[static_cast<std::size_t>(shun)] = kUnreachable;
  }
  auto dist = distances_from(g_, s.block, RouteCosts{pen, {}, std::nullopt});
  auto pick = [&](bool gates_only, bool respect_pending) {
    BlockId best = kNowhere;
    for (std::size_t bi = 0; bi < occ_.size(); ++bi) {
      const auto b = static_cast<BlockId>(bi);
      if (gates_only && !layout_.block(b).has_gate()) {
        continue;
      }
      if (b == s.block || !occ_[bi].empty() || reserved_[bi] != -1 ||
          executing_[bi] || incoming_[bi] > 0 || dist[bi] >= kUnreachable ||
          (respect_pending && pending_work_[bi] > 0) ||
          std::find(avoid.begin(), avoid.end(), b) != avoid.end()) {
        continue;
      }
      if (best == kNowhere || dist[bi] < dist[static_cast<std::size_t>(best)]) {
        best = b;
      }
    }
    return best;
  };
  // Idle ions are parked on a gate or storage location; ions with work
  // only step aside.
  auto choose = [&] {
    BlockId target = pick(true, true);
    if (target == kNowhere && idle) {
      target = pick(true, false);
    }
    if (target == kNowhere) {
      target = pick(false, false);
    }
    return target;
  };
  BlockId target = choose();
  if (target == kNowhere) {
    pen = block_penalties(true);
    for (std::size_t bi = 0; bi < occ_.size(); ++bi) {
      for (QubitIndex o : occ_[bi]) {
        if (waiting_at_dest(qs(o))) {
          pen[bi] = kUnreachable;
        }
      }
    }
    if (shun != kNowhere) {
      pen[static_cast<std::size_t>(shun)] = kUnreachable;
    }
    dist = distances_from(g_, s.block, RouteCosts{pen, {}, std::nullopt});
    target = choose();
  }
  if (target == kNowhere) {
    if (old_detour != kNowhere) {
      s.detour = old_detour;
      ++incoming_[static_cast<std::size_t>(old_detour)];
    } else if (evicting) {
      s.task = kEvictTask;
      ++incoming_[static_cast<std::size_t>(s.dest)];
    }
    return false;
  }
  ++incoming_[static_cast<std::size_t>(target)];
  ++pushes_;
  auto lent = by;
  std::get<3>(lent) += 1;
  std::get<4>(lent) = q;
  s.lent = lent;
  if (idle) {
    s.task = kEvictTask;
    s.dest = target;
  } else {
    s.detour = target;
  }
  s.shun = shun;
  s.route_valid = false;
  s.blocked_since = -1;
  return true;
}

void Simulator::assign() {
  for (auto it = ready_.begin(); it != ready_.end();) {
    const InstrId i = it->second;
    if (deferred_[static_cast<std::size_t>(i)]) {
      ++it;
      continue;
    }
    const auto& ops = instr(i).operands;
    BlockId chosen = kNowhere;
    if (annotated_) {
      const BlockId b = loc_[static_cast<std::size_t>(i)];
      if (reserved_[static_cast<std::size_t>(b)] != -1) {
        note(i, "gate " + block_label(b));
        ++it;
        continue;
      }
      chosen = b;
    } else {
      Time best_cost = kUnreachable;
      const auto pen = block_penalties(false);
      for (BlockId b : layout_.gate_blocks()) {
        const auto bi = static_cast<std::size_t>(b);
        if (reserved_[bi] != -1 || executing_[bi] || incoming_[bi] > 0) {
          continue;
        }
        const bool usable = std::all_of(
            occ_[bi].begin(), occ_[bi].end(),
            [&](QubitIndex o) { return is_operand(i, o); });
        if (!usable) {
          continue;
        }
        Time cost = 0;
        for (QubitIndex q : ops) {
          const auto& s = qs(q);
          const BlockId at = s.moving ? s.hop_to : s.block;
          const Time d = distances(q)[bi];
          if (d >= kUnreachable) {
            cost = kUnreachable;
            break;
          }
          // The destination's own congestion penalty is unavoidable.
          cost += at == b ? 0 : d - pen[bi];
        }
        if (cost < best_cost) {
          best_cost = cost;
          chosen = b;
        }
      }
      if (chosen == kNowhere) {
        note(i, "free gate location");
        ++it;
        continue;
      }
    }
    it = ready_.erase(it);
    state_[static_cast<std::size_t>(i)] = InstrState::Assigned;
    assigned_.insert(key(i));
    loc_[static_cast<std::size_t>(i)] = chosen;
    reserved_[static_cast<std::size_t>(chosen)] = i;
    for (QubitIndex q : ops) {
      auto& s = qs(q);
      if (s.task == kEvictTask) {
        --incoming_[static_cast<std::size_t>(s.dest)];
      }
      clear_detour(s);
      s.task = i;
      s.dest = chosen;
      s.shun = kNowhere;
      s.lent.reset();
      s.route_valid = false;
      s.blocked_since = -1;
    }
    const auto occupants = occ_[static_cast<std::size_t>(chosen)];
    for (QubitIndex o : occupants) {
      if (!is_operand(i, o) && qs(o).idle()) {
        push(o, {chosen}, kNowhere,
             Rank{1, -prio_[static_cast<std::size_t>(i)], i, 0, o});
      }
    }
  }
}

bool Simulator::can_enter(const QubitState& s, BlockId next) const {
  const auto ni = static_cast<std::size_t>(next);
  if (occ_[ni].empty()) {
    return !executing_[ni];
  }
  if (next != s.dest || s.detour != kNowhere || s.task < 0 ||
      reserved_[ni] != s.task) {
    return false;
  }
  return std::all_of(occ_[ni].begin(), occ_[ni].end(), [&](QubitIndex o) {
    const auto& other = qs(o);
    const bool leaving =
        other.detour != kNowhere || (other.moving && other.block == next);
    return is_operand(s.task, o) && !leaving;
  });
}

void Simulator::move(Time t, bool forced) {
  std::vector<QubitIndex> order;
  for (std::size_t q = 0; q < qubits_.size(); ++q) {
    const auto& s = qubits_[q];
    if (s.task != kNoTask && !s.moving && !s.in_gate && s.target() != s.block) {
      order.push_back(static_cast<QubitIndex>(q));
    }
  }
  std::sort(order.begin(), order.end(),
            [&](QubitIndex a, QubitIndex b) { return rank(a) < rank(b); });

  auto pen = block_penalties(forced);
  std::vector<std::array<Time, 4>> claims(occ_.size(), {0, 0, 0, 0});
  auto claim_route = [&](const QubitState& s) {
    BlockId x = s.block;
    for (BlockId y : s.route) {
      if (auto d = g_.direction_between(y, x)) {
        claims[static_cast<std::size_t>(y)][static_cast<std::size_t>(*d)] +=
            penalty_;
      }
      x = y;
    }
  };

  for (QubitIndex q : order) {
    auto& s = qs(q);
    if (s.task == kNoTask || s.moving || s.target() == s.block) {
      continue;
    }
    const BlockId target = s.target();
    const bool stale = s.blocked_since >= 0 && s.blocked_since < t;
    if (!s.route_valid || s.route.empty() || (forced && !s.keep_route) ||
        stale) {
      s.keep_route = false;
      auto own = pen;
      own[static_cast<std::size_t>(target)] = 0;
      RouteCosts costs{own, claims, s.in_route ? s.last_dir : std::nullopt};
      PathResult r;
      if (s.shun != kNowhere && s.shun != target && !desperate_) {
        own[static_cast<std::size_t>(s.shun)] = kUnreachable;
        r = find_route(g_, s.block, target, costs);
        own[static_cast<std::size_t>(s.shun)] = pen[static_cast<std::size_t>(s.shun)];
      }
      if (!r.found) {
        r = find_route(g_, s.block, target, costs);
      }
      if (!r.found && forced) {
        own = block_penalties(false);
        own[static_cast<std::size_t>(target)] = 0;
        r = find_route(g_, s.block, target, RouteCosts{own, claims, costs.arrival});
      }
      s.route = std::move(r.hops);
      s.route_valid = r.found;
      if (!r.found) {
        note(s.task, "no route to " + block_label(target));
        continue;
      }
    }
    const BlockId next = s.route.front();
    const Direction d = *g_.direction_between(s.block, next);
    const bool yields =
        !forced &&
        claims[static_cast<std::size_t>(s.block)][static_cast<std::size_t>(d)] > 0;
    if (can_enter(s, next) && !yields) {
      if (!s.in_route) {
        s.route_id = next_route_id_++;
        s.in_route = true;
        s.last_dir.reset();
      }
      const Time latency = g_.hop_latency(s.last_dir, d);
      s.last_dir = d;
      s.moving = true;
      s.hop_to = next;
      s.blocked_since = -1;
      s.keep_route = false;
      occ_[static_cast<std::size_t>(next)].push_back(q);
      pen[static_cast<std::size_t>(next)] =
          std::max(pen[static_cast<std::size_t>(next)], penalty_);
      out_.hops.push_back({t, t + latency, q, s.block, next, s.route_id});
      events_.emplace(t + latency, kHopEnd, q);
      s.route.erase(s.route.begin());
      claim_route(s);
      continue;
    }
    if (s.blocked_since < 0) {
      s.blocked_since = t;
    }
    note(s.task, "block " + block_label(next));
    // Ask idle or less urgent ions in the way to step aside.
    const auto blockers = occ_[static_cast<std::size_t>(next)];
    bool pushed = false;
    for (QubitIndex o : blockers) {
      const auto& other = qs(o);
      const bool partner = s.task >= 0 && other.task == s.task;
      const bool travelling = other.target() != other.block;
      if (partner || other.moving || other.in_gate ||
          (!other.idle() && !(rank(q) < rank(o)) &&
           !(desperate_ && travelling))) {
        continue;
      }
      auto avoid = s.route;
      avoid.push_back(target);
      if (push(o, avoid, s.block, rank(q))) {
        pushed = true;
        pen = block_penalties(forced);
      }
    }
    // An ion stepping aside that cannot get past picks another spot.
    if (desperate_ && !pushed && (s.task == kEvictTask || s.detour != kNowhere) &&
        push(q, {target}, next, rank(q))) {
      pen = block_penalties(forced);
      continue;
    }
    if (desperate_ && !pushed) {
      auto own = pen;
      own[static_cast<std::size_t>(target)] = 0;
      own[static_cast<std::size_t>(next)] = kUnreachable;
      auto r = find_route(g_, s.block, target,
                          RouteCosts{own, claims, s.in_route ? s.last_dir : std::nullopt});
      if (r.found) {
        s.route = std::move(r.hops);
        s.blocked_since = -1;
        s.keep_route = true;
        ++pushes_;
      }
    }
    claim_route(s);
  }
}

void Simulator::start_gates(Time t) {
  for (auto it = assigned_.begin(); it != assigned_.end();) {
    const InstrId i = it->second;
    const BlockId b = loc_[static_cast<std::size_t>(i)];
    const auto& ops = instr(i).operands;
    const bool present = std::all_of(ops.begin(), ops.end(), [&](QubitIndex q) {
      return !qs(q).moving && qs(q).block == b;
    });
    if (!present || occ_[static_cast<std::size_t>(b)].size() != ops.size()) {
      ++it;
      continue;
    }
    it = assigned_.erase(it);
    const auto ii = static_cast<std::size_t>(i);
    state_[ii] = InstrState::Running;
    idle_rounds_ = 0;
    executing_[static_cast<std::size_t>(b)] = 1;
    for (QubitIndex q : ops) {
      auto& s = qs(q);
      clear_detour(s);
      forget_route(s);
      s.in_gate = true;
      s.shun = kNowhere;
      s.lent.reset();
    }
    const Time end = t + gate_latency(instr(i).gate, g_.tech());
    out_.gates[ii] = GateEvent{i, b, t, end, ops};
    out_.stalls.push_back(
        {i, ready_time_[ii], t, t - ready_time_[ii], resource_[ii]});
    events_.emplace(end, kGateEnd, i);
  }
}

bool Simulator::back_off() {
  if (assigned_.size() < 2) {
    return false;
  }
  // Never split operands that already share their gate block.
  auto last = assigned_.end();
  for (auto it = std::prev(assigned_.end()); it != assigned_.begin(); --it) {
    const auto& occupants =
        occ_[static_cast<std::size_t>(loc_[static_cast<std::size_t>(it->second)])];
    const auto together = std::count_if(
        occupants.begin(), occupants.end(),
        [&](QubitIndex o) { return is_operand(it->second, o); });
    if (together < 2) {
      last = it;
      break;
    }
  }
  if (last == assigned_.end()) {
    return false;
  }
  const InstrId i = last->second;
  assigned_.erase(last);
  const auto ii = static_cast<std::size_t>(i);
  reserved_[static_cast<std::size_t>(loc_[ii])] = -1;
  if (!annotated_) {
    loc_[ii] = kNowhere;
  }
  for (QubitIndex q : instr(i).operands) {
    auto& s = qs(q);
    if (s.task != i) {
      continue;
    }
    clear_detour(s);
    forget_route(s);
    s.task = kNoTask;
    s.dest = kNowhere;
    s.shun = kNowhere;
    s.lent.reset();
  }
  state_[ii] = InstrState::Ready;
  ready_.insert(key(i));
  deferred_[ii] = 1;
  note(i, "deadlock back-off");
  return true;
}

DeadlockReport Simulator::deadlock(Time t, std::string reason) const {
  DeadlockReport report;
  report.time = t;
  report.reason = std::move(reason);
  std::optional<Key> best;
  for (std::size_t i = 0; i < state_.size(); ++i) {
    if (state_[i] == InstrState::Running || state_[i] == InstrState::Done) {
      continue;
    }
    const Key k = key(static_cast<InstrId>(i));
    if (!best || k < *best) {
      best = k;
    }
  }
  report.blocked_instruction = best ? best->second : -1;
  for (const auto& s : qubits_) {
    report.qubit_positions.push_back(s.block);
  }
  return report;
}

ScheduleResult Simulator::run() {
  const std::size_t n = seq_.size();
  Time t = 0;
  auto give_up = [&](const char* reason) -> ScheduleResult {
    return serial_fallback_ ? serial(t) : deadlock(t, reason);
  };
  while (done_ < n || !events_.empty()) {
    if (++idle_rounds_ > max_idle_rounds_) {
      return give_up("ions keep moving without reaching a gate");
    }
    dist_cache_.assign(qubits_.size(), std::nullopt);
    process_events(t);
    dist_cache_.assign(qubits_.size(), std::nullopt);
    assign();
    move(t, false);
    start_gates(t);
    if (events_.empty() && done_ < n) {
      // Nothing will fire on its own: re-path everyone, repeating while
      // ions are being asked to step aside. If that fails, release the
      // least urgent pending instruction until the next gate completes.
      auto forced_passes = [&] {
        for (int pass = 0; pass < 16 && events_.empty(); ++pass) {
          const long before = pushes_;
          dist_cache_.assign(qubits_.size(), std::nullopt);
          move(t, true);
          if (pushes_ == before) {
            break;
          }
        }
        start_gates(t);
      };
      bool stuck = true;
      while (stuck) {
        forced_passes();
        if (events_.empty() && desperate_rounds_ < qubits_.size()) {
          ++desperate_rounds_;
          desperate_ = true;
          forced_passes();
          desperate_ = false;
        }
        stuck = events_.empty();
        if (stuck && !back_off()) {
          return give_up("no ion can make progress");
        }
      }
    }
    if (!events_.empty()) {
      t = std::get<0>(events_.top());
    }
  }
  return finish();
}

ScheduleResult Simulator::finish() {
  for (const auto& gate : out_.gates) {
    out_.total_latency = std::max(out_.total_latency, gate.end);
  }
  for (const auto& hop : out_.hops) {
    out_.total_latency = std::max(out_.total_latency, hop.end);
  }
  std::sort(out_.stalls.begin(), out_.stalls.end(),
            [](const auto& a, const auto& b) { return a.instruction < b.instruction; });
  for (const auto& s : qubits_) {
    out_.final_positions.push_back(s.block);
  }
  return out_;
}

void Simulator::walk(QubitIndex q, const std::vector<BlockId>& hops, Time& t) {
  auto& s = qs(q);
  const int route = next_route_id_++;
  std::optional<Direction> last;
  for (BlockId next : hops) {
    const Direction d = *g_.direction_between(s.block, next);
    const Time latency = g_.hop_latency(last, d);
    last = d;
    out_.hops.push_back({t, t + latency, q, s.block, next, route});
    auto& from = occ_[static_cast<std::size_t>(s.block)];
    from.erase(std::find(from.begin(), from.end(), q));
    occ_[static_cast<std::size_t>(next)].push_back(q);
    s.block = next;
    t += latency;
  }
}

// Moves `o` to the nearest free spot outside `keep_clear`, preferring gate
// and storage locations. Ions in the way are cleared recursively up to
// `depth` levels.
bool Simulator::relocate(QubitIndex o, const std::vector<BlockId>& keep_clear,
                         Time& t, int depth) {
  const BlockId from = qs(o).block;
  std::vector<Time> pen(occ_.size(), 0);
  for (std::size_t b = 0; b < occ_.size(); ++b) {
    if (!occ_[b].empty() && static_cast<BlockId>(b) != from) {
      pen[b] = depth > 0 ? 4 * penalty_ : kUnreachable;
    }
  }
  for (BlockId b : keep_clear) {
    if (!occ_[static_cast<std::size_t>(b)].empty()) {
      pen[static_cast<std::size_t>(b)] = kUnreachable;
    }
  }
  const auto dist = distances_from(g_, from, RouteCosts{pen, {}, std::nullopt});
  BlockId best = kNowhere;
  for (bool gates_only : {true, false}) {
    for (std::size_t b = 0; b < occ_.size(); ++b) {
      const auto id = static_cast<BlockId>(b);
      if (id == from || !occ_[b].empty() || dist[b] >= kUnreachable ||
          (gates_only && !layout_.block(id).has_gate()) ||
          std::find(keep_clear.begin(), keep_clear.end(), id) != keep_clear.end()) {
        continue;
      }
      if (best == kNowhere || dist[b] < dist[static_cast<std::size_t>(best)]) {
        best = id;
      }
    }
    if (best != kNowhere) {
      break;
    }
  }
  if (best == kNowhere) {
    return false;
  }
  const auto r = find_route(g_, from, best, RouteCosts{pen, {}, std::nullopt});
  auto keep = keep_clear;
  keep.push_back(from);
  keep.insert(keep.end(), r.hops.begin(), r.hops.end());
  for (BlockId b : r.hops) {
    const auto occupants = occ_[static_cast<std::size_t>(b)];
    for (QubitIndex x : occupants) {
      if (!relocate(x, keep, t, depth - 1)) {
        return false;
      }
    }
  }
  walk(o, r.hops, t);
  return true;
}

// Brings `q` to gate block `g`, clearing every other ion off its way first.
bool Simulator::bring(QubitIndex q, BlockId g, InstrId i, Time& t) {
  std::vector<Time> pen(occ_.size(), 0);
  for (int attempt = 0; attempt < 16; ++attempt) {
    if (qs(q).block == g) {
      return true;
    }
    for (std::size_t b = 0; b < occ_.size(); ++b) {
      if (pen[b] < kUnreachable) {
        pen[b] = occ_[b].empty() ? 0 : penalty_;
      }
    }
    pen[static_cast<std::size_t>(g)] = 0;
    const auto r = find_route(g_, qs(q).block, g, RouteCosts{pen, {}, std::nullopt});
    if (!r.found) {
      return false;
    }
    std::vector<BlockId> keep{qs(q).block};
    keep.insert(keep.end(), r.hops.begin(), r.hops.end());
    bool clear = true;
    for (BlockId b : r.hops) {
      const auto occupants = occ_[static_cast<std::size_t>(b)];
      for (QubitIndex o : occupants) {
        if (b == g && is_operand(i, o)) {
          continue;
        }
        if (!relocate(o, keep, t)) {
          pen[static_cast<std::size_t>(b)] = kUnreachable;
          clear = false;
          break;
        }
      }
      if (!clear) {
        break;
      }
    }
    if (clear) {
      walk(q, r.hops, t);
      return true;
    }
  }
  return false;
}

// Fallback when concurrent movement jams: let everything in flight land,
// then run one instruction at a time with one ion moving at a time.
ScheduleResult Simulator::serial(Time t) {
  while (!events_.empty()) {
    t = std::get<0>(events_.top());
    process_events(t);
  }
  for (auto& s : qubits_) {
    s.task = kNoTask;
    s.dest = kNowhere;
    s.detour = kNowhere;
    s.shun = kNowhere;
    s.lent.reset();
    forget_route(s);
  }
  for (const auto& k : assigned_) {
    state_[static_cast<std::size_t>(k.second)] = InstrState::Ready;
    ready_.insert(k);
  }
  assigned_.clear();
  std::fill(reserved_.begin(), reserved_.end(), -1);
  std::fill(incoming_.begin(), incoming_.end(), 0);
  std::fill(deferred_.begin(), deferred_.end(), 0);

  const std::size_t n = seq_.size();
  while (done_ < n) {
    const InstrId i = ready_.begin()->second;
    const auto ii = static_cast<std::size_t>(i);
    const auto& ops = instr(i).operands;
    BlockId g = annotated_ ? loc_[ii] : kNowhere;
    if (!annotated_) {
      std::vector<std::vector<Time>> dist;
      for (QubitIndex q : ops) {
        dist.push_back(distances_from(g_, qs(q).block));
      }
      Time best = kUnreachable;
      for (BlockId b : layout_.gate_blocks()) {
        const auto bi = static_cast<std::size_t>(b);
        Time cost = 0;
        for (const auto& d : dist) {
          cost = std::min(kUnreachable, cost + d[bi]);
        }
        for (QubitIndex o : occ_[bi]) {
          if (!is_operand(i, o)) {
            cost = std::min(kUnreachable, cost + 4 * penalty_);
          }
        }
        if (cost < best) {
          best = cost;
          g = b;
        }
      }
      if (g == kNowhere) {
        return deadlock(t, "no gate location reachable by every operand");
      }
      loc_[ii] = g;
    }
    // Make room at the gate, then bring the operands in.
    const auto occupants = occ_[static_cast<std::size_t>(g)];
    for (QubitIndex o : occupants) {
      if (!is_operand(i, o) && !relocate(o, {g}, t)) {
        return deadlock(t, "no ion can make progress");
      }
    }
    for (QubitIndex q : ops) {
      if (!bring(q, g, i, t)) {
        return deadlock(t, "no ion can make progress");
      }
    }
    ready_.erase(key(i));
    const Time end = t + gate_latency(instr(i).gate, g_.tech());
    out_.gates[ii] = GateEvent{i, g, t, end, ops};
    out_.stalls.push_back({i, ready_time_[ii], t, t - ready_time_[ii],
                           resource_[ii].empty() ? "serialized" : resource_[ii]});
    state_[ii] = InstrState::Running;
    executing_[static_cast<std::size_t>(g)] = 1;
    reserved_[static_cast<std::size_t>(g)] = i;
    for (QubitIndex q : ops) {
      qs(q).in_gate = true;
      qs(q).task = i;
      qs(q).dest = g;
    }
    events_.emplace(end, kGateEnd, i);
    t = end;
    process_events(t);
  }
  return finish();
}

} // namespace

ScheduleResult schedule(const InstructionSequence& seq, const Layout& layout,
                        const MovementGraph& graph,
                        const std::vector<BlockId>& initial,
                        const PriorityMap& priorities,
                        const std::optional<GateAssignment>& assignment,
                        const SchedulerOptions& options) {
  Simulator sim(seq, layout, graph, initial, priorities, assignment, options);
  return sim.run();
}

ScheduleResult schedule(const InstructionSequence& seq, const Layout& layout,
                        const std::vector<BlockId>& initial,
                        const PriorityMap& priorities,
                        const std::optional<GateAssignment>& assignment,
                        const TechnologyParams& tech,
                        const SchedulerOptions& options) {
  const auto graph = derive_movement_graph(layout, tech);
  return schedule(seq, layout, graph, initial, priorities, assignment, options);
}

} // namespace qpnr
