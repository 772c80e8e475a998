#include "quanta/translate.hpp"

#include <deque>
#include <map>
#include <set>
#include <tuple>

namespace quanta {

NestedWeightedAutomaton mca_to_nwa(const MonitorCounterAutomaton& mca) {
  mca.require_deterministic("automaton with monitor counters");
  const std::size_t n = mca.counters();
  std::map<std::pair<std::size_t, StateId>, SlaveIndex> slave_of;
  for (const auto& t : mca.transitions()) {
    for (std::size_t j = 0; j < n; ++j) {
      if (t.label[j].op == CounterInstruction::Op::Start) slave_of.emplace(std::make_pair(j, t.from), 0);
    }
  }
  NestedWeightedAutomaton nwa;
  nwa.master_fn = mca.value_function();
  for (auto& [key, index] : slave_of) {
    const auto [counter, start] = key;
    index = static_cast<SlaveIndex>(nwa.slaves.size());
    WeightedAutomaton slave(mca.alphabet(), FinValFn::sum(), WordMode::Finite);
    StateId init = slave.add_state("start");
    StateId done = slave.add_state("done", true);
    std::map<StateId, StateId> copy;
    std::deque<StateId> queue;
    auto intern = [&](StateId q) {
      auto it = copy.find(q);
      if (it != copy.end()) return it->second;
      StateId id = slave.add_state(mca.state_name(q));
      copy.emplace(q, id);
      queue.push_back(q);
      return id;
    };
    for (LetterId a = 0; a < mca.alphabet().size(); ++a) {
      const auto* t = mca.step(start, a);
      if (t && t->label[counter].op == CounterInstruction::Op::Start) {
        slave.add_transition(init, a, intern(t->to), Weight(0));
      }
    }
    while (!queue.empty()) {
      StateId q = queue.front();
      queue.pop_front();
      for (LetterId a = 0; a < mca.alphabet().size(); ++a) {
        const auto* t = mca.step(q, a);
        if (!t) continue;
        const auto& ins = t->label[counter];
        if (ins.op == CounterInstruction::Op::Terminate) {
          slave.add_transition(copy.at(q), a, done, Weight(0));
        } else if (ins.op == CounterInstruction::Op::Add) {
          slave.add_transition(copy.at(q), a, intern(t->to), Weight(ins.amount));
        }
      }
    }
    nwa.slaves.push_back(std::move(slave));
  }
  const auto dummy = static_cast<SlaveIndex>(nwa.slaves.size());
  WeightedAutomaton silent(mca.alphabet(), FinValFn::sum(), WordMode::Finite);
  silent.add_state("done", true);
  nwa.slaves.push_back(std::move(silent));
  nwa.dummies.push_back(dummy);

  nwa.master = MasterAutomaton(mca.alphabet());
  for (StateId q = 0; q < mca.num_states(); ++q) nwa.master.add_state(mca.state_name(q), mca.is_accepting(q));
  nwa.master.set_initial(mca.initial());
  for (const auto& t : mca.transitions()) {
    SlaveIndex label = dummy;
    for (std::size_t j = 0; j < n; ++j) {
      if (t.label[j].op == CounterInstruction::Op::Start) label = slave_of.at({j, t.from});
    }
    nwa.master.add_transition(t.from, t.letter, t.to, label);
  }
  return nwa;
}

namespace {

struct Slot {
  enum class Kind : std::uint8_t { Free, Running, Closing };
  Kind kind = Kind::Free;
  SlaveIndex slave = 0;
  StateId state = 0;
  Integer carry;  // weight read by the slave but not yet added to the counter

  auto key() const { return std::tie(kind, slave, state, carry); }
  friend bool operator<(const Slot& a, const Slot& b) { return a.key() < b.key(); }
};

using ProductState = std::pair<StateId, std::vector<Slot>>;

struct ProductStateLess {
  bool operator()(const ProductState& a, const ProductState& b) const {
    if (a.first != b.first) return a.first < b.first;
    return a.second < b.second;
  }
};

std::string describe(const MasterAutomaton& master, const std::vector<WeightedAutomaton>& slaves,
                     const ProductState& ps) {
  std::string out = master.state_name(ps.first) + "[";
  for (std::size_t j = 0; j < ps.second.size(); ++j) {
    if (j) out += ",";
    const auto& s = ps.second[j];
    switch (s.kind) {
      case Slot::Kind::Free: out += "_"; break;
      case Slot::Kind::Running:
        out += std::to_string(s.slave + 1) + ":" + slaves[s.slave].state_name(s.state);
        if (s.carry != 0) out += "+" + s.carry.get_str();
        break;
      case Slot::Kind::Closing: out += "end"; if (s.carry != 0) out += "+" + s.carry.get_str(); break;
    }
  }
  return out + "]";
}

}  // namespace

MonitorCounterAutomaton nwa_to_mca(const NestedWeightedAutomaton& nwa, std::size_t k) {
  nwa.master.require_deterministic("master");
  std::vector<WeightedAutomaton> slaves;
  for (SlaveIndex i = 0; i < nwa.slaves.size(); ++i) {
    slaves.push_back(nwa.is_silent_launch(i) ? nwa.slaves[i] : to_sum_slave(nwa.slaves[i]));
  }

  struct Edge {
    std::size_t from;
    LetterId letter;
    std::size_t to;
    InstructionVector ins;
  };
  std::vector<ProductState> states;
  std::map<ProductState, std::size_t, ProductStateLess> ids;
  std::deque<std::size_t> queue;
  std::vector<Edge> edges;
  std::size_t counters = 0;
  auto intern = [&](ProductState ps) {
    while (!ps.second.empty() && ps.second.back().kind == Slot::Kind::Free) ps.second.pop_back();
    auto it = ids.find(ps);
    if (it != ids.end()) return it->second;
    std::size_t id = states.size();
    counters = std::max(counters, ps.second.size());
    ids.emplace(ps, id);
    states.push_back(std::move(ps));
    queue.push_back(id);
    return id;
  };
  intern({nwa.master.initial(), {}});

  while (!queue.empty()) {
    std::size_t cur = queue.front();
    queue.pop_front();
    for (LetterId a = 0; a < nwa.alphabet().size(); ++a) {
      const ProductState& ps = states[cur];
      const auto* t = nwa.master.step(ps.first, a);
      if (!t) continue;
      std::vector<Slot> slots = ps.second;
      InstructionVector ins(slots.size(), CounterInstruction::add(0));
      bool stuck = false;
      for (std::size_t j = 0; j < slots.size() && !stuck; ++j) {
        Slot& s = slots[j];
        if (s.kind == Slot::Kind::Closing) {
          if (s.carry == 0) {
            ins[j] = CounterInstruction::terminate();
            s = Slot{};
          } else {
            ins[j] = CounterInstruction::add(s.carry);
            s.carry = 0;
          }
        } else if (s.kind == Slot::Kind::Running) {
          const auto& slave = slaves[s.slave];
          const auto* st = slave.step(s.state, a);
          if (!st) {
            stuck = true;
            break;
          }
          Integer total = s.carry + st->label.value();
          if (slave.is_accepting(st->to)) {
            if (total == 0) {
              ins[j] = CounterInstruction::terminate();
              s = Slot{};
            } else {
              ins[j] = CounterInstruction::add(total);
              s = Slot{Slot::Kind::Closing, 0, 0, 0};
            }
          } else {
            ins[j] = CounterInstruction::add(total);
            s.state = st->to;
            s.carry = 0;
          }
        }
      }
      if (stuck) continue;
      if (!nwa.is_silent_launch(t->label)) {
        const auto& slave = slaves[t->label];
        const auto* st = slave.step(slave.initial(), a);
        if (!st) continue;
        std::size_t j = 0;
        while (j < ps.second.size() && ps.second[j].kind != Slot::Kind::Free) ++j;
        if (j == slots.size()) {
          slots.emplace_back();
          ins.push_back(CounterInstruction::add(0));
        }
        ins[j] = CounterInstruction::start();
        if (slave.is_accepting(st->to)) slots[j] = Slot{Slot::Kind::Closing, 0, 0, st->label.value()};
        else slots[j] = Slot{Slot::Kind::Running, t->label, st->to, st->label.value()};
      }
      std::size_t running = 0;
      for (const auto& s : slots) running += s.kind == Slot::Kind::Running;
      if (running > k) {
        throw Error(ErrorCode::WidthExceeded,
                    "more than " + std::to_string(k) + " slaves can be active at once");
      }
      std::size_t next = intern({t->to, std::move(slots)});
      edges.push_back({cur, a, next, std::move(ins)});
    }
  }

  MonitorCounterAutomaton mca(nwa.alphabet(), nwa.master_fn, counters);
  for (const auto& ps : states) mca.add_state(describe(nwa.master, slaves, ps), nwa.master.is_accepting(ps.first));
  mca.set_initial(0);
  for (auto& e : edges) {
    e.ins.resize(counters, CounterInstruction::add(0));
    mca.add_transition(static_cast<StateId>(e.from), e.letter, static_cast<StateId>(e.to), std::move(e.ins));
  }
  return mca;
}

}  // namespace quanta
