#pragma once

#include <chrono>
#include <functional>
#include <optional>

#include "stmon/monitor/belief.hpp"

namespace stmon::monitor {

template <class B>
struct MonitorConfig {
  const B *backend = nullptr;
  const feasible::FeasibleTable<B> *table = nullptr;  // carries the spec
  int t_max = 1;                                      // longest permitted silence
  std::size_t belief_budget = 0;                      // per-pair region cap, 0 = none

  void validate() const {
    if (!backend || !table) throw Error("monitor configuration is incomplete");
    if (t_max < 1 || t_max >= table->horizon)
      throw Error("t_max must lie in [1, horizon)");
  }
};

struct TriggerDecision {
  int tau = 1;                 // chosen silence; 1 is the fallback value
  bool fallback_used = true;   // no prediction within reach was safe and determined
  bool stopped_unsafe = false; // the scan ended on an unsafe prediction
  int unsafe_step = -1;        // k of that unsafe prediction, for diagnostics
};

// Largest trigger interval whose intermediate predictions all stay safe and
// whose final prediction is determined, scanned incrementally: predict one step
// at a time, stop at the first unsafe prediction or at K = min(t_max, T - t),
// remember the last determined instant. With no determined safe instant at all
// the fallback 1 is returned and flagged.
template <class B>
TriggerDecision trigger_time(const MonitorConfig<B> &cfg, const Belief<B> &b, int t) {
  const B &bk = *cfg.backend;
  const stl::StlSpec &spec = cfg.table->spec;
  TriggerDecision d;
  const int K = std::min(cfg.t_max, cfg.table->horizon - t);
  Belief<B> pred = b;
  for (int k = 1; k <= K; ++k) {
    pred = belief_predict_one(bk, spec, pred, t + k - 1, cfg.belief_budget);
    if (!belief_is_safe(bk, *cfg.table, pred, t + k)) {
      d.stopped_unsafe = true;
      d.unsafe_step = k;
      break;
    }
    if (belief_is_determined(bk, spec, pred, t + k)) {
      d.tau = k;
      d.fallback_used = false;
    }
  }
  return d;
}

enum class MonitorStatus { Completed, ViolatedAlarm, Fault, Exhausted };

inline const char *status_name(MonitorStatus s) {
  switch (s) {
    case MonitorStatus::Completed: return "completed";
    case MonitorStatus::ViolatedAlarm: return "violated-alarm";
    case MonitorStatus::Fault: return "fault";
    case MonitorStatus::Exhausted: return "exhausted";
  }
  return "unknown";
}

struct ObservationRecord {
  int t = 0;
  geom::Vec x;
  int decision = 0;            // 1 only on the final record of an alarming run
  int tau = 0;                 // chosen silence after this observation (0 = none)
  std::size_t belief_pairs = 0;
  bool fallback_used = false;
  bool forced_by_unsafe = false;  // the trigger scan stopped on an unsafe prediction
  long long wall_us = 0;
};

struct MonitorLog {
  std::vector<ObservationRecord> records;
  MonitorStatus status = MonitorStatus::Completed;
  int alarm_instant = -1;
  int fault_instant = -1;

  int observations() const { return static_cast<int>(records.size()); }
};

// The observation side of a finished run: states with the silences between
// them. instants()[k] is the instant of the k-th observation.
struct ObservationHistory {
  std::vector<geom::Vec> states;
  std::vector<int> taus;  // one fewer than states

  std::vector<int> instants() const {
    std::vector<int> out;
    int t = 0;
    out.push_back(t);
    for (int tau : taus) out.push_back(t += tau);
    return out;
  }
};

inline ObservationHistory history_of(const MonitorLog &log) {
  ObservationHistory h;
  for (const ObservationRecord &r : log.records) h.states.push_back(r.x);
  for (std::size_t k = 0; k + 1 < log.records.size(); ++k)
    h.taus.push_back(log.records[k].tau);
  return h;
}

// A plant answers a state request for an instant; nothing means the source ran
// out (stream closed, trace too short).
using Plant = std::function<std::optional<geom::Vec>(int)>;

inline Plant trace_plant(const stl::Trace &tr) {
  return [tr](int t) -> std::optional<geom::Vec> {
    if (t < tr.start || t > tr.end()) return std::nullopt;
    return tr.at(t);
  };
}

// Self-triggered loop: observe, refine, alarm when the refined belief is
// unsafe, otherwise choose a trigger interval, predict across it and sleep.
// Ends with Completed at the horizon, ViolatedAlarm on an unsafe refinement,
// Fault when an observation contradicts every prediction, Exhausted when the
// plant cannot serve a request. Optional per-observation callback sees the
// refined belief (used by test oracles and reports).
template <class B>
MonitorLog run_self_triggered(
    const MonitorConfig<B> &cfg, const Plant &plant,
    const std::function<void(int, const Belief<B> &, const TriggerDecision *)> &on_observe = {}) {
  cfg.validate();
  const B &bk = *cfg.backend;
  const stl::StlSpec &spec = cfg.table->spec;
  const int T = cfg.table->horizon;
  MonitorLog log;
  const typename B::Set everything = bk.domain_set();
  Belief<B> predicted;
  bool have_prediction = false;
  int t = 0;
  while (true) {
    std::optional<geom::Vec> x = plant(t);
    if (!x) {
      log.status = MonitorStatus::Exhausted;
      return log;
    }
    auto begun = std::chrono::steady_clock::now();
    // Leaving the domain is a violation in its own right, not a model fault.
    if (!bk.contains_state(everything, *x)) {
      ObservationRecord rec;
      rec.t = t;
      rec.x = *x;
      rec.decision = 1;
      log.records.push_back(std::move(rec));
      log.status = MonitorStatus::ViolatedAlarm;
      log.alarm_instant = t;
      return log;
    }
    Belief<B> refined =
        have_prediction ? belief_refine(bk, predicted, *x) : belief_initial(bk, spec, *x);
    if (refined.empty()) {
      log.status = MonitorStatus::Fault;
      log.fault_instant = t;
      return log;
    }
    ObservationRecord rec;
    rec.t = t;
    rec.x = *x;
    rec.belief_pairs = refined.size();
    if (!belief_is_safe(bk, *cfg.table, refined, t)) {
      rec.decision = 1;
      rec.wall_us = std::chrono::duration_cast<std::chrono::microseconds>(
                        std::chrono::steady_clock::now() - begun)
                        .count();
      if (on_observe) on_observe(t, refined, nullptr);
      log.records.push_back(std::move(rec));
      log.status = MonitorStatus::ViolatedAlarm;
      log.alarm_instant = t;
      return log;
    }
    if (t == T) {
      rec.wall_us = std::chrono::duration_cast<std::chrono::microseconds>(
                        std::chrono::steady_clock::now() - begun)
                        .count();
      if (on_observe) on_observe(t, refined, nullptr);
      log.records.push_back(std::move(rec));
      log.status = MonitorStatus::Completed;
      return log;
    }
    TriggerDecision d = trigger_time(cfg, refined, t);
    predicted = belief_predict(bk, spec, refined, t, d.tau, cfg.belief_budget);
    have_prediction = true;
    rec.tau = d.tau;
    rec.fallback_used = d.fallback_used;
    rec.forced_by_unsafe = d.stopped_unsafe;
    rec.wall_us = std::chrono::duration_cast<std::chrono::microseconds>(
                      std::chrono::steady_clock::now() - begun)
                      .count();
    if (on_observe) on_observe(t, refined, &d);
    log.records.push_back(std::move(rec));
    t += d.tau;
  }
}

// Baseline: observe every instant, track the exact pending set, alarm as soon
// as the state leaves its feasible set.
template <class B>
MonitorLog run_periodic(const MonitorConfig<B> &cfg, const Plant &plant) {
  cfg.validate();
  const B &bk = *cfg.backend;
  const stl::StlSpec &spec = cfg.table->spec;
  const int T = cfg.table->horizon;
  MonitorLog log;
  const typename B::Set everything = bk.domain_set();
  stl::IndexSet I = stl::IndexSet::all(spec.count());
  for (int t = 0; t <= T; ++t) {
    std::optional<geom::Vec> x = plant(t);
    if (!x) {
      log.status = MonitorStatus::Exhausted;
      return log;
    }
    auto begun = std::chrono::steady_clock::now();
    bool ok = bk.contains_state(everything, *x) && bk.contains_state(cfg.table->at(t, I), *x);
    ObservationRecord rec;
    rec.t = t;
    rec.x = *x;
    rec.decision = ok ? 0 : 1;
    rec.tau = (ok && t < T) ? 1 : 0;
    rec.belief_pairs = 1;
    rec.wall_us = std::chrono::duration_cast<std::chrono::microseconds>(
                      std::chrono::steady_clock::now() - begun)
                      .count();
    log.records.push_back(std::move(rec));
    if (!ok) {
      log.status = MonitorStatus::ViolatedAlarm;
      log.alarm_instant = t;
      return log;
    }
    I = stl::update_index_set(spec, I, t, *x);
  }
  log.status = MonitorStatus::Completed;
  return log;
}

}  // namespace stmon::monitor
