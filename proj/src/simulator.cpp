/* Copyright 2026 The pdplan Authors. All Rights Reserved.

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

#include "simulator.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <queue>
#include <random>
#include <vector>

#include "queueing.h"

namespace pdplan::sim {

namespace {

// The engine is bit-stable across standard library implementations; the
// distributions are inverse-CDF by hand for the same reason.
constexpr char kRngName[] = "mt19937_64+inverse-cdf";

constexpr int kCiBatches = 32;
constexpr double kCiTQuantile = 2.0395;  // t_{0.975, 31}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in (0, 1]; the open lower end keeps log() finite.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  }

  double exponential(double mean) { return -std::log(uniform()) * mean; }

  int uniform_index(int n) {
    const int idx = static_cast<int>(uniform() * n);
    return std::min(idx, n - 1);
  }

 private:
  std::mt19937_64 engine_;
};

enum class EventType : std::uint8_t {
  arrival,
  prefill_done,
  decode_ready,
  decode_step,
};

struct Event {
  double time = 0.0;
  std::uint64_t seq = 0;  // FIFO tie-break among equal times
  EventType type = EventType::arrival;
  std::uint32_t instance = 0;
  std::uint64_t request = 0;
};

struct EventAfter {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) {
      return a.time > b.time;
    }
    return a.seq > b.seq;
  }
};

struct Request {
  double arrival = 0.0;
  double service = 0.0;
  double batch_join = 0.0;
  int tokens = 0;
};

struct PrefillInstance {
  std::deque<std::uint64_t> queue;  // front is in service
};

struct DecodeInstance {
  std::vector<std::uint64_t> active;
  std::deque<std::uint64_t> pending;
  bool stepping = false;
};

void validate_config(const SimConfig& config) {
  if (config.n_prefill < 1 || config.n_decode < 1) {
    throw Error(ErrorCode::invalid_argument,
                "simulation needs at least one instance per phase");
  }
  if (!(config.arrival_rate_rps > 0.0) ||
      !std::isfinite(config.arrival_rate_rps)) {
    throw Error(ErrorCode::invalid_argument,
                "arrival_rate must be positive and finite");
  }
  if (!(config.input_len >= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "input_len must be >= 1");
  }
  if (config.output_len < 1) {
    throw Error(ErrorCode::invalid_argument, "output_len must be >= 1");
  }
  if (!(config.prefill_service_mean_s > 0.0)) {
    throw Error(ErrorCode::invalid_argument,
                "prefill_service_mean must be positive");
  }
  if (!(config.kv_transfer_delay_s >= 0.0)) {
    throw Error(ErrorCode::invalid_argument,
                "kv_transfer_delay must be non-negative");
  }
  if (config.decode_batch_cap != 0.0 && !(config.decode_batch_cap >= 1.0)) {
    throw Error(ErrorCode::invalid_argument,
                "decode_batch_cap must be 0 (uncapped) or >= 1");
  }
  if (!(config.warmup_fraction >= 0.0) || config.warmup_fraction >= 1.0) {
    throw Error(ErrorCode::invalid_argument,
                "warmup_fraction must lie in [0, 1)");
  }
  if (config.max_requests == 0 && !(config.max_sim_time_s > 0.0)) {
    throw Error(ErrorCode::invalid_argument,
                "set max_requests and/or max_sim_time as the horizon");
  }
}

double percentile(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) {
    return 0.0;
  }
  const double rank = std::ceil(p * static_cast<double>(sorted.size()));
  const std::size_t idx =
      std::min(sorted.size() - 1,
               static_cast<std::size_t>(std::max(rank - 1.0, 0.0)));
  return sorted[idx];
}

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) {
    return 0.0;
  }
  double sum = 0.0;
  for (const double x : xs) {
    sum += x;
  }
  return sum / static_cast<double>(xs.size());
}

// 95% half-width for the mean of a correlated series via batch means.
double batch_means_halfwidth(const std::vector<double>& xs) {
  if (xs.size() < static_cast<std::size_t>(kCiBatches) * 2) {
    return std::numeric_limits<double>::infinity();
  }
  const std::size_t per_batch = xs.size() / kCiBatches;
  std::vector<double> means(kCiBatches, 0.0);
  for (int b = 0; b < kCiBatches; ++b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < per_batch; ++i) {
      sum += xs[static_cast<std::size_t>(b) * per_batch + i];
    }
    means[b] = sum / static_cast<double>(per_batch);
  }
  const double grand = mean_of(means);
  double var = 0.0;
  for (const double m : means) {
    var += (m - grand) * (m - grand);
  }
  var /= kCiBatches - 1;
  return kCiTQuantile * std::sqrt(var / kCiBatches);
}

}  // namespace

std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t run_index) {
  return splitmix64(seed + (run_index + 1) * 0x9e3779b97f4a7c15ULL);
}

const char* rng_name() { return kRngName; }

SimResult run_sim(const SimConfig& config, const decode::DecodeCurve& curve) {
  validate_config(config);

  Rng rng(config.seed);
  std::priority_queue<Event, std::vector<Event>, EventAfter> events;
  std::uint64_t next_seq = 0;
  const auto schedule = [&](double time, EventType type,
                            std::uint32_t instance, std::uint64_t request) {
    events.push({time, next_seq++, type, instance, request});
  };

  std::vector<Request> requests;
  if (config.max_requests > 0) {
    requests.reserve(config.max_requests);
  }
  std::vector<PrefillInstance> prefill(config.n_prefill);
  std::vector<DecodeInstance> decode_insts(config.n_decode);

  // Time integrals over the whole run; the measurement window is carved out
  // with snapshots.
  double last_time = 0.0;
  double area_queue = 0.0;   // prefill requests in system (waiting + served)
  double area_busy_p = 0.0;  // busy prefill instances
  double area_busy_d = 0.0;  // stepping decode instances
  int in_prefill_system = 0;
  int busy_prefill = 0;
  int busy_decode = 0;

  struct Snapshot {
    double time = 0.0;
    double area_queue = 0.0;
    double area_busy_p = 0.0;
    double area_busy_d = 0.0;
  };
  Snapshot window_open;
  Snapshot window_close;
  bool opened = false;
  bool closed = false;
  const auto take_snapshot = [&](Snapshot& snap, double t) {
    snap = {t, area_queue, area_busy_p, area_busy_d};
  };

  // Request-count horizon counts by arrival index; a pure time horizon counts
  // by arrival time instead.
  const bool index_mode = config.max_requests > 0;
  const std::uint64_t warmup_index =
      index_mode ? static_cast<std::uint64_t>(
                       config.warmup_fraction *
                       static_cast<double>(config.max_requests))
                 : 0;
  std::vector<double> time_boundaries;
  std::size_t next_boundary = 0;
  if (!index_mode) {
    time_boundaries = {config.warmup_fraction * config.max_sim_time_s,
                       config.max_sim_time_s};
  }

  const auto advance = [&](double t) {
    while (next_boundary < time_boundaries.size() &&
           time_boundaries[next_boundary] <= t) {
      const double b = time_boundaries[next_boundary];
      if (b > last_time) {
        area_queue += in_prefill_system * (b - last_time);
        area_busy_p += busy_prefill * (b - last_time);
        area_busy_d += busy_decode * (b - last_time);
        last_time = b;
      }
      if (next_boundary == 0) {
        take_snapshot(window_open, b);
        opened = true;
      } else {
        take_snapshot(window_close, b);
        closed = true;
      }
      ++next_boundary;
    }
    area_queue += in_prefill_system * (t - last_time);
    area_busy_p += busy_prefill * (t - last_time);
    area_busy_d += busy_decode * (t - last_time);
    last_time = t;
  };

  const auto counted = [&](std::uint64_t idx) {
    if (index_mode) {
      return idx >= warmup_index;
    }
    return requests[idx].arrival >=
           config.warmup_fraction * config.max_sim_time_s;
  };

  std::vector<double> sojourn_samples;  // prefill wait + service, counted only
  std::vector<double> tpot_samples;
  std::uint64_t arrivals_total = 0;
  std::uint64_t completed_total = 0;
  std::uint64_t tokens_generated = 0;
  std::uint64_t completions_in_window = 0;

  const auto admit_pending = [&](DecodeInstance& inst, double t) {
    while (!inst.pending.empty() &&
           (config.decode_batch_cap <= 0.0 ||
            static_cast<double>(inst.active.size()) <
                config.decode_batch_cap)) {
      const std::uint64_t idx = inst.pending.front();
      inst.pending.pop_front();
      inst.active.push_back(idx);
      requests[idx].batch_join = t;
    }
  };

  // First arrival of the Poisson process.
  const double mean_interarrival = 1.0 / config.arrival_rate_rps;
  {
    const double t0 = rng.exponential(mean_interarrival);
    if ((config.max_sim_time_s <= 0.0 || t0 <= config.max_sim_time_s) &&
        (!index_mode || config.max_requests > 0)) {
      schedule(t0, EventType::arrival, 0, 0);
    }
  }

  while (!events.empty()) {
    const Event ev = events.top();
    events.pop();
    advance(ev.time);
    const double now = ev.time;

    switch (ev.type) {
      case EventType::arrival: {
        const std::uint64_t idx = ev.request;
        if (index_mode && idx == warmup_index && !opened) {
          take_snapshot(window_open, now);
          opened = true;
        }
        requests.push_back({});
        Request& req = requests[idx];
        req.arrival = now;
        ++arrivals_total;

        const int p = rng.uniform_index(config.n_prefill);
        // One uniform is consumed either way so that runs differing only in
        // the service model share arrival times and routes (common random
        // numbers).
        const double service_u = rng.uniform();
        req.service =
            config.prefill_service == ServiceModel::exponential
                ? -std::log(service_u) * config.prefill_service_mean_s
                : config.prefill_service_mean_s;

        PrefillInstance& inst = prefill[static_cast<std::size_t>(p)];
        inst.queue.push_back(idx);
        ++in_prefill_system;
        if (inst.queue.size() == 1) {
          ++busy_prefill;
          schedule(now + req.service, EventType::prefill_done,
                   static_cast<std::uint32_t>(p), idx);
        }

        // Next arrival, unless a horizon cuts the process off.
        bool more = true;
        const std::uint64_t next_idx = idx + 1;
        if (index_mode && next_idx >= config.max_requests) {
          more = false;
        }
        double next_time = 0.0;
        if (more) {
          next_time = now + rng.exponential(mean_interarrival);
          if (config.max_sim_time_s > 0.0 &&
              next_time > config.max_sim_time_s) {
            more = false;
          }
        }
        if (more) {
          schedule(next_time, EventType::arrival, 0, next_idx);
        } else if (index_mode && opened && !closed) {
          take_snapshot(window_close, now);
          closed = true;
        }
        break;
      }

      case EventType::prefill_done: {
        PrefillInstance& inst = prefill[ev.instance];
        const std::uint64_t idx = inst.queue.front();
        inst.queue.pop_front();
        --in_prefill_system;
        if (counted(idx)) {
          sojourn_samples.push_back(now - requests[idx].arrival);
        }
        if (!inst.queue.empty()) {
          schedule(now + requests[inst.queue.front()].service,
                   EventType::prefill_done, ev.instance, inst.queue.front());
        } else {
          --busy_prefill;
        }
        schedule(now + config.kv_transfer_delay_s, EventType::decode_ready, 0,
                 idx);
        break;
      }

      case EventType::decode_ready: {
        // Least-loaded decode instance, ties to the lowest index.
        std::size_t best = 0;
        std::size_t best_load = std::numeric_limits<std::size_t>::max();
        for (std::size_t d = 0; d < decode_insts.size(); ++d) {
          const std::size_t load =
              decode_insts[d].active.size() + decode_insts[d].pending.size();
          if (load < best_load) {
            best_load = load;
            best = d;
          }
        }
        DecodeInstance& inst = decode_insts[best];
        inst.pending.push_back(ev.request);
        if (!inst.stepping) {
          admit_pending(inst, now);
          inst.stepping = true;
          ++busy_decode;
          schedule(now + curve.tpot_clamped(
                             static_cast<double>(inst.active.size())),
                   EventType::decode_step, static_cast<std::uint32_t>(best),
                   0);
        }
        break;
      }

      case EventType::decode_step: {
        DecodeInstance& inst = decode_insts[ev.instance];
        for (const std::uint64_t idx : inst.active) {
          ++requests[idx].tokens;
          ++tokens_generated;
        }
        std::erase_if(inst.active, [&](std::uint64_t idx) {
          if (requests[idx].tokens < config.output_len) {
            return false;
          }
          ++completed_total;
          if (counted(idx)) {
            tpot_samples.push_back((now - requests[idx].batch_join) /
                                   config.output_len);
          }
          if (opened && !closed) {
            ++completions_in_window;
          }
          return true;
        });
        admit_pending(inst, now);
        if (!inst.active.empty()) {
          schedule(now + curve.tpot_clamped(
                             static_cast<double>(inst.active.size())),
                   EventType::decode_step, ev.instance, 0);
        } else {
          inst.stepping = false;
          --busy_decode;
        }
        break;
      }
    }
  }

  // A time horizon may outlive the last event when the system drains early;
  // the tail contributes idle time and the closing snapshot.
  if (!index_mode) {
    advance(std::max(last_time, config.max_sim_time_s));
  }

  SimResult result;
  result.rng_name = kRngName;
  result.completed_requests = completed_total;
  result.overloaded = config.arrival_rate_rps * config.prefill_service_mean_s >=
                      static_cast<double>(config.n_prefill);
  result.counted_requests = sojourn_samples.size();

  result.sojourn_mean_s = mean_of(sojourn_samples);
  result.sojourn_ci_halfwidth_s = batch_means_halfwidth(sojourn_samples);
  result.ttft_mean_s = result.sojourn_mean_s + config.kv_transfer_delay_s;
  {
    std::vector<double> sorted = sojourn_samples;
    std::sort(sorted.begin(), sorted.end());
    result.ttft_p50_s = percentile(sorted, 0.50) + config.kv_transfer_delay_s;
    result.ttft_p99_s = percentile(sorted, 0.99) + config.kv_transfer_delay_s;
  }
  result.tpot_mean_s = mean_of(tpot_samples);

  if (opened && closed && window_close.time > window_open.time) {
    const double window = window_close.time - window_open.time;
    result.measurement_time_s = window;
    result.mean_prefill_queue_len =
        (window_close.area_queue - window_open.area_queue) / window;
    result.prefill_utilization =
        (window_close.area_busy_p - window_open.area_busy_p) / window /
        config.n_prefill;
    result.decode_utilization =
        (window_close.area_busy_d - window_open.area_busy_d) / window /
        config.n_decode;
    result.measured_arrival_rate_rps =
        static_cast<double>(result.counted_requests) / window;
    result.total_token_throughput_tps =
        static_cast<double>(completions_in_window) *
        (config.input_len + config.output_len) / window;
  }

  // Conservation: the drain leaves nothing in flight.
  if (completed_total != arrivals_total ||
      tokens_generated !=
          completed_total * static_cast<std::uint64_t>(config.output_len)) {
    throw Error(ErrorCode::invalid_argument,
                "simulation accounting failure: requests or tokens lost");
  }
  return result;
}

std::vector<Mm1Row> validate_against_mm1(const PrefillProfile& profile,
                                         double input_len,
                                         std::span<const double> rates_rps,
                                         double overhead_s,
                                         const SimSettings& settings) {
  const double mu = queueing::service_rate(profile, input_len);
  if (!(overhead_s >= 0.0)) {
    throw Error(ErrorCode::invalid_argument,
                "overhead_time must be non-negative");
  }

  // Decode is irrelevant here; give it a flat, effectively instant curve.
  decode::DecodeCurve fast_decode(
      DecodeProfile{0.0, 0.0, {{1.0, 1e-6, {}}, {1e9, 1e-6, {}}}});

  std::vector<Mm1Row> rows;
  rows.reserve(rates_rps.size());
  for (std::size_t i = 0; i < rates_rps.size(); ++i) {
    const double rate = rates_rps[i];
    if (!(rate > 0.0)) {
      throw Error(ErrorCode::invalid_argument,
                  "arrival rates must be positive");
    }
    Mm1Row row;
    row.rate_rps = rate;
    if (rate >= mu) {
      row.stable = false;
      row.analytic_ttft_s = std::numeric_limits<double>::quiet_NaN();
      row.sim_ttft_s = std::numeric_limits<double>::quiet_NaN();
      row.rel_err = std::numeric_limits<double>::quiet_NaN();
      rows.push_back(row);
      continue;
    }
    SimConfig config;
    config.n_prefill = 1;
    config.n_decode = 1;
    config.arrival_rate_rps = rate;
    config.input_len = input_len;
    config.output_len = 1;
    config.prefill_service = ServiceModel::exponential;
    config.prefill_service_mean_s = 1.0 / mu;
    config.kv_transfer_delay_s = overhead_s;
    config.seed = derive_stream_seed(settings.seed, i);
    config.max_requests = settings.requests_per_point;
    config.warmup_fraction = settings.warmup_fraction;

    const SimResult sim = run_sim(config, fast_decode);
    row.analytic_ttft_s =
        queueing::predicted_ttft({mu, rate}, overhead_s);
    row.sim_ttft_s = sim.ttft_mean_s;
    row.rel_err =
        std::abs(row.sim_ttft_s - row.analytic_ttft_s) / row.analytic_ttft_s;
    rows.push_back(row);
  }
  return rows;
}

std::vector<SweepComparison> simulate_sweep(
    const AllocationPlan& plan, const WorkloadSpec& workload,
    const SloSpec& slo, const PrefillProfile& prefill,
    const decode::DecodeCurve& curve, std::span<const double> grid_tps,
    const SimSettings& settings) {
  const std::vector<planner::SweepPoint> analytic =
      planner::sweep(plan, workload, slo, prefill, curve, grid_tps);

  std::vector<SweepComparison> out;
  out.reserve(grid_tps.size());
  for (std::size_t i = 0; i < grid_tps.size(); ++i) {
    if (!(grid_tps[i] > 0.0)) {
      throw Error(ErrorCode::invalid_argument,
                  "simulated sweep grid values must be positive");
    }
    SimConfig config;
    config.n_prefill = plan.n_prefill;
    config.n_decode = plan.n_decode;
    config.arrival_rate_rps = grid_tps[i] / workload.tokens_per_request();
    config.input_len = workload.mean_input_len;
    config.output_len = std::max(
        1, static_cast<int>(std::lround(workload.mean_output_len)));
    config.prefill_service = settings.prefill_service;
    config.prefill_service_mean_s =
        workload.planning_input_len() / prefill.max_throughput_tps;
    config.kv_transfer_delay_s = slo.overhead_s;
    config.seed = derive_stream_seed(settings.seed, i);
    config.max_requests = settings.requests_per_point;
    config.warmup_fraction = settings.warmup_fraction;

    out.push_back({analytic[i], run_sim(config, curve)});
  }
  return out;
}

}  // namespace pdplan::sim
