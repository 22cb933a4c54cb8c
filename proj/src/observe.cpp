#include "beliefwin/observe.hpp"

namespace beliefwin {

std::vector<SensorObservation> readings(const ValidatedSpec& spec, StateIndex s,
                                        QueryIndex query, AttackIndex attack) {
  const Bitset& jammed = spec.attack_mask(attack);
  std::vector<SensorObservation> out;
  out.reserve(spec.query_sensors(query).size());
  for (SensorIndex i : spec.query_sensors(query)) {
    SensorReading value;
    if (jammed.test(i)) {
      value = SensorReading::kJammed;
    } else {
      value = spec.coverage(i).test(s) ? SensorReading::kTrue
                                       : SensorReading::kFalse;
    }
    out.push_back({i, value});
  }
  return out;
}

Bitset observe_masks(const ValidatedSpec& spec, StateIndex s,
                     const Bitset& query_sensors, const Bitset& attack_sensors) {
  Bitset candidates(spec.num_states());
  candidates.fill();
  query_sensors.for_each([&](std::size_t i) {
    if (attack_sensors.test(i)) return;  // jammed sensors carry no information
    const Bitset& cov = spec.coverage(static_cast<SensorIndex>(i));
    if (cov.test(s)) {
      candidates &= cov;
    } else {
      Bitset outside = cov;
      outside.complement();
      candidates &= outside;
    }
  });
  return candidates;
}

Bitset observe(const ValidatedSpec& spec, StateIndex s, QueryIndex query,
               AttackIndex attack) {
  return observe_masks(spec, s, spec.query_mask(query), spec.attack_mask(attack));
}

}  // namespace beliefwin
