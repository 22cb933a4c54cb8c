#pragma once

#include <cstdint>
#include <vector>

#include "beliefwin/bitset.hpp"
#include "beliefwin/model.hpp"

namespace beliefwin {

enum class SensorReading : std::uint8_t { kFalse, kTrue, kJammed };

struct SensorObservation {
  SensorIndex sensor;
  SensorReading value;
};

/// Per-sensor readings for a query under an attack, in query-declaration
/// order.  A jammed sensor reports kJammed; an intact sensor reports whether
/// the state lies in its coverage.
std::vector<SensorObservation> readings(const ValidatedSpec& spec, StateIndex s,
                                        QueryIndex query, AttackIndex attack);

/// The set of states consistent with the intact readings: for each queried,
/// un-jammed sensor the candidates are its coverage if it fired, otherwise
/// the complement of its coverage.  No intact sensor means no information,
/// i.e. the full state space.
Bitset observe(const ValidatedSpec& spec, StateIndex s, QueryIndex query,
               AttackIndex attack);

/// Core of `observe` over raw sensor sets (bits index sensors); lets callers
/// evaluate sensing outside the declared alphabets.
Bitset observe_masks(const ValidatedSpec& spec, StateIndex s,
                     const Bitset& query_sensors, const Bitset& attack_sensors);

}  // namespace beliefwin
