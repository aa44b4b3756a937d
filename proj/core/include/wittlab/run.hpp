#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "wittlab/ring.hpp"

namespace wittlab {

using json = nlohmann::ordered_json;

/// Ring description <-> JSON per the documented schema:
/// {"kind": "poly"|"quotient"|"eisenstein", "p", "vars", "rules", "e", "K",
///  "domain", "nilpotent"}.
json ring_to_json(const RingDesc& R);
RingPtr ring_from_json(const json& j);

struct RunResult {
    json bundle;
    bool ok = false;
};

/// Dispatch a batch command.  Deterministic for a fixed (config, seed); the
/// bundle lists every computed object and assertion outcome.  Wall-clock
/// timing is attached only at verbosity >= 2 so that default output stays
/// byte-reproducible.
RunResult run(const json& config, uint64_t seed, int verbosity = 0);

} // namespace wittlab
