#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>

#include "bbvm/common.hpp"

namespace bbvm {

// Identity of one tag-test probe: (function, classification site, probe).
struct SiteKey {
  FuncId fn;
  uint32_t site;
  uint32_t probe;

  uint64_t packed() const {
    return ((uint64_t)fn << 40) | ((uint64_t)site << 12) | probe;
  }
  bool operator<(const SiteKey& o) const { return packed() < o.packed(); }
  bool operator==(const SiteKey& o) const { return packed() == o.packed(); }
};

struct SiteOutcome {
  bool sawTrue = false;
  bool sawFalse = false;
  uint64_t execCount = 0;
};

using SiteOutcomeTable = std::map<uint64_t, SiteOutcome>;  // keyed by SiteKey::packed

// Per-run event counters mirroring the measurement axes of the report:
// remaining dynamic tests, specialization volume, continuation behavior.
struct Stats {
  uint64_t dynTagTests = 0;
  uint64_t dynShapeTests = 0;
  uint64_t staticTestsEliminated = 0;       // tag tests folded at compile time
  uint64_t staticShapeTestsEliminated = 0;  // shape tests folded at compile time
  uint64_t overflowChecks = 0;
  uint64_t boolBranches = 0;  // uncounted in the tag metric; kept for sanity

  uint64_t continuationsCompiled = 0;
  uint64_t continuationsInvalidated = 0;
  std::set<FuncId> invalidatingFunctions;

  uint64_t knownCalleeCalls = 0;
  uint64_t totalCalls = 0;
  uint64_t returnTagKnownDynamic = 0;
  uint64_t totalReturns = 0;
  uint64_t contUnseenCalleeState = 0;  // laziness sanity counter; stays 0

  uint64_t emittedInstrRetained = 0;  // code-size proxy (current live code)
  uint64_t emittedInstrTotal = 0;     // cumulative, never decremented
  uint64_t compileEvents = 0;         // versions + continuations + pic extensions
  uint64_t stubEvents = 0;
  uint64_t versionsCompiled = 0;
  uint64_t executedInstrs = 0;
  uint64_t validatedEntries = 0;

  SiteOutcomeTable siteOutcomes;

  uint64_t versionEnters = 0;  // laziness: versionsCompiled never exceeds this

  // filled in by the engine at the end of a run
  std::map<uint32_t, uint32_t> versionsPerBlockHist;      // version count -> #blocks
  std::map<uint32_t, uint32_t> entryPointsPerFunctionHist;
  // specialized entry points, one "name {v1:tag, ...}" line each, with tag
  // names spelled as the type lattice serializes them
  std::vector<std::string> entryPointsDetail;

  void record_tag_test(SiteKey key, bool outcome) {
    ++dynTagTests;
    SiteOutcome& o = siteOutcomes[key.packed()];
    (outcome ? o.sawTrue : o.sawFalse) = true;
    ++o.execCount;
  }
};

}  // namespace bbvm
