#pragma once

#include "bbvm/engine.hpp"

namespace bbvm {

// The simulated perfect analysis: run the baseline once recording every
// tag-test probe's outcomes, then rerun with the always-constant probes
// compiled as checked jumps (free, uncounted). Shape and overflow tests are
// not removed; the metric covers tag tests only. A removed probe that flips
// outcome on the rerun (program nondeterminism) aborts the rerun.
struct OracleResult {
  ExecResult record;
  ExecResult rerun;
  uint64_t baselineTagTests = 0;
  uint64_t remainingTagTests = 0;
  uint64_t removedSites = 0;
  uint64_t polymorphicSites = 0;
  Stats rerunStats;
};

inline RemovalTable removal_table(const SiteOutcomeTable& outcomes) {
  RemovalTable removals;
  for (const auto& [key, o] : outcomes) {
    if (o.sawTrue != o.sawFalse)  // exactly one outcome ever observed
      removals.emplace(key, o.sawTrue);
  }
  return removals;
}

inline OracleResult run_oracle(const ProgramIR& prog, Limits limits = {},
                               bool validate = false) {
  OracleResult out;
  Features base = Features::for_mode(ExecMode::Baseline, limits, false, validate);
  {
    Engine rec(prog, base, limits);
    out.record = rec.run();
    out.baselineTagTests = rec.stats().dynTagTests;
    RemovalTable removals = removal_table(rec.stats().siteOutcomes);
    out.removedSites = removals.size();
    out.polymorphicSites = rec.stats().siteOutcomes.size() - removals.size();

    Engine rerun(prog, base, limits, &removals);
    out.rerun = rerun.run();
    out.remainingTagTests = rerun.stats().dynTagTests;
    out.rerunStats = rerun.stats();
  }
  return out;
}

}  // namespace bbvm
