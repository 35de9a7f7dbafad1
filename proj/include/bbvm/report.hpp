#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "bbvm/vm.hpp"

namespace bbvm {

inline constexpr int kStatsSchemaVersion = 1;

struct MissingBaseline : std::runtime_error {
  explicit MissingBaseline(const std::string& p)
      : std::runtime_error("no baseline run for program: " + p) {}
};

inline nlohmann::json stats_json(const Stats& s) {
  nlohmann::json j;
  j["dynTagTests"] = s.dynTagTests;
  j["dynShapeTests"] = s.dynShapeTests;
  j["staticTestsEliminated"] = s.staticTestsEliminated;
  j["staticShapeTestsEliminated"] = s.staticShapeTestsEliminated;
  j["overflowChecks"] = s.overflowChecks;
  j["continuationsCompiled"] = s.continuationsCompiled;
  j["continuationsInvalidated"] = s.continuationsInvalidated;
  j["functionsCausingInvalidation"] = s.invalidatingFunctions.size();
  j["knownCalleeCalls"] = s.knownCalleeCalls;
  j["totalCalls"] = s.totalCalls;
  j["returnTagKnownDynamic"] = s.returnTagKnownDynamic;
  j["totalReturns"] = s.totalReturns;
  j["emittedInstrCount"] = s.emittedInstrRetained;
  j["emittedInstrTotal"] = s.emittedInstrTotal;
  j["compileEvents"] = s.compileEvents;
  j["stubEvents"] = s.stubEvents;
  j["executedInstrs"] = s.executedInstrs;
  j["knownCalleeRate"] =
      s.totalCalls ? (double)s.knownCalleeCalls / (double)s.totalCalls : 0.0;
  j["returnTagKnownRate"] =
      s.totalReturns ? (double)s.returnTagKnownDynamic / (double)s.totalReturns : 0.0;
  nlohmann::json vh = nlohmann::json::object();
  for (const auto& [versions, blocks] : s.versionsPerBlockHist)
    vh[std::to_string(versions)] = blocks;
  j["versionsPerBlock"] = vh;
  nlohmann::json eh = nlohmann::json::object();
  for (const auto& [entries, fns] : s.entryPointsPerFunctionHist)
    eh[std::to_string(entries)] = fns;
  j["entryPointsPerFunction"] = eh;
  j["entryPointsDetail"] = s.entryPointsDetail;
  return j;
}

inline nlohmann::json run_json(const std::string& program, ExecMode mode,
                               const RunOutcome& out) {
  nlohmann::json j;
  j["schema"] = kStatsSchemaVersion;
  j["program"] = program;
  j["mode"] = mode_name(mode);
  j["status"] = status_name(out.exec.status);
  if (out.exec.status != RunStatus::Ok) j["message"] = out.exec.message;
  j["counters"] = stats_json(out.stats);
  if (out.isOracle) {
    nlohmann::json o;
    o["baselineTagTests"] = out.oracle.baselineTagTests;
    o["remainingTagTests"] = out.oracle.remainingTagTests;
    o["removedSites"] = out.oracle.removedSites;
    o["polymorphicSites"] = out.oracle.polymorphicSites;
    j["oracle"] = o;
  }
  return j;
}

// ---- the mode matrix (per-program proportions + geometric means) ----

struct MatrixCell {
  std::string program;
  ExecMode mode;
  RunOutcome outcome;
};

struct MatrixReport {
  nlohmann::json doc;
  std::string csv;
};

inline const std::vector<ExecMode>& matrix_modes() {
  static const std::vector<ExecMode> modes = {
      ExecMode::Baseline, ExecMode::Intra, ExecMode::Shapes,
      ExecMode::Entry, ExecMode::EntryCont, ExecMode::Oracle,
  };
  return modes;
}

// Remaining-test proportion per (program, mode) relative to the program's
// baseline run, plus the geometric mean per mode across programs.
inline MatrixReport build_matrix_report(const std::vector<MatrixCell>& cells) {
  if (cells.empty()) throw MissingBaseline("(empty run set)");
  MatrixReport rep;
  rep.doc["schema"] = kStatsSchemaVersion;
  std::map<std::string, uint64_t> baseline;
  for (const MatrixCell& c : cells)
    if (c.mode == ExecMode::Baseline) baseline[c.program] = c.outcome.stats.dynTagTests;

  std::map<std::string, std::map<std::string, double>> proportions;
  nlohmann::json runs = nlohmann::json::array();
  std::string csv =
      "program,mode,dynTagTests,proportion,dynShapeTests,overflowChecks,"
      "knownCalleeRate,returnTagKnownRate,continuationsInvalidated,"
      "emittedInstrCount,compileEvents\n";
  for (const MatrixCell& c : cells) {
    auto bit = baseline.find(c.program);
    if (bit == baseline.end()) throw MissingBaseline(c.program);
    double denom = (double)bit->second;
    double prop = denom > 0 ? (double)c.outcome.stats.dynTagTests / denom
                            : (c.outcome.stats.dynTagTests ? 1.0 : 0.0);
    proportions[c.program][mode_name(c.mode)] = prop;
    nlohmann::json r = run_json(c.program, c.mode, c.outcome);
    r["proportion"] = prop;
    runs.push_back(std::move(r));
    const Stats& s = c.outcome.stats;
    char line[512];
    snprintf(line, sizeof line, "%s,%s,%llu,%.6f,%llu,%llu,%.4f,%.4f,%llu,%llu,%llu\n",
             c.program.c_str(), mode_name(c.mode),
             (unsigned long long)s.dynTagTests, prop,
             (unsigned long long)s.dynShapeTests,
             (unsigned long long)s.overflowChecks,
             s.totalCalls ? (double)s.knownCalleeCalls / (double)s.totalCalls : 0.0,
             s.totalReturns ? (double)s.returnTagKnownDynamic / (double)s.totalReturns
                            : 0.0,
             (unsigned long long)s.continuationsInvalidated,
             (unsigned long long)s.emittedInstrRetained,
             (unsigned long long)s.compileEvents);
    csv += line;
  }
  rep.doc["runs"] = runs;

  nlohmann::json props = nlohmann::json::object();
  for (const auto& [program, perMode] : proportions) {
    nlohmann::json row = nlohmann::json::object();
    for (const auto& [mode, p] : perMode) row[mode] = p;
    props[program] = row;
  }
  rep.doc["proportions"] = props;

  nlohmann::json gm = nlohmann::json::object();
  for (ExecMode m : matrix_modes()) {
    double logSum = 0;
    size_t n = 0;
    for (const auto& [program, perMode] : proportions) {
      auto it = perMode.find(mode_name(m));
      if (it == perMode.end()) continue;
      // clamp zero proportions so the geometric mean stays defined
      logSum += std::log(std::max(it->second, 1e-9));
      ++n;
    }
    if (n) gm[mode_name(m)] = std::exp(logSum / (double)n);
  }
  rep.doc["geomeanProportion"] = gm;
  rep.csv = std::move(csv);
  return rep;
}

}  // namespace bbvm
