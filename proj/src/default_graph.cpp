#include <array>

#include "rlfi/workflow_graph.hpp"

namespace rlfi {

namespace {

constexpr int kNumStates = 67;
constexpr int kNumActions = 10;
constexpr double kRiskySuccess = 0.8;

struct Builder {
  std::map<EdgeKey, std::vector<Transition>> edges;

  static Transition to(StateId next, double p = 1.0) {
    const bool done = next == milestone::kInvestigationComplete;
    return {p, next, done ? 2.0 : kDefaultStepReward, done};
  }
  // Bookkeeping step: always succeeds.
  void step(StateId s, ActionId a, StateId next) { edges[{s, a}] = {to(next)}; }
  // Risky step: succeeds with p = 0.8, otherwise stays put for debugging.
  void risky(StateId s, ActionId a, StateId next) {
    edges[{s, a}] = {to(next, kRiskySuccess), to(s, 1.0 - kRiskySuccess)};
  }
};

const std::array<const char*, kNumStates> kLabels = {
    /* 0 */ "start: acquire forensic tooling",
    /* 1 */ "debug: repository clone failed",
    /* 2 */ "WinPmem sources ready",
    /* 3 */ "debug: driver failed to load",
    /* 4 */ "debug: test signing enabled, awaiting reinstall",
    /* 5 */ "WinPmem installed",
    /* 6 */ "debug: acquisition aborted, insufficient space",
    /* 7 */ "debug: output volume switched",
    /* 8 */ "alternate acquisition: split raw segments",
    /* 9 */ "alternate acquisition: merge segments",
    /* 10 */ "live memory image acquired",
    /* 11 */ "debug: symbol table missing",
    /* 12 */ "debug: symbol pack downloaded",
    /* 13 */ "alternate OS identification: banner scan",
    /* 14 */ "alternate OS identification: profile from banner",
    /* 15 */ "operating system identified",
    /* 16 */ "debug: process list walk failed (smear)",
    /* 17 */ "debug: process scanner fallback prepared",
    /* 18 */ "alternate process listing: pool scan",
    /* 19 */ "alternate process listing: reconcile pid lists",
    /* 20 */ "process information collected",
    /* 21 */ "debug: AWK extraction error",
    /* 22 */ "debug: field separators fixed",
    /* 23 */ "debug: extraction output validated",
    /* 24 */ "debug: extraction reset",
    /* 25 */ "manual triage: start",
    /* 26 */ "manual triage: process tree reviewed",
    /* 27 */ "manual triage: command lines reviewed",
    /* 28 */ "manual triage: suspicious executables marked",
    /* 29 */ "manual triage: features stored",
    /* 30 */ "suspicious process features extracted",
    /* 31 */ "debug: DLL list incomplete (paged out)",
    /* 32 */ "debug: loader module scan prepared",
    /* 33 */ "alternate DLL listing: loader module cross-check",
    /* 34 */ "alternate DLL listing: unlinked modules noted",
    /* 35 */ "loaded DLLs listed",
    /* 36 */ "debug: handle table unreadable",
    /* 37 */ "debug: handle scan narrowed to pid",
    /* 38 */ "alternate handles: mutant scan",
    /* 39 */ "alternate handles: objects correlated",
    /* 40 */ "open handles tracked",
    /* 41 */ "debug: network scan empty",
    /* 42 */ "debug: network pools rescanned",
    /* 43 */ "alternate network: connection list",
    /* 44 */ "alternate network: endpoints correlated",
    /* 45 */ "network artefacts collected",
    /* 46 */ "debug: hive list empty",
    /* 47 */ "debug: hive offsets recovered",
    /* 48 */ "alternate registry: hive scan",
    /* 49 */ "alternate registry: hives mapped",
    /* 50 */ "registry hives identified",
    /* 51 */ "debug: registry key not found",
    /* 52 */ "debug: key path corrected",
    /* 53 */ "alternate registry: user assist review",
    /* 54 */ "alternate registry: persistence keys noted",
    /* 55 */ "registry keys listed",
    /* 56 */ "debug: process dump failed",
    /* 57 */ "debug: dump directory recreated",
    /* 58 */ "alternate dump: memory map extraction",
    /* 59 */ "alternate dump: executables carved",
    /* 60 */ "suspicious executables dumped",
    /* 61 */ "debug: hash lookup rate limited",
    /* 62 */ "debug: lookup credentials refreshed",
    /* 63 */ "debug: hashes re-queued",
    /* 64 */ "alternate classification: memory string search",
    /* 65 */ "alternate classification: keyword hits reviewed",
    /* 66 */ "investigation complete",
};

WorkflowGraph build_default_graph() {
  Builder b;

  // Tooling: 0 -> 2.
  b.step(0, 0, 2);
  b.step(0, 3, 1);
  b.step(1, 0, 0);

  // WinPmem installation: 2 -> 5.
  b.risky(2, 1, 5);
  b.step(2, 4, 3);
  b.step(2, 6, 0);
  b.step(3, 0, 4);
  b.step(4, 0, 2);

  // Live memory acquisition: 5 -> 10.
  b.risky(5, 2, 10);
  b.step(5, 5, 6);
  b.step(5, 7, 8);
  b.step(5, 1, 2);
  b.step(6, 0, 7);
  b.step(6, 1, 0);
  b.step(7, 0, 5);
  b.step(8, 0, 9);
  b.step(9, 0, 10);

  // Operating system identification: 10 -> 15.
  b.risky(10, 0, 15);
  b.step(10, 4, 11);
  b.step(10, 6, 13);
  b.step(10, 8, 5);
  b.step(11, 0, 12);
  b.step(11, 1, 0);
  b.step(12, 0, 10);
  b.step(13, 0, 14);
  b.step(14, 0, 15);

  // Process information: 15 -> 20.
  b.step(15, 0, 20);
  b.step(15, 5, 16);
  b.step(15, 3, 18);
  b.step(15, 9, 10);
  b.step(16, 0, 17);
  b.step(16, 1, 0);
  b.step(17, 0, 15);
  b.step(18, 0, 19);
  b.step(19, 0, 20);

  // AWK feature extraction: 20 -> 30, with a long manual triage detour.
  b.step(20, 1, 30);
  b.step(20, 6, 21);
  b.step(20, 3, 25);
  b.step(20, 8, 15);
  b.step(21, 0, 22);
  b.step(21, 1, 0);
  b.step(22, 0, 23);
  b.step(23, 0, 24);
  b.step(24, 0, 20);
  b.step(25, 0, 26);
  b.step(26, 0, 27);
  b.step(27, 0, 28);
  b.step(28, 0, 29);
  b.step(29, 0, 30);

  // DLL listing: 30 -> 35.
  b.step(30, 2, 35);
  b.step(30, 5, 31);
  b.step(30, 6, 33);
  b.step(30, 7, 20);
  b.step(31, 0, 32);
  b.step(31, 1, 0);
  b.step(32, 0, 30);
  b.step(33, 0, 34);
  b.step(34, 0, 35);

  // Open handles: 35 -> 40.
  b.step(35, 3, 40);
  b.step(35, 1, 36);
  b.step(35, 5, 38);
  b.step(35, 6, 30);
  b.step(36, 0, 37);
  b.step(37, 0, 35);
  b.step(38, 0, 39);
  b.step(39, 0, 40);

  // Network artefacts: 40 -> 45.
  b.step(40, 0, 45);
  b.step(40, 2, 41);
  b.step(40, 4, 43);
  b.step(40, 7, 35);
  b.step(41, 0, 42);
  b.step(42, 0, 40);
  b.step(43, 0, 44);
  b.step(44, 0, 45);

  // Registry hives: 45 -> 50.
  b.step(45, 1, 50);
  b.step(45, 3, 46);
  b.step(45, 5, 48);
  b.step(45, 6, 40);
  b.step(46, 0, 47);
  b.step(46, 1, 0);
  b.step(47, 0, 45);
  b.step(48, 0, 49);
  b.step(49, 0, 50);

  // Registry keys: 50 -> 55.
  b.step(50, 2, 55);
  b.step(50, 4, 51);
  b.step(50, 0, 53);
  b.step(50, 7, 45);
  b.step(51, 0, 52);
  b.step(52, 0, 50);
  b.step(53, 0, 54);
  b.step(54, 0, 55);

  // Process dump: 55 -> 60.
  b.risky(55, 0, 60);
  b.step(55, 3, 56);
  b.step(55, 5, 58);
  b.step(55, 7, 50);
  b.step(56, 0, 57);
  b.step(56, 1, 0);
  b.step(57, 0, 55);
  b.step(58, 0, 59);
  b.step(59, 0, 60);

  // Hash submission and classification: 60 -> 66.
  b.risky(60, 1, 66);
  b.step(60, 2, 61);
  b.step(60, 4, 64);
  b.step(60, 6, 55);
  b.step(61, 0, 62);
  b.step(62, 0, 63);
  b.step(63, 0, 60);
  b.step(64, 0, 65);
  b.step(65, 0, 66);

  std::map<StateId, std::string> labels;
  for (StateId s = 0; s < kNumStates; ++s) labels[s] = kLabels[s];

  std::map<StateId, std::string> milestones = {
      {milestone::kWinPmemInstalled, "WinPmem installed"},
      {milestone::kMemoryAcquired, "memory acquired"},
      {milestone::kOsIdentified, "OS identified"},
      {milestone::kInvestigationComplete, "investigation complete"},
  };

  return WorkflowGraph(kNumStates, kNumActions, std::move(b.edges),
                       {milestone::kInvestigationComplete}, std::move(milestones),
                       std::move(labels));
}

}  // namespace

const WorkflowGraph& default_graph() {
  static const WorkflowGraph graph = build_default_graph();
  return graph;
}

}  // namespace rlfi
