#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tpart/grid.hpp"
#include "tpart/types.hpp"

namespace tpart {

// Raw MATPOWER tables, in the units of the file (MW, MVAr, degrees).

struct RawBus {
  int id = 0;
  int type = 1;
  double pd = 0.0, qd = 0.0, gs = 0.0, bs = 0.0;
  double vm = 1.0, va = 0.0, base_kv = 0.0, vmax = 1.1, vmin = 0.9;
};

struct RawGen {
  int bus = 0;
  double pg = 0.0, qg = 0.0, qmax = 0.0, qmin = 0.0, vg = 1.0;
  int status = 1;
};

struct RawBranch {
  int from = 0, to = 0;
  double r = 0.0, x = 0.0, b = 0.0, rate_a = 0.0, tap = 0.0, shift = 0.0;
  int status = 1;
};

struct RawCase {
  double base_mva = 100.0;
  std::vector<RawBus> buses;
  std::vector<RawGen> gens;
  std::vector<RawBranch> branches;
  std::vector<std::string> warnings;  // e.g. ignored matrices
};

/// Reads the `baseMVA`, `bus`, `gen` and `branch` blocks of a MATPOWER case.
/// Other `mpc.*` matrices are skipped with a warning.
RawCase parse_matpower(std::istream& in);
RawCase parse_matpower(std::string_view text);
RawCase load_matpower(const std::string& path);

// Per-unit snapshot: the internal exchange format.

struct SnapshotBus {
  int id = 0;
  BusType type = BusType::kPQ;
  double p = 0.0, q = 0.0, vm = 1.0, va = 0.0, gs = 0.0, bs = 0.0;
  std::optional<double> qmin, qmax;
};

struct SnapshotLine {
  LineId id{};
  int from = 0, to = 0;  // external bus ids
  double r = 0.0, x = 0.0, b = 0.0, charging = 0.0, tap = 1.0, shift = 0.0;
  double c = 0.0;
  bool unlimited = false;
  bool in_service = true;
};

struct Snapshot {
  std::string name;
  double base_mva = 100.0;
  std::string provenance;
  std::vector<SnapshotBus> buses;
  std::vector<SnapshotLine> lines;

  double injection_sum() const;
};

/// Per-unit conversion of a raw case; injections are the case's own
/// dispatch (sum of in-service Pg minus Pd).  Validates the raw invariants.
Snapshot snapshot_from_case(const RawCase& raw, std::string name = {});

Snapshot read_snapshot_json(std::istream& in);
Snapshot load_snapshot(const std::string& path);
std::string write_snapshot_json(const Snapshot& snapshot);

/// Builds the network model: out-of-service lines dropped, b = 1/|x|,
/// reference = slack bus.  The DC engine requires balanced injections.
Network to_network(const Snapshot& snapshot, Engine engine);

/// Moves the injection mismatch onto the slack bus so the DC engine accepts
/// a dispatch that carries losses.
Snapshot rebalanced(Snapshot snapshot);

/// Loads either a `.m` case or a snapshot `.json`.
Snapshot load_case(const std::string& path);

}  // namespace tpart
