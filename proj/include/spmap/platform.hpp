#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "spmap/taskgraph.hpp"

namespace spmap {

using UnitId = std::size_t;

enum class UnitKind { CPU, GPU, FPGA };

std::string to_string(UnitKind kind);
UnitKind unit_kind_from_string(std::string const &name);

struct ProcessingUnit {
    UnitId id = 0;
    UnitKind kind = UnitKind::CPU;
    std::size_t cores = 1;
    double per_core_rate = 1.0;  ///< operations per second
    double area_capacity = 0.0;  ///< FPGA only
    double stream_startup = 0.0; ///< seconds of pipeline fill per streamed stage
};

/// Processing units plus an ordered-pair bandwidth table.
///
/// Unit ids are dense: `units[i].id == i`. Same-unit transfers are free.
class Platform {
  public:
    Platform() = default;
    Platform(std::vector<ProcessingUnit> units, UnitId default_unit);

    std::vector<ProcessingUnit> const &units() const { return units_; }
    ProcessingUnit const &unit(UnitId u) const { return units_.at(u); }
    std::size_t size() const { return units_.size(); }
    UnitId default_unit() const { return default_unit_; }

    void set_bandwidth(UnitId from, UnitId to, double bytes_per_sec);
    /// Throws PlatformError if no entry exists for a distinct pair.
    double bandwidth(UnitId from, UnitId to) const;
    bool has_bandwidth(UnitId from, UnitId to) const;

    /// Throws PlatformError naming the first violated invariant.
    void validate() const;

  private:
    std::vector<ProcessingUnit> units_;
    UnitId default_unit_ = 0;
    std::vector<double> bandwidth_; // row-major, 0 marks a missing entry
};

/// Surrogate compute-time model.
///
/// CPU/GPU follow Amdahl's law over the unit's cores; FPGA divides the work
/// by the per-core rate times the task's streamability.
double compute_time(TaskAttributes const &attrs, double input_bytes, ProcessingUnit const &u);

double transfer_time(double bytes, ProcessingUnit const &from, ProcessingUnit const &to, Platform const &platform);

struct Mapping {
    std::vector<UnitId> assignment;

    static Mapping uniform(std::size_t task_count, UnitId unit) { return {std::vector<UnitId>(task_count, unit)}; }

    std::size_t size() const { return assignment.size(); }
    UnitId operator[](NodeId v) const { return assignment[v]; }
    UnitId &operator[](NodeId v) { return assignment[v]; }

    friend bool operator==(Mapping const &, Mapping const &) = default;
};

/// Throws Error unless every task of `g` is assigned to an existing unit.
void require_total(Mapping const &m, TaskGraph const &g, Platform const &platform);

bool area_feasible(Mapping const &m, TaskGraph const &g, Platform const &platform);

/// Platform modelled on a 16-core server CPU, a 3584-core GPU and a mid-size
/// FPGA. The numbers are calibration choices for the surrogate model.
Platform default_platform();

} // namespace spmap
