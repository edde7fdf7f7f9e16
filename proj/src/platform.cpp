#include "spmap/platform.hpp"

#include <sstream>

#include "spmap/error.hpp"

namespace spmap {

std::string to_string(UnitKind kind) {
    switch (kind) {
    case UnitKind::CPU:
        return "CPU";
    case UnitKind::GPU:
        return "GPU";
    case UnitKind::FPGA:
        return "FPGA";
    }
    return "?";
}

UnitKind unit_kind_from_string(std::string const &name) {
    if (name == "CPU") return UnitKind::CPU;
    if (name == "GPU") return UnitKind::GPU;
    if (name == "FPGA") return UnitKind::FPGA;
    throw PlatformError("unknown unit kind '" + name + "'");
}

Platform::Platform(std::vector<ProcessingUnit> units, UnitId default_unit)
    : units_(std::move(units)), default_unit_(default_unit), bandwidth_(units_.size() * units_.size(), 0.0) {}

void Platform::set_bandwidth(UnitId from, UnitId to, double bytes_per_sec) {
    if (from >= size() || to >= size()) throw PlatformError("bandwidth entry references an unknown unit");
    bandwidth_[from * size() + to] = bytes_per_sec;
}

bool Platform::has_bandwidth(UnitId from, UnitId to) const {
    return from < size() && to < size() && bandwidth_[from * size() + to] > 0.0;
}

double Platform::bandwidth(UnitId from, UnitId to) const {
    if (!has_bandwidth(from, to)) {
        std::ostringstream msg;
        msg << "no bandwidth entry for unit pair " << from << "->" << to;
        throw PlatformError(msg.str());
    }
    return bandwidth_[from * size() + to];
}

void Platform::validate() const {
    if (units_.empty()) throw PlatformError("platform has no units");
    for (std::size_t i = 0; i < units_.size(); ++i) {
        auto const &u = units_[i];
        std::ostringstream where;
        where << "unit " << i;
        if (u.id != i) throw PlatformError(where.str() + ": ids must be dense and ordered");
        if (u.cores < 1) throw PlatformError(where.str() + ": cores must be >= 1");
        if (!(u.per_core_rate > 0.0)) throw PlatformError(where.str() + ": per_core_rate must be > 0");
        if (!(u.area_capacity >= 0.0)) throw PlatformError(where.str() + ": area_capacity must be >= 0");
        if (!(u.stream_startup >= 0.0)) throw PlatformError(where.str() + ": stream_startup must be >= 0");
    }
    if (default_unit_ >= units_.size()) throw PlatformError("default_unit does not exist");
    if (units_[default_unit_].kind != UnitKind::CPU) throw PlatformError("default_unit must be a CPU");
    for (UnitId a = 0; a < size(); ++a) {
        for (UnitId b = 0; b < size(); ++b) {
            if (a != b && !has_bandwidth(a, b)) {
                std::ostringstream msg;
                msg << "missing positive bandwidth for unit pair " << a << "->" << b;
                throw PlatformError(msg.str());
            }
        }
    }
}

double compute_time(TaskAttributes const &attrs, double input_bytes, ProcessingUnit const &u) {
    double const work = attrs.complexity * input_bytes;
    if (work <= 0.0) return 0.0;
    if (u.kind == UnitKind::FPGA) return work / (u.per_core_rate * attrs.streamability);
    double const p = attrs.parallelizability;
    return work / u.per_core_rate * ((1.0 - p) + p / static_cast<double>(u.cores));
}

double transfer_time(double bytes, ProcessingUnit const &from, ProcessingUnit const &to, Platform const &platform) {
    if (from.id == to.id || bytes <= 0.0) return 0.0;
    return bytes / platform.bandwidth(from.id, to.id);
}

void require_total(Mapping const &m, TaskGraph const &g, Platform const &platform) {
    if (m.size() != g.size()) {
        std::ostringstream msg;
        msg << "mapping covers " << m.size() << " tasks but the graph has " << g.size();
        throw Error(msg.str());
    }
    for (NodeId v = 0; v < m.size(); ++v) {
        if (m[v] >= platform.size()) {
            std::ostringstream msg;
            msg << "task " << v << " is mapped to unknown unit " << m[v];
            throw Error(msg.str());
        }
    }
}

bool area_feasible(Mapping const &m, TaskGraph const &g, Platform const &platform) {
    std::vector<double> used(platform.size(), 0.0);
    for (NodeId v = 0; v < g.size(); ++v) used[m[v]] += g.attributes(v).area;
    for (auto const &u : platform.units()) {
        if (u.kind == UnitKind::FPGA && used[u.id] > u.area_capacity) return false;
    }
    return true;
}

Platform default_platform() {
    Platform p({{0, UnitKind::CPU, 16, 2.4e9, 0.0, 0.0},
                {1, UnitKind::GPU, 3584, 2.5e7, 0.0, 0.0},
                {2, UnitKind::FPGA, 1, 5.75e8, 950.0, 1.0e-3}},
               0);
    p.set_bandwidth(0, 1, 1.4e10);
    p.set_bandwidth(1, 0, 1.4e10);
    p.set_bandwidth(0, 2, 1.0e9);
    p.set_bandwidth(2, 0, 1.0e9);
    p.set_bandwidth(1, 2, 1.0e9);
    p.set_bandwidth(2, 1, 1.0e9);
    return p;
}

} // namespace spmap
