#pragma once

// File formats:
//  - field snapshots: header "# thinfilm-field v1 N1 N2 L1 L2 t" followed
//    by N1*N2 whitespace-separated reals in row-major order; accepted
//    back as restart/custom initial conditions.
//  - diagnostics series CSV with header
//    t,omega,energy,grad_sq,lap_sq,mean,h_min,h_max,increment_rate
//    written with 17 significant digits.

#include <filesystem>
#include <string>
#include <vector>

#include "thinfilm/diagnostics.hpp"
#include "thinfilm/grid.hpp"

namespace thinfilm {

struct FieldSnapshot {
    RealField field;
    double t = 0.0;
};

void write_field(const std::filesystem::path& path, const RealField& f, double t);
FieldSnapshot read_field(const std::filesystem::path& path);

void write_series_csv(const std::filesystem::path& path,
                      const std::vector<DiagnosticsRecord>& records);
std::vector<DiagnosticsRecord> read_series_csv(const std::filesystem::path& path);

// 17-significant-digit decimal form (round-trips doubles exactly).
std::string format_double(double v);

}  // namespace thinfilm
