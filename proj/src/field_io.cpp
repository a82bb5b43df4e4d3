#include "thinfilm/field_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace thinfilm {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_field(const std::filesystem::path& path, const RealField& f, double t) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << "# thinfilm-field v1 " << f.grid.n1 << " " << f.grid.n2 << " "
        << format_double(f.grid.l1) << " " << format_double(f.grid.l2) << " "
        << format_double(t) << "\n";
    for (int i = 0; i < f.grid.n1; ++i) {
        for (int j = 0; j < f.grid.n2; ++j) {
            out << format_double(f.at(i, j)) << (j + 1 == f.grid.n2 ? '\n' : ' ');
        }
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

FieldSnapshot read_field(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string hash, name, version;
    FieldSnapshot snap;
    GridSpec g;
    in >> hash >> name >> version >> g.n1 >> g.n2 >> g.l1 >> g.l2 >> snap.t;
    if (!in || hash != "#" || name != "thinfilm-field" || version != "v1")
        throw std::runtime_error(path.string() + ": not a thinfilm-field v1 snapshot");
    g.validate();
    snap.field = RealField(g);
    for (double& v : snap.field.values) {
        if (!(in >> v))
            throw std::runtime_error(path.string() + ": truncated snapshot (expected " +
                                     std::to_string(g.size()) + " values)");
    }
    double extra;
    if (in >> extra)
        throw std::runtime_error(path.string() + ": trailing data after " +
                                 std::to_string(g.size()) + " values");
    if (!all_finite(snap.field))
        throw std::runtime_error(path.string() + ": non-finite value in snapshot");
    return snap;
}

void write_series_csv(const std::filesystem::path& path,
                      const std::vector<DiagnosticsRecord>& records) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << "t,omega,energy,grad_sq,lap_sq,mean,h_min,h_max,increment_rate\n";
    for (const DiagnosticsRecord& r : records) {
        out << format_double(r.t) << ',' << format_double(r.omega) << ','
            << format_double(r.energy) << ',' << format_double(r.grad_sq) << ','
            << format_double(r.lap_sq) << ',' << format_double(r.mean) << ','
            << format_double(r.h_min) << ',' << format_double(r.h_max) << ','
            << format_double(r.increment_rate) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<DiagnosticsRecord> read_series_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) ||
        line != "t,omega,energy,grad_sq,lap_sq,mean,h_min,h_max,increment_rate")
        throw std::runtime_error(path.string() + ": unexpected series CSV header");
    std::vector<DiagnosticsRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        DiagnosticsRecord r;
        char c;
        if (!(ss >> r.t >> c >> r.omega >> c >> r.energy >> c >> r.grad_sq >> c >>
              r.lap_sq >> c >> r.mean >> c >> r.h_min >> c >> r.h_max >> c >>
              r.increment_rate))
            throw std::runtime_error(path.string() + ": malformed CSV row: " + line);
        records.push_back(r);
    }
    return records;
}

}  // namespace thinfilm
