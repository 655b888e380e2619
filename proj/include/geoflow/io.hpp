#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "geoflow/grid.hpp"

namespace geoflow {

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

/// VTK legacy ASCII STRUCTURED_POINTS, one scalar field per file.
inline void write_vtk_scalar(const std::string& path, const ScalarField3& f,
                             const std::string& field_name) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    const GridSpec& s = f.spec;
    os << "# vtk DataFile Version 3.0\n";
    os << field_name << "\n";
    os << "ASCII\n";
    os << "DATASET STRUCTURED_POINTS\n";
    os << "DIMENSIONS " << s.dims[0] << " " << s.dims[1] << " " << s.dims[2] << "\n";
    os << "ORIGIN " << format_double(s.origin.x) << " " << format_double(s.origin.y) << " "
       << format_double(s.origin.z) << "\n";
    os << "SPACING " << format_double(s.h) << " " << format_double(s.h) << " "
       << format_double(s.h) << "\n";
    os << "POINT_DATA " << s.num_points() << "\n";
    os << "SCALARS " << field_name << " double 1\n";
    os << "LOOKUP_TABLE default\n";
    for (std::size_t idx = 0; idx < s.num_points(); ++idx) os << format_double(f.data[idx]) << "\n";
}

/// RFC-4180-style CSV: '.' decimal separator, LF line endings.
inline void write_csv(const std::string& path, const std::string& header,
                      const std::vector<std::vector<double>>& rows) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << header << "\n";
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) os << ",";
            os << format_double(row[c]);
        }
        os << "\n";
    }
}

inline std::string step_file_name(const std::string& run, const std::string& field, int step) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%06d", step);
    return run + "_" + field + "_" + buf + ".vtk";
}

}  // namespace geoflow
