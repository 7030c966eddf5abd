#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>

#include "nlsd/ground_state.hpp"

namespace nlsd {

/// Binary field container shared by ground states and checkpoints:
/// magic, kind, dimension, per-axis (points, extent), sigma/omega/m/time,
/// then raw little-endian doubles (pairs when complex).
struct FieldFile {
    static constexpr char magic[8] = {'N', 'L', 'S', 'D', 'F', 'L', 'D', '1'};
    enum Kind : std::uint32_t { Real = 0, Complex = 1 };

    Kind kind = Real;
    Grid grid{std::vector<double>{1.0}, std::vector<std::size_t>{2}};
    double sigma = 0.0, omega = 0.0, m = 0.0, time = 0.0;
    RField rdata;
    CField cdata;
};

namespace detail {

template <typename T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
void get(std::istream& is, T& v) {
    is.read(reinterpret_cast<char*>(&v), sizeof v);
}

}  // namespace detail

inline void save_field_file(const std::string& path, const FieldFile& f) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(ErrorClass::IoError, "cannot write '" + path + "'");
    os.write(FieldFile::magic, sizeof FieldFile::magic);
    detail::put(os, static_cast<std::uint32_t>(f.kind));
    detail::put(os, static_cast<std::uint32_t>(f.grid.dim()));
    for (int a = 0; a < f.grid.dim(); ++a) {
        detail::put(os, static_cast<std::uint64_t>(f.grid.axis_points(a)));
        detail::put(os, f.grid.extent(a));
    }
    detail::put(os, f.sigma);
    detail::put(os, f.omega);
    detail::put(os, f.m);
    detail::put(os, f.time);
    if (f.kind == FieldFile::Real) {
        os.write(reinterpret_cast<const char*>(f.rdata.data()),
                 static_cast<std::streamsize>(f.rdata.size() * sizeof(double)));
    } else {
        os.write(reinterpret_cast<const char*>(f.cdata.data()),
                 static_cast<std::streamsize>(f.cdata.size() * sizeof(Cplx)));
    }
    if (!os) throw Error(ErrorClass::IoError, "write failed for '" + path + "'");
}

inline FieldFile load_field_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorClass::IoError, "cannot open '" + path + "'");
    char magic[8];
    is.read(magic, sizeof magic);
    if (!is || std::memcmp(magic, FieldFile::magic, sizeof magic) != 0)
        throw Error(ErrorClass::IoError, "'" + path + "' is not a field file");
    std::uint32_t kind = 0, dim = 0;
    detail::get(is, kind);
    detail::get(is, dim);
    if (dim < 1 || dim > 8) throw Error(ErrorClass::IoError, "corrupt field file dimension");
    std::vector<std::size_t> n(dim);
    std::vector<double> ext(dim);
    for (std::uint32_t a = 0; a < dim; ++a) {
        std::uint64_t na = 0;
        detail::get(is, na);
        detail::get(is, ext[a]);
        n[a] = static_cast<std::size_t>(na);
    }
    FieldFile f;
    f.kind = static_cast<FieldFile::Kind>(kind);
    f.grid = Grid(ext, n);
    detail::get(is, f.sigma);
    detail::get(is, f.omega);
    detail::get(is, f.m);
    detail::get(is, f.time);
    const std::size_t total = f.grid.total_points();
    if (f.kind == FieldFile::Real) {
        f.rdata.resize(total);
        is.read(reinterpret_cast<char*>(f.rdata.data()),
                static_cast<std::streamsize>(total * sizeof(double)));
    } else {
        f.cdata.resize(total);
        is.read(reinterpret_cast<char*>(f.cdata.data()), static_cast<std::streamsize>(total * sizeof(Cplx)));
    }
    if (!is) throw Error(ErrorClass::IoError, "truncated field file '" + path + "'");
    return f;
}

inline void save_ground_state(const std::string& path, const GroundState& gs) {
    FieldFile f;
    f.kind = FieldFile::Real;
    f.grid = gs.grid;
    f.sigma = gs.sigma;
    f.omega = gs.omega;
    f.m = gs.m;
    f.rdata = gs.u;
    save_field_file(path, f);
}

inline GroundState load_ground_state(const std::string& path) {
    FieldFile f = load_field_file(path);
    if (f.kind != FieldFile::Real)
        throw Error(ErrorClass::IoError, "'" + path + "' does not hold a real profile");
    GroundState gs(f.grid);
    gs.u = std::move(f.rdata);
    gs.sigma = f.sigma;
    gs.omega = f.omega;
    gs.m = f.m;
    return gs;
}

inline void save_checkpoint(const std::string& path, const WaveField& psi) {
    FieldFile f;
    f.kind = FieldFile::Complex;
    f.grid = psi.grid;
    f.time = psi.time;
    f.cdata = psi.values;
    save_field_file(path, f);
}

inline WaveField load_checkpoint(const std::string& path) {
    FieldFile f = load_field_file(path);
    if (f.kind != FieldFile::Complex)
        throw Error(ErrorClass::IoError, "'" + path + "' does not hold a wavefunction");
    return WaveField(f.grid, std::move(f.cdata), f.time);
}

}  // namespace nlsd
