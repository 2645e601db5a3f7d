#include "latrg/lattice.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace latrg {

namespace {

std::int64_t checked_pow(std::int64_t base, int exp, const char* what) {
    std::int64_t r = 1;
    for (int i = 0; i < exp; ++i) {
        if (r > std::numeric_limits<std::int64_t>::max() / base)
            throw std::overflow_error(std::string(what) +
                                      " exceeds the 64-bit integer range");
        r *= base;
    }
    return r;
}

}  // namespace

std::int64_t LatticeSpec::sites_per_dim() const {
    return checked_pow(base, n0 + n1, "lattice extent b^(n0+n1)");
}

std::int64_t LatticeSpec::cube_count() const {
    return checked_pow(sites_per_dim(), dim, "cube count tau(n)");
}

double LatticeSpec::spacing() const { return std::pow(double(base), -n0); }

void LatticeSpec::validate() const {
    if (base < 3 || base % 2 == 0)
        throw std::invalid_argument("lattice base must be odd and >= 3");
    if (dim < 1 || dim > kMaxDim)
        throw std::invalid_argument("lattice dimension must be in [1, " +
                                    std::to_string(kMaxDim) + "]");
    if (n0 + n1 < 1)
        throw std::invalid_argument("scale pair must satisfy n0 + n1 >= 1");
    (void)cube_count();  // overflow check
}

Lattice::Lattice(LatticeSpec spec) : spec_(spec) {
    spec_.validate();
    L_ = spec_.sites_per_dim();
    tau_ = spec_.cube_count();
    std::int64_t s = 1;
    for (int a = spec_.dim - 1; a >= 0; --a) {
        stride_[a] = s;
        s *= L_;
    }
}

std::int64_t Lattice::cube_id(const CubeIndex& c) const {
    std::int64_t id = 0;
    for (int a = 0; a < spec_.dim; ++a) {
        std::int64_t x = c.c[a];
        if (x < 0 || x >= L_) throw std::out_of_range("cube coordinate out of range");
        id += x * stride_[a];
    }
    return id;
}

CubeIndex Lattice::cube_at(std::int64_t id) const {
    if (id < 0 || id >= tau_) throw std::out_of_range("cube id out of range");
    CubeIndex c;
    for (int a = 0; a < spec_.dim; ++a) {
        c.c[a] = static_cast<std::int32_t>(id / stride_[a]);
        id %= stride_[a];
    }
    return c;
}

std::int64_t Lattice::face_id(const FaceIndex& f) const {
    if (f.axis < 0 || f.axis >= spec_.dim) throw std::out_of_range("face axis out of range");
    return cube_id(f.base) * spec_.dim + f.axis;
}

FaceIndex Lattice::face_at(std::int64_t id) const {
    if (id < 0 || id >= face_count()) throw std::out_of_range("face id out of range");
    return FaceIndex{cube_at(id / spec_.dim), static_cast<int>(id % spec_.dim)};
}

std::int64_t Lattice::shift_id(std::int64_t id, int axis, int step) const {
    const std::int64_t s = stride_[axis];
    const std::int64_t x = (id / s) % L_;
    std::int64_t nx = (x + step) % L_;
    if (nx < 0) nx += L_;
    return id + (nx - x) * s;
}

std::array<std::int64_t, 2> Lattice::face_cubes(std::int64_t fid) const {
    const std::int64_t cid = fid / spec_.dim;
    const int axis = static_cast<int>(fid % spec_.dim);
    return {cid, shift_id(cid, axis, +1)};
}

std::pair<CubeIndex, CubeIndex> Lattice::face_incidence(const FaceIndex& f) const {
    const auto [c0, c1] = face_cubes(face_id(f));
    return {cube_at(c0), cube_at(c1)};
}

std::vector<FaceIndex> Lattice::boundary_faces(const CubeIndex& c) const {
    std::vector<FaceIndex> out;
    out.reserve(2 * spec_.dim);
    const std::int64_t id = cube_id(c);
    for (int a = 0; a < spec_.dim; ++a) {
        out.push_back(FaceIndex{c, a});
        out.push_back(FaceIndex{cube_at(shift_id(id, a, -1)), a});
    }
    return out;
}

CubeIndex Lattice::translate_cube(const CubeIndex& c, std::span<const int> g) const {
    CubeIndex r = c;
    for (int a = 0; a < spec_.dim && a < static_cast<int>(g.size()); ++a) {
        std::int64_t x = (r.c[a] + static_cast<std::int64_t>(g[a])) % L_;
        if (x < 0) x += L_;
        r.c[a] = static_cast<std::int32_t>(x);
    }
    return r;
}

std::int64_t Lattice::translate_cube_id(std::int64_t id, std::span<const int> g) const {
    for (int a = 0; a < spec_.dim && a < static_cast<int>(g.size()); ++a)
        id = shift_id(id, a, g[a] % static_cast<int>(L_));
    return id;
}

double Lattice::cube_distance(const CubeIndex& a, const CubeIndex& b) const {
    double sq = 0.0;
    for (int ax = 0; ax < spec_.dim; ++ax) {
        std::int64_t d = std::llabs(static_cast<std::int64_t>(a.c[ax]) - b.c[ax]);
        d = std::min(d, L_ - d);
        sq += double(d) * double(d);
    }
    return spec_.spacing() * std::sqrt(sq);
}

std::pair<std::vector<CubeIndex>, std::vector<FaceIndex>>
enumerate_cubes_and_faces(const LatticeSpec& spec) {
    Lattice lat(spec);
    std::vector<CubeIndex> cubes;
    cubes.reserve(lat.cube_count());
    std::vector<FaceIndex> faces;
    faces.reserve(lat.face_count());
    for (std::int64_t id = 0; id < lat.cube_count(); ++id) {
        cubes.push_back(lat.cube_at(id));
        for (int a = 0; a < spec.dim; ++a) faces.push_back(FaceIndex{cubes.back(), a});
    }
    return {std::move(cubes), std::move(faces)};
}

CubeIndex distinguished_subcube(const LatticeSpec& coarse, const CubeIndex& c,
                                RefinementStep k) {
    if (k.k0 < 0 || k.k1 < 0)
        throw std::invalid_argument("refinement step must be non-negative");
    std::int64_t blk = 1;
    for (int i = 0; i < k.k0; ++i) blk *= coarse.base;
    CubeIndex f;
    for (int a = 0; a < coarse.dim; ++a)
        f.c[a] = static_cast<std::int32_t>(c.c[a] * blk + (blk - 1) / 2);
    return f;
}

std::vector<CubeIndex> refine_cover(const LatticeSpec& coarse, const CubeIndex& c,
                                    RefinementStep k) {
    if (k.k0 < 0 || k.k1 < 0)
        throw std::invalid_argument("refinement step must be non-negative");
    std::int64_t blk = 1;
    for (int i = 0; i < k.k0; ++i) blk *= coarse.base;
    std::int64_t total = 1;
    for (int a = 0; a < coarse.dim; ++a) total *= blk;

    std::vector<CubeIndex> out;
    out.reserve(total);
    for (std::int64_t j = 0; j < total; ++j) {
        CubeIndex f;
        std::int64_t rem = j;
        for (int a = coarse.dim - 1; a >= 0; --a) {
            f.c[a] = static_cast<std::int32_t>(c.c[a] * blk + rem % blk);
            rem /= blk;
        }
        out.push_back(f);
    }
    return out;
}

}  // namespace latrg
