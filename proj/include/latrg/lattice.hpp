#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace latrg {

inline constexpr int kMaxDim = 4;

// Scale pair n = (n0, n1): n0 sets the lattice spacing b^-n0, n1 the torus
// volume. The torus has L = b^(n0+n1) d-cubes per dimension.
struct LatticeSpec {
    int base = 3;  // b, odd and >= 3
    int dim = 1;   // d
    int n0 = 0;
    int n1 = 1;

    std::int64_t sites_per_dim() const;  // L = b^(n0+n1)
    std::int64_t cube_count() const;     // tau = L^d
    double spacing() const;              // b^-n0
    void validate() const;               // throws std::invalid_argument
};

struct RefinementStep {
    int k0 = 0;
    int k1 = 0;
};

inline LatticeSpec refined(const LatticeSpec& s, RefinementStep k) {
    return LatticeSpec{s.base, s.dim, s.n0 + k.k0, s.n1 + k.k1};
}

// A d-cube, addressed by its integer corner coordinates in [0, L)^d.
struct CubeIndex {
    std::array<std::int32_t, kMaxDim> c{};

    bool operator==(const CubeIndex&) const = default;
};

// Face (base, axis) is the shared (d-1)-face of cube `base` and its positive
// neighbor along `axis` (axes numbered 0..d-1).
struct FaceIndex {
    CubeIndex base;
    int axis = 0;

    bool operator==(const FaceIndex&) const = default;
};

// Immutable torus cube-complex geometry. Cubes are ordered lexicographically
// (coordinate 0 slowest), faces by (cube, axis); every downstream matrix and
// report inherits this order, which keeps runs bit-for-bit reproducible.
class Lattice {
public:
    explicit Lattice(LatticeSpec spec);

    const LatticeSpec& spec() const { return spec_; }
    int dim() const { return spec_.dim; }
    std::int64_t extent() const { return L_; }            // L
    std::int64_t cube_count() const { return tau_; }      // tau
    std::int64_t face_count() const { return tau_ * spec_.dim; }

    std::int64_t cube_id(const CubeIndex& c) const;
    CubeIndex cube_at(std::int64_t id) const;
    std::int64_t face_id(const FaceIndex& f) const;
    FaceIndex face_at(std::int64_t id) const;

    // Cube ids on either side of a face: {cube, cube + e_axis mod L}.
    std::array<std::int64_t, 2> face_cubes(std::int64_t face_id) const;
    std::pair<CubeIndex, CubeIndex> face_incidence(const FaceIndex& f) const;

    // The 2d faces bounding a cube: (c, mu) and (c - e_mu, mu) for each axis.
    std::vector<FaceIndex> boundary_faces(const CubeIndex& c) const;

    CubeIndex translate_cube(const CubeIndex& c, std::span<const int> g) const;
    std::int64_t translate_cube_id(std::int64_t id, std::span<const int> g) const;

    // Shift one coordinate by +/-1 (fast path used by the kernels).
    std::int64_t shift_id(std::int64_t id, int axis, int step) const;

    // b^-n0 times the Euclidean norm of the torus-minimized index difference.
    double cube_distance(const CubeIndex& a, const CubeIndex& b) const;

private:
    LatticeSpec spec_;
    std::int64_t L_ = 0;
    std::int64_t tau_ = 0;
    std::array<std::int64_t, kMaxDim> stride_{};
};

std::pair<std::vector<CubeIndex>, std::vector<FaceIndex>>
enumerate_cubes_and_faces(const LatticeSpec& spec);

// Center cube of the b^(d k0) block refining a coarse cube: per axis
// c * b^k0 + (b^k0 - 1) / 2 under the corner-anchored embedding.
CubeIndex distinguished_subcube(const LatticeSpec& coarse, const CubeIndex& c,
                                RefinementStep k);

// All b^(d k0) fine cubes of the block c * b^k0 + [0, b^k0)^d, in
// lexicographic order.
std::vector<CubeIndex> refine_cover(const LatticeSpec& coarse, const CubeIndex& c,
                                    RefinementStep k);

}  // namespace latrg
