#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "latrg/gibbs.hpp"
#include "latrg/lattice.hpp"
#include "latrg/observable.hpp"

namespace latrg {

// Euclidean time reflection along one axis: c -> -c mod L on that component.
// The plane passes through the centers of the layer-0 cubes, the convention
// that yields the three-part layer decomposition on an odd torus.
class ReflectionStructure {
public:
    ReflectionStructure(const Lattice& lat, int axis);

    int axis() const { return axis_; }
    CubeIndex reflect(const CubeIndex& c) const;
    std::int64_t reflect_id(std::int64_t cube) const;

    // -1 / 0 / +1 layer of a cube along the reflection axis
    int layer(const CubeIndex& c) const;
    int layer_id(std::int64_t cube) const;

    std::vector<std::int64_t> layer_cubes(int which) const;  // -1, 0, +1

private:
    const Lattice& lat_;
    int axis_;
};

// j_mu: factors (cube, a) -> (theta cube, conj a); anti-linear in the scalar
// coefficient (site observables are real here).
LatticeObservable time_reflection(const ReflectionStructure& refl,
                                  const LatticeObservable& obs);

struct RpGramResult {
    Eigen::MatrixXcd gram;
    double min_eigenvalue = 0.0;
    double norm = 0.0;  // largest |eigenvalue|
    double hermiticity_defect = 0.0;
    bool psd = false;
};

// Gram matrix M_ij = <eta, j_mu(a_i) a_j> on a basis supported on the 0 and +
// layers; PSD verdict at min eigenvalue >= -1e-10 * ||M||.
RpGramResult rp_gram_check(const GibbsState& state, const ReflectionStructure& refl,
                           std::span<const LatticeObservable> basis);

// Default RP basis: single factors on the 0 and + layers plus two-factor
// products within the + layer, capped in size.
std::vector<LatticeObservable> default_rp_basis(
    const Lattice& lat, const ReflectionStructure& refl,
    std::span<const SiteObservable> site_obs, std::size_t cap = 256);

// max over generators x observables of |<eta, beta_g a> - <eta, a>|.
double invariance_check(const GibbsState& state,
                        std::span<const std::vector<int>> generators,
                        std::span<const LatticeObservable> observables);

// Smeared observable Phi_n(f x a)(x) = b^-dn0 sum_x' f(x'-x) beta_(n,x')(a):
// f is wrapped around the torus with a truncation radius whose tail must be
// negligible.
struct SmearedObservable {
    std::function<double(std::span<const double>)> f;  // test function on R^d
    LatticeObservable a;
    std::vector<double> x;  // evaluation point in R^d
    double truncation_radius = 0.0;  // 0: one torus period of images
};

// Expectation of prod_j Phi(f_j x a_j)(x_j) under the state.
double smeared_expectation(const GibbsState& state,
                           std::span<const SmearedObservable> factors);

// b^-dn0 Sigma_x' sup_y |f(x'-y) - f(x'-y-x)| ||a||: the first-order bound
// on the shift defect of one smeared factor.
double continuity_modulus(const GibbsState& state, const SmearedObservable& obs,
                          std::span<const double> shift);

// ||Phi_n(f x a)|| <= b^-dn0 Sigma |f| sup|a|.
double smeared_norm_bound(const GibbsState& state, const SmearedObservable& obs);

}  // namespace latrg
