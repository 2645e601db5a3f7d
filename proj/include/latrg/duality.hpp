#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "latrg/gibbs.hpp"
#include "latrg/lattice.hpp"
#include "latrg/sitespace.hpp"

namespace latrg {

// The dual description of a v[w] model with w = int ds h(s) x h(s): face
// variables s on the fixed unit-interval quadrature, per-cube normalizers
// z^(s) and dual action v_hat(s) = prod_cubes z^(s). The same discrete
// quadrature builds the primal w, which turns the duality relation into an
// exact finite-sum identity.
class DualModel {
public:
    DualModel(const Lattice& lat, const SiteSpace& site, SiteSpace face_space,
              std::function<double(double, double)> h);

    const Lattice& lattice() const { return lat_; }
    const SiteSpace& site() const { return site_; }
    const SiteSpace& face_space() const { return face_space_; }
    double h(double u, double s) const { return h_(u, s); }

    // The primal coupling w(x,y) = sum_q qw_q h(x,s_q) h(y,s_q).
    PairWeight primal_pair_weight() const;

    // z^(s)_(h,n|cube): <Omega, prod_{faces of cube} h(s(face)) Omega>.
    double cube_normalizer(std::int64_t cube, std::span<const double> s) const;

    // <E^(s)_(h,n|cube), a>: the normalized dual site state.
    double dual_site_state(std::int64_t cube, std::span<const double> s,
                           const SiteObservable& a) const;

    // v_hat(s) over a full face configuration (indexed by face id).
    double dual_action(std::span<const double> s) const;

    // <eta_hat, a_hat>: quadrature over the face grid under the exact cap,
    // Metropolis over face variables beyond it.
    ValueWithError dual_expectation(
        const std::function<double(std::span<const double>)>& a_hat,
        std::int64_t cap = std::int64_t(1) << 24,
        ExecPolicy policy = ExecPolicy::Parallel) const;

    ValueWithError dual_expectation_mc(
        const std::function<double(std::span<const double>)>& a_hat,
        const MetropolisEstimator& mc) const;

private:
    const Lattice& lat_;
    const SiteSpace& site_;
    SiteSpace face_space_;
    std::function<double(double, double)> h_;
};

struct DualityCheck {
    double lhs = 0.0;  // primal v[w] expectation
    double rhs = 0.0;  // dual-lattice evaluation
    double defect = 0.0;
};

// <eta_n, prod_j Phi(cube_j, a_j)> vs int d eta_hat prod_j <E^(s), a_j>.
DualityCheck duality_identity_check(const DualModel& model,
                                    std::span<const std::int64_t> cubes,
                                    std::span<const SiteObservable> observables,
                                    std::int64_t cap = std::int64_t(1) << 24);

struct CorrelationSetQuery {
    double threshold = 0.1;  // c in (0,2)
    CubeIndex cube1, cube2;  // disjoint cubes at scale n
    SiteObservable p1, p2;   // projections
    LatticeSpec n;
    RefinementStep k;
};

struct ProjectionCorrelationResult {
    double correlation = 0.0;  // <c, P1 x P2> at the decimated pair
    bool member = false;       // |correlation| > threshold
    double defect_p_one = 0.0;       // |<c, P1 x 1>|
    double defect_sign = 0.0;        // |<c,(1-P1) x P2> + <c, P1 x P2>|
    double defect_translation = 0.0; // membership invariance under translations
};

ProjectionCorrelationResult projection_correlation_test(
    const CorrelationSetQuery& query, const SiteSpace& site, const PairWeight& w,
    std::int64_t cap = std::int64_t(1) << 24);

struct CouplingSweepPoint {
    double coupling = 0.0;
    double uniform_lower_bound = 0.0;  // min over the k-range of |correlation|
};

// 1-parameter Ising-coupling sweep: for each K the correlation lower bound
// certified uniformly over the k-range.
std::vector<CouplingSweepPoint> non_ultra_locality_sweep(
    const LatticeSpec& n, const SiteSpace& site, const CubeIndex& cube1,
    const CubeIndex& cube2, const SiteObservable& p,
    std::span<const double> couplings, std::span<const RefinementStep> k_range,
    std::int64_t cap = std::int64_t(1) << 24);

}  // namespace latrg
