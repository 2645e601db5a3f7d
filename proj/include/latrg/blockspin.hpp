#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "latrg/gibbs.hpp"
#include "latrg/lattice.hpp"
#include "latrg/observable.hpp"

namespace latrg {

// Decimation keeps the value at the center fine cube of each coarse block;
// BlockAverage takes the block mean (only meaningful where value averages
// stay in the space, so not for FiniteSpin).
enum class BlockSpinKind { Decimation, BlockAverage };

struct BlockSpinFamily {
    BlockSpinKind kind = BlockSpinKind::Decimation;
};

// p_(n,n+k): fine configuration at n+k -> coarse configuration at n.
// Exterior fine cubes (k1 > 0) are ignored by the map.
std::vector<double> block_map(const BlockSpinFamily& family,
                              const Lattice& coarse, const Lattice& fine,
                              RefinementStep k, std::span<const double> u_fine);

// iota_(n+k,n) a := a o p_(n,n+k) for product observables. Decimation embeds
// each factor at the distinguished subcube and keeps the product form.
LatticeObservable pullback_observable(const Lattice& coarse, const Lattice& fine,
                                      RefinementStep k,
                                      const LatticeObservable& a);

// BlockAverage pullbacks do not preserve the product form; they evaluate as
// a(p(u)) on fine configurations.
GenericObservable pullback_observable_generic(const BlockSpinFamily& family,
                                              const Lattice& coarse,
                                              const Lattice& fine,
                                              RefinementStep k,
                                              const LatticeObservable& a);

struct AxiomReport {
    bool cosheaf = false;
    bool locality = false;
    bool covariance = false;
    bool all() const { return cosheaf && locality && covariance; }
};

// Exhaustive checks of the block-spin axioms on a small lattice:
// composition p o p = p, support preservation, and commutation with the
// coarse translation group (asserted for k1 = 0).
AxiomReport verify_blockspin_axioms(const BlockSpinFamily& family,
                                    const LatticeSpec& base, RefinementStep k1,
                                    RefinementStep k2);

struct ConsistencyReport {
    double max_defect = 0.0;
    int observables_checked = 0;
};

// max |omega_(n+k)(iota a) - omega_n(a)| over a generating observable set.
// Zero at machine precision for Decimation with a product base.
ConsistencyReport state_consistency_check(const BlockSpinFamily& family,
                                          const SiteSpace& site,
                                          const LatticeSpec& base,
                                          RefinementStep k);

// A family of Gibbs data indexed by scale: the same site space with a scale
// dependent action weight.
struct StateFamily {
    const SiteSpace* site = nullptr;
    std::function<ActionVariant(const LatticeSpec&)> action_at;
    Estimator estimator = ExactEstimator{};
};

struct TowerFlowRow {
    RefinementStep k;
    std::size_t observable = 0;
    ValueWithError value;
    double diff_from_previous = 0.0;  // vs the previous k for this observable
};

// Pulled-back expectations <eta_(n+k), iota_(n+k,n) a> along the tower.
// Convergence is reported, never assumed.
std::vector<TowerFlowRow> tower_flow(const BlockSpinFamily& family,
                                     const StateFamily& states,
                                     const LatticeSpec& base,
                                     std::span<const RefinementStep> k_list,
                                     std::span<const LatticeObservable> observables);

}  // namespace latrg
