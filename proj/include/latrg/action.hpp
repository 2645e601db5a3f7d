#pragma once

#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "latrg/lattice.hpp"
#include "latrg/observable.hpp"
#include "latrg/sitespace.hpp"

namespace latrg {

enum class KineticForm { SquaredDifference, LinearAsWritten };

// Couplings of the scalar model: lambda0 kinetic + even-power potential
// sum_l lambda_l u^(2l). The literal linear kinetic sum telescopes to zero on
// the torus, so SquaredDifference is the default; LinearAsWritten stays
// selectable for fidelity experiments.
struct ScalarActionParams {
    double lambda0 = 0.0;
    std::vector<double> lambdas;  // lambda_1 .. lambda_L
    KineticForm kinetic_form = KineticForm::SquaredDifference;

    void validate() const;
};

// u(cube + e_axis) - u(cube), sign fixed by the positive-axis orientation.
double codifferential(const Lattice& lat, std::span<const double> u,
                      const FaceIndex& face);
double codifferential(const Lattice& lat, std::span<const double> u,
                      std::int64_t face_id);

// The action functional s_(lambda,n)(u).
double scalar_action(const Lattice& lat, const ScalarActionParams& params,
                     std::span<const double> u);

// v[w]_n = prod over faces of w(u(cube), u(cube + e_axis)).
struct FaceCouplingAction {
    PairWeight w;
};

double face_coupling_weight(const Lattice& lat, const FaceCouplingAction& action,
                            std::span<const double> u);

// v_n = prod over cubes of w(u(cube)) with 0 <= w <= 1.
struct UltraLocalAction {
    SiteObservable w;
};

double ultra_local_weight(const Lattice& lat, const UltraLocalAction& action,
                          std::span<const double> u);

// The exponential coupling family h(u,s) = exp(u y(s)) on [0,1] with a
// smooth y >= 1; carries the extremes of y over the full interval, not just
// the quadrature nodes.
struct ExpCouplingFamily {
    std::function<double(double)> y;
    bool monotone = false;  // enables the analytic extremum shortcut
    double inf_y = 1.0;
    double sup_y = 1.0;

    static ExpCouplingFamily make(std::function<double(double)> y_fn,
                                  bool monotone, int scan_points = 20001);

    double h(double u, double s) const { return std::exp(u * y(s)); }
    // q = 2d sup y, r = 2d inf y (extremes of sum_{faces of a cube} y(s)).
    double q(int dim) const { return 2.0 * dim * sup_y; }
    double r(int dim) const { return 2.0 * dim * inf_y; }
};

// Closed form of int_{[u0,u1]} prod_{faces} h(u, s(face)) du:
// Y(s)^-1 (exp(u1 Y) - exp(u0 Y)) with Y(s) = sum_faces y(s(face)).
double exp_coupling_H(const ExpCouplingFamily& family, double u0, double u1,
                      std::span<const double> s_on_boundary);

// Fully general weight, used for planted test weights and tabulated actions.
struct GenericWeight {
    std::function<double(std::span<const double>)> fn;
};

// Dense weight table over configurations in node-index order.
struct DenseWeight {
    std::vector<double> table;  // size m^tau, lexicographic digits (site 0 slowest)
};

struct NoAction {};

// The action weight v_n attached to a Gibbs state. NoAction means v = 1.
using ActionVariant = std::variant<NoAction, ScalarActionParams, FaceCouplingAction,
                                   UltraLocalAction, GenericWeight, DenseWeight>;

// v_n evaluated at a configuration of values (exp(-s) for the scalar model).
double action_weight(const Lattice& lat, const SiteSpace& site,
                     const ActionVariant& action, std::span<const double> u);

}  // namespace latrg
