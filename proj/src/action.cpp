#include "latrg/action.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace latrg {

void ScalarActionParams::validate() const {
    if (!lambdas.empty() && lambdas.back() <= 0.0)
        throw std::invalid_argument(
            "highest even-power coupling must be positive for integrability");
}

double codifferential(const Lattice& lat, std::span<const double> u,
                      std::int64_t face_id) {
    const auto [c0, c1] = lat.face_cubes(face_id);
    return u[c1] - u[c0];
}

double codifferential(const Lattice& lat, std::span<const double> u,
                      const FaceIndex& face) {
    return codifferential(lat, u, lat.face_id(face));
}

double scalar_action(const Lattice& lat, const ScalarActionParams& params,
                     std::span<const double> u) {
    double kin = 0.0;
    for (std::int64_t f = 0; f < lat.face_count(); ++f) {
        const double du = codifferential(lat, u, f);
        kin += params.kinetic_form == KineticForm::SquaredDifference ? du * du : du;
    }
    double pot = 0.0;
    for (std::int64_t c = 0; c < lat.cube_count(); ++c) {
        const double x2 = u[c] * u[c];
        double p = 1.0;
        for (double lambda : params.lambdas) {
            p *= x2;
            pot += lambda * p;
        }
    }
    return params.lambda0 * kin + pot;
}

double face_coupling_weight(const Lattice& lat, const FaceCouplingAction& action,
                            std::span<const double> u) {
    double v = 1.0;
    for (std::int64_t f = 0; f < lat.face_count(); ++f) {
        const auto [c0, c1] = lat.face_cubes(f);
        const double factor = action.w.eval(u[c0], u[c1]);
        if (factor <= 0.0)
            throw std::domain_error("non-positive coupling factor at face id " +
                                    std::to_string(f));
        v *= factor;
    }
    return v;
}

double ultra_local_weight(const Lattice& lat, const UltraLocalAction& action,
                          std::span<const double> u) {
    double v = 1.0;
    for (std::int64_t c = 0; c < lat.cube_count(); ++c) v *= action.w.eval(u[c]);
    return v;
}

ExpCouplingFamily ExpCouplingFamily::make(std::function<double(double)> y_fn,
                                          bool monotone, int scan_points) {
    ExpCouplingFamily f;
    f.y = std::move(y_fn);
    f.monotone = monotone;
    if (monotone) {
        const double y0 = f.y(0.0), y1 = f.y(1.0);
        f.inf_y = std::min(y0, y1);
        f.sup_y = std::max(y0, y1);
    } else {
        f.inf_y = f.sup_y = f.y(0.0);
        for (int i = 1; i < scan_points; ++i) {
            const double v = f.y(double(i) / (scan_points - 1));
            f.inf_y = std::min(f.inf_y, v);
            f.sup_y = std::max(f.sup_y, v);
        }
    }
    if (f.inf_y < 1.0)
        throw std::invalid_argument("exp coupling requires y >= 1 on [0,1]");
    return f;
}

double exp_coupling_H(const ExpCouplingFamily& family, double u0, double u1,
                      std::span<const double> s_on_boundary) {
    if (u0 > u1) throw std::invalid_argument("interval must satisfy u0 <= u1");
    double Y = 0.0;
    for (double s : s_on_boundary) Y += family.y(s);
    return (std::exp(u1 * Y) - std::exp(u0 * Y)) / Y;
}

double action_weight(const Lattice& lat, const SiteSpace& site,
                     const ActionVariant& action, std::span<const double> u) {
    return std::visit(
        [&](const auto& a) -> double {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, NoAction>) {
                return 1.0;
            } else if constexpr (std::is_same_v<T, ScalarActionParams>) {
                return std::exp(-scalar_action(lat, a, u));
            } else if constexpr (std::is_same_v<T, FaceCouplingAction>) {
                return face_coupling_weight(lat, a, u);
            } else if constexpr (std::is_same_v<T, UltraLocalAction>) {
                return ultra_local_weight(lat, a, u);
            } else if constexpr (std::is_same_v<T, GenericWeight>) {
                return a.fn(u);
            } else {  // DenseWeight: recover the digit index from node values
                const int m = site.node_count();
                std::int64_t idx = 0;
                for (std::int64_t c = 0; c < lat.cube_count(); ++c) {
                    int digit = -1;
                    for (int i = 0; i < m; ++i)
                        if (site.values()[i] == u[c]) {
                            digit = i;
                            break;
                        }
                    if (digit < 0)
                        throw std::invalid_argument("dense weight evaluated off-grid");
                    idx = idx * m + digit;
                }
                return a.table[idx];
            }
        },
        action);
}

}  // namespace latrg
