#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "latrg/lattice.hpp"
#include "latrg/sitespace.hpp"

namespace latrg {

// Finite product of single-site factors, coeff * prod_j a_j(u(cube_j)).
// The empty product is the unit observable. Factor cubes may repeat.
class LatticeObservable {
public:
    struct Factor {
        std::int64_t cube = 0;
        SiteObservable a;
    };

    LatticeObservable() = default;
    explicit LatticeObservable(std::complex<double> coeff) : coeff_(coeff) {}

    static LatticeObservable unit() { return LatticeObservable(); }
    static LatticeObservable single(std::int64_t cube, SiteObservable a) {
        LatticeObservable o;
        o.factors_.push_back({cube, std::move(a)});
        return o;
    }

    LatticeObservable& append(std::int64_t cube, SiteObservable a) {
        factors_.push_back({cube, std::move(a)});
        return *this;
    }

    const std::vector<Factor>& factors() const { return factors_; }
    std::complex<double> coeff() const { return coeff_; }
    void set_coeff(std::complex<double> c) { coeff_ = c; }

    LatticeObservable scaled(std::complex<double> s) const {
        LatticeObservable o = *this;
        o.coeff_ *= s;
        return o;
    }

    LatticeObservable operator*(const LatticeObservable& rhs) const {
        LatticeObservable o = *this;
        o.coeff_ *= rhs.coeff_;
        o.factors_.insert(o.factors_.end(), rhs.factors_.begin(), rhs.factors_.end());
        return o;
    }

    // Translate all factor cubes by g (mod torus).
    LatticeObservable translated(const Lattice& lat, std::span<const int> g) const;

    // Factors merged per cube (pointwise products), cube ids ascending.
    std::vector<Factor> grouped_factors() const;

    // Real part of the factor product at a configuration (coeff excluded).
    double eval_product(std::span<const double> values) const;

    // sup over nodes of |prod a_j|, coeff magnitude included.
    double sup_norm_bound() const;

private:
    std::complex<double> coeff_ = 1.0;
    std::vector<Factor> factors_;
};

// An arbitrary real function of the full configuration; the escape hatch for
// pulled-back block averages and test weights.
struct GenericObservable {
    std::function<double(std::span<const double>)> fn;

    double eval(std::span<const double> values) const { return fn(values); }
};

}  // namespace latrg
