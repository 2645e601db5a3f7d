#include "latrg/observable.hpp"

#include <algorithm>
#include <map>

namespace latrg {

LatticeObservable LatticeObservable::translated(const Lattice& lat,
                                                std::span<const int> g) const {
    LatticeObservable o;
    o.coeff_ = coeff_;
    o.factors_.reserve(factors_.size());
    for (const auto& f : factors_)
        o.factors_.push_back({lat.translate_cube_id(f.cube, g), f.a});
    return o;
}

std::vector<LatticeObservable::Factor> LatticeObservable::grouped_factors() const {
    std::map<std::int64_t, SiteObservable> byCube;
    for (const auto& f : factors_) {
        auto it = byCube.find(f.cube);
        if (it == byCube.end())
            byCube.emplace(f.cube, f.a);
        else
            it->second = it->second.pointwise_product(f.a);
    }
    std::vector<Factor> out;
    out.reserve(byCube.size());
    for (auto& [cube, a] : byCube) out.push_back({cube, std::move(a)});
    return out;
}

double LatticeObservable::eval_product(std::span<const double> values) const {
    double p = 1.0;
    for (const auto& f : factors_) p *= f.a.eval(values[f.cube]);
    return p;
}

double LatticeObservable::sup_norm_bound() const {
    double p = std::abs(coeff_);
    for (const auto& f : grouped_factors()) p *= f.a.sup_norm();
    return p;
}

}  // namespace latrg
