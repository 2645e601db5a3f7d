#include "latrg/symmetry.hpp"

#include <cmath>
#include <stdexcept>

#include "latrg/util.hpp"

namespace latrg {

ReflectionStructure::ReflectionStructure(const Lattice& lat, int axis)
    : lat_(lat), axis_(axis) {
    if (axis < 0 || axis >= lat.dim())
        throw std::invalid_argument("reflection axis out of range");
}

CubeIndex ReflectionStructure::reflect(const CubeIndex& c) const {
    CubeIndex r = c;
    r.c[axis_] = static_cast<std::int32_t>((lat_.extent() - c.c[axis_]) %
                                           lat_.extent());
    return r;
}

std::int64_t ReflectionStructure::reflect_id(std::int64_t cube) const {
    return lat_.cube_id(reflect(lat_.cube_at(cube)));
}

int ReflectionStructure::layer(const CubeIndex& c) const {
    const std::int64_t x = c.c[axis_];
    if (x == 0) return 0;
    return x <= (lat_.extent() - 1) / 2 ? +1 : -1;
}

int ReflectionStructure::layer_id(std::int64_t cube) const {
    return layer(lat_.cube_at(cube));
}

std::vector<std::int64_t> ReflectionStructure::layer_cubes(int which) const {
    std::vector<std::int64_t> out;
    for (std::int64_t c = 0; c < lat_.cube_count(); ++c)
        if (layer_id(c) == which) out.push_back(c);
    return out;
}

LatticeObservable time_reflection(const ReflectionStructure& refl,
                                  const LatticeObservable& obs) {
    LatticeObservable out(std::conj(obs.coeff()));
    for (const auto& f : obs.factors()) out.append(refl.reflect_id(f.cube), f.a);
    return out;
}

RpGramResult rp_gram_check(const GibbsState& state, const ReflectionStructure& refl,
                           std::span<const LatticeObservable> basis) {
    for (const auto& b : basis)
        for (const auto& f : b.factors())
            if (refl.layer_id(f.cube) < 0)
                throw std::invalid_argument(
                    "RP basis element supported on the negative layer");

    const int n = static_cast<int>(basis.size());
    // all n^2 products in one enumeration pass
    std::vector<LatticeObservable> products;
    std::vector<std::complex<double>> coeffs;
    products.reserve(std::size_t(n) * n);
    for (int i = 0; i < n; ++i) {
        const LatticeObservable ji = time_reflection(refl, basis[i]);
        for (int j = 0; j < n; ++j) {
            LatticeObservable p = ji * basis[j];
            coeffs.push_back(p.coeff());
            p.set_coeff(1.0);
            products.push_back(std::move(p));
        }
    }
    const auto moments = state.exact_moments(products);

    RpGramResult r;
    r.gram.resize(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            r.gram(i, j) = coeffs[i * n + j] * moments.means[i * n + j];

    r.hermiticity_defect = (r.gram - r.gram.adjoint()).cwiseAbs().maxCoeff();
    const Eigen::MatrixXcd sym = 0.5 * (r.gram + r.gram.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sym);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("gram eigensolve failed");
    r.min_eigenvalue = es.eigenvalues().minCoeff();
    r.norm = es.eigenvalues().cwiseAbs().maxCoeff();
    r.psd = r.min_eigenvalue >= -1e-10 * std::max(r.norm, 1e-300);
    return r;
}

std::vector<LatticeObservable> default_rp_basis(
    const Lattice& lat, const ReflectionStructure& refl,
    std::span<const SiteObservable> site_obs, std::size_t cap) {
    std::vector<LatticeObservable> basis;
    basis.push_back(LatticeObservable::unit());
    const auto zero_layer = refl.layer_cubes(0);
    const auto plus_layer = refl.layer_cubes(+1);

    std::vector<std::int64_t> zero_plus = zero_layer;
    zero_plus.insert(zero_plus.end(), plus_layer.begin(), plus_layer.end());
    for (std::int64_t c : zero_plus)
        for (const auto& a : site_obs) {
            if (basis.size() >= cap) return basis;
            basis.push_back(LatticeObservable::single(c, a));
        }
    for (std::size_t i = 0; i < plus_layer.size(); ++i)
        for (std::size_t j = i; j < plus_layer.size(); ++j)
            for (const auto& a : site_obs)
                for (const auto& b : site_obs) {
                    if (basis.size() >= cap) return basis;
                    basis.push_back(LatticeObservable::single(plus_layer[i], a)
                                        .append(plus_layer[j], b));
                }
    return basis;
}

double invariance_check(const GibbsState& state,
                        std::span<const std::vector<int>> generators,
                        std::span<const LatticeObservable> observables) {
    std::vector<LatticeObservable> batch;
    for (const auto& a : observables) {
        batch.push_back(a);
        for (const auto& g : generators)
            batch.push_back(a.translated(state.lattice(), g));
    }
    const auto moments = state.exact_moments(batch);
    double defect = 0.0;
    std::size_t idx = 0;
    for (std::size_t i = 0; i < observables.size(); ++i) {
        const double ref = moments.means[idx++];
        for (std::size_t g = 0; g < generators.size(); ++g)
            defect = std::max(defect, std::abs(moments.means[idx++] - ref));
    }
    return defect;
}

namespace {

// f summed over torus images at the position of lattice cube g minus x.
// Returns (coefficient, outermost-shell magnitude) for the tail check.
std::pair<double, double> torus_f(const Lattice& lat,
                                  const std::function<double(std::span<const double>)>& f,
                                  std::int64_t cube, std::span<const double> x,
                                  double truncation_radius) {
    const int d = lat.dim();
    const double spacing = lat.spec().spacing();
    const double period = spacing * double(lat.extent());
    const int M = std::max(
        1, static_cast<int>(std::ceil(truncation_radius / period)));

    const CubeIndex c = lat.cube_at(cube);
    std::vector<double> pos(d);
    for (int a = 0; a < d; ++a) pos[a] = spacing * double(c.c[a]) - x[a];

    double total = 0.0, shell = 0.0;
    std::vector<int> img(d, -M);
    const std::int64_t n_images = [&] {
        std::int64_t t = 1;
        for (int a = 0; a < d; ++a) t *= (2 * M + 1);
        return t;
    }();
    std::vector<double> z(d);
    for (std::int64_t i = 0; i < n_images; ++i) {
        std::int64_t rem = i;
        bool outermost = false;
        for (int a = d - 1; a >= 0; --a) {
            const int mi = static_cast<int>(rem % (2 * M + 1)) - M;
            rem /= (2 * M + 1);
            z[a] = pos[a] + period * mi;
            if (std::abs(mi) == M) outermost = true;
        }
        const double v = f(z);
        total += v;
        if (outermost) shell += std::abs(v);
    }
    return {total, shell};
}

}  // namespace

double smeared_expectation(const GibbsState& state,
                           std::span<const SmearedObservable> factors) {
    const Lattice& lat = state.lattice();
    const double amp = std::pow(double(lat.spec().base), -lat.dim() * lat.spec().n0);
    const double period = lat.spec().spacing() * double(lat.extent());

    // per factor: coefficient of each lattice translation
    std::vector<std::vector<double>> coeff(factors.size());
    for (std::size_t j = 0; j < factors.size(); ++j) {
        const double radius = factors[j].truncation_radius > 0.0
                                  ? factors[j].truncation_radius
                                  : period;
        coeff[j].resize(lat.cube_count());
        double mass = 0.0, shell = 0.0;
        for (std::int64_t g = 0; g < lat.cube_count(); ++g) {
            auto [v, s] = torus_f(lat, factors[j].f, g, factors[j].x, radius);
            coeff[j][g] = amp * v;
            mass += std::abs(v);
            shell += s;
        }
        if (mass > 0.0 && shell > 1e-12 * mass)
            throw capability_error(
                "test function tail exceeds 1e-12 of its mass at the "
                "configured truncation radius");
    }

    // expand the product of lattice sums into one batched pass
    std::vector<LatticeObservable> batch;
    std::vector<double> weights;
    std::vector<std::int64_t> tuple(factors.size(), 0);
    const std::int64_t tuples = [&] {
        std::int64_t t = 1;
        for (std::size_t j = 0; j < factors.size(); ++j) t *= lat.cube_count();
        return t;
    }();
    for (std::int64_t ti = 0; ti < tuples; ++ti) {
        std::int64_t rem = ti;
        double c = 1.0;
        LatticeObservable prod;
        for (std::size_t j = 0; j < factors.size(); ++j) {
            const std::int64_t g = rem % lat.cube_count();
            rem /= lat.cube_count();
            c *= coeff[j][g];
            if (c == 0.0) break;
            const CubeIndex gc = lat.cube_at(g);
            std::vector<int> shift(lat.dim());
            for (int a = 0; a < lat.dim(); ++a) shift[a] = gc.c[a];
            prod = prod * factors[j].a.translated(lat, shift);
        }
        if (c == 0.0 || std::abs(c) < 1e-300) continue;
        weights.push_back(c * prod.coeff().real());
        prod.set_coeff(1.0);
        batch.push_back(std::move(prod));
    }
    if (batch.empty()) return 0.0;
    const auto moments = state.exact_moments(batch);
    double total = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i)
        total += weights[i] * moments.means[i];
    return total;
}

double continuity_modulus(const GibbsState& state, const SmearedObservable& obs,
                          std::span<const double> shift) {
    const Lattice& lat = state.lattice();
    const int d = lat.dim();
    const double amp = std::pow(double(lat.spec().base), -d * lat.spec().n0);
    const double period = lat.spec().spacing() * double(lat.extent());
    const double radius =
        obs.truncation_radius > 0.0 ? obs.truncation_radius : period;

    // sup_z |f(z) - f(z - shift)| on a dense grid over the truncation box
    const int pts = d == 1 ? 8193 : 257;
    std::int64_t total_pts = 1;
    for (int a = 0; a < d; ++a) total_pts *= pts;
    double sup = 0.0;
    std::vector<double> z(d), zs(d);
    for (std::int64_t i = 0; i < total_pts; ++i) {
        std::int64_t rem = i;
        for (int a = d - 1; a >= 0; --a) {
            const int gi = static_cast<int>(rem % pts);
            rem /= pts;
            z[a] = -radius + 2.0 * radius * gi / (pts - 1);
            zs[a] = z[a] - shift[a];
        }
        sup = std::max(sup, std::abs(obs.f(z) - obs.f(zs)));
    }
    return amp * double(lat.cube_count()) * sup * obs.a.sup_norm_bound();
}

double smeared_norm_bound(const GibbsState& state, const SmearedObservable& obs) {
    const Lattice& lat = state.lattice();
    const double amp = std::pow(double(lat.spec().base), -lat.dim() * lat.spec().n0);
    const double period = lat.spec().spacing() * double(lat.extent());
    const double radius =
        obs.truncation_radius > 0.0 ? obs.truncation_radius : period;
    double mass = 0.0;
    for (std::int64_t g = 0; g < lat.cube_count(); ++g) {
        auto [v, s] = torus_f(lat, obs.f, g, obs.x, radius);
        (void)s;
        mass += std::abs(v);
    }
    return amp * mass * obs.a.sup_norm_bound();
}

}  // namespace latrg
