#include "latrg/duality.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "latrg/util.hpp"

namespace latrg {

namespace {

std::int64_t checked_grid(int m, std::int64_t count, std::int64_t cap) {
    std::int64_t total = 1;
    for (std::int64_t i = 0; i < count; ++i) {
        if (total > cap / m) return -1;
        total *= m;
    }
    return total;
}

void decode(std::int64_t cfg, int m, std::span<int> digits) {
    for (std::int64_t i = static_cast<std::int64_t>(digits.size()) - 1; i >= 0; --i) {
        digits[i] = static_cast<int>(cfg % m);
        cfg /= m;
    }
}

}  // namespace

DualModel::DualModel(const Lattice& lat, const SiteSpace& site,
                     SiteSpace face_space, std::function<double(double, double)> h)
    : lat_(lat), site_(site), face_space_(std::move(face_space)), h_(std::move(h)) {}

PairWeight DualModel::primal_pair_weight() const {
    const auto nodes = face_space_.values();
    const auto weights = face_space_.weights();
    auto h = h_;
    return PairWeight::from_function(site_, [h, nodes, weights](double x, double y) {
        double s = 0.0;
        for (std::size_t q = 0; q < nodes.size(); ++q)
            s += weights[q] * h(x, nodes[q]) * h(y, nodes[q]);
        return s;
    });
}

double DualModel::cube_normalizer(std::int64_t cube, std::span<const double> s) const {
    const CubeIndex c = lat_.cube_at(cube);
    const auto faces = lat_.boundary_faces(c);
    double total = 0.0;
    for (int j = 0; j < site_.node_count(); ++j) {
        double p = site_.weights()[j];
        const double x = site_.values()[j];
        if (s.size() == faces.size()) {
            for (std::size_t i = 0; i < faces.size(); ++i) p *= h_(x, s[i]);
        } else {
            for (const auto& f : faces) p *= h_(x, s[lat_.face_id(f)]);
        }
        total += p;
    }
    return total;
}

double DualModel::dual_site_state(std::int64_t cube, std::span<const double> s,
                                  const SiteObservable& a) const {
    const CubeIndex c = lat_.cube_at(cube);
    const auto faces = lat_.boundary_faces(c);
    double num = 0.0, den = 0.0;
    for (int j = 0; j < site_.node_count(); ++j) {
        double p = site_.weights()[j];
        const double x = site_.values()[j];
        if (s.size() == faces.size()) {
            for (std::size_t i = 0; i < faces.size(); ++i) p *= h_(x, s[i]);
        } else {
            for (const auto& f : faces) p *= h_(x, s[lat_.face_id(f)]);
        }
        num += p * a.node_value(j);
        den += p;
    }
    if (!(den > 0.0)) throw std::domain_error("vanishing dual normalizer");
    return num / den;
}

double DualModel::dual_action(std::span<const double> s) const {
    if (static_cast<std::int64_t>(s.size()) != lat_.face_count())
        throw std::invalid_argument("face configuration has the wrong size");
    double v = 1.0;
    for (std::int64_t c = 0; c < lat_.cube_count(); ++c)
        v *= cube_normalizer(c, s);
    return v;
}

ValueWithError DualModel::dual_expectation(
    const std::function<double(std::span<const double>)>& a_hat, std::int64_t cap,
    ExecPolicy policy) const {
    const int m = face_space_.node_count();
    const std::int64_t nf = lat_.face_count();
    const std::int64_t total = checked_grid(m, nf, cap);
    if (total < 0)
        throw capability_error(
            "dual face grid exceeds the exact cap; use dual_expectation_mc");

    const auto& nodes = face_space_.values();
    const auto& wts = face_space_.weights();
    auto acc = blocked_reduce(
        total, 2, policy,
        [&](std::int64_t lo, std::int64_t hi, double* out) {
            std::vector<int> digits(nf);
            std::vector<double> s(nf);
            for (std::int64_t cfg = lo; cfg < hi; ++cfg) {
                decode(cfg, m, digits);
                double qw = 1.0;
                for (std::int64_t i = 0; i < nf; ++i) {
                    qw *= wts[digits[i]];
                    s[i] = nodes[digits[i]];
                }
                const double v = qw * dual_action(s);
                out[0] += v;
                out[1] += v * a_hat(s);
            }
        });
    if (!(acc[0] > 0.0)) throw std::domain_error("vanishing dual partition function");
    return {acc[1] / acc[0], 0.0, true};
}

ValueWithError DualModel::dual_expectation_mc(
    const std::function<double(std::span<const double>)>& a_hat,
    const MetropolisEstimator& mc) const {
    const std::int64_t nf = lat_.face_count();
    std::vector<double> series;
    series.reserve(std::size_t(mc.chains) * mc.measure_sweeps);
    const double width =
        mc.proposal_width > 0.0 ? mc.proposal_width : face_space_.mc_width();

    for (int chain = 0; chain < mc.chains; ++chain) {
        Rng rng(derive_seed(mc.seed, chain));
        std::vector<double> s(nf);
        for (auto& x : s) x = rng.uniform();
        auto sweep = [&]() {
            for (std::int64_t f = 0; f < nf; ++f) {
                double x_new = s[f] + width * (2.0 * rng.uniform() - 1.0);
                while (x_new < 0.0 || x_new > 1.0) {
                    if (x_new < 0.0) x_new = -x_new;
                    if (x_new > 1.0) x_new = 2.0 - x_new;
                }
                // only the two cubes sharing this face change
                const auto [c0, c1] = lat_.face_cubes(f);
                const double old_val = s[f];
                const double before =
                    cube_normalizer(c0, s) * (c1 != c0 ? cube_normalizer(c1, s) : 1.0);
                s[f] = x_new;
                const double after =
                    cube_normalizer(c0, s) * (c1 != c0 ? cube_normalizer(c1, s) : 1.0);
                if (!(after > 0.0) ||
                    std::log(rng.uniform() + 1e-300) >= std::log(after / before))
                    s[f] = old_val;
            }
        };
        for (int i = 0; i < mc.burn_in_sweeps; ++i) sweep();
        for (int i = 0; i < mc.measure_sweeps; ++i) {
            for (int r = 0; r < mc.sweeps_per_measure; ++r) sweep();
            series.push_back(a_hat(s));
        }
    }
    auto jk = jackknife_mean(series, mc.jackknife_blocks);
    return {jk.mean, jk.std_error, false};
}

DualityCheck duality_identity_check(const DualModel& model,
                                    std::span<const std::int64_t> cubes,
                                    std::span<const SiteObservable> observables,
                                    std::int64_t cap) {
    if (cubes.size() != observables.size())
        throw std::invalid_argument("cube and observable lists differ in length");

    // primal side: the v[w] model with w from the same face quadrature
    GibbsState primal(model.lattice(), model.site(),
                      FaceCouplingAction{model.primal_pair_weight()},
                      ExactEstimator{cap});
    LatticeObservable obs;
    for (std::size_t j = 0; j < cubes.size(); ++j) obs.append(cubes[j], observables[j]);
    const double lhs = primal.expectation(obs).value;

    // dual side: product of dual site states under eta_hat
    std::vector<std::int64_t> cube_list(cubes.begin(), cubes.end());
    std::vector<SiteObservable> obs_list(observables.begin(), observables.end());
    const DualModel* mp = &model;
    const double rhs =
        model
            .dual_expectation(
                [mp, cube_list, obs_list](std::span<const double> s) {
                    double p = 1.0;
                    for (std::size_t j = 0; j < cube_list.size(); ++j)
                        p *= mp->dual_site_state(cube_list[j], s, obs_list[j]);
                    return p;
                },
                cap)
            .value;

    return {lhs, rhs, std::abs(lhs - rhs)};
}

namespace {

double pair_correlation(const GibbsState& state, std::int64_t cube1,
                        std::int64_t cube2, const SiteObservable& a,
                        const SiteObservable& b) {
    return state
        .correlation(LatticeObservable::single(cube1, a),
                     LatticeObservable::single(cube2, b))
        .value;
}

}  // namespace

ProjectionCorrelationResult projection_correlation_test(
    const CorrelationSetQuery& query, const SiteSpace& site, const PairWeight& w,
    std::int64_t cap) {
    if (!(query.threshold > 0.0 && query.threshold < 2.0))
        throw std::invalid_argument("threshold must lie in (0, 2)");
    if (!w.nonnegative_on_nodes())
        throw std::invalid_argument("coupling must be positive");

    const Lattice coarse(query.n);
    const LatticeSpec fine_spec = refined(query.n, query.k);
    const Lattice fine(fine_spec);
    const std::int64_t d1 =
        fine.cube_id(distinguished_subcube(query.n, query.cube1, query.k));
    const std::int64_t d2 =
        fine.cube_id(distinguished_subcube(query.n, query.cube2, query.k));

    GibbsState state(fine, site, FaceCouplingAction{w}, ExactEstimator{cap});
    const SiteObservable one = SiteObservable::one(site);
    const SiteObservable p1c(site, [p = query.p1](double x) { return 1.0 - p.eval(x); });

    ProjectionCorrelationResult r;
    r.correlation = pair_correlation(state, d1, d2, query.p1, query.p2);
    r.member = std::abs(r.correlation) > query.threshold;
    r.defect_p_one = std::abs(pair_correlation(state, d1, d2, query.p1, one));
    r.defect_sign = std::abs(pair_correlation(state, d1, d2, p1c, query.p2) +
                             r.correlation);

    // membership is a class function of the translation orbit of the pair
    for (int g = 1; g < coarse.extent(); ++g) {
        std::vector<int> shift(query.n.dim, 0);
        shift[0] = g;
        const CubeIndex t1 = coarse.translate_cube(query.cube1, shift);
        const CubeIndex t2 = coarse.translate_cube(query.cube2, shift);
        const std::int64_t td1 =
            fine.cube_id(distinguished_subcube(query.n, t1, query.k));
        const std::int64_t td2 =
            fine.cube_id(distinguished_subcube(query.n, t2, query.k));
        const double corr = pair_correlation(state, td1, td2, query.p1, query.p2);
        r.defect_translation =
            std::max(r.defect_translation, std::abs(corr - r.correlation));
    }
    return r;
}

std::vector<CouplingSweepPoint> non_ultra_locality_sweep(
    const LatticeSpec& n, const SiteSpace& site, const CubeIndex& cube1,
    const CubeIndex& cube2, const SiteObservable& p,
    std::span<const double> couplings, std::span<const RefinementStep> k_range,
    std::int64_t cap) {
    std::vector<CouplingSweepPoint> out;
    for (double K : couplings) {
        const PairWeight w = PairWeight::ising(site, K);
        double lower = std::numeric_limits<double>::infinity();
        for (const auto& k : k_range) {
            const Lattice fine(refined(n, k));
            const std::int64_t d1 = fine.cube_id(distinguished_subcube(n, cube1, k));
            const std::int64_t d2 = fine.cube_id(distinguished_subcube(n, cube2, k));
            GibbsState state(fine, site, FaceCouplingAction{w}, ExactEstimator{cap});
            lower = std::min(lower, std::abs(pair_correlation(state, d1, d2, p, p)));
        }
        out.push_back({K, lower});
    }
    return out;
}

}  // namespace latrg
