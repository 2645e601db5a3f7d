#include "latrg/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "latrg/util.hpp"

namespace latrg {

namespace {

std::int64_t checked_config_count(int m, std::int64_t tau) {
    std::int64_t total = 1;
    for (std::int64_t i = 0; i < tau; ++i) {
        if (total > std::numeric_limits<std::int64_t>::max() / m)
            throw capability_error(
                "configuration grid exceeds the 64-bit range; use the "
                "Metropolis estimator");
        total *= m;
    }
    return total;
}

// Action weight specialized for digit-indexed enumeration.
struct CompiledAction {
    enum Kind { None, Face, Ultra, Scalar, Dense, Generic } kind = None;
    int m = 0;
    std::vector<double> wtab;            // Face: m*m, Ultra: m
    std::vector<std::int64_t> neighbor;  // Face: tau*d, +e_axis neighbor ids
    const ScalarActionParams* scalar = nullptr;
    const DenseWeight* dense = nullptr;
    const GenericWeight* generic = nullptr;
    const Lattice* lat = nullptr;

    static CompiledAction compile(const Lattice& lat, const SiteSpace& site,
                                  const ActionVariant& action) {
        CompiledAction c;
        c.m = site.node_count();
        c.lat = &lat;
        if (std::holds_alternative<NoAction>(action)) {
            c.kind = None;
        } else if (const auto* f = std::get_if<FaceCouplingAction>(&action)) {
            c.kind = Face;
            c.wtab.resize(std::size_t(c.m) * c.m);
            for (int i = 0; i < c.m; ++i)
                for (int j = 0; j < c.m; ++j)
                    c.wtab[i * c.m + j] = f->w.node_value(i, j);
            c.neighbor.resize(lat.cube_count() * lat.dim());
            for (std::int64_t id = 0; id < lat.cube_count(); ++id)
                for (int a = 0; a < lat.dim(); ++a)
                    c.neighbor[id * lat.dim() + a] = lat.shift_id(id, a, +1);
        } else if (const auto* ul = std::get_if<UltraLocalAction>(&action)) {
            c.kind = Ultra;
            c.wtab = ul->w.node_values();
        } else if (const auto* s = std::get_if<ScalarActionParams>(&action)) {
            c.kind = Scalar;
            c.scalar = s;
        } else if (const auto* d = std::get_if<DenseWeight>(&action)) {
            c.kind = Dense;
            c.dense = d;
        } else {
            c.kind = Generic;
            c.generic = &std::get<GenericWeight>(action);
        }
        return c;
    }

    double eval(std::span<const int> digits, std::span<const double> values,
                std::int64_t cfg) const {
        switch (kind) {
            case None:
                return 1.0;
            case Face: {
                double v = 1.0;
                const int d = lat->dim();
                for (std::int64_t id = 0; id < lat->cube_count(); ++id)
                    for (int a = 0; a < d; ++a)
                        v *= wtab[digits[id] * m + digits[neighbor[id * d + a]]];
                return v;
            }
            case Ultra: {
                double v = 1.0;
                for (std::int64_t id = 0; id < lat->cube_count(); ++id)
                    v *= wtab[digits[id]];
                return v;
            }
            case Scalar:
                return std::exp(-scalar_action(*lat, *scalar, values));
            case Dense:
                return dense->table[cfg];
            case Generic:
            default:
                return generic->fn(values);
        }
    }
};

struct CompiledObs {
    std::vector<std::pair<std::int64_t, std::vector<double>>> factors;

    static CompiledObs compile(const LatticeObservable& obs) {
        CompiledObs c;
        for (const auto& f : obs.grouped_factors())
            c.factors.emplace_back(f.cube, f.a.node_values());
        return c;
    }

    double eval(std::span<const int> digits) const {
        double p = 1.0;
        for (const auto& [site, table] : factors) p *= table[digits[site]];
        return p;
    }
};

void decode_config(std::int64_t cfg, int m, std::span<int> digits,
                   std::span<const double> nodes, std::span<double> values) {
    for (std::int64_t i = static_cast<std::int64_t>(digits.size()) - 1; i >= 0; --i) {
        digits[i] = static_cast<int>(cfg % m);
        values[i] = nodes[digits[i]];
        cfg /= m;
    }
}

void advance_config(int m, std::span<int> digits, std::span<const double> nodes,
                    std::span<double> values) {
    for (std::int64_t i = static_cast<std::int64_t>(digits.size()) - 1; i >= 0; --i) {
        if (++digits[i] < m) {
            values[i] = nodes[digits[i]];
            return;
        }
        digits[i] = 0;
        values[i] = nodes[0];
    }
}

}  // namespace

double Rng::gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
}

JackknifeResult jackknife_mean(std::span<const double> series, int blocks) {
    const std::int64_t n = static_cast<std::int64_t>(series.size());
    if (n == 0) return {};
    const double total = std::accumulate(series.begin(), series.end(), 0.0);
    JackknifeResult r;
    r.mean = total / double(n);
    blocks = std::min<std::int64_t>(blocks, n);
    if (blocks < 2) return r;

    double ssq = 0.0;
    for (int b = 0; b < blocks; ++b) {
        const std::int64_t lo = n * b / blocks;
        const std::int64_t hi = n * (b + 1) / blocks;
        double bs = 0.0;
        for (std::int64_t i = lo; i < hi; ++i) bs += series[i];
        const double loo = (total - bs) / double(n - (hi - lo));
        ssq += (loo - r.mean) * (loo - r.mean);
    }
    r.std_error = std::sqrt((blocks - 1.0) / blocks * ssq);
    return r;
}

double integrated_autocorrelation_time(std::span<const double> series) {
    const std::int64_t n = static_cast<std::int64_t>(series.size());
    if (n < 4) return 0.5;
    double mean = std::accumulate(series.begin(), series.end(), 0.0) / double(n);
    double var = 0.0;
    for (double v : series) var += (v - mean) * (v - mean);
    var /= double(n);
    if (var <= 0.0) return 0.5;
    double tau = 0.5;
    for (std::int64_t t = 1; t < n / 4; ++t) {
        double c = 0.0;
        for (std::int64_t i = 0; i + t < n; ++i)
            c += (series[i] - mean) * (series[i + t] - mean);
        c /= double(n - t) * var;
        if (c < 0.0) break;
        tau += c;
    }
    return tau;
}

MetropolisSampler::MetropolisSampler(const Lattice& lat, const SiteSpace& site,
                                     const ActionVariant& action,
                                     std::uint64_t seed, double proposal_width)
    : lat_(lat),
      site_(site),
      action_(action),
      rng_(seed),
      width_(proposal_width > 0.0 ? proposal_width : site.mc_width()) {
    const std::int64_t tau = lat.cube_count();
    values_.resize(tau);
    if (site_.kind() == SiteKind::FiniteSpin) digits_.resize(tau);
    // hot start from the base product measure
    for (std::int64_t i = 0; i < tau; ++i) {
        switch (site_.kind()) {
            case SiteKind::FiniteSpin: {
                const double u = rng_.uniform();
                double acc = 0.0;
                int d = site_.node_count() - 1;
                for (int j = 0; j < site_.node_count(); ++j) {
                    acc += site_.weights()[j];
                    if (u < acc) {
                        d = j;
                        break;
                    }
                }
                digits_[i] = d;
                values_[i] = site_.values()[d];
                break;
            }
            case SiteKind::RealLine:
                values_[i] = rng_.gaussian();
                break;
            case SiteKind::UnitInterval:
                values_[i] = rng_.uniform();
                break;
        }
    }
}

double MetropolisSampler::log_weight_ratio(std::int64_t c, double x_new) const {
    const double x_old = values_[c];
    if (const auto* f = std::get_if<FaceCouplingAction>(&action_)) {
        double lr = 0.0;
        for (int a = 0; a < lat_.dim(); ++a) {
            const double up = values_[lat_.shift_id(c, a, +1)];
            const double dn = values_[lat_.shift_id(c, a, -1)];
            const double num = f->w.eval(x_new, up) * f->w.eval(dn, x_new);
            const double den = f->w.eval(x_old, up) * f->w.eval(dn, x_old);
            lr += std::log(num) - std::log(den);
        }
        return lr;
    }
    if (const auto* ul = std::get_if<UltraLocalAction>(&action_))
        return std::log(ul->w.eval(x_new)) - std::log(ul->w.eval(x_old));
    if (const auto* s = std::get_if<ScalarActionParams>(&action_)) {
        double ds = 0.0;
        if (s->kinetic_form == KineticForm::SquaredDifference) {
            for (int a = 0; a < lat_.dim(); ++a) {
                const double up = values_[lat_.shift_id(c, a, +1)];
                const double dn = values_[lat_.shift_id(c, a, -1)];
                ds += (up - x_new) * (up - x_new) - (up - x_old) * (up - x_old);
                ds += (x_new - dn) * (x_new - dn) - (x_old - dn) * (x_old - dn);
            }
            ds *= s->lambda0;
        }
        double pn = 1.0, po = 1.0;
        const double xn2 = x_new * x_new, xo2 = x_old * x_old;
        for (double lambda : s->lambdas) {
            pn *= xn2;
            po *= xo2;
            ds += lambda * (pn - po);
        }
        return -ds;
    }
    if (std::holds_alternative<NoAction>(action_)) return 0.0;
    // generic / dense: full re-evaluation
    auto& vals = const_cast<std::vector<double>&>(values_);
    const double v_old = action_weight(lat_, site_, action_, vals);
    vals[c] = x_new;
    const double v_new = action_weight(lat_, site_, action_, vals);
    vals[c] = x_old;
    return std::log(v_new) - std::log(v_old);
}

void MetropolisSampler::sweep() {
    const std::int64_t tau = lat_.cube_count();
    for (std::int64_t c = 0; c < tau; ++c) {
        ++attempts_;
        if (site_.kind() == SiteKind::FiniteSpin) {
            const int d_new = rng_.uniform_int(site_.node_count());
            const int d_old = digits_[c];
            if (d_new == d_old) {
                ++accepts_;
                continue;
            }
            const double x_new = site_.values()[d_new];
            double lr = std::log(site_.weights()[d_new]) -
                        std::log(site_.weights()[d_old]) +
                        log_weight_ratio(c, x_new);
            if (lr >= 0.0 || std::log(rng_.uniform() + 1e-300) < lr) {
                digits_[c] = d_new;
                values_[c] = x_new;
                ++accepts_;
            }
        } else {
            const double x_old = values_[c];
            double x_new = x_old + width_ * (2.0 * rng_.uniform() - 1.0);
            if (site_.kind() == SiteKind::UnitInterval) {
                while (x_new < 0.0 || x_new > 1.0) {
                    if (x_new < 0.0) x_new = -x_new;
                    if (x_new > 1.0) x_new = 2.0 - x_new;
                }
            }
            double lr = log_weight_ratio(c, x_new);
            if (site_.kind() == SiteKind::RealLine)
                lr += -0.5 * (x_new * x_new - x_old * x_old);
            if (lr >= 0.0 || std::log(rng_.uniform() + 1e-300) < lr) {
                values_[c] = x_new;
                ++accepts_;
            }
        }
    }
}

GibbsState::GibbsState(const Lattice& lat, const SiteSpace& site,
                       ActionVariant action, Estimator estimator)
    : lat_(lat), site_(site), action_(std::move(action)), estimator_(estimator) {}

std::int64_t GibbsState::exact_total() const {
    const auto& ex = std::get<ExactEstimator>(estimator_);
    const std::int64_t total =
        checked_config_count(site_.node_count(), lat_.cube_count());
    if (total > ex.cap)
        throw capability_error(
            "exact grid of " + std::to_string(total) +
            " configurations exceeds the cap of " + std::to_string(ex.cap) +
            "; use the Metropolis estimator or raise the cap");
    return total;
}

ExactMoments GibbsState::exact_moments(std::span<const LatticeObservable> obs) const {
    const auto& ex = std::get<ExactEstimator>(estimator_);
    const std::int64_t total = exact_total();
    const int m = site_.node_count();
    const std::int64_t tau = lat_.cube_count();
    const CompiledAction act = CompiledAction::compile(lat_, site_, action_);
    std::vector<CompiledObs> cobs;
    cobs.reserve(obs.size());
    for (const auto& o : obs) cobs.push_back(CompiledObs::compile(o));
    const auto& nodes = site_.values();
    const auto& wts = site_.weights();

    const int n_acc = 1 + static_cast<int>(obs.size());
    auto acc = blocked_reduce(
        total, n_acc, ex.policy,
        [&](std::int64_t lo, std::int64_t hi, double* out) {
            std::vector<int> digits(tau);
            std::vector<double> values(tau);
            decode_config(lo, m, digits, nodes, values);
            for (std::int64_t cfg = lo; cfg < hi; ++cfg) {
                if (cfg != lo) advance_config(m, digits, nodes, values);
                double base = 1.0;
                for (std::int64_t i = 0; i < tau; ++i) base *= wts[digits[i]];
                const double bw = base * act.eval(digits, values, cfg);
                out[0] += bw;
                for (std::size_t j = 0; j < cobs.size(); ++j)
                    out[1 + j] += bw * cobs[j].eval(digits);
            }
        });

    ExactMoments r;
    r.z = acc[0];
    if (!(r.z > 0.0))
        throw std::domain_error("degenerate action weight: partition function <= 0");
    r.means.resize(obs.size());
    for (std::size_t j = 0; j < obs.size(); ++j) r.means[j] = acc[1 + j] / r.z;
    return r;
}

ExactMoments GibbsState::exact_moments_generic(
    std::span<const GenericObservable> obs) const {
    const auto& ex = std::get<ExactEstimator>(estimator_);
    const std::int64_t total = exact_total();
    const int m = site_.node_count();
    const std::int64_t tau = lat_.cube_count();
    const CompiledAction act = CompiledAction::compile(lat_, site_, action_);
    const auto& nodes = site_.values();
    const auto& wts = site_.weights();

    const int n_acc = 1 + static_cast<int>(obs.size());
    auto acc = blocked_reduce(
        total, n_acc, ex.policy,
        [&](std::int64_t lo, std::int64_t hi, double* out) {
            std::vector<int> digits(tau);
            std::vector<double> values(tau);
            decode_config(lo, m, digits, nodes, values);
            for (std::int64_t cfg = lo; cfg < hi; ++cfg) {
                if (cfg != lo) advance_config(m, digits, nodes, values);
                double base = 1.0;
                for (std::int64_t i = 0; i < tau; ++i) base *= wts[digits[i]];
                const double bw = base * act.eval(digits, values, cfg);
                out[0] += bw;
                for (std::size_t j = 0; j < obs.size(); ++j)
                    out[1 + j] += bw * obs[j].eval(values);
            }
        });

    ExactMoments r;
    r.z = acc[0];
    if (!(r.z > 0.0))
        throw std::domain_error("degenerate action weight: partition function <= 0");
    r.means.resize(obs.size());
    for (std::size_t j = 0; j < obs.size(); ++j) r.means[j] = acc[1 + j] / r.z;
    return r;
}

ValueWithError GibbsState::partition_function() const {
    if (std::holds_alternative<NoAction>(action_)) return {1.0, 0.0, true};
    if (std::holds_alternative<ExactEstimator>(estimator_)) {
        auto m = exact_moments({});
        return {m.z, 0.0, true};
    }
    // MC: z = <omega, v> is the base-measure mean of the weight, estimated
    // from iid base samples.
    const auto& mc = std::get<MetropolisEstimator>(estimator_);
    const std::int64_t tau = lat_.cube_count();
    std::vector<double> samples;
    samples.reserve(std::size_t(mc.chains) * mc.measure_sweeps);
    for (int chain = 0; chain < mc.chains; ++chain) {
        Rng rng(derive_seed(mc.seed, chain));
        std::vector<double> u(tau);
        for (int s = 0; s < mc.measure_sweeps; ++s) {
            for (std::int64_t i = 0; i < tau; ++i) {
                switch (site_.kind()) {
                    case SiteKind::FiniteSpin: {
                        const double r = rng.uniform();
                        double acc = 0.0;
                        int d = site_.node_count() - 1;
                        for (int j = 0; j < site_.node_count(); ++j) {
                            acc += site_.weights()[j];
                            if (r < acc) {
                                d = j;
                                break;
                            }
                        }
                        u[i] = site_.values()[d];
                        break;
                    }
                    case SiteKind::RealLine:
                        u[i] = rng.gaussian();
                        break;
                    case SiteKind::UnitInterval:
                        u[i] = rng.uniform();
                        break;
                }
            }
            samples.push_back(action_weight(lat_, site_, action_, u));
        }
    }
    auto jk = jackknife_mean(samples, mc.jackknife_blocks);
    if (!(jk.mean > 0.0))
        throw std::domain_error("degenerate action weight: partition estimate <= 0");
    return {jk.mean, jk.std_error, false};
}

namespace {

// Leave-one-block-out jackknife of an estimator combining several series.
template <class Combine>
JackknifeResult jackknife_combined(const std::vector<std::vector<double>>& series,
                                   int blocks, Combine&& combine) {
    const std::int64_t n = static_cast<std::int64_t>(series.front().size());
    const std::size_t k = series.size();
    std::vector<double> totals(k, 0.0);
    for (std::size_t j = 0; j < k; ++j)
        totals[j] = std::accumulate(series[j].begin(), series[j].end(), 0.0);
    std::vector<double> means(k);
    for (std::size_t j = 0; j < k; ++j) means[j] = totals[j] / double(n);

    JackknifeResult r;
    r.mean = combine(means);
    blocks = std::min<std::int64_t>(blocks, n);
    if (blocks < 2) return r;
    double ssq = 0.0;
    std::vector<double> loo(k);
    for (int b = 0; b < blocks; ++b) {
        const std::int64_t lo = n * b / blocks;
        const std::int64_t hi = n * (b + 1) / blocks;
        for (std::size_t j = 0; j < k; ++j) {
            double bs = 0.0;
            for (std::int64_t i = lo; i < hi; ++i) bs += series[j][i];
            loo[j] = (totals[j] - bs) / double(n - (hi - lo));
        }
        const double v = combine(loo);
        ssq += (v - r.mean) * (v - r.mean);
    }
    r.std_error = std::sqrt((blocks - 1.0) / blocks * ssq);
    return r;
}

}  // namespace

ValueWithError GibbsState::expectation(const LatticeObservable& obs) const {
    if (obs.coeff().imag() != 0.0)
        throw std::invalid_argument("real expectation of a complex observable");
    const double coeff = obs.coeff().real();

    // Pure base state of a product observable factorizes exactly over sites;
    // no enumeration needed at any volume.
    if (std::holds_alternative<NoAction>(action_)) {
        double v = coeff;
        for (const auto& f : obs.grouped_factors())
            v *= site_expectation(site_, f.a);
        return {v, 0.0, true};
    }

    if (std::holds_alternative<ExactEstimator>(estimator_)) {
        auto m = exact_moments(std::span(&obs, 1));
        return {coeff * m.means[0], 0.0, true};
    }

    const auto& mc = std::get<MetropolisEstimator>(estimator_);
    std::vector<double> series;
    series.reserve(std::size_t(mc.chains) * mc.measure_sweeps);
    double accept = 0.0;
    for (int chain = 0; chain < mc.chains; ++chain) {
        MetropolisSampler sampler(lat_, site_, action_, derive_seed(mc.seed, chain),
                                  mc.proposal_width);
        for (int s = 0; s < mc.burn_in_sweeps; ++s) sampler.sweep();
        sampler.reset_acceptance();
        for (int s = 0; s < mc.measure_sweeps; ++s) {
            for (int r = 0; r < mc.sweeps_per_measure; ++r) sampler.sweep();
            series.push_back(obs.eval_product(sampler.values()));
        }
        accept += sampler.acceptance_rate();
    }
    diag_.acceptance_rate = accept / mc.chains;
    diag_.tau_int = integrated_autocorrelation_time(series);
    if (diag_.acceptance_rate < 0.05 || diag_.acceptance_rate > 0.95)
        diag_.warnings.push_back(
            "metropolis acceptance rate " + std::to_string(diag_.acceptance_rate) +
            " outside [0.05, 0.95]; adjust the proposal width");
    auto jk = jackknife_mean(series, mc.jackknife_blocks);
    return {coeff * jk.mean, std::abs(coeff) * jk.std_error, false};
}

ValueWithError GibbsState::expectation(const GenericObservable& obs) const {
    if (std::holds_alternative<ExactEstimator>(estimator_)) {
        auto m = exact_moments_generic(std::span(&obs, 1));
        return {m.means[0], 0.0, true};
    }
    const auto& mc = std::get<MetropolisEstimator>(estimator_);
    std::vector<double> series;
    series.reserve(std::size_t(mc.chains) * mc.measure_sweeps);
    for (int chain = 0; chain < mc.chains; ++chain) {
        MetropolisSampler sampler(lat_, site_, action_, derive_seed(mc.seed, chain),
                                  mc.proposal_width);
        for (int s = 0; s < mc.burn_in_sweeps; ++s) sampler.sweep();
        for (int s = 0; s < mc.measure_sweeps; ++s) {
            for (int r = 0; r < mc.sweeps_per_measure; ++r) sampler.sweep();
            series.push_back(obs.eval(sampler.values()));
        }
    }
    auto jk = jackknife_mean(series, mc.jackknife_blocks);
    return {jk.mean, jk.std_error, false};
}

std::complex<double> GibbsState::expectation_c(const LatticeObservable& obs) const {
    LatticeObservable real_part = obs;
    real_part.set_coeff(1.0);
    return obs.coeff() * expectation(real_part).value;
}

ValueWithError GibbsState::correlation(const LatticeObservable& a,
                                       const LatticeObservable& b) const {
    if (a.coeff().imag() != 0.0 || b.coeff().imag() != 0.0)
        throw std::invalid_argument("correlation of complex observables");
    if (std::holds_alternative<ExactEstimator>(estimator_) ||
        std::holds_alternative<NoAction>(action_)) {
        const auto ab = expectation(a * b);
        const auto ea = expectation(a);
        const auto eb = expectation(b);
        return {ab.value - ea.value * eb.value, 0.0, true};
    }
    const auto& mc = std::get<MetropolisEstimator>(estimator_);
    std::vector<std::vector<double>> series(3);
    for (auto& s : series) s.reserve(std::size_t(mc.chains) * mc.measure_sweeps);
    for (int chain = 0; chain < mc.chains; ++chain) {
        MetropolisSampler sampler(lat_, site_, action_, derive_seed(mc.seed, chain),
                                  mc.proposal_width);
        for (int s = 0; s < mc.burn_in_sweeps; ++s) sampler.sweep();
        for (int s = 0; s < mc.measure_sweeps; ++s) {
            for (int r = 0; r < mc.sweeps_per_measure; ++r) sampler.sweep();
            const double va = a.eval_product(sampler.values()) * a.coeff().real();
            const double vb = b.eval_product(sampler.values()) * b.coeff().real();
            series[0].push_back(va * vb);
            series[1].push_back(va);
            series[2].push_back(vb);
        }
    }
    auto jk = jackknife_combined(series, mc.jackknife_blocks,
                                 [](const std::vector<double>& m) {
                                     return m[0] - m[1] * m[2];
                                 });
    return {jk.mean, jk.std_error, false};
}

CorrelationFit correlation_length_fit(
    std::span<const std::pair<double, double>> points) {
    CorrelationFit fit;
    std::vector<std::pair<double, double>> usable;
    for (const auto& [dist, corr] : points) {
        if (corr > 0.0)
            usable.emplace_back(dist, std::log(corr));
        else
            ++fit.dropped;
    }
    if (usable.size() < 2)
        throw std::invalid_argument(
            "correlation length fit needs at least two positive correlations");
    const double d0 = usable.front().first;
    if (std::all_of(usable.begin(), usable.end(),
                    [&](const auto& p) { return p.first == d0; }))
        throw std::invalid_argument(
            "correlation length fit is degenerate: a single distance");

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [x, y] : usable) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = double(usable.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / n;
    fit.K = std::exp(intercept);
    if (slope >= -1e-12) {
        fit.non_decaying = true;
        fit.ell = std::numeric_limits<double>::infinity();
    } else {
        fit.ell = -1.0 / slope;
    }
    double ssq = 0.0;
    for (const auto& [x, y] : usable) {
        const double r = y - (intercept + slope * x);
        ssq += r * r;
    }
    fit.rms_residual = std::sqrt(ssq / n);
    return fit;
}

namespace reference {

double partition_function(const Lattice& lat, const SiteSpace& site,
                          const ActionVariant& action) {
    const int m = site.node_count();
    const std::int64_t tau = lat.cube_count();
    const std::int64_t total = checked_config_count(m, tau);
    std::vector<int> digits(tau, 0);
    std::vector<double> values(tau, site.values()[0]);
    double z = 0.0;
    for (std::int64_t cfg = 0; cfg < total; ++cfg) {
        if (cfg != 0) advance_config(m, digits, site.values(), values);
        double base = 1.0;
        for (std::int64_t i = 0; i < tau; ++i) base *= site.weights()[digits[i]];
        z += base * action_weight(lat, site, action, values);
    }
    return z;
}

double expectation(const Lattice& lat, const SiteSpace& site,
                   const ActionVariant& action, const LatticeObservable& obs) {
    const int m = site.node_count();
    const std::int64_t tau = lat.cube_count();
    const std::int64_t total = checked_config_count(m, tau);
    std::vector<int> digits(tau, 0);
    std::vector<double> values(tau, site.values()[0]);
    double z = 0.0, num = 0.0;
    for (std::int64_t cfg = 0; cfg < total; ++cfg) {
        if (cfg != 0) advance_config(m, digits, site.values(), values);
        double base = 1.0;
        for (std::int64_t i = 0; i < tau; ++i) base *= site.weights()[digits[i]];
        const double bw = base * action_weight(lat, site, action, values);
        z += bw;
        num += bw * obs.eval_product(values);
    }
    return obs.coeff().real() * num / z;
}

}  // namespace reference

}  // namespace latrg
