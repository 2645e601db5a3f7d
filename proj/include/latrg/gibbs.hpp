#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "latrg/action.hpp"
#include "latrg/lattice.hpp"
#include "latrg/observable.hpp"
#include "latrg/parallel.hpp"
#include "latrg/sitespace.hpp"

namespace latrg {

struct ExactEstimator {
    std::int64_t cap = std::int64_t(1) << 24;  // max configurations enumerated
    ExecPolicy policy = ExecPolicy::Parallel;
};

struct MetropolisEstimator {
    std::uint64_t seed = 1;
    int burn_in_sweeps = 500;
    int measure_sweeps = 4000;
    int sweeps_per_measure = 1;
    int chains = 4;
    double proposal_width = 0.0;  // 0: site space default
    int jackknife_blocks = 32;
};

using Estimator = std::variant<ExactEstimator, MetropolisEstimator>;

struct ValueWithError {
    double value = 0.0;
    double std_error = 0.0;
    bool exact = true;
};

struct McDiagnostics {
    double acceptance_rate = 0.0;
    double tau_int = 0.0;  // integrated autocorrelation time of the last series
    std::vector<std::string> warnings;
};

// mt19937_64 driven uniform/gaussian primitives; no std distributions, so a
// seed pins the exact sample stream on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    int uniform_int(int n) { return static_cast<int>(eng_() % std::uint64_t(n)); }
    double gaussian();

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

struct JackknifeResult {
    double mean = 0.0;
    double std_error = 0.0;
};

JackknifeResult jackknife_mean(std::span<const double> series, int blocks = 32);
double integrated_autocorrelation_time(std::span<const double> series);

// Single-site Metropolis chain for the density v_n * base. FiniteSpin uses
// uniform label proposals; continuous spaces a symmetric step of the
// configured width, reflected at interval boundaries.
class MetropolisSampler {
public:
    MetropolisSampler(const Lattice& lat, const SiteSpace& site,
                      const ActionVariant& action, std::uint64_t seed,
                      double proposal_width = 0.0);

    void sweep();
    std::span<const double> values() const { return values_; }
    double acceptance_rate() const {
        return attempts_ ? double(accepts_) / double(attempts_) : 0.0;
    }
    void reset_acceptance() { accepts_ = attempts_ = 0; }

private:
    double log_weight_ratio(std::int64_t site, double x_new) const;

    const Lattice& lat_;
    const SiteSpace& site_;
    const ActionVariant& action_;
    Rng rng_;
    double width_;
    std::vector<double> values_;
    std::vector<int> digits_;  // FiniteSpin only
    std::int64_t accepts_ = 0, attempts_ = 0;
};

struct ExactMoments {
    double z = 0.0;
    std::vector<double> means;  // z^-1 <omega, v * obs_j>, coeff excluded
};

// The state eta_(omega,v,n): base product measure x action weight, with an
// exact or Monte Carlo estimator behind every expectation.
class GibbsState {
public:
    GibbsState(const Lattice& lat, const SiteSpace& site, ActionVariant action,
               Estimator estimator = ExactEstimator{});

    const Lattice& lattice() const { return lat_; }
    const SiteSpace& site() const { return site_; }
    const ActionVariant& action() const { return action_; }
    const Estimator& estimator() const { return estimator_; }

    ValueWithError partition_function() const;
    ValueWithError expectation(const LatticeObservable& obs) const;
    ValueWithError expectation(const GenericObservable& obs) const;
    std::complex<double> expectation_c(const LatticeObservable& obs) const;
    ValueWithError correlation(const LatticeObservable& a,
                               const LatticeObservable& b) const;

    // One enumeration pass evaluating z and every observable (exact only).
    ExactMoments exact_moments(std::span<const LatticeObservable> obs) const;
    ExactMoments exact_moments_generic(std::span<const GenericObservable> obs) const;

    const McDiagnostics& diagnostics() const { return diag_; }

private:
    std::int64_t exact_total() const;  // throws capability_error over the cap

    const Lattice& lat_;
    const SiteSpace& site_;
    ActionVariant action_;
    Estimator estimator_;
    mutable McDiagnostics diag_;
};

struct CorrelationFit {
    double K = 0.0;
    double ell = 0.0;
    double rms_residual = 0.0;
    int dropped = 0;           // non-positive correlations filtered out
    bool non_decaying = false;
};

// Least squares on log|c| = log K - distance / ell.
CorrelationFit correlation_length_fit(
    std::span<const std::pair<double, double>> points);

// Straightforward single-loop evaluators kept as the reference for the
// OpenMP kernels; tests pin the parallel results against these.
namespace reference {
double partition_function(const Lattice& lat, const SiteSpace& site,
                          const ActionVariant& action);
double expectation(const Lattice& lat, const SiteSpace& site,
                   const ActionVariant& action, const LatticeObservable& obs);
}  // namespace reference

}  // namespace latrg
