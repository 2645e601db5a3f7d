#pragma once

#include <functional>
#include <string>
#include <vector>

namespace latrg {

enum class SiteKind { FiniteSpin, RealLine, UnitInterval };

// Single-site state space with base state omega0 and an exact-integration
// backend. All backends reduce to a list of (value, weight) nodes whose
// weights sum to 1; FiniteSpin is exact, the continuous backends are Gauss
// rules for their base densities (standard gaussian on R, uniform on [0,1]).
class SiteSpace {
public:
    static SiteSpace finite_spin(std::vector<double> values,
                                 std::vector<double> weights);
    static SiteSpace finite_spin_uniform(std::vector<double> values);
    // order-point Gauss-Hermite rule for the standard gaussian base density
    static SiteSpace real_line(int order = 32, double mc_width = 0.5);
    // order-point Gauss-Legendre rule for the uniform base measure on [0,1]
    static SiteSpace unit_interval(int order = 16, double mc_width = 0.1);

    SiteKind kind() const { return kind_; }
    int node_count() const { return static_cast<int>(values_.size()); }
    const std::vector<double>& values() const { return values_; }
    const std::vector<double>& weights() const { return weights_; }
    double mc_width() const { return mc_width_; }

    // Base density relative to the proposal reference; used by Metropolis.
    // FiniteSpin: weight of the label. RealLine: standard gaussian density.
    // UnitInterval: 1 on [0,1].
    double base_density(double x) const;
    double base_density_by_node(int node) const { return weights_[node]; }

    std::string describe() const;

private:
    SiteKind kind_ = SiteKind::FiniteSpin;
    std::vector<double> values_;
    std::vector<double> weights_;
    double mc_width_ = 0.1;
};

// A real-valued function of the site value: tabulated on the space's nodes,
// with the defining callable kept for evaluation off the grid (MC paths).
class SiteObservable {
public:
    SiteObservable() = default;
    SiteObservable(const SiteSpace& space, std::function<double(double)> fn,
                   bool is_projection = false);
    // FiniteSpin: values given per label, in label order.
    static SiteObservable from_table(const SiteSpace& space,
                                     std::vector<double> node_values,
                                     bool is_projection = false);
    static SiteObservable one(const SiteSpace& space);

    double eval(double x) const { return fn_ ? fn_(x) : 1.0; }
    double node_value(int i) const { return node_values_[i]; }
    const std::vector<double>& node_values() const { return node_values_; }
    bool is_projection() const { return is_projection_; }
    double sup_norm() const;

    // Pointwise product (same space assumed).
    SiteObservable pointwise_product(const SiteObservable& other) const;

private:
    std::function<double(double)> fn_;
    std::vector<double> node_values_;
    bool is_projection_ = false;
};

// <Omega, a Omega>: the exact weighted node sum.
double site_expectation(const SiteSpace& space, const SiteObservable& a);

// Symmetric non-negative coupling on value x value, tabulated on the node
// grid. Rank-one and quadrature-integral builders cover the model families.
class PairWeight {
public:
    PairWeight() = default;
    static PairWeight from_function(const SiteSpace& space,
                                    std::function<double(double, double)> fn);
    static PairWeight from_matrix(const SiteSpace& space,
                                  std::vector<std::vector<double>> table);
    static PairWeight rank_one(const SiteSpace& space, const SiteObservable& h);
    static PairWeight ising(const SiteSpace& space, double coupling);
    static PairWeight constant(const SiteSpace& space, double value = 1.0);

    double eval(double x, double y) const { return fn_(x, y); }
    double node_value(int i, int j) const { return table_[i * m_ + j]; }
    int node_count() const { return m_; }
    double max_node_value() const;
    bool nonnegative_on_nodes() const;
    bool symmetric_on_nodes(double tol = 1e-12) const;

private:
    std::function<double(double, double)> fn_;
    std::vector<double> table_;
    int m_ = 0;
};

// <Omega x Omega, w (a x b) Omega x Omega>: exact double node sum. Throws on
// negative coupling values (positivity violation).
double site_pair_expectation(const SiteSpace& space, const PairWeight& w,
                             const SiteObservable& a, const SiteObservable& b);

}  // namespace latrg
