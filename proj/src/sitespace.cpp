#include "latrg/sitespace.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "latrg/quadrature.hpp"

namespace latrg {

SiteSpace SiteSpace::finite_spin(std::vector<double> values,
                                 std::vector<double> weights) {
    if (values.empty() || values.size() != weights.size())
        throw std::invalid_argument("finite spin needs matching nonempty values/weights");
    if (std::set<double>(values.begin(), values.end()).size() != values.size())
        throw std::invalid_argument("finite spin labels must be distinct");
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("base weights must be non-negative");
        sum += w;
    }
    if (sum <= 0.0) throw std::invalid_argument("base weights are not normalizable");
    for (double& w : weights) w /= sum;

    SiteSpace s;
    s.kind_ = SiteKind::FiniteSpin;
    s.values_ = std::move(values);
    s.weights_ = std::move(weights);
    return s;
}

SiteSpace SiteSpace::finite_spin_uniform(std::vector<double> values) {
    std::vector<double> w(values.size(), 1.0);
    return finite_spin(std::move(values), std::move(w));
}

SiteSpace SiteSpace::real_line(int order, double mc_width) {
    QuadratureRule gh = gauss_hermite(order);
    SiteSpace s;
    s.kind_ = SiteKind::RealLine;
    s.values_.resize(order);
    s.weights_.resize(order);
    const double norm = 1.0 / std::sqrt(M_PI);
    for (int i = 0; i < order; ++i) {
        s.values_[i] = std::sqrt(2.0) * gh.nodes[i];  // x = sqrt(2) t
        s.weights_[i] = norm * gh.weights[i];
    }
    s.mc_width_ = mc_width;
    return s;
}

SiteSpace SiteSpace::unit_interval(int order, double mc_width) {
    QuadratureRule gl = gauss_legendre(order);
    SiteSpace s;
    s.kind_ = SiteKind::UnitInterval;
    s.values_.resize(order);
    s.weights_.resize(order);
    for (int i = 0; i < order; ++i) {
        s.values_[i] = 0.5 * (gl.nodes[i] + 1.0);
        s.weights_[i] = 0.5 * gl.weights[i];
    }
    s.mc_width_ = mc_width;
    return s;
}

double SiteSpace::base_density(double x) const {
    switch (kind_) {
        case SiteKind::RealLine:
            return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
        case SiteKind::UnitInterval:
            return (x >= 0.0 && x <= 1.0) ? 1.0 : 0.0;
        case SiteKind::FiniteSpin:
        default: {
            for (std::size_t i = 0; i < values_.size(); ++i)
                if (values_[i] == x) return weights_[i];
            return 0.0;
        }
    }
}

std::string SiteSpace::describe() const {
    switch (kind_) {
        case SiteKind::FiniteSpin:
            return "finite_spin[" + std::to_string(values_.size()) + "]";
        case SiteKind::RealLine:
            return "real_line[" + std::to_string(values_.size()) + "]";
        case SiteKind::UnitInterval:
        default:
            return "unit_interval[" + std::to_string(values_.size()) + "]";
    }
}

SiteObservable::SiteObservable(const SiteSpace& space,
                               std::function<double(double)> fn,
                               bool is_projection)
    : fn_(std::move(fn)), is_projection_(is_projection) {
    node_values_.resize(space.node_count());
    for (int i = 0; i < space.node_count(); ++i) {
        node_values_[i] = fn_(space.values()[i]);
        if (!std::isfinite(node_values_[i]))
            throw std::invalid_argument("site observable is not finite on a node");
        if (is_projection_ && node_values_[i] != 0.0 && node_values_[i] != 1.0)
            throw std::invalid_argument("projection observable must be 0/1-valued");
    }
}

SiteObservable SiteObservable::from_table(const SiteSpace& space,
                                          std::vector<double> node_values,
                                          bool is_projection) {
    if (static_cast<int>(node_values.size()) != space.node_count())
        throw std::invalid_argument("table size must match node count");
    auto values = space.values();
    auto table = node_values;
    return SiteObservable(
        space,
        [values, table](double x) {
            for (std::size_t i = 0; i < values.size(); ++i)
                if (values[i] == x) return table[i];
            throw std::invalid_argument("tabulated observable evaluated off-grid");
        },
        is_projection);
}

SiteObservable SiteObservable::one(const SiteSpace& space) {
    return SiteObservable(space, [](double) { return 1.0; });
}

double SiteObservable::sup_norm() const {
    double m = 0.0;
    for (double v : node_values_) m = std::max(m, std::abs(v));
    return m;
}

SiteObservable SiteObservable::pointwise_product(const SiteObservable& other) const {
    SiteObservable r;
    auto f = fn_, g = other.fn_;
    r.fn_ = [f, g](double x) { return (f ? f(x) : 1.0) * (g ? g(x) : 1.0); };
    r.node_values_.resize(node_values_.size());
    for (std::size_t i = 0; i < node_values_.size(); ++i)
        r.node_values_[i] = node_values_[i] * other.node_values_[i];
    r.is_projection_ = false;
    return r;
}

double site_expectation(const SiteSpace& space, const SiteObservable& a) {
    double s = 0.0;
    for (int i = 0; i < space.node_count(); ++i) {
        const double v = a.node_value(i);
        if (!std::isfinite(v))
            throw std::invalid_argument("observable not finite on integration node");
        s += space.weights()[i] * v;
    }
    return s;
}

PairWeight PairWeight::from_function(const SiteSpace& space,
                                     std::function<double(double, double)> fn) {
    PairWeight w;
    w.fn_ = std::move(fn);
    w.m_ = space.node_count();
    w.table_.resize(static_cast<std::size_t>(w.m_) * w.m_);
    for (int i = 0; i < w.m_; ++i)
        for (int j = 0; j < w.m_; ++j)
            w.table_[i * w.m_ + j] = w.fn_(space.values()[i], space.values()[j]);
    return w;
}

PairWeight PairWeight::from_matrix(const SiteSpace& space,
                                   std::vector<std::vector<double>> table) {
    const int m = space.node_count();
    if (static_cast<int>(table.size()) != m)
        throw std::invalid_argument("pair weight matrix size must match node count");
    for (const auto& row : table)
        if (static_cast<int>(row.size()) != m)
            throw std::invalid_argument("pair weight matrix must be square");
    auto values = space.values();
    return from_function(space, [values, table](double x, double y) {
        int i = -1, j = -1;
        for (std::size_t k = 0; k < values.size(); ++k) {
            if (values[k] == x) i = static_cast<int>(k);
            if (values[k] == y) j = static_cast<int>(k);
        }
        if (i < 0 || j < 0)
            throw std::invalid_argument("tabulated pair weight evaluated off-grid");
        return table[i][j];
    });
}

PairWeight PairWeight::rank_one(const SiteSpace& space, const SiteObservable& h) {
    return from_function(space,
                         [h](double x, double y) { return h.eval(x) * h.eval(y); });
}

PairWeight PairWeight::ising(const SiteSpace& space, double coupling) {
    return from_function(space, [coupling](double x, double y) {
        return std::exp(coupling * x * y);
    });
}

PairWeight PairWeight::constant(const SiteSpace& space, double value) {
    return from_function(space, [value](double, double) { return value; });
}

double PairWeight::max_node_value() const {
    double m = 0.0;
    for (double v : table_) m = std::max(m, v);
    return m;
}

bool PairWeight::nonnegative_on_nodes() const {
    return std::all_of(table_.begin(), table_.end(), [](double v) { return v >= 0.0; });
}

bool PairWeight::symmetric_on_nodes(double tol) const {
    for (int i = 0; i < m_; ++i)
        for (int j = i + 1; j < m_; ++j)
            if (std::abs(table_[i * m_ + j] - table_[j * m_ + i]) > tol) return false;
    return true;
}

double site_pair_expectation(const SiteSpace& space, const PairWeight& w,
                             const SiteObservable& a, const SiteObservable& b) {
    if (!w.nonnegative_on_nodes())
        throw std::invalid_argument("pair weight positivity violation");
    double s = 0.0;
    for (int i = 0; i < space.node_count(); ++i) {
        double inner = 0.0;
        for (int j = 0; j < space.node_count(); ++j)
            inner += space.weights()[j] * w.node_value(i, j) * b.node_value(j);
        s += space.weights()[i] * a.node_value(i) * inner;
    }
    return s;
}

}  // namespace latrg
