#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "spadrad/energy_table.hpp"
#include "spadrad/errors.hpp"

namespace spadrad {
namespace detail {

// 16-point Gauss-Legendre rule on [-1, 1], nodes in ascending order.
inline constexpr std::array<double, 16> kGaussNodes = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318, -0.7554044083550030,
    -0.6178762444026438, -0.4580167776572274, -0.2816035507792589, -0.0950125098376374,
     0.0950125098376374,  0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
     0.7554044083550030,  0.8656312023878318,  0.9445750230732326,  0.9894009349916499};

inline constexpr std::array<double, 16> kGaussWeights = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928, 0.1246289712555339,
    0.1495959888165767, 0.1691565193950025, 0.1826034150449236, 0.1894506104550685,
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

/// Sequential table evaluator. Amortizes segment search when energies are
/// visited in non-decreasing order, which all quadrature loops guarantee.
class TableCursor {
public:
    explicit TableCursor(const EnergyTable& t) : t_(&t) {}

    double operator()(double e) {
        const auto& es = t_->energies;
        if (e <= es.front()) {
            if (e < es.front()) {
                if (!t_->clamp_outside) return t_->lookup(e); // throws RangeError
                return t_->values.front();
            }
            seg_ = 0;
            return t_->values.front();
        }
        if (e >= es.back()) {
            if (e > es.back()) {
                if (!t_->clamp_outside) return t_->lookup(e);
                return t_->values.back();
            }
            return t_->values.back();
        }
        if (e < es[seg_]) seg_ = 0; // caller went backwards, restart
        while (seg_ + 2 < es.size() && e > es[seg_ + 1]) ++seg_;
        return t_->interpolate_segment(seg_, e);
    }

private:
    const EnergyTable* t_;
    std::size_t seg_ = 0;
};

/// Closed-form integral of one interpolation panel spanning [a, b] with
/// endpoint values va, vb. `policy` must already account for the zero-value
/// linear fallback of the enclosing segment.
inline double panel_integral(Interp policy, double a, double va, double b, double vb) {
    if (b <= a) return 0.0;
    switch (policy) {
    case Interp::log_log: {
        if (va <= 0.0 || vb <= 0.0) break;
        const double lx = std::log(b / a);
        const double p = std::log(vb / va) / lx;
        const double u = (p + 1.0) * lx;
        if (std::abs(u) < 1e-12) return va * a * lx;
        return va * a * std::expm1(u) / (p + 1.0);
    }
    case Interp::lin_log: {
        if (va <= 0.0 || vb <= 0.0) break;
        const double q = std::log(vb / va) / (b - a);
        const double u = q * (b - a);
        if (std::abs(u) < 1e-12) return va * (b - a);
        return va * std::expm1(u) / q;
    }
    case Interp::lin_lin:
        break;
    }
    return 0.5 * (va + vb) * (b - a);
}

/// Closed-form first moment (integral of E*v(E)) of one panel.
inline double panel_first_moment(Interp policy, double a, double va, double b, double vb) {
    if (b <= a) return 0.0;
    switch (policy) {
    case Interp::log_log: {
        if (va <= 0.0 || vb <= 0.0) break;
        const double lx = std::log(b / a);
        const double p = std::log(vb / va) / lx;
        const double u = (p + 2.0) * lx;
        if (std::abs(u) < 1e-12) return va * a * a * lx;
        return va * a * a * std::expm1(u) / (p + 2.0);
    }
    case Interp::lin_log: {
        if (va <= 0.0 || vb <= 0.0) break;
        const double q = std::log(vb / va) / (b - a);
        if (std::abs(q * (b - a)) < 1e-12) return 0.5 * va * (b * b - a * a);
        // integral of E*va*exp(q(E-a))
        const double eb = std::exp(q * (b - a));
        return va * (eb * (b / q - 1.0 / (q * q)) - (a / q - 1.0 / (q * q)));
    }
    case Interp::lin_lin:
        break;
    }
    const double m = (vb - va) / (b - a);
    return 0.5 * va * (b * b - a * a) + m * ((b * b * b - a * a * a) / 3.0 - 0.5 * a * (b * b - a * a));
}

inline Interp effective_panel_policy(const EnergyTable& t, std::size_t seg) {
    if ((t.interp == Interp::log_log || t.interp == Interp::lin_log) &&
        (t.values[seg] <= 0.0 || t.values[seg + 1] <= 0.0))
        return Interp::lin_lin;
    return t.interp;
}

} // namespace detail

/// Integral of the interpolated table over [lo, hi], evaluated segment by
/// segment with the closed-form antiderivative of the interpolation model.
inline double integral(const EnergyTable& t, double lo, double hi) {
    if (!(lo < hi)) {
        if (lo == hi) return 0.0;
        throw DataError("inverted integration range");
    }
    if (lo < t.min_energy() || hi > t.max_energy()) {
        if (!t.clamp_outside)
            throw RangeError("integration range outside table domain", t.min_energy(), t.max_energy());
    }
    double sum = 0.0;
    // Clamped tables extend as constants beyond their knots.
    if (t.clamp_outside && lo < t.min_energy()) {
        sum += t.values.front() * (std::min(hi, t.min_energy()) - lo);
        lo = t.min_energy();
        if (lo >= hi) return sum;
    }
    double tail = 0.0;
    if (t.clamp_outside && hi > t.max_energy()) {
        tail = t.values.back() * (hi - std::max(lo, t.max_energy()));
        hi = t.max_energy();
        if (lo >= hi) return sum + tail;
    }
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        const double a = std::max(lo, t.energies[i]);
        const double b = std::min(hi, t.energies[i + 1]);
        if (b <= a) continue;
        const double va = t.interpolate_segment(i, a);
        const double vb = t.interpolate_segment(i, b);
        sum += detail::panel_integral(detail::effective_panel_policy(t, i), a, va, b, vb);
    }
    return sum + tail;
}

/// Integral of E * v(E) over [lo, hi] (closed form, same panel model).
inline double first_moment(const EnergyTable& t, double lo, double hi) {
    if (!(lo < hi)) {
        if (lo == hi) return 0.0;
        throw DataError("inverted integration range");
    }
    if (lo < t.min_energy() || hi > t.max_energy())
        throw RangeError("integration range outside table domain", t.min_energy(), t.max_energy());
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        const double a = std::max(lo, t.energies[i]);
        const double b = std::min(hi, t.energies[i + 1]);
        if (b <= a) continue;
        const double va = t.interpolate_segment(i, a);
        const double vb = t.interpolate_segment(i, b);
        sum += detail::panel_first_moment(detail::effective_panel_policy(t, i), a, va, b, vb);
    }
    return sum;
}

/// Total particle count per cm^2 (fluence) or per cm^2 s (flux) in the spectrum.
inline double total_fluence(const Spectrum& s) {
    return integral(s.table, s.table.min_energy(), s.table.max_energy());
}

/// Fluence-weighted mean energy, MeV. Zero-fluence spectra report 0.
inline double mean_energy(const Spectrum& s) {
    const double n = total_fluence(s);
    if (n <= 0.0) return 0.0;
    return first_moment(s.table, s.table.min_energy(), s.table.max_energy()) / n;
}

/// Integral of spectrum(E) * curve(E) over `[lo, hi]` intersected with both
/// tables' domains. Composite Gauss quadrature on the union of the two knot
/// grids, each knot interval split into >= 4 geometric subpanels, both
/// factors evaluated with their own interpolation policies. Deterministic.
///
/// A curve with `clamp_outside` set (gamma NIEL) does not restrict the
/// integration domain; its nearest-endpoint value is used beyond its knots.
inline double integrate_product(const Spectrum& spectrum, const EnergyTable& curve,
                                double lo, double hi) {
    if (!(lo < hi))
        throw DataError("inverted integration range [" + std::to_string(lo) + ", " +
                        std::to_string(hi) + "]");
    const EnergyTable& st = spectrum.table;
    double a = std::max(lo, st.min_energy());
    double b = std::min(hi, st.max_energy());
    if (!curve.clamp_outside) {
        a = std::max(a, curve.min_energy());
        b = std::min(b, curve.max_energy());
    }
    if (!(a < b))
        throw DataError("empty domain intersection between spectrum and curve");

    std::vector<double> knots;
    knots.reserve(st.size() + curve.size() + 2);
    knots.push_back(a);
    knots.push_back(b);
    for (double e : st.energies)
        if (e > a && e < b) knots.push_back(e);
    for (double e : curve.energies)
        if (e > a && e < b) knots.push_back(e);
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

    constexpr int kSubpanels = 4;
    detail::TableCursor spec_eval(st);
    detail::TableCursor curve_eval(curve);
    double sum = 0.0;
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
        const double e0 = knots[k], e1 = knots[k + 1];
        const double ratio = std::pow(e1 / e0, 1.0 / kSubpanels);
        double pa = e0;
        for (int s = 0; s < kSubpanels; ++s) {
            const double pb = (s == kSubpanels - 1) ? e1 : pa * ratio;
            const double half = 0.5 * (pb - pa);
            const double mid = 0.5 * (pa + pb);
            double acc = 0.0;
            for (std::size_t g = 0; g < detail::kGaussNodes.size(); ++g) {
                const double e = mid + half * detail::kGaussNodes[g];
                acc += detail::kGaussWeights[g] * spec_eval(e) * curve_eval(e);
            }
            sum += acc * half;
            pa = pb;
        }
    }
    return sum;
}

/// Copy of the table with every value multiplied by `factor` (>= 0).
inline EnergyTable scale_values(EnergyTable t, double factor) {
    if (factor < 0.0) throw DataError("negative scale factor");
    for (double& v : t.values) v *= factor;
    return t;
}

} // namespace spadrad
