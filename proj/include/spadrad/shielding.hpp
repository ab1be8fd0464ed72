#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "spadrad/constants.hpp"
#include "spadrad/energy_table.hpp"
#include "spadrad/errors.hpp"
#include "spadrad/quadrature.hpp"

namespace spadrad {

/// Spherical aluminum shell around the detector plus the material data
/// needed to transport particles through it.
struct ShieldSpec {
    double thickness_mm = 0.0;
    double density_g_cm3 = kAluminumDensity;
    EnergyTable proton_range;   // csda_range, g cm^-2, strictly increasing
    EnergyTable electron_range; // csda_range, g cm^-2, strictly increasing
    EnergyTable photon_mu;      // mass_attenuation, cm^2 g^-1
    int atomic_number = kAluminumZ;
    /// Electrons scatter; their effective path through the shell exceeds the
    /// geometric thickness by this factor.
    double electron_detour_factor = 1.3;
    /// Soft cutoff of the emitted bremsstrahlung spectrum, MeV.
    double brems_k_min_mev = 0.01;

    /// Geometric areal density, g cm^-2.
    double areal_density() const { return thickness_mm / 10.0 * density_g_cm3; }

    void validate() const {
        if (thickness_mm < 0.0) throw DataError("negative shield thickness");
        if (!(density_g_cm3 > 0.0)) throw DataError("non-positive shield density");
        if (!(electron_detour_factor >= 1.0)) throw DataError("electron detour factor must be >= 1");
        if (!(brems_k_min_mev > 0.0)) throw DataError("bremsstrahlung k_min must be > 0");
        if (proton_range.kind != TableKind::csda_range || proton_range.particle != Particle::proton)
            throw DataError("proton range table must be csda_range/proton");
        if (electron_range.kind != TableKind::csda_range || electron_range.particle != Particle::electron)
            throw DataError("electron range table must be csda_range/electron");
        if (photon_mu.kind != TableKind::mass_attenuation || photon_mu.particle != Particle::gamma)
            throw DataError("photon attenuation table must be mass_attenuation/gamma");
        proton_range.validate();
        electron_range.validate();
        photon_mu.validate();
        if (!proton_range.values_strictly_increasing())
            throw DataError("proton range table values must increase with energy");
        if (!electron_range.values_strictly_increasing())
            throw DataError("electron range table values must increase with energy");
    }
};

struct TransmissionResult {
    Spectrum transmitted;
    /// Bremsstrahlung photons; populated only by electron transmission.
    std::optional<Spectrum> secondary_photons;
    /// Fraction of incident particle energy left in the shield (not carried
    /// out by the transmitted particles or radiated photons).
    double energy_deposited_fraction = 0.0;
};

namespace detail {

inline Spectrum make_zero_spectrum(const Spectrum& like, double e_lo, double e_hi) {
    Spectrum z = like;
    z.table.energies = {e_lo, e_hi};
    z.table.values = {0.0, 0.0};
    z.table.interp = Interp::lin_lin;
    return z;
}

/// Continuous-slowing-down mapping through an areal density t_eff using a
/// CSDA range table R(E): a particle entering at E leaves with residual
/// range R(E) - t_eff, i.e. exit energy R^-1(R(E) - t_eff).
class CsdaMap {
public:
    CsdaMap(const EnergyTable& range, double t_eff)
        : range_(&range), t_eff_(t_eff) {}

    /// Lowest incident energy that exits with at least the range table's
    /// floor energy. Particles below this are counted as absorbed.
    double cutoff_energy() const {
        const double r_needed = t_eff_ + range_->values.front();
        if (r_needed >= range_->values.back()) return range_->max_energy();
        return range_->inverse_lookup(r_needed);
    }

    double exit_energy(double e_in) const {
        double r = range_->lookup(e_in) - t_eff_;
        r = std::clamp(r, range_->values.front(), range_->values.back());
        return range_->inverse_lookup(r);
    }

    double entry_energy(double e_out) const {
        double r = range_->lookup(e_out) + t_eff_;
        r = std::clamp(r, range_->values.front(), range_->values.back());
        return range_->inverse_lookup(r);
    }

    /// dE_in/dE_out along the mapping: R'(E_out)/R'(E_in).
    double jacobian(double e_in, double e_out) const {
        const double d_in = range_->derivative(e_in);
        const double d_out = range_->derivative(e_out);
        if (!(d_in > 0.0)) return 0.0;
        return d_out / d_in;
    }

private:
    const EnergyTable* range_;
    double t_eff_;
};

/// Push an incident spectrum through a CSDA mapping. The transmitted
/// differential spectrum phi'(E') = phi(E) dE/dE' is sampled on a
/// reconstructed log grid (mapped knots of both tables plus dense fill),
/// then renormalized so the surviving particle count matches the incident
/// count above the cutoff exactly.
inline Spectrum csda_push_forward(const Spectrum& incident, const EnergyTable& range,
                                  double t_eff) {
    const EnergyTable& in = incident.table;
    if (in.min_energy() < range.min_energy() || in.max_energy() > range.max_energy())
        throw DataError("spectrum domain [" + std::to_string(in.min_energy()) + ", " +
                        std::to_string(in.max_energy()) +
                        "] MeV not covered by the range table");
    if (t_eff <= 0.0) return incident;

    const CsdaMap map(range, t_eff);
    const double e_cut = map.cutoff_energy();
    const double e_surv_lo = std::max(e_cut, in.min_energy());
    const double e_surv_hi = in.max_energy();
    if (!(e_surv_lo < e_surv_hi))
        return make_zero_spectrum(incident, in.min_energy(), in.max_energy());

    const double surviving_count = integral(in, e_surv_lo, e_surv_hi);
    if (!(surviving_count > 0.0))
        return make_zero_spectrum(incident, in.min_energy(), in.max_energy());

    const double out_lo = map.exit_energy(e_surv_lo);
    const double out_hi = map.exit_energy(e_surv_hi);
    if (!(out_lo < out_hi) || out_hi / out_lo < 1.0 + 1e-12)
        return make_zero_spectrum(incident, in.min_energy(), in.max_energy());

    // Reconstruction knots: the interpolant of phi' has kinks wherever the
    // incident energy or the exit energy crosses a knot of either table.
    std::vector<double> grid;
    constexpr std::size_t kFillPoints = 1024;
    grid.reserve(kFillPoints + in.size() + 2 * range.size());
    const double lr = std::log(out_hi / out_lo);
    for (std::size_t i = 0; i < kFillPoints; ++i)
        grid.push_back(out_lo * std::exp(lr * static_cast<double>(i) /
                                         static_cast<double>(kFillPoints - 1)));
    for (double e : in.energies)
        if (e > e_surv_lo && e < e_surv_hi) grid.push_back(map.exit_energy(e));
    for (double e : range.energies) {
        if (e > e_surv_lo && e < e_surv_hi) grid.push_back(map.exit_energy(e));
        if (e > out_lo && e < out_hi) grid.push_back(e);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    while (!grid.empty() && grid.front() < out_lo) grid.erase(grid.begin());
    while (!grid.empty() && grid.back() > out_hi) grid.pop_back();

    Spectrum out = incident;
    out.table.energies = grid;
    out.table.values.assign(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double e_out = grid[i];
        const double e_in = std::clamp(map.entry_energy(e_out), in.min_energy(), in.max_energy());
        out.table.values[i] = in.lookup(e_in) * map.jacobian(e_in, e_out);
    }

    // Enforce exact particle-count conservation of the survivors; the raw
    // sampled table carries only interpolation-level error.
    const double raw_count = integral(out.table, out_lo, out_hi);
    if (!(raw_count > 0.0))
        return make_zero_spectrum(incident, in.min_energy(), in.max_energy());
    const double norm = surviving_count / raw_count;
    for (double& v : out.table.values) v *= norm;
    return out;
}

} // namespace detail

/// Slow protons down through the shield. Protons whose CSDA range is below
/// the shield areal density are absorbed; survivors exit with the energy
/// whose range equals their residual range.
inline TransmissionResult degrade_proton_spectrum(const Spectrum& incident,
                                                  const ShieldSpec& shield) {
    incident.validate();
    shield.validate();
    if (incident.particle() != Particle::proton)
        throw DataError("degrade_proton_spectrum needs a proton spectrum");
    TransmissionResult r;
    r.transmitted = detail::csda_push_forward(incident, shield.proton_range, shield.areal_density());
    const double e_in = first_moment(incident.table, incident.table.min_energy(),
                                     incident.table.max_energy());
    const double e_out = first_moment(r.transmitted.table, r.transmitted.table.min_energy(),
                                      r.transmitted.table.max_energy());
    r.energy_deposited_fraction = e_in > 0.0 ? std::max(0.0, (e_in - e_out) / e_in) : 0.0;
    return r;
}

/// Transmit electrons through the shield (CSDA with a detour factor on the
/// path length) and emit the bremsstrahlung generated by the energy they
/// leave behind. Each electron radiates the fraction y(E) = Z E/(Z E + 800)
/// of its deposited energy as photons with a 1/k spectrum on
/// [k_min, E], normalized so the photon energy equals the radiated energy.
inline TransmissionResult transmit_electron_spectrum(const Spectrum& incident,
                                                     const ShieldSpec& shield) {
    incident.validate();
    shield.validate();
    if (incident.particle() != Particle::electron)
        throw DataError("transmit_electron_spectrum needs an electron spectrum");
    const EnergyTable& in = incident.table;
    const double t_eff = shield.areal_density() * shield.electron_detour_factor;

    TransmissionResult r;
    r.transmitted = detail::csda_push_forward(incident, shield.electron_range, t_eff);

    const double k_min = shield.brems_k_min_mev;
    const double z = static_cast<double>(shield.atomic_number);
    const detail::CsdaMap map(shield.electron_range, t_eff);
    const double e_cut = t_eff > 0.0 ? map.cutoff_energy() : in.min_energy();

    // Energy an electron of incident energy E leaves in the shield.
    auto deposited = [&](double e) {
        if (t_eff <= 0.0) return 0.0;
        if (e <= e_cut) return e;
        return e - map.exit_energy(e);
    };
    auto radiated_density = [&](detail::TableCursor& flux, double e) {
        const double y = z * e / (z * e + 800.0);
        return flux(e) * y * deposited(e);
    };

    // Composite Gauss quadrature of f over [lo, hi] split at the incident knots.
    auto integrate_incident = [&](auto&& f, double lo, double hi) {
        detail::TableCursor flux(in);
        std::vector<double> knots{lo, hi};
        for (double e : in.energies)
            if (e > lo && e < hi) knots.push_back(e);
        std::sort(knots.begin(), knots.end());
        double sum = 0.0;
        for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
            const double a = knots[i], b = knots[i + 1];
            const double ratio = std::pow(b / a, 0.25);
            double pa = a;
            for (int s = 0; s < 4; ++s) {
                const double pb = (s == 3) ? b : pa * ratio;
                const double half = 0.5 * (pb - pa), mid = 0.5 * (pa + pb);
                double acc = 0.0;
                for (std::size_t g = 0; g < detail::kGaussNodes.size(); ++g)
                    acc += detail::kGaussWeights[g] * f(flux, mid + half * detail::kGaussNodes[g]);
                sum += acc * half;
                pa = pb;
            }
        }
        return sum;
    };

    double radiated_energy = 0.0;
    if (t_eff > 0.0 && in.max_energy() > k_min)
        radiated_energy = integrate_incident(radiated_density,
                                             std::max(in.min_energy(), k_min), in.max_energy());

    Spectrum photons = incident;
    photons.table.particle = Particle::gamma;
    photons.table.source_label = "bremsstrahlung";
    if (radiated_energy <= 0.0) {
        photons.table.energies = {k_min, std::max(in.max_energy(), k_min * 2.0)};
        photons.table.values = {0.0, 0.0};
        photons.table.interp = Interp::lin_lin;
    } else {
        // phi_gamma(k) = (1/k) * integral over E > k of phi_e(E) y(E) E_dep(E) / (E - k_min).
        const double k_max = in.max_energy();
        constexpr std::size_t kPhotonPoints = 192;
        photons.table.energies.clear();
        photons.table.values.clear();
        const double lk = std::log(k_max / k_min);
        for (std::size_t i = 0; i < kPhotonPoints; ++i) {
            const double k = k_min * std::exp(lk * static_cast<double>(i) /
                                              static_cast<double>(kPhotonPoints - 1));
            double j = 0.0;
            const double e_lo = std::max({k, in.min_energy(), k_min * (1.0 + 1e-12)});
            if (e_lo < in.max_energy()) {
                j = integrate_incident(
                    [&](detail::TableCursor& flux, double e) {
                        return radiated_density(flux, e) / (e - k_min);
                    },
                    e_lo, in.max_energy());
            }
            photons.table.energies.push_back(k);
            photons.table.values.push_back(std::max(0.0, j / k));
        }
    }
    photons.table.validate();
    r.secondary_photons = photons;

    const double e_in_total = first_moment(in, in.min_energy(), in.max_energy());
    const double e_out_total = first_moment(r.transmitted.table, r.transmitted.table.min_energy(),
                                            r.transmitted.table.max_energy());
    r.energy_deposited_fraction =
        e_in_total > 0.0
            ? std::max(0.0, (e_in_total - e_out_total - radiated_energy) / e_in_total)
            : 0.0;
    return r;
}

/// Exponential attenuation of a photon spectrum: each grid value is scaled
/// by exp(-mu/rho(E) * areal density). No buildup factor; energies unchanged,
/// so attenuation through t1 then t2 composes exactly to t1 + t2.
inline TransmissionResult attenuate_photon_spectrum(const Spectrum& incident,
                                                    const ShieldSpec& shield) {
    incident.validate();
    shield.validate();
    if (incident.particle() != Particle::gamma)
        throw DataError("attenuate_photon_spectrum needs a gamma spectrum");
    const EnergyTable& in = incident.table;
    if (in.min_energy() < shield.photon_mu.min_energy() ||
        in.max_energy() > shield.photon_mu.max_energy())
        throw DataError("photon spectrum domain not covered by the attenuation table");

    const double t_a = shield.areal_density();
    TransmissionResult r;
    r.transmitted = incident;
    for (std::size_t i = 0; i < in.size(); ++i) {
        const double mu = shield.photon_mu.lookup(in.energies[i]);
        r.transmitted.table.values[i] = in.values[i] * std::exp(-mu * t_a);
    }
    const double e_in = first_moment(in, in.min_energy(), in.max_energy());
    const double e_out = first_moment(r.transmitted.table, in.min_energy(), in.max_energy());
    r.energy_deposited_fraction = e_in > 0.0 ? std::max(0.0, (e_in - e_out) / e_in) : 0.0;
    return r;
}

} // namespace spadrad
