#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spadrad/errors.hpp"

namespace spadrad {

enum class TableKind {
    differential_flux, // cm^-2 s^-1 MeV^-1 (or cm^-2 MeV^-1 when time-integrated)
    integral_flux,     // cm^-2 s^-1, flux above energy E
    niel,              // MeV cm^2 g^-1
    csda_range,        // g cm^-2
    mass_attenuation   // cm^2 g^-1
};

enum class Particle { proton, electron, neutron, gamma };

enum class Interp { log_log, lin_log, lin_lin };

inline std::string to_string(TableKind k) {
    switch (k) {
    case TableKind::differential_flux: return "differential_flux";
    case TableKind::integral_flux: return "integral_flux";
    case TableKind::niel: return "niel";
    case TableKind::csda_range: return "csda_range";
    case TableKind::mass_attenuation: return "mass_attenuation";
    }
    return "?";
}

inline std::string to_string(Particle p) {
    switch (p) {
    case Particle::proton: return "proton";
    case Particle::electron: return "electron";
    case Particle::neutron: return "neutron";
    case Particle::gamma: return "gamma";
    }
    return "?";
}

inline std::string to_string(Interp i) {
    switch (i) {
    case Interp::log_log: return "log_log";
    case Interp::lin_log: return "lin_log";
    case Interp::lin_lin: return "lin_lin";
    }
    return "?";
}

inline TableKind table_kind_from_string(std::string_view s) {
    if (s == "differential_flux") return TableKind::differential_flux;
    if (s == "integral_flux") return TableKind::integral_flux;
    if (s == "niel") return TableKind::niel;
    if (s == "csda_range") return TableKind::csda_range;
    if (s == "mass_attenuation") return TableKind::mass_attenuation;
    throw DataError("unknown table kind '" + std::string(s) + "'");
}

inline Particle particle_from_string(std::string_view s) {
    if (s == "proton") return Particle::proton;
    if (s == "electron") return Particle::electron;
    if (s == "neutron") return Particle::neutron;
    if (s == "gamma") return Particle::gamma;
    throw DataError("unknown particle '" + std::string(s) + "'");
}

inline Interp interp_from_string(std::string_view s) {
    if (s == "log_log") return Interp::log_log;
    if (s == "lin_log") return Interp::lin_log;
    if (s == "lin_lin") return Interp::lin_lin;
    throw DataError("unknown interpolation policy '" + std::string(s) + "'");
}

/// A tabulated function of particle energy: flux spectrum, NIEL curve,
/// CSDA range or photon mass-attenuation data. Energies are MeV, strictly
/// increasing; values are non-negative with units fixed by `kind`.
/// Immutable after construction; all lookups are pure and thread-safe.
struct EnergyTable {
    TableKind kind = TableKind::differential_flux;
    Particle particle = Particle::proton;
    std::vector<double> energies; // MeV, strictly increasing, all > 0
    std::vector<double> values;   // same length, all >= 0
    Interp interp = Interp::log_log;
    std::string source_label;
    /// When set, lookups outside the energy domain return the nearest
    /// endpoint value instead of throwing. Enabled automatically for the
    /// two-point Co-60 gamma NIEL data whose lab calibration covers only
    /// 1.173-1.332 MeV.
    bool clamp_outside = false;

    double min_energy() const { return energies.front(); }
    double max_energy() const { return energies.back(); }
    std::size_t size() const { return energies.size(); }

    bool values_strictly_increasing() const {
        for (std::size_t i = 0; i + 1 < values.size(); ++i)
            if (!(values[i] < values[i + 1])) return false;
        return true;
    }

    /// Throws DataError if any structural invariant is violated.
    void validate() const {
        if (energies.size() != values.size())
            throw DataError("energy/value column length mismatch");
        if (energies.size() < 2)
            throw DataError("table needs at least 2 rows, got " + std::to_string(energies.size()));
        for (std::size_t i = 0; i < energies.size(); ++i) {
            if (!(energies[i] > 0.0) || !std::isfinite(energies[i]))
                throw DataError("non-positive or non-finite energy at point " + std::to_string(i + 1));
            if (i > 0 && !(energies[i] > energies[i - 1]))
                throw DataError("energies not strictly increasing at point " + std::to_string(i + 1));
            if (values[i] < 0.0 || !std::isfinite(values[i]))
                throw DataError("negative or non-finite value at point " + std::to_string(i + 1));
        }
    }

    /// Index of the interpolation segment [energies[i], energies[i+1]]
    /// containing `e`. Precondition: e within the domain.
    std::size_t segment_index(double e) const {
        auto it = std::upper_bound(energies.begin(), energies.end(), e);
        std::size_t i = static_cast<std::size_t>(it - energies.begin());
        if (i == 0) return 0;
        if (i >= energies.size()) return energies.size() - 2;
        return i - 1;
    }

    /// Interpolate within segment i. Segments with a zero endpoint value
    /// fall back to linear interpolation (log of zero is undefined).
    double interpolate_segment(std::size_t i, double e) const {
        const double e1 = energies[i], e2 = energies[i + 1];
        const double v1 = values[i], v2 = values[i + 1];
        if (e == e1) return v1;
        if (e == e2) return v2;
        const bool log_value_ok = v1 > 0.0 && v2 > 0.0;
        switch (interp) {
        case Interp::log_log:
            if (log_value_ok) {
                const double p = std::log(v2 / v1) / std::log(e2 / e1);
                return v1 * std::exp(p * std::log(e / e1));
            }
            break;
        case Interp::lin_log:
            if (log_value_ok) {
                const double q = std::log(v2 / v1) / (e2 - e1);
                return v1 * std::exp(q * (e - e1));
            }
            break;
        case Interp::lin_lin:
            break;
        }
        return v1 + (v2 - v1) * (e - e1) / (e2 - e1);
    }

    /// Value at energy `e` (MeV). Exact at grid points, interpolated per
    /// the table's policy in between. Out-of-domain energies throw a
    /// RangeError carrying the valid domain, unless `clamp_outside` is set.
    double lookup(double e) const {
        if (e < min_energy() || e > max_energy()) {
            if (clamp_outside)
                return e < min_energy() ? values.front() : values.back();
            std::ostringstream os;
            os << "energy " << e << " MeV outside table domain [" << min_energy()
               << ", " << max_energy() << "] MeV (" << to_string(kind) << "/"
               << to_string(particle) << ")";
            throw RangeError(os.str(), min_energy(), max_energy());
        }
        auto it = std::lower_bound(energies.begin(), energies.end(), e);
        if (it != energies.end() && *it == e)
            return values[static_cast<std::size_t>(it - energies.begin())];
        return interpolate_segment(segment_index(e), e);
    }

    /// dValue/dEnergy of the interpolant at `e`, using the segment's
    /// analytic form. At interior knots the right-hand segment is used.
    double derivative(double e) const {
        if (e < min_energy() || e > max_energy()) {
            if (clamp_outside) return 0.0;
            std::ostringstream os;
            os << "energy " << e << " MeV outside table domain [" << min_energy()
               << ", " << max_energy() << "] MeV";
            throw RangeError(os.str(), min_energy(), max_energy());
        }
        const std::size_t i = segment_index(e);
        const double e1 = energies[i], e2 = energies[i + 1];
        const double v1 = values[i], v2 = values[i + 1];
        const bool log_value_ok = v1 > 0.0 && v2 > 0.0;
        switch (interp) {
        case Interp::log_log:
            if (log_value_ok) {
                const double p = std::log(v2 / v1) / std::log(e2 / e1);
                return p * interpolate_segment(i, e) / e;
            }
            break;
        case Interp::lin_log:
            if (log_value_ok) {
                const double q = std::log(v2 / v1) / (e2 - e1);
                return q * interpolate_segment(i, e);
            }
            break;
        case Interp::lin_lin:
            break;
        }
        return (v2 - v1) / (e2 - e1);
    }

    /// Energy at which the interpolant reaches `v`. Requires strictly
    /// increasing values (range tables). Throws RangeError outside the
    /// value span.
    double inverse_lookup(double v) const {
        if (!(v >= values.front() && v <= values.back())) {
            std::ostringstream os;
            os << "value " << v << " outside invertible span [" << values.front()
               << ", " << values.back() << "]";
            throw RangeError(os.str(), values.front(), values.back());
        }
        auto it = std::lower_bound(values.begin(), values.end(), v);
        std::size_t i = static_cast<std::size_t>(it - values.begin());
        if (i < values.size() && values[i] == v) return energies[i];
        --i; // v lies strictly inside (values[i], values[i+1])
        const double e1 = energies[i], e2 = energies[i + 1];
        const double v1 = values[i], v2 = values[i + 1];
        switch (interp) {
        case Interp::log_log: {
            const double p = std::log(v2 / v1) / std::log(e2 / e1);
            return e1 * std::exp(std::log(v / v1) / p);
        }
        case Interp::lin_log: {
            const double q = std::log(v2 / v1) / (e2 - e1);
            return e1 + std::log(v / v1) / q;
        }
        case Interp::lin_lin:
            break;
        }
        return e1 + (v - v1) * (e2 - e1) / (v2 - v1);
    }
};

/// A particle flux (or fluence) spectrum.
struct Spectrum {
    EnergyTable table;          // kind == differential_flux
    double duration_basis_s = 0.0; // averaging window of the flux values
    bool is_fluence = false;    // true when values are time-integrated (cm^-2 MeV^-1)

    Particle particle() const { return table.particle; }

    void validate() const {
        table.validate();
        if (table.kind != TableKind::differential_flux)
            throw DataError("spectrum table must be differential_flux, got " + to_string(table.kind));
        if (!is_fluence && !(duration_basis_s > 0.0))
            throw DataError("flux spectrum needs a positive duration basis");
    }
};

namespace detail {

inline std::string strip(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.push_back(strip(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

inline double parse_number(const std::string& cell, int line_no) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(cell, &pos);
    } catch (const std::exception&) {
        throw DataError("row " + std::to_string(line_no) + ": non-numeric cell '" + cell + "'");
    }
    while (pos < cell.size() && (cell[pos] == ' ' || cell[pos] == '\t')) ++pos;
    if (pos != cell.size())
        throw DataError("row " + std::to_string(line_no) + ": non-numeric cell '" + cell + "'");
    return v;
}

} // namespace detail

/// Parse a table from the CSV schema:
///   #kind=<kind>,particle=<particle>,interp=<policy>,units=<E-unit>/<value-unit>[,label=<text>]
///   energy,value
///   <numeric rows...>
/// Rows are sorted by energy if needed; duplicate energies are rejected
/// with their row number. `expected_kind` must match the declared kind.
inline EnergyTable load_energy_table(std::istream& in, TableKind expected_kind) {
    std::string line;
    int line_no = 0;

    // Header line: first non-empty line, must start with "#kind=".
    std::string header;
    while (std::getline(in, line)) {
        ++line_no;
        std::string s = detail::strip(line);
        if (s.empty()) continue;
        header = s;
        break;
    }
    if (header.empty())
        throw DataError("empty table source (no header line)");
    if (header.rfind("#kind=", 0) != 0)
        throw DataError("row " + std::to_string(line_no) + ": malformed header, expected '#kind=...'");

    EnergyTable t;
    bool saw_kind = false, saw_particle = false, saw_interp = false, saw_units = false;
    for (const std::string& field : detail::split(header.substr(1), ',')) {
        const std::size_t eq = field.find('=');
        if (eq == std::string::npos)
            throw DataError("malformed header field '" + field + "'");
        const std::string key = detail::strip(field.substr(0, eq));
        const std::string val = detail::strip(field.substr(eq + 1));
        if (key == "kind") {
            t.kind = table_kind_from_string(val);
            saw_kind = true;
        } else if (key == "particle") {
            t.particle = particle_from_string(val);
            saw_particle = true;
        } else if (key == "interp") {
            t.interp = interp_from_string(val);
            saw_interp = true;
        } else if (key == "units") {
            const std::size_t slash = val.find('/');
            if (slash == std::string::npos)
                throw DataError("malformed units '" + val + "', expected '<energy-unit>/<value-unit>'");
            if (detail::strip(val.substr(0, slash)) != "MeV")
                throw DataError("energies must be tabulated in MeV, got '" + val.substr(0, slash) + "'");
            saw_units = true;
        } else if (key == "label") {
            t.source_label = val;
        } else {
            throw DataError("unknown header field '" + key + "'");
        }
    }
    if (!saw_kind || !saw_particle || !saw_interp || !saw_units)
        throw DataError("header missing one of kind/particle/interp/units");
    if (t.kind != expected_kind)
        throw DataError("table kind mismatch: file declares " + to_string(t.kind) +
                        ", expected " + to_string(expected_kind));

    // Column header.
    bool saw_columns = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::string s = detail::strip(line);
        if (s.empty() || s[0] == '#') continue;
        if (s != "energy,value")
            throw DataError("row " + std::to_string(line_no) + ": expected column header 'energy,value'");
        saw_columns = true;
        break;
    }
    if (!saw_columns)
        throw DataError("missing 'energy,value' column header");

    std::vector<std::pair<double, double>> rows;
    std::vector<int> row_lines;
    while (std::getline(in, line)) {
        ++line_no;
        std::string s = detail::strip(line);
        if (s.empty() || s[0] == '#') continue;
        const auto cells = detail::split(s, ',');
        if (cells.size() != 2)
            throw DataError("row " + std::to_string(line_no) + ": expected 2 cells, got " +
                            std::to_string(cells.size()));
        const double e = detail::parse_number(cells[0], line_no);
        const double v = detail::parse_number(cells[1], line_no);
        if (!(e > 0.0))
            throw DataError("row " + std::to_string(line_no) + ": non-positive energy " + cells[0]);
        if (v < 0.0)
            throw DataError("row " + std::to_string(line_no) + ": negative value " + cells[1]);
        rows.emplace_back(e, v);
        row_lines.push_back(line_no);
    }
    if (rows.size() < 2)
        throw DataError("table has fewer than 2 rows (" + std::to_string(rows.size()) + ")");

    // Sort by energy, keeping original line numbers for duplicate reports.
    std::vector<std::size_t> order(rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return rows[a].first < rows[b].first; });
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        if (rows[order[i]].first == rows[order[i + 1]].first)
            throw DataError("duplicate energy " + std::to_string(rows[order[i]].first) +
                            " MeV at row " + std::to_string(row_lines[order[i + 1]]));
    }
    t.energies.reserve(rows.size());
    t.values.reserve(rows.size());
    for (std::size_t i : order) {
        t.energies.push_back(rows[i].first);
        t.values.push_back(rows[i].second);
    }

    // Gamma NIEL is calibrated on Co-60 lines only; nearest-endpoint clamping
    // outside the tabulated window is the documented policy for it.
    if (t.kind == TableKind::niel && t.particle == Particle::gamma)
        t.clamp_outside = true;

    t.validate();
    return t;
}

inline void write_energy_table(std::ostream& out, const EnergyTable& t,
                               const std::string& value_unit = "") {
    out << "#kind=" << to_string(t.kind) << ",particle=" << to_string(t.particle)
        << ",interp=" << to_string(t.interp) << ",units=MeV/" << value_unit;
    if (!t.source_label.empty()) out << ",label=" << t.source_label;
    out << "\n";
    out << "energy,value\n";
    out.precision(17);
    for (std::size_t i = 0; i < t.size(); ++i)
        out << t.energies[i] << "," << t.values[i] << "\n";
}

/// Convert an integral flux table (flux above E) to a differential one by
/// finite differences: phi(E) = -dI/dE, central differences in the interior,
/// one-sided at the endpoints, clamped at zero. The caller is responsible
/// for surfacing that this numerical conversion happened.
inline EnergyTable differentiate_integral_flux(const EnergyTable& integral) {
    if (integral.kind != TableKind::integral_flux)
        throw DataError("differentiate_integral_flux needs an integral_flux table");
    integral.validate();
    const auto& e = integral.energies;
    const auto& iv = integral.values;
    const std::size_t n = e.size();
    EnergyTable out = integral;
    out.kind = TableKind::differential_flux;
    out.values.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double slope;
        if (i == 0)
            slope = (iv[1] - iv[0]) / (e[1] - e[0]);
        else if (i == n - 1)
            slope = (iv[n - 1] - iv[n - 2]) / (e[n - 1] - e[n - 2]);
        else
            slope = (iv[i + 1] - iv[i - 1]) / (e[i + 1] - e[i - 1]);
        out.values[i] = std::max(0.0, -slope);
    }
    if (!out.source_label.empty()) out.source_label += "; ";
    out.source_label += "differentiated from integral flux";
    out.validate();
    return out;
}

} // namespace spadrad
