// io.hpp — CSV emission with stable column order, JSON sidecars, and
// parameter-hashed file naming

#pragma once

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "synladder/dynamics.hpp"
#include "synladder/sweeps.hpp"

namespace synladder::io {

using nlohmann::json;

inline std::string param_hash(const json& j) {
    Fnv1a f;
    f.feed(j.dump());
    return hex16(f.h).substr(8);  // 8 hex chars are plenty for file naming
}

inline void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ResourceError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << "\n";
}

// One header row; fixed column order: tau, t, norm, energy, then the channels
// in their stored order.
inline void write_csv(const std::filesystem::path& path, const dynamics::TimeSeries& series) {
    std::ofstream out(path);
    if (!out) throw ResourceError("cannot open " + path.string() + " for writing");
    out.precision(17);
    out << "tau,t";
    const bool have_norm = series.norms.size() == static_cast<Eigen::Index>(series.tau.size());
    const bool have_energy = series.energies.size() == static_cast<Eigen::Index>(series.tau.size());
    if (have_norm) out << ",norm";
    if (have_energy) out << ",energy";
    for (const auto& c : series.channels) out << "," << c;
    out << "\n";
    for (std::size_t k = 0; k < series.tau.size(); ++k) {
        out << series.tau[k] << "," << series.t[k];
        if (have_norm) out << "," << series.norms[static_cast<Eigen::Index>(k)];
        if (have_energy) out << "," << series.energies[static_cast<Eigen::Index>(k)];
        for (Eigen::Index c = 0; c < series.values.cols(); ++c)
            out << "," << series.values(static_cast<Eigen::Index>(k), c);
        out << "\n";
    }
}

// Long format: one row per cell in row-major grid order, masked cells carry
// their status tag instead of a number.
inline void write_csv(const std::filesystem::path& path, const dynamics::SweepResult& sweep) {
    std::ofstream out(path);
    if (!out) throw ResourceError("cannot open " + path.string() + " for writing");
    out.precision(17);
    out << sweep.ax1_name << "," << sweep.ax2_name << ",value,status\n";
    for (Eigen::Index i = 0; i < sweep.ax1.size(); ++i)
        for (Eigen::Index j = 0; j < sweep.ax2.size(); ++j) {
            out << sweep.ax1[i] << "," << sweep.ax2[j] << ",";
            if (sweep.status(i, j) == dynamics::kOk) {
                out << sweep.value(i, j) << ",ok\n";
            } else {
                out << "," << (sweep.status(i, j) == dynamics::kMaskedResonance ? "masked_resonance"
                                                                                : "masked_undefined")
                    << "\n";
            }
        }
}

inline json sweep_meta(const dynamics::SweepResult& sweep) {
    json j;
    j["ax1"] = sweep.ax1_name;
    j["ax2"] = sweep.ax2_name;
    j["masked_cells"] = sweep.messages;
    return j;
}

inline json conservation_meta(const dynamics::ConservationStats& c) {
    return json{{"max_norm_drift", c.max_norm_drift},
                {"max_number_drift", c.max_number_drift},
                {"max_energy_drift", c.max_energy_drift},
                {"max_leg_drift", c.max_leg_drift}};
}

}  // namespace synladder::io
