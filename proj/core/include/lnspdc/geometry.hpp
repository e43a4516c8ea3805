#pragma once

#include "lnspdc/errors.hpp"

#include <string>

namespace lnspdc {

class ConfigFile;

// Trapezoidal ridge on a layered stack (x-cut LNOI):
//
//        air
//       ______
//      /      \            <- ridge, top width w, sidewall angle theta
//  ___/        \___        <- etch floor at h2 - h1
//  LN slab (h2 - h1)
//  ------------------      <- film/oxide interface (y = 0)
//  buried SiO2 oxide
//
// TE (in-plane E, along the crystal z axis) sees the extraordinary index;
// TM (vertical E, along crystal x) sees the ordinary index. Reference
// design: w = 1800 nm, theta = 60 deg, h1 = 165 nm, h2 = 600 nm.
struct WaveguideGeometry {
    double top_width_nm = 1800.0;
    double etch_depth_nm = 165.0;       // h1
    double film_thickness_nm = 600.0;   // h2
    double sidewall_angle_deg = 60.0;   // from horizontal
    double oxide_thickness_nm = 2000.0;

    std::string core_te_material = "LN_extraordinary";
    std::string core_tm_material = "LN_ordinary";
    std::string oxide_material = "SiO2";
    std::string cladding_material = "air";

    double slab_thickness_nm() const { return film_thickness_nm - etch_depth_nm; }

    void validate() const {
        if (top_width_nm <= 0.0) throw ConfigError("geometry: top_width must be > 0");
        if (etch_depth_nm <= 0.0 || etch_depth_nm > film_thickness_nm)
            throw ConfigError("geometry: require 0 < etch_depth <= film_thickness");
        if (sidewall_angle_deg <= 0.0 || sidewall_angle_deg > 90.0)
            throw ConfigError("geometry: require 0 < sidewall_angle <= 90 deg");
        if (film_thickness_nm <= 0.0) throw ConfigError("geometry: film_thickness must be > 0");
        if (oxide_thickness_nm <= 0.0) throw ConfigError("geometry: oxide_thickness must be > 0");
    }

    static WaveguideGeometry from_config(const ConfigFile& cfg, const std::string& section = "geometry");
};

// Reference-device cross-section (the defaults above).
inline WaveguideGeometry reference_geometry() { return WaveguideGeometry{}; }

} // namespace lnspdc
