#pragma once

#include <string>
#include <utility>
#include <vector>

namespace lnspdc {

class ConfigFile;

// n²(λ) = constant + Σ B_i λ²/(λ² − C_i), λ in µm, C_i in µm².
struct SellmeierModel {
    std::string name;
    double constant = 1.0;
    std::vector<std::pair<double, double>> terms; // (B_i, C_i)
    double lambda_min_um = 0.0;
    double lambda_max_um = 0.0;
    double temperature_deg_c = 23.0;

    // Pure closed-form evaluation; throws RangeError outside the valid range.
    double index(double lambda_um) const;
    bool in_range(double lambda_um) const {
        return lambda_um >= lambda_min_um && lambda_um <= lambda_max_um;
    }
};

class MaterialCatalog {
public:
    // Table compiled in from core/data/materials.cfg.
    static MaterialCatalog builtin();
    static MaterialCatalog from_file(const std::string& path);
    static MaterialCatalog from_config(const ConfigFile& cfg);

    bool has(const std::string& name) const;
    const SellmeierModel& at(const std::string& name) const;
    std::vector<std::string> names() const; // sorted

private:
    std::vector<SellmeierModel> models_;
};

// Raw text of the built-in table (exposed so tools can show provenance).
const char* builtin_materials_text();

} // namespace lnspdc
