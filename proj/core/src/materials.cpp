#include "lnspdc/materials.hpp"

#include "lnspdc/config.hpp"
#include "lnspdc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lnspdc {

double SellmeierModel::index(double lambda_um) const {
    if (!in_range(lambda_um)) {
        std::ostringstream msg;
        msg << "wavelength " << lambda_um << " um outside valid range [" << lambda_min_um
            << ", " << lambda_max_um << "] um of material '" << name << "'";
        throw RangeError(msg.str());
    }
    const double l2 = lambda_um * lambda_um;
    double n2 = constant;
    for (const auto& [b, c] : terms) n2 += b * l2 / (l2 - c);
    if (n2 <= 0.0)
        throw NumericError("Sellmeier evaluation of '" + name + "' gave non-positive n^2");
    return std::sqrt(n2);
}

MaterialCatalog MaterialCatalog::builtin() {
    return from_config(ConfigFile::parse_text(builtin_materials_text(), "<builtin materials>"));
}

MaterialCatalog MaterialCatalog::from_file(const std::string& path) {
    return from_config(ConfigFile::parse_file(path));
}

MaterialCatalog MaterialCatalog::from_config(const ConfigFile& cfg) {
    MaterialCatalog cat;
    for (const auto& section : cfg.sections()) {
        SellmeierModel m;
        m.name = section;
        m.constant = cfg.get_double(section, "constant", 1.0);
        const auto flat = cfg.get_list(section, "terms");
        if (flat.size() % 2 != 0)
            throw ConfigError("material '" + section + "': terms must be B C pairs");
        for (std::size_t i = 0; i < flat.size(); i += 2)
            m.terms.emplace_back(flat[i], flat[i + 1]);
        const auto range = cfg.get_list(section, "valid_range_um");
        if (range.size() != 2 || range[0] <= 0.0 || range[1] <= range[0])
            throw ConfigError("material '" + section + "': valid_range_um must be 'min max' with 0 < min < max");
        m.lambda_min_um = range[0];
        m.lambda_max_um = range[1];
        m.temperature_deg_c = cfg.get_double(section, "temperature_c", 23.0);
        for (const auto& key : cfg.keys(section)) {
            if (key != "constant" && key != "terms" && key != "valid_range_um" && key != "temperature_c")
                throw ConfigError("material '" + section + "': unknown key '" + key + "'");
        }
        cat.models_.push_back(std::move(m));
    }
    if (cat.models_.empty())
        throw ConfigError("material table '" + cfg.origin() + "' has no entries");
    std::sort(cat.models_.begin(), cat.models_.end(),
              [](const SellmeierModel& a, const SellmeierModel& b) { return a.name < b.name; });
    return cat;
}

bool MaterialCatalog::has(const std::string& name) const {
    return std::any_of(models_.begin(), models_.end(),
                       [&](const SellmeierModel& m) { return m.name == name; });
}

const SellmeierModel& MaterialCatalog::at(const std::string& name) const {
    for (const auto& m : models_)
        if (m.name == name) return m;
    throw ConfigError("unknown material '" + name + "'");
}

std::vector<std::string> MaterialCatalog::names() const {
    std::vector<std::string> out;
    out.reserve(models_.size());
    for (const auto& m : models_) out.push_back(m.name);
    return out;
}

} // namespace lnspdc
