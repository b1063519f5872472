#include "magstar/magnetic_form.hpp"

#include <fstream>
#include <json.hpp>

namespace magstar {

using nlohmann::ordered_json;

std::string field_to_json(const MagneticForm& F, const std::vector<PolySymbol>* E) {
    ordered_json j;
    const int n = F.dim();
    j["n"] = n;
    bool td = F.time_dependent();
    std::vector<std::vector<std::string>> comps(n, std::vector<std::string>(n));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) comps[a][b] = F.comp(a, b).str();
    j["F"] = comps;
    if (E) {
        std::vector<std::string> ev;
        for (const auto& e : *E) {
            ev.push_back(e.str());
            td = td || e.depends_on_t();
        }
        j["E"] = ev;
    }
    j["time_dependent"] = td;
    return j.dump(2) + "\n";
}

MagneticForm field_from_json(const std::string& text, std::vector<PolySymbol>* E_out) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("field json: parse failure: ") + e.what());
    }
    for (auto& [key, value] : j.items()) {
        (void)value;
        if (key != "n" && key != "F" && key != "E" && key != "time_dependent")
            throw std::invalid_argument("field json: unknown key '" + key + "'");
    }
    if (!j.contains("n") || !j["n"].is_number_integer())
        throw std::invalid_argument("field json: missing integer key 'n'");
    int n = j["n"];
    if (n < 1 || n > 4) throw std::invalid_argument("field json: n must be in 1..4");
    if (!j.contains("F")) throw std::invalid_argument("field json: missing key 'F'");
    auto rows = j["F"];
    if (!rows.is_array() || (int)rows.size() != n)
        throw std::invalid_argument("field json: 'F' must be an n x n matrix of symbol strings");
    std::vector<std::vector<PolySymbol>> comps(n, std::vector<PolySymbol>(n, PolySymbol(n)));
    for (int a = 0; a < n; ++a) {
        if (!rows[a].is_array() || (int)rows[a].size() != n)
            throw std::invalid_argument("field json: 'F' must be an n x n matrix of symbol strings");
        for (int b = 0; b < n; ++b) {
            std::string s = rows[a][b];
            try {
                comps[a][b] = PolySymbol::parse(n, s);
            } catch (const std::exception& e) {
                throw std::invalid_argument("field json: component F[" + std::to_string(a) +
                                            "][" + std::to_string(b) + "]: " + e.what());
            }
        }
    }
    MagneticForm F(n, std::move(comps));
    if (E_out) {
        E_out->assign(n, PolySymbol(n));
        if (j.contains("E")) {
            auto ev = j["E"];
            if (!ev.is_array() || (int)ev.size() != n)
                throw std::invalid_argument("field json: 'E' must list n symbol strings");
            for (int a = 0; a < n; ++a) {
                std::string s = ev[a];
                (*E_out)[a] = PolySymbol::parse(n, s);
            }
            // constructing the EMField validates the Maxwell pair
            EMField check(F, *E_out);
        }
    }
    return F;
}

MagneticForm load_field_file(const std::string& path, std::vector<PolySymbol>* E_out) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open field file: " + path);
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return field_from_json(text, E_out);
}

} // namespace magstar
