// Contact structure of the time-extended phase space R_t x R^{2n}: the
// closed 2-form omega~_F = dp ^ dq + B-part + E dq ^ dt, its null field v0
// (the virtual flow), and the charged-particle field v_H. All four
// identities are verified symbolically on polynomial fields; the raw entry
// point skips the Maxwell validation so that deliberately inconsistent
// fields can serve as negative controls.

#pragma once

#include "magstar/magnetic_form.hpp"

namespace magstar::dyn {

struct ContactResiduals {
    std::vector<Poly> v0_contraction; // v0 | omega~_F            (1-form)
    std::vector<Poly> v0_lie;         // L_{v0} omega~_F          (2-form, flattened)
    std::vector<Poly> vH_contraction; // v_H | omega~_F - dH + v0(H) dt
    std::vector<Poly> vH_lie;         // L_{v_H} omega~_F - d(v0(H)) ^ dt

    bool all_zero() const {
        for (auto* v : {&v0_contraction, &v0_lie, &vH_contraction, &vH_lie})
            for (const auto& p : *v)
                if (!p.is_zero()) return false;
        return true;
    }
};

ContactResiduals contact_checks(const EMField& em, const PolySymbol& H);
// unvalidated components (negative controls)
ContactResiduals contact_checks_raw(int n, const std::vector<std::vector<PolySymbol>>& Fcomps,
                                    const std::vector<PolySymbol>& E, const PolySymbol& H);

} // namespace magstar::dyn
