#include "magstar/rational.hpp"

#include <ostream>

namespace magstar {

std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.str(); }

std::string GRat::str() const {
    if (im.is_zero()) return re.str();
    if (re.is_zero()) {
        if (im == Rat(1)) return "i";
        if (im == Rat(-1)) return "-i";
        return im.str() + "i";
    }
    std::string s = "(" + re.str();
    if (im.sign() >= 0) s += "+";
    if (im == Rat(1)) s += "i";
    else if (im == Rat(-1)) s += "-i";
    else s += im.str() + "i";
    return s + ")";
}

std::ostream& operator<<(std::ostream& os, const GRat& z) { return os << z.str(); }

} // namespace magstar
