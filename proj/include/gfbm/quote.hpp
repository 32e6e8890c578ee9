#ifndef GFBM_QUOTE_HPP
#define GFBM_QUOTE_HPP

// Price plus where it came from. Closed forms carry a zero standard error;
// Monte Carlo quotes carry the sample standard error of the mean.

namespace gfbm {

enum class Provenance { formula, mc, pde };

struct PriceQuote {
    double price = 0.0;
    double std_error = 0.0;
    Provenance provenance = Provenance::formula;
};

inline const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::formula: return "formula";
        case Provenance::mc: return "mc";
        case Provenance::pde: return "pde";
    }
    return "?";
}

} // namespace gfbm

#endif
