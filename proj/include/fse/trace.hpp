#pragma once

#include <complex>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "fse/basis.hpp"

namespace fse {

// One model update: which function was picked and what was applied.
struct IterationRecord {
    int nu = 0;  // 1-based iteration number
    Index u;
    std::complex<double> p;  // projection coefficient of the selected function
    std::complex<double> c;  // expansion coefficient update actually applied
    double gamma_effective = 1.0;
    double weighted_energy = 0.0;  // weighted residual energy after the update
    bool compensation_degenerate = false;
};

struct Trace {
    std::vector<IterationRecord> records;
    bool converged = false;

    // Columns: nu,u_k1,u_k2,p_abs,c_abs,gamma_effective,weighted_energy.
    // fingerprint, when non-empty, is emitted as a leading "# " comment.
    void write_csv(std::ostream& os, std::string_view fingerprint = {}) const;
};

}  // namespace fse
