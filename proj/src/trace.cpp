#include "fse/trace.hpp"

#include <cstdio>
#include <ostream>

namespace fse {

namespace {

// Shortest representation that round-trips a double exactly.
void append_double(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    double back = 0.0;
    for (int prec = 15; prec <= 16; ++prec) {
        char probe[40];
        std::snprintf(probe, sizeof(probe), "%.*g", prec, v);
        std::sscanf(probe, "%lf", &back);
        if (back == v) {
            out += probe;
            return;
        }
    }
    out += buf;
}

}  // namespace

void Trace::write_csv(std::ostream& os, std::string_view fingerprint) const {
    std::string buf;
    if (!fingerprint.empty()) {
        buf += "# ";
        buf += fingerprint;
        buf += '\n';
    }
    buf += "nu,u_k1,u_k2,p_abs,c_abs,gamma_effective,weighted_energy\n";
    for (const IterationRecord& r : records) {
        buf += std::to_string(r.nu);
        buf += ',';
        buf += std::to_string(r.u.k1);
        buf += ',';
        buf += std::to_string(r.u.k2);
        buf += ',';
        append_double(buf, std::abs(r.p));
        buf += ',';
        append_double(buf, std::abs(r.c));
        buf += ',';
        append_double(buf, r.gamma_effective);
        buf += ',';
        append_double(buf, r.weighted_energy);
        buf += '\n';
    }
    os << buf;
}

}  // namespace fse
