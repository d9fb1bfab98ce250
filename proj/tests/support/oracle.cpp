#include "oracle.hpp"

#include <cmath>

namespace snncal::oracle {

OracleTrace oracle_simulate(double theta, const std::vector<double>& v0,
                            const std::vector<std::vector<double>>& currents) {
    const std::size_t T = currents.size();
    const std::size_t n = v0.size();
    OracleTrace trace;
    trace.m.assign(T, std::vector<double>(n, 0.0));
    trace.v.assign(T, std::vector<double>(n, 0.0));
    trace.s.assign(T, std::vector<int>(n, 0));
    trace.count.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        double v = v0[i];
        for (std::size_t t = 0; t < T; ++t) {
            double m = v + currents[t][i];
            int s = 0;
            if (m >= theta) s = 1;
            trace.m[t][i] = m;
            trace.s[t][i] = s;
            if (s == 1) {
                v = m - theta;
                trace.count[i] += 1;
            } else {
                v = m;
            }
            trace.v[t][i] = v;
        }
    }
    return trace;
}

int oracle_count(double theta, double v0, const std::vector<double>& currents) {
    int count = 0;
    double v = v0;
    for (double I : currents) {
        double m = v + I;
        if (m >= theta) {
            count += 1;
            v = m - theta;
        } else {
            v = m;
        }
    }
    return count;
}

std::optional<std::pair<double, double>>
oracle_shift_search(double theta, double v0, const std::vector<double>& currents,
                    int target_delta, double range, int grid) {
    const int base = oracle_count(theta, v0, currents);
    const double step = theta / grid;
    const int half = static_cast<int>(std::lround(range * grid));
    bool found = false;
    double lo = 0.0, hi = 0.0;
    for (int k = -half; k <= half; ++k) {
        const double offset = k * step;
        if (oracle_count(theta, v0 + offset, currents) == base + target_delta) {
            if (!found) {
                lo = offset;
                found = true;
            }
            hi = offset;
        }
    }
    if (!found) return std::nullopt;
    return std::make_pair(lo, hi);
}

long oracle_offset(double a, double theta, const std::vector<int>& spikes) {
    long count = 0;
    for (int s : spikes) count += s;
    const double designed = a * static_cast<double>(spikes.size()) / theta;
    return static_cast<long>(std::llround(designed)) - count;
}

}  // namespace snncal::oracle
