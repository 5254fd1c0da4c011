#include "levydiv/polynomial.hpp"

#include <algorithm>
#include <cmath>

namespace levydiv {

namespace poly {

std::vector<double> derivative(const std::vector<double>& p) {
    if (p.size() <= 1) return {0.0};
    std::vector<double> d(p.size() - 1);
    for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = static_cast<double>(i) * p[i];
    return d;
}

std::vector<double> multiply(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<double> r(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

std::vector<double> add(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> r(std::max(a.size(), b.size()), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return r;
}

std::vector<double> scale(const std::vector<double>& a, double k) {
    std::vector<double> r(a);
    for (double& v : r) v *= k;
    return r;
}

std::vector<double> trim(std::vector<double> p) {
    while (p.size() > 1 && p.back() == 0.0) p.pop_back();
    return p;
}

double norm_inf(const std::vector<double>& p) {
    double m = 0.0;
    for (double v : p) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace poly
}  // namespace levydiv
