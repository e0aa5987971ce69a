#include "geotomo/vec.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "geotomo/errors.hpp"

namespace geotomo {

Mat complement_basis(const Vec& u) {
    const int n = static_cast<int>(u.size());
    double nu = u.norm();
    if (!(nu > 0)) throw DomainError("complement_basis: zero direction");
    Vec w = u / nu;
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return std::abs(w[a]) < std::abs(w[b]); });
    std::vector<Vec> basis;
    for (int ax : order) {
        if (static_cast<int>(basis.size()) == n - 1) break;
        Vec v = Vec::Zero(n);
        v[ax] = 1.0;
        // two passes of Gram-Schmidt
        for (int pass = 0; pass < 2; ++pass) {
            v -= v.dot(w) * w;
            for (const auto& b : basis) v -= v.dot(b) * b;
        }
        double nv = v.norm();
        if (nv > 1e-6) basis.push_back(v / nv);
    }
    // keep the original axis order so that u = e_n yields e_1..e_{n-1}
    std::sort(basis.begin(), basis.end(), [](const Vec& a, const Vec& b) {
        int ia, ib;
        a.cwiseAbs().maxCoeff(&ia);
        b.cwiseAbs().maxCoeff(&ib);
        return ia < ib;
    });
    Mat B(n, n - 1);
    for (int j = 0; j < n - 1; ++j) B.col(j) = basis[j];
    return B;
}

}  // namespace geotomo
