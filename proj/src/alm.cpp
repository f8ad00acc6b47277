#include "sht/alm.hpp"

#include <stdexcept>

namespace sht {

AlmSet::AlmSet(int lmax_, int mmax_) : lmax(lmax_), mmax(mmax_) {
    if (lmax < 0 || mmax < 0 || mmax > lmax)
        throw std::invalid_argument("AlmSet: need lmax >= mmax >= 0");
    values.assign(count(lmax, mmax), cdouble{0.0, 0.0});
}

std::size_t AlmSet::count(int lmax, int mmax) {
    auto l = static_cast<std::size_t>(lmax), m = static_cast<std::size_t>(mmax);
    return (m + 1) * (l + 1) - m * (m + 1) / 2;
}

}  // namespace sht
