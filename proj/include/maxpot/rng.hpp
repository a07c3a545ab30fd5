#pragma once

#include <cstdint>
#include <cmath>
#include <random>
#include <vector>

namespace maxpot {

// mt19937_64 with hand-rolled draws: the standard distributions are not
// portable across library implementations, and goldens depend on the stream.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t bits() { return eng_(); }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    bool bernoulli(double p) { return uniform() < p; }

    // Uniform in [0, n), rejection sampling.
    std::uint64_t index(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = eng_();
        } while (x >= limit);
        return x % n;
    }
    int range(int lo, int hi) { return lo + static_cast<int>(index(static_cast<std::uint64_t>(hi - lo + 1))); }

    template <class T>
    const T& pick(const std::vector<T>& v) { return v[index(v.size())]; }

    // k distinct elements, in draw order.
    template <class T>
    std::vector<T> sample(std::vector<T> pool, std::size_t k) {
        std::vector<T> out;
        for (std::size_t i = 0; i < k && !pool.empty(); ++i) {
            std::size_t j = index(pool.size());
            out.push_back(pool[j]);
            pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(j));
        }
        return out;
    }

    // Flat Dirichlet draw of the given dimension.
    std::vector<double> simplex_point(std::size_t dim) {
        std::vector<double> w(dim);
        double s = 0;
        for (auto& x : w) {
            double u = uniform();
            x = -std::log1p(-u);
            s += x;
        }
        for (auto& x : w) x /= s;
        return w;
    }

private:
    std::mt19937_64 eng_;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace maxpot
