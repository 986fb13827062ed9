#include "deltalab/monte_carlo.hpp"

#include "deltalab/normal.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace deltalab {

namespace {

// splitmix64 step; mixes (seed, batch) into a generator seed
std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t batch_seed(std::uint64_t seed, std::size_t batch) {
    return mix64(mix64(seed) ^ (0x632be59bd9b4e019ULL + static_cast<std::uint64_t>(batch)));
}

// uniform in (0,1), then inverse CDF; the normal sequence is fully pinned by
// the seed and independent of platform library choices
struct NormalStream {
    std::mt19937_64 gen;
    explicit NormalStream(std::uint64_t s) : gen(s) {}
    double operator()() {
        const double u =
            (static_cast<double>(gen() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
        return inv_norm_cdf(u);
    }
};

template <typename PerBatch>
void for_each_batch(const PathConfig& cfg, PerBatch&& body) {
    std::size_t done = 0, batch = 0;
    while (done < cfg.n_paths) {
        const std::size_t count = std::min(cfg.batch_size, cfg.n_paths - done);
        body(batch, done, count);
        done += count;
        ++batch;
    }
}

void require_positive_paths(const PathConfig& cfg) {
    if (cfg.n_paths < 1 || cfg.n_steps < 1)
        throw std::invalid_argument("monte carlo: need n_paths >= 1 and n_steps >= 1");
}

} // namespace

TerminalSamples simulate_gbm_exact(double x0, double sigma, double T,
                                   const PathConfig& config) {
    require_positive_paths(config);
    if (!(x0 >= 0.0) || !(sigma > 0.0) || !(T > 0.0))
        throw std::invalid_argument("simulate_gbm_exact: bad parameters");

    TerminalSamples out;
    out.x0 = x0;
    out.x.resize(config.n_paths);
    const double drift = -0.5 * sigma * sigma * T;
    const double vol = sigma * std::sqrt(T);
    std::size_t absorbed = 0;
    for_each_batch(config, [&](std::size_t batch, std::size_t offset, std::size_t count) {
        NormalStream z(batch_seed(config.seed, batch));
        for (std::size_t i = 0; i < count; ++i) {
            const double xT = x0 * std::exp(drift + vol * z());
            out.x[offset + i] = xT;
            if (xT == 0.0) ++absorbed;
        }
    });
    out.absorbed_fraction =
        static_cast<double>(absorbed) / static_cast<double>(config.n_paths);
    return out;
}

TerminalSamples simulate_cev_euler_absorbed(double x0, double sigma, double beta, double T,
                                            const PathConfig& config) {
    require_positive_paths(config);
    if (!(x0 >= 0.0) || !(sigma > 0.0) || !(T > 0.0))
        throw std::invalid_argument("simulate_cev_euler_absorbed: bad parameters");
    if (!(beta >= 0.0 && beta <= 2.0))
        throw std::invalid_argument("simulate_cev_euler_absorbed: beta must lie in [0,2]");
    if (beta == 2.0) return simulate_gbm_exact(x0, sigma, T, config);

    TerminalSamples out;
    out.x0 = x0;
    out.x.resize(config.n_paths);
    const double dt = T / static_cast<double>(config.n_steps);
    const double sq = sigma * std::sqrt(dt);
    const double halfbeta = 0.5 * beta;
    std::size_t absorbed = 0;
    auto run = [&](auto vol) {
        for_each_batch(config, [&](std::size_t batch, std::size_t offset, std::size_t count) {
            NormalStream z(batch_seed(config.seed, batch));
            for (std::size_t i = 0; i < count; ++i) {
                double x = x0;
                for (std::size_t n = 0; n < config.n_steps && x > 0.0; ++n) {
                    x += sq * vol(x) * z();
                    if (x <= 0.0) x = 0.0; // absorbed: remains 0 forever
                }
                out.x[offset + i] = x;
                if (x == 0.0) ++absorbed;
            }
        });
    };
    if (halfbeta == 0.5)
        run([](double x) { return std::sqrt(x); });
    else if (halfbeta == 0.0)
        run([](double) { return 1.0; });
    else
        run([halfbeta](double x) { return std::pow(x, halfbeta); });
    out.absorbed_fraction =
        static_cast<double>(absorbed) / static_cast<double>(config.n_paths);
    return out;
}

TerminalSamples2 simulate_two_gbm_exact(double x01, double sigma1, double x02, double sigma2,
                                        double T, const PathConfig& config) {
    require_positive_paths(config);
    TerminalSamples2 out;
    out.x1.resize(config.n_paths);
    out.x2.resize(config.n_paths);
    const double d1 = -0.5 * sigma1 * sigma1 * T, v1 = sigma1 * std::sqrt(T);
    const double d2 = -0.5 * sigma2 * sigma2 * T, v2 = sigma2 * std::sqrt(T);
    for_each_batch(config, [&](std::size_t batch, std::size_t offset, std::size_t count) {
        NormalStream z(batch_seed(config.seed, batch));
        for (std::size_t i = 0; i < count; ++i) {
            out.x1[offset + i] = x01 * std::exp(d1 + v1 * z());
            out.x2[offset + i] = x02 * std::exp(d2 + v2 * z());
        }
    });
    return out;
}

TerminalSamples2 simulate_two_cev_euler(double x01, double sigma1, double beta1, double x02,
                                        double sigma2, double beta2, double T,
                                        const PathConfig& config) {
    require_positive_paths(config);
    TerminalSamples2 out;
    out.x1.resize(config.n_paths);
    out.x2.resize(config.n_paths);
    const double dt = T / static_cast<double>(config.n_steps);
    const double sq1 = sigma1 * std::sqrt(dt), sq2 = sigma2 * std::sqrt(dt);
    for_each_batch(config, [&](std::size_t batch, std::size_t offset, std::size_t count) {
        NormalStream z(batch_seed(config.seed, batch));
        for (std::size_t i = 0; i < count; ++i) {
            double a = x01, b = x02;
            for (std::size_t n = 0; n < config.n_steps; ++n) {
                if (a > 0.0) {
                    a += sq1 * std::pow(a, 0.5 * beta1) * z();
                    if (a <= 0.0) a = 0.0;
                }
                if (b > 0.0) {
                    b += sq2 * std::pow(b, 0.5 * beta2) * z();
                    if (b <= 0.0) b = 0.0;
                }
            }
            out.x1[offset + i] = a;
            out.x2[offset + i] = b;
        }
    });
    return out;
}

namespace {

PriceEstimate reduce(const std::vector<double>& payoffs, double absorbed_fraction) {
    const std::size_t n = payoffs.size();
    double sum = 0.0;
    for (double v : payoffs) {
        if (!std::isfinite(v)) throw std::runtime_error("mc_price: non-finite payoff value");
        sum += v;
    }
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (double v : payoffs) ss += (v - mean) * (v - mean);
    PriceEstimate est;
    est.mean = mean;
    est.std_error = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n))
                          : 0.0;
    est.n_paths = n;
    est.absorbed_fraction = absorbed_fraction;
    return est;
}

} // namespace

PriceEstimate mc_price(const Payoff& payoff, const TerminalSamples& samples) {
    if (samples.x.empty()) throw std::invalid_argument("mc_price: empty sample set");
    if (payoff.dim != 1) throw std::invalid_argument("mc_price: need a 1D payoff");
    std::vector<double> vals(samples.x.size());
    for (std::size_t i = 0; i < samples.x.size(); ++i) vals[i] = payoff(samples.x[i]);
    return reduce(vals, samples.absorbed_fraction);
}

PriceEstimate mc_price(const Payoff& payoff, const TerminalSamples2& samples) {
    if (samples.x1.empty()) throw std::invalid_argument("mc_price: empty sample set");
    if (payoff.dim != 2) throw std::invalid_argument("mc_price: need a 2D payoff");
    std::vector<double> vals(samples.x1.size());
    for (std::size_t i = 0; i < samples.x1.size(); ++i)
        vals[i] = payoff(samples.x1[i], samples.x2[i]);
    return reduce(vals, 0.0);
}

} // namespace deltalab
