#include "spdecpt/simulator.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "spdecpt/common.hpp"
#include "spdecpt/rng.hpp"

namespace spdecpt {
namespace {

using Eigen::MatrixXd;

ModeIndex unflatten(std::int64_t flat, const std::vector<std::int64_t>& trunc) {
    ModeIndex l(trunc.size());
    for (std::size_t k = trunc.size(); k-- > 0;) {
        l[k] = static_cast<int>(flat % trunc[k]) + 1;
        flat /= trunc[k];
    }
    return l;
}

void validate_config(const SimulationConfig& cfg) {
    const int d = cfg.dimension();
    if (cfg.grid.dimension() != d)
        throw ConfigError("simulate: grid dimension does not match parameters");
    if (static_cast<int>(cfg.truncation.size()) != d)
        throw ConfigError("simulate: truncation dimension does not match parameters");
    for (auto L : cfg.truncation)
        if (L < 1) throw ConfigError("simulate: truncation must be >= 1 per axis");
    cfg.noise.validate_for_dimension(d);
}

// Runs the exact OU recursion for one mode into `out` (length N+1).
void simulate_mode(const SimulationConfig& cfg, std::int64_t flat,
                   const std::vector<double>& sigma_left,
                   double* out) {
    const ModeIndex l = unflatten(flat, cfg.truncation);
    const double lambda = cfg.params.eigenvalue(l);
    const double scale = cfg.noise.noise_scale(l, cfg.params);
    const std::int64_t N = cfg.grid.N;
    const double step = 1.0 / static_cast<double>(N);
    const double decay = std::exp(-lambda * step);
    const double sd_unit =
        std::sqrt((1.0 - std::exp(-2.0 * lambda * step)) / (2.0 * lambda));
    out[0] = cfg.initial_coefficient;
    for (std::int64_t i = 1; i <= N; ++i) {
        const double z = standard_normal(cfg.seed.seed, cfg.seed.replication,
                                         static_cast<std::uint32_t>(flat),
                                         static_cast<std::uint32_t>(i));
        out[i] = decay * out[i - 1] + sigma_left[i - 1] * scale * sd_unit * z;
    }
}

// sqrt(2) sin(pi p x) e^{-a x / 2} tabulated for all modes x grid nodes.
MatrixXd basis_matrix(std::int64_t modes, std::int64_t M, double kappa) {
    MatrixXd E(modes, M + 1);
    for (std::int64_t p = 1; p <= modes; ++p)
        for (std::int64_t j = 0; j <= M; ++j)
            E(p - 1, j) = eigenfunction_1d(static_cast<int>(p),
                                           static_cast<double>(j) / M, kappa);
    return E;
}

}  // namespace

std::int64_t CoefficientPaths::flat_mode(const ModeIndex& l) const {
    if (l.size() != truncation.size())
        throw ConfigError("flat_mode: dimension mismatch");
    std::int64_t flat = 0;
    for (std::size_t k = 0; k < l.size(); ++k) {
        if (l[k] < 1 || l[k] > truncation[k])
            throw ConfigError("flat_mode: mode outside the simulated set");
        flat = flat * truncation[k] + (l[k] - 1);
    }
    return flat;
}

CoefficientPaths simulate_coefficients(const SimulationConfig& cfg,
                                       unsigned threads) {
    validate_config(cfg);
    const std::int64_t N = cfg.grid.N;
    const std::int64_t modes = cfg.mode_count();

    // sigma frozen at the left endpoint of each step.
    std::vector<double> sigma_left(N);
    for (std::int64_t i = 0; i < N; ++i)
        sigma_left[i] = cfg.profile.at(static_cast<double>(i) / N);

    CoefficientPaths paths;
    paths.truncation = cfg.truncation;
    paths.time_steps = N;
    paths.seed = cfg.seed;
    paths.values.resize(modes * (N + 1));
    parallel_for(0, static_cast<std::size_t>(modes),
                 [&](std::size_t flat) {
                     simulate_mode(cfg, static_cast<std::int64_t>(flat),
                                   sigma_left,
                                   paths.values.data() + flat * (N + 1));
                 },
                 threads);
    return paths;
}

FieldDataset assemble_field(const CoefficientPaths& coeffs,
                            const SimulationConfig& cfg, unsigned threads) {
    validate_config(cfg);
    if (coeffs.truncation != cfg.truncation)
        throw ConfigError("assemble_field: coefficient mode set does not match config");
    if (coeffs.time_steps != cfg.grid.N)
        throw ConfigError("assemble_field: coefficient time grid does not match config");

    const std::int64_t N = cfg.grid.N;
    FieldDataset ds{cfg.grid, {},       cfg.params, cfg.noise,
                    cfg.profile, cfg.truncation, cfg.seed,
                    cfg.initial_coefficient};
    ds.values.resize((N + 1) * ds.slice_size());

    if (cfg.dimension() == 1) {
        const std::int64_t L = cfg.truncation[0];
        const std::int64_t M = cfg.grid.M[0];
        const MatrixXd E = basis_matrix(L, M, cfg.params.kappa()[0]);
        // Field = C^T E, C = (modes x N+1). Chunked over time so the big
        // product parallelizes without shared state.
        Eigen::Map<const MatrixXd> C(coeffs.values.data(), N + 1, L);
        // values laid out row-major (time major), Eigen default is col-major:
        // map the output as (M+1) x (N+1) column-major and compute E^T-side.
        Eigen::Map<MatrixXd> out(ds.values.data(), M + 1, N + 1);
        const std::size_t chunk = 256;
        const std::size_t nchunks = (N + 1 + chunk - 1) / chunk;
        parallel_for(0, nchunks,
                     [&](std::size_t c) {
                         const std::int64_t lo = c * chunk;
                         const std::int64_t hi =
                             std::min<std::int64_t>(lo + chunk, N + 1);
                         out.middleCols(lo, hi - lo).noalias() =
                             E.transpose() * C.middleRows(lo, hi - lo).transpose();
                     },
                     threads);
    } else {
        const std::int64_t L1 = cfg.truncation[0], L2 = cfg.truncation[1];
        const std::int64_t M1 = cfg.grid.M[0], M2 = cfg.grid.M[1];
        const MatrixXd E1 = basis_matrix(L1, M1, cfg.params.kappa()[0]);
        const MatrixXd E2 = basis_matrix(L2, M2, cfg.params.kappa()[1]);
        const std::int64_t slice = ds.slice_size();
        parallel_for(0, static_cast<std::size_t>(N + 1),
                     [&](std::size_t i) {
                         // Coefficient block for one time: L1 x L2, axis 2 fastest.
                         MatrixXd A(L1, L2);
                         for (std::int64_t a = 0; a < L1; ++a)
                             for (std::int64_t b = 0; b < L2; ++b)
                                 A(a, b) = coeffs.at(a * L2 + b, i);
                         const MatrixXd S = E1.transpose() * (A * E2);
                         double* dst = ds.values.data() + i * slice;
                         for (std::int64_t j = 0; j <= M1; ++j)
                             for (std::int64_t k = 0; k <= M2; ++k)
                                 dst[j * (M2 + 1) + k] = S(j, k);
                     },
                     threads);
    }
    return ds;
}

FieldDataset simulate_field(const SimulationConfig& cfg, unsigned threads) {
    return assemble_field(simulate_coefficients(cfg, threads), cfg, threads);
}

std::vector<double> simulate_single_coordinate(
    const OperatorParams& params, const NoiseSpec& noise,
    const VolatilityProfile& profile, std::int64_t N, const ModeIndex& ell,
    const std::vector<std::int64_t>& truncation, SeedRecord seed,
    double initial_coefficient) {
    SimulationConfig cfg{params,
                         noise,
                         profile,
                         SpaceTimeGrid(N, std::vector<std::int64_t>(
                                              params.dimension(), 2)),
                         truncation,
                         seed,
                         initial_coefficient};
    validate_config(cfg);
    std::vector<double> sigma_left(N);
    for (std::int64_t i = 0; i < N; ++i)
        sigma_left[i] = profile.at(static_cast<double>(i) / N);

    CoefficientPaths probe;
    probe.truncation = truncation;
    const std::int64_t flat = probe.flat_mode(ell);
    std::vector<double> out(N + 1);
    simulate_mode(cfg, flat, sigma_left, out.data());
    return out;
}

std::vector<std::int64_t> suggest_truncation(const OperatorParams& params,
                                             const NoiseSpec& noise,
                                             double rel_tol) {
    const int d = params.dimension();
    noise.validate_for_dimension(d);
    auto term = [&](const ModeIndex& l) {
        const double g = noise.gamma(l, params);
        const double s = noise.alpha() == 0.0 ? 1.0 : std::pow(g, -noise.alpha());
        return s / (2.0 * params.eigenvalue(l));
    };
    if (d == 1) {
        const std::int64_t cap = 1 << 21;
        std::vector<double> cum(1, 0.0);
        cum.reserve(cap + 1);
        for (std::int64_t l = 1; l <= cap; ++l)
            cum.push_back(cum.back() + term({static_cast<int>(l)}));
        // Tail beyond the cap, by integral comparison of the last term's decay.
        const double p = 2.0 + 2.0 * noise.alpha();
        const double tail = term({static_cast<int>(cap)}) * cap / (p - 1.0);
        const double total = cum.back() + tail;
        for (std::int64_t L = 1; L <= cap; ++L)
            if (total - cum[L] < rel_tol * cum[L]) return {L};
        throw ConfigError("suggest_truncation: tolerance unreachable within cap");
    }
    const std::int64_t cap = 4096;
    std::vector<double> ring(cap + 1, 0.0);  // added mass when L grows to l
    for (std::int64_t l = 1; l <= cap; ++l) {
        double s = term({static_cast<int>(l), static_cast<int>(l)});
        for (std::int64_t k = 1; k < l; ++k) {
            s += term({static_cast<int>(l), static_cast<int>(k)});
            s += term({static_cast<int>(k), static_cast<int>(l)});
        }
        ring[l] = s;
    }
    std::vector<double> cum(cap + 1, 0.0);
    for (std::int64_t l = 1; l <= cap; ++l) cum[l] = cum[l - 1] + ring[l];
    const double p = 1.0 + 2.0 * noise.alpha();  // ring mass decays ~ l^{-p}
    const double tail = ring[cap] * cap / (p - 1.0);
    const double total = cum[cap] + tail;
    for (std::int64_t L = 1; L <= cap; ++L)
        if (total - cum[L] < rel_tol * cum[L]) return {L, L};
    throw ConfigError("suggest_truncation: tolerance unreachable within cap");
}

}  // namespace spdecpt
