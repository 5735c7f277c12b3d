#include "spdecpt/coordinates.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <sstream>

#include "spdecpt/common.hpp"

namespace spdecpt {

double g_antideriv(int p, double x, double a) {
    if (p < 1) throw ConfigError("g_antideriv: p must be >= 1");
    const double half_a = 0.5 * a;
    const double pp = M_PI * p;
    return std::sqrt(2.0) * std::exp(half_a * x) /
           (half_a * half_a + pp * pp) *
           (half_a * std::sin(pp * x) - pp * std::cos(pp * x));
}

std::vector<double> coordinate_weights(int p, std::int64_t M, double a) {
    std::vector<double> w(M + 1, 0.0);
    double prev = g_antideriv(p, 0.0, a);
    for (std::int64_t j = 1; j <= M; ++j) {
        const double cur = g_antideriv(p, static_cast<double>(j) / M, a);
        w[j] = cur - prev;
        prev = cur;
    }
    return w;
}

CoordinatePath approx_coordinate(const FieldDataset& ds, const ModeIndex& ell,
                                 const std::vector<double>& kappa_hat,
                                 const ThinningPlan& plan) {
    const int d = ds.dimension();
    if (static_cast<int>(ell.size()) != d ||
        static_cast<int>(kappa_hat.size()) != d)
        throw ConfigError("approx_coordinate: dimension mismatch");
    for (int k = 0; k < d; ++k) {
        if (ell[k] < 1)
            throw ConfigError("approx_coordinate: mode components must be >= 1");
        if (2 * static_cast<std::int64_t>(ell[k]) > ds.grid.M[k]) {
            std::ostringstream os;
            os << "approx_coordinate: mode component " << ell[k]
               << " exceeds M/2 on axis " << k
               << "; the spatial functional cannot resolve it";
            throw ConfigError(os.str());
        }
    }
    // Only the plan's time thinning matters here; the reconstruction always
    // integrates over the full spatial grid.
    const std::int64_t n = plan.n.value_or(ds.grid.N);
    if (n > ds.grid.N)
        throw ConfigError("approx_coordinate: n exceeds the grid's time-step count");
    const std::int64_t stride = ds.grid.N / n;
    const double time_step =
        static_cast<double>(stride) / static_cast<double>(ds.grid.N);

    CoordinatePath path;
    path.ell = ell;
    path.kappa_used = kappa_hat;
    path.times.resize(n + 1);
    path.values.resize(n + 1);
    for (std::int64_t i = 0; i <= n; ++i)
        path.times[i] = static_cast<double>(i) * time_step;

    if (d == 1) {
        const std::int64_t M = ds.grid.M[0];
        const std::vector<double> w = coordinate_weights(ell[0], M, kappa_hat[0]);
        Eigen::Map<const Eigen::VectorXd> wv(w.data(), M + 1);
        for (std::int64_t i = 0; i <= n; ++i) {
            Eigen::Map<const Eigen::VectorXd> slice(ds.slice(i * stride), M + 1);
            path.values[i] = slice.dot(wv);
        }
    } else {
        const std::int64_t M1 = ds.grid.M[0], M2 = ds.grid.M[1];
        const std::vector<double> w1 = coordinate_weights(ell[0], M1, kappa_hat[0]);
        const std::vector<double> w2 = coordinate_weights(ell[1], M2, kappa_hat[1]);
        Eigen::Map<const Eigen::VectorXd> wv1(w1.data(), M1 + 1);
        Eigen::Map<const Eigen::VectorXd> wv2(w2.data(), M2 + 1);
        for (std::int64_t i = 0; i <= n; ++i) {
            Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic,
                                           Eigen::Dynamic, Eigen::RowMajor>>
                slice(ds.slice(i * stride), M1 + 1, M2 + 1);
            path.values[i] = wv1.dot(slice * wv2);
        }
    }
    return path;
}

CoordinatePath exact_coordinate(const CoefficientPaths& coeffs,
                                const ModeIndex& ell, std::int64_t N,
                                const ThinningPlan& plan,
                                const std::vector<double>& kappa) {
    const std::int64_t flat = coeffs.flat_mode(ell);  // throws if outside
    if (coeffs.time_steps != N)
        throw ConfigError("exact_coordinate: N does not match the coefficient paths");
    const std::int64_t n = plan.n.value_or(N);
    if (n > N) throw ConfigError("exact_coordinate: n exceeds N");
    const std::int64_t stride = N / n;

    CoordinatePath path;
    path.ell = ell;
    path.kappa_used = kappa;
    path.times.resize(n + 1);
    path.values.resize(n + 1);
    const double step = static_cast<double>(stride) / static_cast<double>(N);
    for (std::int64_t i = 0; i <= n; ++i) {
        path.times[i] = static_cast<double>(i) * step;
        path.values[i] = coeffs.at(flat, i * stride);
    }
    return path;
}

QuadraticVariation partial_qv(const std::vector<double>& values) {
    if (values.size() < 2)
        throw ConfigError("partial_qv: need at least two path values");
    QuadraticVariation qv;
    qv.partials.resize(values.size());
    qv.partials[0] = 0.0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        const double inc = values[i] - values[i - 1];
        qv.partials[i] = qv.partials[i - 1] + inc * inc;
    }
    return qv;
}

QuadraticVariation partial_qv(const CoordinatePath& path) {
    return partial_qv(path.values);
}

std::string path_csv_string(const CoordinatePath& path,
                            const QuadraticVariation& qv) {
    if (qv.partials.size() != path.values.size())
        throw ConfigError("path_csv_string: path and partial sums disagree in length");
    std::ostringstream out;
    out.precision(17);
    out << "i,t,value,S\n";
    for (std::size_t i = 0; i < path.values.size(); ++i)
        out << i << ',' << path.times[i] << ',' << path.values[i] << ','
            << qv.partials[i] << '\n';
    return out.str();
}

void export_path_csv(const CoordinatePath& path, const QuadraticVariation& qv,
                     const std::string& out_path) {
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) throw FormatError("export_path_csv: cannot open " + out_path);
    out << path_csv_string(path, qv);
    if (!out) throw FormatError("export_path_csv: write failed for " + out_path);
}

}  // namespace spdecpt
