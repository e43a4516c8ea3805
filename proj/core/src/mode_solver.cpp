#include "lnspdc/mode_solver.hpp"

#include "lnspdc/errors.hpp"
#include "lnspdc/manifest.hpp"
#include "lnspdc/units.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

namespace lnspdc {

namespace {

// Semivectorial 5-point operator. In the direction normal to the dominant E
// component the coupling enforces continuity of εE across cell interfaces:
//   coupling P->Q = 2 ε_Q / ((ε_P + ε_Q) h²),
// which reduces to the plain Laplacian when ε is uniform. The tangential
// direction keeps the plain stencil. Dirichlet zero outside the window.
Eigen::SparseMatrix<double> assemble(const IndexMap& map, Polarization pol, double k0) {
    const int nx = map.nx, ny = map.ny;
    const double idx2 = 1.0 / (map.dx_um * map.dx_um);
    const double idy2 = 1.0 / (map.dy_um * map.dy_um);
    const double k02 = k0 * k0;

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(nx) * ny * 5);

    auto node = [nx](int i, int j) { return j * nx + i; };

    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double ep = map.at(i, j);
            double diag = k02 * ep;

            // x direction
            if (pol == Polarization::TE) {
                const double ee = (i + 1 < nx) ? map.at(i + 1, j) : ep;
                const double ew = (i > 0) ? map.at(i - 1, j) : ep;
                if (i + 1 < nx) trip.emplace_back(node(i, j), node(i + 1, j), 2.0 * ee / (ep + ee) * idx2);
                if (i > 0) trip.emplace_back(node(i, j), node(i - 1, j), 2.0 * ew / (ep + ew) * idx2);
                diag -= 2.0 * ep / (ep + ee) * idx2;
                diag -= 2.0 * ep / (ep + ew) * idx2;
            } else {
                if (i + 1 < nx) trip.emplace_back(node(i, j), node(i + 1, j), idx2);
                if (i > 0) trip.emplace_back(node(i, j), node(i - 1, j), idx2);
                diag -= 2.0 * idx2;
            }

            // y direction
            if (pol == Polarization::TM) {
                const double en = (j + 1 < ny) ? map.at(i, j + 1) : ep;
                const double es = (j > 0) ? map.at(i, j - 1) : ep;
                if (j + 1 < ny) trip.emplace_back(node(i, j), node(i, j + 1), 2.0 * en / (ep + en) * idy2);
                if (j > 0) trip.emplace_back(node(i, j), node(i, j - 1), 2.0 * es / (ep + es) * idy2);
                diag -= 2.0 * ep / (ep + en) * idy2;
                diag -= 2.0 * ep / (ep + es) * idy2;
            } else {
                if (j + 1 < ny) trip.emplace_back(node(i, j), node(i, j + 1), idy2);
                if (j > 0) trip.emplace_back(node(i, j), node(i, j - 1), idy2);
                diag -= 2.0 * idy2;
            }

            trip.emplace_back(node(i, j), node(i, j), diag);
        }
    }

    Eigen::SparseMatrix<double> A(nx * ny, nx * ny);
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();
    return A;
}

// Deterministic start vector: Gaussian bump over the ridge plus a small
// LCG-seeded component so higher (odd) modes are reachable.
Eigen::VectorXd start_vector(const IndexMap& map, const WaveguideGeometry& g) {
    const int nx = map.nx, ny = map.ny;
    Eigen::VectorXd v(static_cast<Eigen::Index>(nx) * ny);
    const double yc = (g.film_thickness_nm - 0.5 * g.etch_depth_nm) * 1e-3; // ridge vertical center
    const double rx = std::max(g.top_width_nm * 1e-3, 0.5);
    const double ry = std::max(g.film_thickness_nm * 1e-3, 0.3);
    std::uint64_t state = 0x9e3779b97f4a7c15ull;
    for (int j = 0; j < ny; ++j) {
        const double y = map.y0_um + j * map.dy_um;
        for (int i = 0; i < nx; ++i) {
            const double x = map.x0_um + i * map.dx_um;
            state = state * 6364136223846793005ull + 1442695040888963407ull;
            const double jitter = static_cast<double>(state >> 11) * 0x1p-53 - 0.5;
            const double bump = std::exp(-(x * x) / (rx * rx) - (y - yc) * (y - yc) / (ry * ry));
            v[static_cast<Eigen::Index>(j) * nx + i] = bump * (1.0 + 0.2 * jitter) + 1e-3 * jitter;
        }
    }
    v.normalize();
    return v;
}

struct RitzPair {
    double beta2;
    Eigen::VectorXd vec;
    double residual;
};

// Shift-invert Arnoldi around σ slightly above k0²·ε_core: the eigenvalues
// of (A − σI)⁻¹ nearest σ are the largest β². Nonsymmetric because the
// semivectorial stencil is; the Hessenberg eigenproblem is dense and small.
std::vector<RitzPair> shift_invert_arnoldi(const Eigen::SparseMatrix<double>& A, double sigma,
                                           const Eigen::VectorXd& v0, int n_want, int m_max,
                                           double tol) {
    const Eigen::Index n = A.rows();
    Eigen::SparseMatrix<double> M = A;
    for (Eigen::Index k = 0; k < n; ++k) M.coeffRef(k, k) -= sigma;
    M.makeCompressed();

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(M);
    if (lu.info() != Eigen::Success)
        throw ConvergenceError("shift-invert factorization failed");

    m_max = static_cast<int>(std::min<Eigen::Index>(m_max, n - 1));
    Eigen::MatrixXd V(n, m_max + 1);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m_max + 1, m_max);
    V.col(0) = v0.normalized();

    // Extracts converged real Ritz pairs from the leading m×m block,
    // largest |mu| (= closest to sigma) first.
    auto extract = [&](int m) {
        std::vector<RitzPair> pairs;
        Eigen::EigenSolver<Eigen::MatrixXd> es(H.topLeftCorner(m, m));
        if (es.info() != Eigen::Success) return pairs;
        const auto& mu = es.eigenvalues();
        const auto& y = es.eigenvectors();
        std::vector<int> order(m);
        for (int q = 0; q < m; ++q) order[q] = q;
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return std::abs(mu[a]) > std::abs(mu[b]); });
        for (int q = 0; q < m && static_cast<int>(pairs.size()) < n_want; ++q) {
            const auto muq = mu[order[q]];
            if (std::abs(muq.imag()) > 1e-10 * std::abs(muq)) continue;
            const double res = H(m, m - 1) * std::abs(y(m - 1, order[q])) / std::abs(muq);
            if (res > tol) continue;
            Eigen::VectorXd phi = Eigen::VectorXd::Zero(n);
            for (int l = 0; l < m; ++l) phi += y(l, order[q]).real() * V.col(l);
            phi.normalize();
            pairs.push_back({sigma + 1.0 / muq.real(), phi, res});
        }
        return pairs;
    };

    std::vector<RitzPair> out;
    for (int k = 0; k < m_max; ++k) {
        Eigen::VectorXd w = lu.solve(V.col(k));
        // two-pass modified Gram-Schmidt
        for (int pass = 0; pass < 2; ++pass) {
            for (int l = 0; l <= k; ++l) {
                const double h = V.col(l).dot(w);
                if (pass == 0)
                    H(l, k) = h;
                else
                    H(l, k) += h;
                w -= h * V.col(l);
            }
        }
        const double hnext = w.norm();
        H(k + 1, k) = hnext;
        const int m = k + 1;

        if (hnext < 1e-12 * std::abs(H(0, 0) + 1.0)) {
            // invariant subspace: everything representable has converged
            out = extract(m);
            break;
        }
        V.col(k + 1) = w / hnext;

        const bool last = (m == m_max);
        if (!last && (m < n_want + 2 || m % 5 != 0)) continue;
        out = extract(m);
        if (static_cast<int>(out.size()) >= n_want || last) break;
        out.clear();
    }
    return out;
}

std::vector<ModeSolution> solve_polarization(const WaveguideGeometry& g,
                                             const MaterialCatalog& materials, Polarization pol,
                                             double lambda_um, int n_modes, const GridSpec& grid,
                                             double n_slab_max) {
    const IndexMap map = rasterize(g, materials, pol, lambda_um, grid);
    const double k0 = 2.0 * units::pi / lambda_um;
    const double ridge_cells = g.top_width_nm / grid.dx_nm;
    if (ridge_cells < 10.0)
        throw ConfigError("grid resolution must span the ridge with >= 10 cells");

    const Eigen::SparseMatrix<double> A = assemble(map, pol, k0);
    const double sigma = k0 * k0 * map.eps_core * 1.002;
    const Eigen::VectorXd v0 = start_vector(map, g);

    auto pairs = shift_invert_arnoldi(A, sigma, v0, n_modes, 100, 1e-9);

    std::vector<ModeSolution> out;
    const double cell_area = map.dx_um * map.dy_um;
    for (auto& p : pairs) {
        if (p.beta2 <= 0.0 || p.beta2 >= sigma) continue;
        const double n_eff = std::sqrt(p.beta2) / k0;
        if (n_eff >= map.n_core) continue;

        // explicit residual check, never a silent partial answer
        const double res = (A * p.vec - p.beta2 * p.vec).norm() / (std::abs(p.beta2) * p.vec.norm());
        if (res > 1e-7)
            throw ConvergenceError("eigenmode residual " + std::to_string(res) +
                                   " above tolerance at lambda " + std::to_string(lambda_um));

        ModeSolution m;
        m.n_eff = n_eff;
        m.lambda_um = lambda_um;
        m.pol = pol;
        m.te_fraction = (pol == Polarization::TE) ? 1.0 : 0.0;
        m.nx = map.nx;
        m.ny = map.ny;
        m.dx_um = map.dx_um;
        m.dy_um = map.dy_um;
        m.x0_um = map.x0_um;
        m.y0_um = map.y0_um;
        m.n_core = map.n_core;
        m.n_slab_max = n_slab_max;
        m.guided = (n_eff > n_slab_max) && (n_eff < map.n_core);
        m.residual = res;

        // fix sign (peak positive) and normalize Σ|f|² dA = 1
        Eigen::Index imax;
        p.vec.cwiseAbs().maxCoeff(&imax);
        if (p.vec[imax] < 0.0) p.vec = -p.vec;
        const double norm2 = p.vec.squaredNorm() * cell_area;
        p.vec /= std::sqrt(norm2);
        m.field.assign(p.vec.data(), p.vec.data() + p.vec.size());

        double peak = 0.0, edge = 0.0;
        for (int j = 0; j < map.ny; ++j)
            for (int i = 0; i < map.nx; ++i) {
                const double a = std::abs(m.field[static_cast<std::size_t>(j) * map.nx + i]);
                peak = std::max(peak, a);
                if (i == 0 || j == 0 || i == map.nx - 1 || j == map.ny - 1) edge = std::max(edge, a);
            }
        m.boundary_field_ratio = peak > 0.0 ? edge / peak : 0.0;
        m.a_eff_um2 = effective_area(m);
        out.push_back(std::move(m));
    }
    std::sort(out.begin(), out.end(),
              [](const ModeSolution& a, const ModeSolution& b) { return a.n_eff > b.n_eff; });
    return out;
}

} // namespace

bool ModeSolution::same_grid(const ModeSolution& o, double tol) const {
    return nx == o.nx && ny == o.ny && std::abs(dx_um - o.dx_um) < tol &&
           std::abs(dy_um - o.dy_um) < tol && std::abs(x0_um - o.x0_um) < tol &&
           std::abs(y0_um - o.y0_um) < tol;
}

double lateral_slab_cutoff(const WaveguideGeometry& g, const MaterialCatalog& materials,
                           Polarization pol, double lambda_um) {
    const double n_ox = materials.at(g.oxide_material).index(lambda_um);
    const double n_clad = materials.at(g.cladding_material).index(lambda_um);
    const double t_slab = g.slab_thickness_nm() * 1e-3;
    double best = std::max(n_ox, n_clad);
    if (t_slab <= 0.0) return best;
    const std::string& core = (pol == Polarization::TE) ? g.core_te_material : g.core_tm_material;
    SlabStack stack{{n_ox, materials.at(core).index(lambda_um), n_clad}, {t_slab}};
    const auto modes = slab_modes(stack, pol, lambda_um);
    return modes.empty() ? best : std::max(best, modes.front());
}

double lateral_slab_max_index(const WaveguideGeometry& g, const MaterialCatalog& materials,
                              double lambda_um) {
    return std::max(lateral_slab_cutoff(g, materials, Polarization::TE, lambda_um),
                    lateral_slab_cutoff(g, materials, Polarization::TM, lambda_um));
}

std::vector<ModeSolution> solve_modes(const WaveguideGeometry& g, const MaterialCatalog& materials,
                                      double lambda_um, int n_modes, const GridSpec& grid,
                                      std::string* diagnostic) {
    if (n_modes < 1) throw ConfigError("n_modes must be >= 1");
    const double n_slab_max = lateral_slab_max_index(g, materials, lambda_um);

    std::vector<ModeSolution> all;
    for (Polarization pol : {Polarization::TE, Polarization::TM}) {
        auto part = solve_polarization(g, materials, pol, lambda_um, n_modes, grid, n_slab_max);
        all.insert(all.end(), std::make_move_iterator(part.begin()),
                   std::make_move_iterator(part.end()));
    }
    std::sort(all.begin(), all.end(),
              [](const ModeSolution& a, const ModeSolution& b) { return a.n_eff > b.n_eff; });
    if (static_cast<int>(all.size()) > n_modes) all.resize(n_modes);

    std::vector<ModeSolution> guided;
    for (auto& m : all)
        if (m.guided) guided.push_back(std::move(m));
    if (guided.empty() && diagnostic) {
        std::ostringstream msg;
        msg << "no guided mode at lambda = " << lambda_um << " um (slab cutoff n = " << n_slab_max
            << "); window or geometry may not confine a mode";
        *diagnostic = msg.str();
    }
    return guided;
}

ModeSolution fundamental_te(const WaveguideGeometry& g, const MaterialCatalog& materials,
                            double lambda_um, const GridSpec& grid) {
    const double n_slab_max = lateral_slab_max_index(g, materials, lambda_um);
    auto modes = solve_polarization(g, materials, Polarization::TE, lambda_um, 3, grid, n_slab_max);
    // Laterally confined relative to its own polarization's slab: a mode
    // below the TM slab line is leaky, not absent (that is exactly what the
    // leakage margin measures), so only the TE cutoff gates here.
    const double te_cutoff = lateral_slab_cutoff(g, materials, Polarization::TE, lambda_um);
    for (auto& m : modes)
        if (m.n_eff > te_cutoff) return std::move(m);
    throw NumericError("no laterally confined fundamental TE mode at lambda = " +
                       std::to_string(lambda_um) + " um");
}

double effective_area(const ModeSolution& m) {
    const double dA = m.dx_um * m.dy_um;
    double s2 = 0.0, s4 = 0.0;
    for (double f : m.field) {
        const double f2 = f * f;
        s2 += f2;
        s4 += f2 * f2;
    }
    s2 *= dA;
    s4 *= dA;
    if (s4 <= 0.0) throw NumericError("effective_area: degenerate all-zero field");
    return s2 * s2 / s4;
}

double mode_overlap(const ModeSolution& a, const ModeSolution& b) {
    if (!a.same_grid(b)) throw NumericError("mode_overlap: modes live on different grids");
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t k = 0; k < a.field.size(); ++k) {
        sab += std::abs(a.field[k] * b.field[k]);
        saa += a.field[k] * a.field[k];
        sbb += b.field[k] * b.field[k];
    }
    if (saa <= 0.0 || sbb <= 0.0) throw NumericError("mode_overlap: degenerate field");
    return sab * sab / (saa * sbb);
}

LeakageReport leakage_margin(const WaveguideGeometry& g, const MaterialCatalog& materials,
                             double lambda_um, const GridSpec& grid) {
    LeakageReport rep;
    rep.slab_thickness_nm = g.slab_thickness_nm();
    const ModeSolution te = fundamental_te(g, materials, lambda_um, grid);
    rep.te_ridge_n_eff = te.n_eff;

    const double n_ox = materials.at(g.oxide_material).index(lambda_um);
    const double n_clad = materials.at(g.cladding_material).index(lambda_um);
    const double n_tm_core = materials.at(g.core_tm_material).index(lambda_um);

    const double t_slab = g.slab_thickness_nm() * 1e-3;
    if (t_slab > 0.0) {
        SlabStack stack{{n_ox, n_tm_core, n_clad}, {t_slab}};
        const auto modes = slab_modes(stack, Polarization::TM, lambda_um);
        if (!modes.empty()) {
            rep.slab_mode_exists = true;
            rep.tm_slab_n_eff = modes.front();
        }
    }
    SlabStack full{{n_ox, n_tm_core, n_clad}, {g.film_thickness_nm * 1e-3}};
    const auto full_modes = slab_modes(full, Polarization::TM, lambda_um);
    if (!full_modes.empty()) rep.tm_slab_full_film_n_eff = full_modes.front();

    if (rep.slab_mode_exists)
        rep.margin = rep.te_ridge_n_eff - *rep.tm_slab_n_eff;
    else
        rep.margin = rep.te_ridge_n_eff - std::max(n_ox, n_clad); // vs material cutoff, flagged
    return rep;
}

std::vector<std::string> export_mode(const ModeSolution& m, const std::string& basename) {
    const std::string csv_path = basename + ".csv";
    const std::string json_path = basename + ".json";

    std::ostringstream csv;
    csv.precision(9);
    for (int j = 0; j < m.ny; ++j) {
        for (int i = 0; i < m.nx; ++i) {
            if (i) csv << ',';
            csv << m.field[static_cast<std::size_t>(j) * m.nx + i];
        }
        csv << '\n';
    }
    atomic_write_file(csv_path, csv.str());

    nlohmann::json meta{{"lambda_um", m.lambda_um},
                        {"n_eff", m.n_eff},
                        {"a_eff_um2", m.a_eff_um2},
                        {"polarization", m.pol == Polarization::TE ? "TE" : "TM"},
                        {"te_fraction", m.te_fraction},
                        {"guided", m.guided},
                        {"grid", {{"nx", m.nx}, {"ny", m.ny}, {"dx_um", m.dx_um}, {"dy_um", m.dy_um},
                                  {"x0_um", m.x0_um}, {"y0_um", m.y0_um}}},
                        {"n_core", m.n_core},
                        {"n_slab_max", m.n_slab_max},
                        {"boundary_field_ratio", m.boundary_field_ratio}};
    atomic_write_file(json_path, meta.dump(2) + "\n");
    return {csv_path, json_path};
}

} // namespace lnspdc
