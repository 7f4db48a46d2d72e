///
/// \file commands.hpp
///
/// Subcommands of the experiment runner. Each takes a parsed configuration,
/// writes its tables under the output directory and returns the process
/// exit code.
///
#ifndef MRI_CLI_COMMANDS_HPP
#define MRI_CLI_COMMANDS_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <mri/cli/config.hpp>
#include <mri/cli/io.hpp>
#include <mri/mri.hpp>

namespace mri::cli
{

enum ExitCode : int
{
    exit_ok      = 0,
    exit_config  = 2,
    exit_numeric = 3,
    exit_budget  = 4,
};

struct RunOptions
{
    /// Directory that relative paths inside the config are resolved against.
    std::filesystem::path base_dir = ".";
    std::size_t threads            = 1;
};

/// The full-order side of an experiment, built once from the config.
struct Problem
{
    InnerProduct inner = InnerProduct::euclidean(1);
    FomSolver solve;
    std::optional<AffineOperator> op;
    /// Sorted by distance from the region center.
    std::vector<Complex> true_poles;
    std::optional<CMatrix> matrix;
    CMatrix external;

    Eigen::Index dim() const
    {
        return inner.dim();
    }
};

inline Problem make_problem(const ExperimentConfig& c, const RunOptions& run)
{
    Problem p;
    switch (c.fom.kind)
    {
    case FomKind::NormalEigen:
    {
        auto fom = c.fom.eigenvalues.empty()
                       ? random_normal_fom(c.fom.n, c.fom.box, c.seed)
                       : normal_fom_from_spectrum(c.fom.eigenvalues, c.seed);
        p.inner      = InnerProduct::euclidean(fom.dim());
        p.op         = normal_fom_operator(fom);
        p.true_poles = fom.eigenvalues;
        p.matrix     = fom.a;
        p.solve      = [fom = std::move(fom)](Complex mu) { return solve_fom(fom, mu); };
        break;
    }
    case FomKind::Helmholtz1d:
    {
        auto bar = helmholtz_1d_fom(c.fom.grid_points, c.fom.eta, c.fom.rho, c.fom.stiffness,
                                    c.fom.length);
        p.inner      = c.energy_inner ? bar.energy_inner() : InnerProduct::euclidean(bar.dim());
        p.true_poles = bar.resonances();
        p.op         = bar.op;
        p.solve      = [op = bar.op](Complex mu) { return solve_affine(op, mu); };
        break;
    }
    case FomKind::Meromorphic:
    {
        auto map = random_orthogonal_map(c.fom.poles, c.fom.dim, c.seed, c.fom.norms);
        p.inner      = InnerProduct::euclidean(map.dim());
        p.true_poles = map.poles;
        p.solve      = [map = std::move(map)](Complex mu) { return eval_meromorphic(map, mu); };
        break;
    }
    case FomKind::Snapshots:
    {
        auto path = std::filesystem::path(c.fom.file);
        if (path.is_relative())
        {
            path = run.base_dir / path;
        }
        p.external = read_snapshots(path);
        if (std::size_t(p.external.cols()) != c.fom.nodes.size())
        {
            throw ConfigError("snapshot file has " + std::to_string(p.external.cols()) +
                              " columns but " + std::to_string(c.fom.nodes.size()) +
                              " nodes are listed");
        }
        p.inner = InnerProduct::euclidean(p.external.rows());
        break;
    }
    }
    sort_by_distance(p.true_poles, c.region.center());
    return p;
}

inline SampleSet make_samples(const ExperimentConfig& c, std::size_t count)
{
    if (c.fom.kind == FomKind::Snapshots)
    {
        return SampleSet(c.fom.nodes);
    }
    switch (c.sampling.kind)
    {
    case SamplingKind::Fejer:
        return fejer_nodes(c.region, count);
    case SamplingKind::QuasiRandom:
        return quasi_random_nodes(c.region, count, c.sampling.skip);
    case SamplingKind::Custom:
        if (count > c.sampling.nodes.size())
        {
            throw ConfigError("custom sampling lists " + std::to_string(c.sampling.nodes.size()) +
                              " nodes but S = " + std::to_string(count));
        }
        return SampleSet(std::vector<Complex>(c.sampling.nodes.begin(),
                                              c.sampling.nodes.begin() + std::ptrdiff_t(count)));
    }
    return fejer_nodes(c.region, count);
}

inline PolyBasis make_basis(const ExperimentConfig& c, std::size_t degree)
{
    if (c.chebyshev)
    {
        const auto& s = c.region.as_segment();
        return PolyBasis::chebyshev(s.a, s.b, degree);
    }
    return PolyBasis::monomial(c.region.center(), degree);
}

///
/// Explicit points, or about count points spread uniformly: equispaced on a
/// segment, a square lattice clipped to a disk. Points within the clearance
/// of a pole are dropped.
///
inline std::vector<Complex> make_grid(const Region& region, const GridConfig& g,
                                      const std::vector<Complex>& poles)
{
    std::vector<Complex> raw = g.points;
    if (raw.empty() && g.count > 0)
    {
        if (region.is_disk())
        {
            const auto& d   = region.as_disk();
            const auto side = std::size_t(std::ceil(std::sqrt(4.0 * Real(g.count) / std::numbers::pi)));
            for (std::size_t i = 0; i < side; ++i)
            {
                for (std::size_t k = 0; k < side; ++k)
                {
                    const Complex offset(d.radius * (-1 + 2 * (Real(i) + 0.5) / Real(side)),
                                         d.radius * (-1 + 2 * (Real(k) + 0.5) / Real(side)));
                    if (std::abs(offset) <= d.radius)
                    {
                        raw.push_back(d.center + offset);
                    }
                }
            }
        }
        else
        {
            const auto& s = region.as_segment();
            for (std::size_t k = 0; k < g.count; ++k)
            {
                const Real t = g.count == 1 ? 0.5 : Real(k) / Real(g.count - 1);
                raw.push_back(s.a + (s.b - s.a) * t);
            }
        }
    }
    std::vector<Complex> out;
    for (const auto& mu : raw)
    {
        bool clear = true;
        for (const auto& lambda : poles)
        {
            clear = clear && std::abs(mu - lambda) > g.clearance;
        }
        if (clear)
        {
            out.push_back(mu);
        }
    }
    return out;
}

/// Indices (into problem.true_poles) of the poles reported in the sweep.
inline std::vector<std::size_t> selected_poles(const ExperimentConfig& c, const Problem& p)
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < p.true_poles.size(); ++i)
    {
        const bool take = c.pole_selection == PoleSelection::Inside
                              ? contains(c.region, p.true_poles[i])
                              : i < c.pole_count;
        if (take)
        {
            out.push_back(i);
        }
    }
    return out;
}

inline CMatrix sample_problem(const Problem& p, const SampleSet& samples)
{
    if (p.external.size() > 0)
    {
        return p.external;
    }
    CMatrix out(p.dim(), Eigen::Index(samples.size()));
    for (std::size_t j = 0; j < samples.size(); ++j)
    {
        out.col(Eigen::Index(j)) = p.solve(samples[j]);
    }
    return out;
}

inline RationalInterpolant build_for(const ExperimentConfig& c, const Problem& p, std::size_t s)
{
    const auto samples = make_samples(c, s);
    const auto degree  = c.degree_for(samples.size());
    return build(sample_problem(p, samples), p.inner, samples, {degree, make_basis(c, degree)});
}

inline std::filesystem::path prepare_output(const ExperimentConfig& c)
{
    const std::filesystem::path dir(c.output);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
    {
        throw ConfigError("cannot create output directory " + dir.string());
    }
    return dir;
}

inline std::string complex_text(Complex z)
{
    return fmt(z.real()) + (z.imag() < 0 ? " - " : " + ") + fmt(std::abs(z.imag())) + "i";
}

// ---------------------------------------------------------------------------

inline int cmd_build(const ExperimentConfig& c, const RunOptions& run, std::ostream& log)
{
    const auto problem = make_problem(c, run);
    const auto interp  = build_for(c, problem, c.s_max);
    const auto dir     = prepare_output(c);
    save_interpolant(dir / "interpolant.json", interp, c.energy_inner);

    const auto roots = interp.poles();
    log << "S = " << interp.samples().size() << ", N = " << interp.config().denominator_degree
        << "\nsigma_min = " << fmt(interp.sigma_min()) << ", sigma_gap = " << fmt(interp.sigma_gap())
        << "\npoles (" << roots.finite.size() << " finite, " << roots.infinite << " at infinity):\n";
    auto sorted = roots.finite;
    sort_by_distance(sorted, c.region.center());
    for (const auto& z : sorted)
    {
        log << "  " << complex_text(z) << "\n";
    }
    log << "wrote " << (dir / "interpolant.json").string() << "\n";
    return exit_ok;
}

inline int cmd_nodes(const ExperimentConfig& c, const RunOptions&, std::ostream& log)
{
    const auto samples = make_samples(c, c.s_max);
    const auto dir     = prepare_output(c);
    std::string csv    = "index,re,im\n";
    for (std::size_t j = 0; j < samples.size(); ++j)
    {
        csv += std::to_string(j) + "," + fmt(samples[j].real()) + "," + fmt(samples[j].imag()) + "\n";
    }
    write_text(dir / "nodes.csv", csv);
    log << csv;
    return exit_ok;
}

namespace detail
{

/// Run body(i) for i in [0, count) on up to threads workers.
template <typename Body>
void parallel_for(std::size_t count, std::size_t threads, Body body)
{
    threads = std::max<std::size_t>(1, std::min(threads, count));
    if (threads == 1)
    {
        for (std::size_t i = 0; i < count; ++i)
        {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t)
    {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++)
            {
                body(i);
            }
        });
    }
    for (auto& th : pool)
    {
        th.join();
    }
}

} // namespace detail

///
/// One row per (S, reported pole). A failed build keeps its rows with the
/// numeric columns set to nan. If no pole is reported a single row with
/// pole_index 0 is written per S.
///
inline int cmd_sweep(const ExperimentConfig& c, const RunOptions& run, std::ostream& log)
{
    if (c.fom.kind == FomKind::Snapshots)
    {
        throw ConfigError("sweep needs a solvable fom, not a snapshot file");
    }
    const auto problem = make_problem(c, run);
    const auto dir     = prepare_output(c);
    const auto poles   = selected_poles(c, problem);
    const auto grid    = make_grid(c.region, c.eval_grid, problem.true_poles);
    const auto s_list  = c.s_values();
    const Real nan     = std::numeric_limits<Real>::quiet_NaN();

    // exact solutions on the evaluation grid, shared by every S
    std::vector<Complex> eval_points;
    std::vector<CVector> exact;
    for (const auto& mu : grid)
    {
        try
        {
            exact.push_back(problem.solve(mu));
            eval_points.push_back(mu);
        }
        catch (const Error&)
        {
        }
    }

    std::vector<std::string> rows(s_list.size()), pod_rows(s_list.size());
    std::vector<char> failed(s_list.size(), 0);
    detail::parallel_for(s_list.size(), run.threads, [&](std::size_t k) {
        const auto s      = s_list[k];
        const auto degree = c.degree_for(s);
        const auto start  = std::chrono::steady_clock::now();
        std::optional<RationalInterpolant> interp;
        std::vector<Real> errors(poles.size(), nan);
        Real max_rel = nan;
        try
        {
            interp.emplace(build_for(c, problem, s));
            const auto approx = interp->poles().finite;
            if (!approx.empty())
            {
                std::vector<Complex> truth;
                for (auto i : poles)
                {
                    truth.push_back(problem.true_poles[i]);
                }
                errors = pole_matching_error(truth, approx);
            }
            max_rel = eval_points.empty() ? nan : Real(0);
            for (std::size_t g = 0; g < eval_points.size(); ++g)
            {
                const CVector diff = interp->evaluate(eval_points[g]).value - exact[g];
                const Real rel     = problem.inner.norm(diff) / problem.inner.norm(exact[g]);
                max_rel            = std::isnan(rel) ? rel : std::max(max_rel, rel);
            }
        }
        catch (const Error&)
        {
            interp.reset();
            failed[k] = 1;
        }
        const Real wall = std::chrono::duration<Real, std::milli>(std::chrono::steady_clock::now() -
                                                                  start)
                              .count();
        const std::string sigma = interp ? fmt(interp->sigma_min()) : "nan";
        char wall_text[32];
        std::snprintf(wall_text, sizeof wall_text, "%.3f", wall);

        const std::string prefix = std::to_string(s) + "," + std::to_string(degree) + ",";
        if (poles.empty())
        {
            rows[k] += prefix + "0,nan,nan,nan," + sigma + "," + fmt(max_rel) + "," + wall_text + "\n";
        }
        for (std::size_t i = 0; i < poles.size(); ++i)
        {
            const Complex lambda = problem.true_poles[poles[i]];
            rows[k] += prefix + std::to_string(poles[i] + 1) + "," + fmt(lambda.real()) + "," +
                       fmt(lambda.imag()) + "," + fmt(errors[i]) + "," + sigma + "," +
                       fmt(max_rel) + "," + wall_text + "\n";
        }

        if (c.pod)
        {
            std::vector<Real> pod_errors(poles.size(), nan);
            try
            {
                const auto samples = make_samples(c, s);
                const auto ritz    = pod_pole_baseline(sample_problem(problem, samples),
                                                       problem.inner, degree, *problem.matrix);
                if (!ritz.empty())
                {
                    std::vector<Complex> truth;
                    for (auto i : poles)
                    {
                        truth.push_back(problem.true_poles[i]);
                    }
                    pod_errors = pole_matching_error(truth, ritz);
                }
            }
            catch (const Error&)
            {
            }
            for (std::size_t i = 0; i < poles.size(); ++i)
            {
                const Complex lambda = problem.true_poles[poles[i]];
                pod_rows[k] += prefix + std::to_string(poles[i] + 1) + "," + fmt(lambda.real()) +
                               "," + fmt(lambda.imag()) + "," + fmt(pod_errors[i]) + "\n";
            }
        }
    });

    std::string csv = "S,N,pole_index,true_pole_re,true_pole_im,pole_error,sigma_min,max_rel_err,wall_ms\n";
    for (const auto& r : rows)
    {
        csv += r;
    }
    write_text(dir / "sweep.csv", csv);
    write_text(dir / "sweep.gp",
               "set datafile separator ','\n"
               "set logscale y\n"
               "set xlabel 'S'\n"
               "set ylabel 'pole error'\n"
               "plot 'sweep.csv' every ::1 using 1:6 with points title 'pole error'\n");
    if (c.pod)
    {
        std::string pod = "S,N,pole_index,true_pole_re,true_pole_im,pod_pole_error\n";
        for (const auto& r : pod_rows)
        {
            pod += r;
        }
        write_text(dir / "pod.csv", pod);
    }
    const auto failures = std::size_t(std::count(failed.begin(), failed.end(), 1));
    log << "sweep: " << s_list.size() << " values of S, " << poles.size() << " poles reported, "
        << failures << " failed builds\nwrote " << (dir / "sweep.csv").string() << "\n";
    return !s_list.empty() && failures == s_list.size() ? exit_numeric : exit_ok;
}

///
/// Exact, separable, linear and calibrated residuals on a parameter grid.
///
inline int cmd_estimate(const ExperimentConfig& c, const RunOptions& run, std::ostream& log)
{
    const auto problem = make_problem(c, run);
    if (!problem.op)
    {
        throw ConfigError("estimate needs a fom with an affine operator");
    }
    const auto& op = *problem.op;
    const auto interp = [&] {
        if (c.estimate.interpolant.empty())
        {
            return build_for(c, problem, c.s_max);
        }
        auto path = std::filesystem::path(c.estimate.interpolant);
        if (path.is_relative())
        {
            path = run.base_dir / path;
        }
        return load_interpolant(path, problem.inner);
    }();
    const auto dir       = prepare_output(c);
    const auto grid      = make_grid(c.region, c.estimate.grid, problem.true_poles);
    const auto res_inner = InnerProduct::euclidean(problem.dim());

    Calibration calibration;
    if (c.estimate.calibration)
    {
        calibration.point    = *c.estimate.calibration;
        calibration.constant = calibrate(op, interp, calibration.point, res_inner);
    }
    else
    {
        const auto found = calibrate_at_median(op, interp, grid, res_inner);
        if (!found)
        {
            throw Error(ErrorKind::AtPole, "no grid point is usable for calibration");
        }
        calibration = *found;
    }
    std::optional<LinearResidualEstimator> linear;
    if (op.linear_in_mu)
    {
        linear.emplace(op, interp, res_inner);
    }

    std::string csv = "mu_re,mu_im,exact,separable,linear,calibrated,status\n";
    Real worst = 0;
    for (const auto& mu : grid)
    {
        const Real exact   = residual_direct(op, interp, mu, res_inner);
        const auto sep     = residual_separable(op, interp, mu, res_inner);
        const auto cal     = residual_estimator_calibrated(interp, mu, calibration.constant);
        const Real lin     = linear ? (*linear)(mu).value : std::numeric_limits<Real>::quiet_NaN();
        const char* status = sep.at_node ? "node" : (sep.near_pole ? "near-pole" : "ok");
        if (!sep.at_node && exact > 0)
        {
            worst = std::max(worst, std::abs(cal.value - exact) / exact);
        }
        csv += fmt(mu.real()) + "," + fmt(mu.imag()) + "," + fmt(exact) + "," + fmt(sep.value) +
               "," + fmt(lin) + "," + fmt(cal.value) + "," + status + "\n";
    }
    write_text(dir / "estimate.csv", csv);
    log << "calibrated at " << complex_text(calibration.point) << ", C = "
        << fmt(calibration.constant) << "\nmax relative deviation calibrated vs exact: "
        << fmt(worst) << "\nwrote " << (dir / "estimate.csv").string() << "\n";
    return exit_ok;
}

inline int cmd_greedy(const ExperimentConfig& c, const RunOptions& run, std::ostream& log)
{
    const auto problem = make_problem(c, run);
    if (!problem.op || !problem.solve)
    {
        throw ConfigError("greedy needs a solvable fom with an affine operator");
    }
    const std::size_t start = c.greedy.start > 0 ? c.greedy.start : c.s_min;
    if (start < 2)
    {
        throw ConfigError("greedy needs an initial sample count of at least 2");
    }
    const auto candidates = make_grid(c.region, c.greedy.grid, {});
    GreedyOptions options;
    options.tolerance    = c.greedy.tolerance;
    options.max_samples  = c.greedy.max_samples;
    options.fixed_degree = c.degree;
    options.basis        = make_basis(c, 0);
    const auto res_inner = InnerProduct::euclidean(problem.dim());
    const auto result    = greedy_refine(problem.solve, *problem.op, problem.inner, res_inner,
                                         make_samples(c, start), candidates, options);

    const auto dir  = prepare_output(c);
    std::string csv = "iteration,S,mu_re,mu_im,estimator_max,exact_residual\n";
    for (std::size_t i = 0; i < result.history.size(); ++i)
    {
        const auto& h = result.history[i];
        csv += std::to_string(i) + "," + std::to_string(h.samples) + "," + fmt(h.argmax.real()) +
               "," + fmt(h.argmax.imag()) + "," + fmt(h.estimator_max) + "," +
               fmt(h.exact_residual) + "\n";
    }
    write_text(dir / "greedy_history.csv", csv);
    save_interpolant(dir / "greedy_interpolant.json", result.interpolant, c.energy_inner);
    log << "greedy: " << result.history.size() << " iterations, final S = "
        << result.interpolant.samples().size() << ", estimator max = "
        << fmt(result.history.back().estimator_max)
        << (result.converged ? " (converged)" : " (sample budget exhausted)") << "\nwrote "
        << (dir / "greedy_history.csv").string() << "\n";
    return result.budget_exhausted ? exit_budget : exit_ok;
}

} // namespace mri::cli

#endif /* MRI_CLI_COMMANDS_HPP */
