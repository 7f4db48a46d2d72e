///
/// \file config.hpp
///
/// Experiment configuration for the command-line runner: a single JSON
/// document describing the full-order model, the parameter region, how the
/// samples are placed and which (S, N) pairs to build.
///
#ifndef MRI_CLI_CONFIG_HPP
#define MRI_CLI_CONFIG_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include <mri/sampling.hpp>

namespace mri::cli
{

using nlohmann::json;

/// Bad or inconsistent configuration; maps to exit code 2.
class ConfigError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

enum class FomKind
{
    NormalEigen,
    Helmholtz1d,
    Meromorphic,
    Snapshots,
};

struct FomConfig
{
    FomKind kind = FomKind::NormalEigen;

    // normal-eigen: random spectrum in [-box, box]^2 unless eigenvalues is given
    std::int64_t n = 100;
    Real box       = 5;
    std::vector<Complex> eigenvalues;

    // helmholtz-1d
    std::int64_t grid_points = 101;
    Real eta                 = 0;
    Real rho                 = 1;
    Real length              = 1;
    std::vector<Real> stiffness{1.0};

    // meromorphic (orthogonal residues)
    std::vector<Complex> poles;
    std::int64_t dim = 0;
    std::vector<Real> norms;

    // snapshots: external binary container plus its nodes
    std::string file;
    std::vector<Complex> nodes;

    bool operator==(const FomConfig&) const = default;
};

enum class SamplingKind
{
    Fejer,
    QuasiRandom,
    Custom,
};

struct SamplingConfig
{
    SamplingKind kind = SamplingKind::Fejer;
    std::uint64_t skip = 0;
    std::vector<Complex> nodes;

    bool operator==(const SamplingConfig&) const = default;
};

/// Explicit points, or count points laid out uniformly over the region.
struct GridConfig
{
    std::size_t count = 0;
    std::vector<Complex> points;
    /// Grid points closer than this to a true pole are dropped.
    Real clearance = 0;

    bool operator==(const GridConfig&) const = default;
};

enum class PoleSelection
{
    Inside,
    Closest,
};

struct EstimateConfig
{
    GridConfig grid{201, {}, 0};
    std::optional<Complex> calibration;
    /// Interpolant artifact to estimate; empty builds one at the largest S.
    std::string interpolant;

    bool operator==(const EstimateConfig&) const = default;
};

struct GreedyConfig
{
    Real tolerance          = 1e-6;
    std::size_t max_samples = 40;
    /// Initial sample count; 0 takes the first S of the range.
    std::size_t start = 0;
    GridConfig grid{400, {}, 0};

    bool operator==(const GreedyConfig&) const = default;
};

struct ExperimentConfig
{
    FomConfig fom;
    Region region = Region::disk(0, 1);
    SamplingConfig sampling;
    std::size_t s_min = 1;
    std::size_t s_max = 1;
    /// Empty means N = S - 1.
    std::optional<std::size_t> degree;
    bool chebyshev = false;
    bool energy_inner = false;
    std::uint64_t seed = 0;
    std::string output = "out";
    PoleSelection pole_selection = PoleSelection::Inside;
    std::size_t pole_count = 0;
    bool pod = false;
    GridConfig eval_grid{100, {}, 0.05};
    EstimateConfig estimate;
    GreedyConfig greedy;

    bool operator==(const ExperimentConfig&) const = default;

    std::vector<std::size_t> s_values() const
    {
        std::vector<std::size_t> out;
        for (std::size_t s = s_min; s <= s_max && s_min <= s_max; ++s)
        {
            out.push_back(s);
        }
        return out;
    }

    std::size_t degree_for(std::size_t s) const
    {
        return degree ? *degree : (s == 0 ? 0 : s - 1);
    }
};

namespace detail
{

inline Complex complex_from(const json& j, const char* what)
{
    if (j.is_number())
    {
        return {j.get<Real>(), 0};
    }
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    {
        return {j[0].get<Real>(), j[1].get<Real>()};
    }
    throw ConfigError(std::string(what) + ": expected a number or [re, im]");
}

inline json complex_to(Complex z)
{
    return json::array({z.real(), z.imag()});
}

inline std::vector<Complex> complex_list(const json& j, const char* what)
{
    if (!j.is_array())
    {
        throw ConfigError(std::string(what) + ": expected a list");
    }
    std::vector<Complex> out;
    for (const auto& item : j)
    {
        out.push_back(complex_from(item, what));
    }
    return out;
}

inline json complex_list_to(const std::vector<Complex>& values)
{
    json out = json::array();
    for (const auto& z : values)
    {
        out.push_back(complex_to(z));
    }
    return out;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback)
{
    if (!j.contains(key))
    {
        return fallback;
    }
    try
    {
        return j.at(key).get<T>();
    }
    catch (const json::exception&)
    {
        throw ConfigError(std::string("field '") + key + "' has the wrong type");
    }
}

inline std::string require_string(const json& j, const char* key, const char* where)
{
    if (!j.contains(key) || !j.at(key).is_string())
    {
        throw ConfigError(std::string(where) + " needs a string field '" + key + "'");
    }
    return j.at(key).get<std::string>();
}

inline std::size_t non_negative(const json& j, const char* key, std::size_t fallback)
{
    if (!j.contains(key))
    {
        return fallback;
    }
    const auto& v = j.at(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
    {
        throw ConfigError(std::string("field '") + key + "' must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

inline void check_keys(const json& j, const std::vector<std::string>& allowed, const char* where)
{
    for (const auto& [key, value] : j.items())
    {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
        {
            throw ConfigError(std::string("unknown field '") + key + "' in " + where);
        }
    }
}

inline FomConfig fom_from(const json& j)
{
    if (!j.is_object())
    {
        throw ConfigError("'fom' must be an object");
    }
    FomConfig f;
    const auto type = require_string(j, "type", "fom");
    if (type == "normal-eigen")
    {
        check_keys(j, {"type", "n", "box", "eigenvalues"}, "fom");
        f.kind = FomKind::NormalEigen;
        f.n    = get_or<std::int64_t>(j, "n", 100);
        f.box  = get_or<Real>(j, "box", 5);
        if (j.contains("eigenvalues"))
        {
            f.eigenvalues = complex_list(j.at("eigenvalues"), "fom.eigenvalues");
            f.n           = std::int64_t(f.eigenvalues.size());
        }
        if (f.n < 1 || !(f.box > 0))
        {
            throw ConfigError("normal-eigen needs n >= 1 and box > 0");
        }
    }
    else if (type == "helmholtz-1d")
    {
        check_keys(j, {"type", "grid_points", "eta", "rho", "length", "stiffness"}, "fom");
        f.kind        = FomKind::Helmholtz1d;
        f.grid_points = get_or<std::int64_t>(j, "grid_points", 101);
        f.eta         = get_or<Real>(j, "eta", 0);
        f.rho         = get_or<Real>(j, "rho", 1);
        f.length      = get_or<Real>(j, "length", 1);
        if (j.contains("stiffness"))
        {
            const auto& s = j.at("stiffness");
            f.stiffness   = s.is_number() ? std::vector<Real>{s.get<Real>()}
                                          : get_or<std::vector<Real>>(j, "stiffness", {});
        }
        if (f.grid_points < 3 || !(f.rho > 0) || !(f.length > 0) || f.stiffness.empty())
        {
            throw ConfigError("helmholtz-1d needs grid_points >= 3, rho > 0, length > 0");
        }
        if (f.stiffness.size() != 1 && std::int64_t(f.stiffness.size()) != f.grid_points - 1)
        {
            throw ConfigError("helmholtz-1d stiffness needs 1 or grid_points - 1 values");
        }
    }
    else if (type == "meromorphic")
    {
        check_keys(j, {"type", "poles", "dim", "norms"}, "fom");
        f.kind = FomKind::Meromorphic;
        if (!j.contains("poles"))
        {
            throw ConfigError("meromorphic fom needs 'poles'");
        }
        f.poles = complex_list(j.at("poles"), "fom.poles");
        f.dim   = get_or<std::int64_t>(j, "dim", std::int64_t(f.poles.size()));
        f.norms = get_or<std::vector<Real>>(j, "norms", {});
        if (f.poles.empty() || f.dim < std::int64_t(f.poles.size()))
        {
            throw ConfigError("meromorphic fom needs at least one pole and dim >= pole count");
        }
        if (!f.norms.empty() && f.norms.size() != f.poles.size())
        {
            throw ConfigError("meromorphic fom needs one norm per pole");
        }
    }
    else if (type == "snapshots")
    {
        check_keys(j, {"type", "file", "nodes"}, "fom");
        f.kind  = FomKind::Snapshots;
        f.file  = require_string(j, "file", "snapshots fom");
        if (!j.contains("nodes"))
        {
            throw ConfigError("snapshots fom needs 'nodes'");
        }
        f.nodes = complex_list(j.at("nodes"), "fom.nodes");
    }
    else
    {
        throw ConfigError("unknown fom type '" + type + "'");
    }
    return f;
}

inline json fom_to(const FomConfig& f)
{
    switch (f.kind)
    {
    case FomKind::NormalEigen:
    {
        json j{{"type", "normal-eigen"}, {"n", f.n}, {"box", f.box}};
        if (!f.eigenvalues.empty())
        {
            j["eigenvalues"] = complex_list_to(f.eigenvalues);
        }
        return j;
    }
    case FomKind::Helmholtz1d:
        return {{"type", "helmholtz-1d"}, {"grid_points", f.grid_points}, {"eta", f.eta},
                {"rho", f.rho}, {"length", f.length}, {"stiffness", f.stiffness}};
    case FomKind::Meromorphic:
    {
        json j{{"type", "meromorphic"}, {"poles", complex_list_to(f.poles)}, {"dim", f.dim}};
        if (!f.norms.empty())
        {
            j["norms"] = f.norms;
        }
        return j;
    }
    case FomKind::Snapshots:
        return {{"type", "snapshots"}, {"file", f.file}, {"nodes", complex_list_to(f.nodes)}};
    }
    return {};
}

inline Region region_from(const json& j)
{
    if (!j.is_object())
    {
        throw ConfigError("'region' must be an object");
    }
    const auto type = require_string(j, "type", "region");
    try
    {
        if (type == "disk")
        {
            check_keys(j, {"type", "center", "radius"}, "region");
            const Complex c = j.contains("center") ? complex_from(j.at("center"), "region.center")
                                                   : Complex(0);
            return Region::disk(c, get_or<Real>(j, "radius", 1));
        }
        if (type == "segment")
        {
            check_keys(j, {"type", "a", "b"}, "region");
            if (!j.contains("a") || !j.contains("b"))
            {
                throw ConfigError("segment region needs 'a' and 'b'");
            }
            return Region::segment(complex_from(j.at("a"), "region.a"),
                                   complex_from(j.at("b"), "region.b"));
        }
    }
    catch (const Error& e)
    {
        throw ConfigError(std::string("region: ") + e.what());
    }
    throw ConfigError("unknown region type '" + type + "'");
}

inline json region_to(const Region& r)
{
    if (r.is_disk())
    {
        return {{"type", "disk"}, {"center", complex_to(r.as_disk().center)},
                {"radius", r.as_disk().radius}};
    }
    return {{"type", "segment"}, {"a", complex_to(r.as_segment().a)},
            {"b", complex_to(r.as_segment().b)}};
}

inline GridConfig grid_from(const json& j, GridConfig fallback)
{
    if (j.is_number_integer())
    {
        fallback.count  = j.get<std::size_t>();
        fallback.points = {};
        return fallback;
    }
    if (!j.is_object())
    {
        throw ConfigError("grid must be a count or an object");
    }
    check_keys(j, {"count", "points", "clearance"}, "grid");
    GridConfig g;
    g.count     = non_negative(j, "count", j.contains("points") ? 0 : fallback.count);
    g.clearance = get_or<Real>(j, "clearance", fallback.clearance);
    if (j.contains("points"))
    {
        g.points = complex_list(j.at("points"), "grid.points");
    }
    return g;
}

inline json grid_to(const GridConfig& g)
{
    json j{{"count", g.count}, {"clearance", g.clearance}};
    if (!g.points.empty())
    {
        j["points"] = complex_list_to(g.points);
    }
    return j;
}

} // namespace detail

///
/// Parse and validate. Unknown fields are rejected so that a typo cannot
/// silently fall back to a default.
///
inline ExperimentConfig config_from_json(const json& j)
{
    using namespace detail;
    if (!j.is_object())
    {
        throw ConfigError("configuration must be a JSON object");
    }
    check_keys(j,
               {"fom", "region", "sampling", "S", "S_range", "N", "basis", "inner", "seed",
                "output", "poles", "pod", "eval_grid", "estimate", "greedy"},
               "configuration");
    ExperimentConfig c;
    if (!j.contains("fom"))
    {
        throw ConfigError("configuration needs a 'fom' section");
    }
    c.fom = fom_from(j.at("fom"));
    if (j.contains("region"))
    {
        c.region = region_from(j.at("region"));
    }

    if (j.contains("sampling"))
    {
        const auto& s = j.at("sampling");
        const auto type = s.is_string() ? s.get<std::string>() : require_string(s, "type", "sampling");
        if (s.is_object())
        {
            check_keys(s, {"type", "skip", "nodes"}, "sampling");
        }
        if (type == "fejer")
        {
            c.sampling.kind = SamplingKind::Fejer;
        }
        else if (type == "quasi-random")
        {
            c.sampling.kind = SamplingKind::QuasiRandom;
            c.sampling.skip = s.is_object() ? non_negative(s, "skip", 0) : 0;
        }
        else if (type == "custom")
        {
            c.sampling.kind = SamplingKind::Custom;
            if (!s.is_object() || !s.contains("nodes"))
            {
                throw ConfigError("custom sampling needs 'nodes'");
            }
            c.sampling.nodes = complex_list(s.at("nodes"), "sampling.nodes");
        }
        else
        {
            throw ConfigError("unknown sampling type '" + type + "'");
        }
    }

    if (j.contains("S") && j.contains("S_range"))
    {
        throw ConfigError("give either 'S' or 'S_range', not both");
    }
    if (c.fom.kind == FomKind::Snapshots)
    {
        c.s_min = c.s_max = c.fom.nodes.size();
    }
    if (j.contains("S"))
    {
        c.s_min = c.s_max = non_negative(j, "S", 1);
        if (c.s_min == 0)
        {
            throw ConfigError("S must be >= 1");
        }
    }
    else if (j.contains("S_range"))
    {
        const auto& r = j.at("S_range");
        if (!r.is_array() || r.size() != 2 || !r[0].is_number_integer() ||
            !r[1].is_number_integer() || r[0].get<std::int64_t>() < 1 ||
            r[1].get<std::int64_t>() < 0)
        {
            throw ConfigError("S_range must be [first, last] with first >= 1");
        }
        c.s_min = r[0].get<std::size_t>();
        c.s_max = r[1].get<std::size_t>();
    }

    if (j.contains("N"))
    {
        const auto& n = j.at("N");
        if (n.is_string())
        {
            if (n.get<std::string>() != "S-1")
            {
                throw ConfigError("N must be a non-negative integer or \"S-1\"");
            }
        }
        else
        {
            c.degree = non_negative(j, "N", 0);
        }
    }
    if (c.degree)
    {
        for (auto s : c.s_values())
        {
            if (*c.degree > s - 1)
            {
                throw ConfigError("N = " + std::to_string(*c.degree) +
                                  " violates N <= S - 1 for S = " + std::to_string(s));
            }
        }
    }

    const auto basis = get_or<std::string>(j, "basis", "monomial");
    if (basis != "monomial" && basis != "chebyshev")
    {
        throw ConfigError("basis must be \"monomial\" or \"chebyshev\"");
    }
    c.chebyshev = basis == "chebyshev";
    if (c.chebyshev && c.region.is_disk())
    {
        throw ConfigError("the chebyshev basis needs a segment region");
    }
    const auto inner = get_or<std::string>(j, "inner", "euclidean");
    if (inner != "euclidean" && inner != "energy")
    {
        throw ConfigError("inner must be \"euclidean\" or \"energy\"");
    }
    c.energy_inner = inner == "energy";
    if (c.energy_inner && c.fom.kind != FomKind::Helmholtz1d)
    {
        throw ConfigError("the energy inner product is only defined for helmholtz-1d");
    }
    c.seed   = get_or<std::uint64_t>(j, "seed", 0);
    c.output = get_or<std::string>(j, "output", "out");
    c.pod    = get_or<bool>(j, "pod", false);
    if (c.pod && c.fom.kind != FomKind::NormalEigen)
    {
        throw ConfigError("the POD baseline needs a normal-eigen fom");
    }

    if (j.contains("poles"))
    {
        const auto& p = j.at("poles");
        check_keys(p, {"select", "count"}, "poles");
        const auto select = get_or<std::string>(p, "select", "inside");
        if (select == "inside")
        {
            c.pole_selection = PoleSelection::Inside;
        }
        else if (select == "closest")
        {
            c.pole_selection = PoleSelection::Closest;
            c.pole_count     = non_negative(p, "count", 1);
        }
        else
        {
            throw ConfigError("poles.select must be \"inside\" or \"closest\"");
        }
    }
    if (j.contains("eval_grid"))
    {
        c.eval_grid = grid_from(j.at("eval_grid"), c.eval_grid);
    }
    if (j.contains("estimate"))
    {
        const auto& e = j.at("estimate");
        check_keys(e, {"grid", "calibration", "interpolant"}, "estimate");
        if (e.contains("grid"))
        {
            c.estimate.grid = grid_from(e.at("grid"), c.estimate.grid);
        }
        if (e.contains("calibration"))
        {
            c.estimate.calibration = complex_from(e.at("calibration"), "estimate.calibration");
        }
        c.estimate.interpolant = get_or<std::string>(e, "interpolant", "");
    }
    if (j.contains("greedy"))
    {
        const auto& g = j.at("greedy");
        check_keys(g, {"tol", "max_samples", "start", "grid"}, "greedy");
        c.greedy.tolerance   = get_or<Real>(g, "tol", c.greedy.tolerance);
        c.greedy.max_samples = non_negative(g, "max_samples", c.greedy.max_samples);
        c.greedy.start       = non_negative(g, "start", 0);
        if (g.contains("grid"))
        {
            c.greedy.grid = grid_from(g.at("grid"), c.greedy.grid);
        }
        if (!(c.greedy.tolerance > 0))
        {
            throw ConfigError("greedy.tol must be positive");
        }
    }
    return c;
}

inline json config_to_json(const ExperimentConfig& c)
{
    using namespace detail;
    json j;
    j["fom"]    = fom_to(c.fom);
    j["region"] = region_to(c.region);
    switch (c.sampling.kind)
    {
    case SamplingKind::Fejer:
        j["sampling"] = {{"type", "fejer"}};
        break;
    case SamplingKind::QuasiRandom:
        j["sampling"] = {{"type", "quasi-random"}, {"skip", c.sampling.skip}};
        break;
    case SamplingKind::Custom:
        j["sampling"] = {{"type", "custom"}, {"nodes", complex_list_to(c.sampling.nodes)}};
        break;
    }
    j["S_range"] = {c.s_min, c.s_max};
    if (c.degree)
    {
        j["N"] = *c.degree;
    }
    else
    {
        j["N"] = "S-1";
    }
    j["basis"]  = c.chebyshev ? "chebyshev" : "monomial";
    j["inner"]  = c.energy_inner ? "energy" : "euclidean";
    j["seed"]   = c.seed;
    j["output"] = c.output;
    j["pod"]    = c.pod;
    if (c.pole_selection == PoleSelection::Inside)
    {
        j["poles"] = {{"select", "inside"}};
    }
    else
    {
        j["poles"] = {{"select", "closest"}, {"count", c.pole_count}};
    }
    j["eval_grid"] = grid_to(c.eval_grid);
    j["estimate"]  = {{"grid", grid_to(c.estimate.grid)}, {"interpolant", c.estimate.interpolant}};
    if (c.estimate.calibration)
    {
        j["estimate"]["calibration"] = complex_to(*c.estimate.calibration);
    }
    j["greedy"] = {{"tol", c.greedy.tolerance},
                   {"max_samples", c.greedy.max_samples},
                   {"start", c.greedy.start},
                   {"grid", grid_to(c.greedy.grid)}};
    return j;
}

inline ExperimentConfig parse_config(const std::string& text)
{
    json j;
    try
    {
        j = json::parse(text);
    }
    catch (const json::parse_error& e)
    {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    return config_from_json(j);
}

} // namespace mri::cli

#endif /* MRI_CLI_CONFIG_HPP */
