///
/// \file io.hpp
///
/// File formats of the command-line runner: the binary snapshot container,
/// the JSON interpolant artifact and CSV number formatting.
///
/// Snapshot container, little-endian throughout:
///
///   uint64 n, uint64 S, then n*S complex doubles (re, im) column by column.
///
#ifndef MRI_CLI_IO_HPP
#define MRI_CLI_IO_HPP

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include <mri/cli/config.hpp>
#include <mri/interpolant.hpp>

namespace mri::cli
{

static_assert(std::endian::native == std::endian::little,
              "the snapshot container is written in native byte order");

inline void write_snapshots(const std::filesystem::path& path, const CMatrix& snapshots)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
    {
        throw ConfigError("cannot write " + path.string());
    }
    const std::uint64_t header[2] = {std::uint64_t(snapshots.rows()),
                                     std::uint64_t(snapshots.cols())};
    out.write(reinterpret_cast<const char*>(header), sizeof header);
    // Eigen storage is column-major complex<double>, i.e. the container layout
    out.write(reinterpret_cast<const char*>(snapshots.data()),
              std::streamsize(sizeof(Complex) * std::size_t(snapshots.size())));
}

inline CMatrix read_snapshots(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw ConfigError("cannot open snapshot file " + path.string());
    }
    std::uint64_t header[2] = {0, 0};
    in.read(reinterpret_cast<char*>(header), sizeof header);
    if (!in || header[0] == 0 || header[1] == 0 || header[0] > (1ull << 31) ||
        header[1] > (1ull << 31))
    {
        throw ConfigError("bad snapshot header in " + path.string());
    }
    CMatrix out(static_cast<Eigen::Index>(header[0]), static_cast<Eigen::Index>(header[1]));
    in.read(reinterpret_cast<char*>(out.data()),
            std::streamsize(sizeof(Complex) * std::size_t(out.size())));
    if (!in)
    {
        throw ConfigError("snapshot file " + path.string() + " is truncated");
    }
    return out;
}

/// Shortest round-trip representation; "nan", "inf" and "-inf" otherwise.
inline std::string fmt(Real x)
{
    if (std::isnan(x))
    {
        return "nan";
    }
    if (std::isinf(x))
    {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw ConfigError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
    {
        throw ConfigError("cannot write " + path.string());
    }
    out << text;
}

///
/// Save an interpolant as <stem>.json plus <stem>.bin holding the node
/// snapshots. The JSON names the binary file relative to itself.
///
inline void save_interpolant(const std::filesystem::path& json_path,
                             const RationalInterpolant& interp, bool energy_inner)
{
    using detail::complex_list_to;
    using detail::complex_to;
    auto bin_path = json_path;
    bin_path.replace_extension(".bin");
    write_snapshots(bin_path, interp.snapshots());

    const auto& basis = interp.config().basis;
    json jb;
    if (basis.is_monomial())
    {
        jb = {{"type", "monomial"}, {"center", complex_to(std::get<ShiftedMonomial>(basis.kind()).mu0)}};
    }
    else
    {
        const auto& c = std::get<ChebyshevOnSegment>(basis.kind());
        jb = {{"type", "chebyshev"}, {"a", complex_to(c.a)}, {"b", complex_to(c.b)}};
    }
    const auto& q = interp.denominator().coeffs;
    std::vector<Complex> coeffs(q.data(), q.data() + q.size());
    const auto roots = interp.poles();

    json j;
    j["S"]              = interp.samples().size();
    j["N"]              = interp.config().denominator_degree;
    j["nodes"]          = complex_list_to(interp.samples().nodes());
    j["provenance"]     = to_string(interp.samples().provenance());
    j["basis"]          = jb;
    j["denominator"]    = complex_list_to(coeffs);
    j["sigma_min"]      = interp.sigma_min();
    j["sigma_gap"]      = interp.sigma_gap();
    j["poles"]          = complex_list_to(roots.finite);
    j["infinite_poles"] = roots.infinite;
    j["inner"]          = energy_inner ? "energy" : "euclidean";
    j["dim"]            = interp.dim();
    j["snapshots"]      = bin_path.filename().string();
    write_text(json_path, j.dump(2) + "\n");
}

///
/// Read an interpolant artifact back. The inner product cannot be stored
/// compactly, so the caller supplies the one the artifact was built with.
///
inline RationalInterpolant load_interpolant(const std::filesystem::path& json_path,
                                            const InnerProduct& inner)
{
    using detail::complex_from;
    using detail::complex_list;
    json j;
    try
    {
        j = json::parse(read_text(json_path));
        const auto nodes = complex_list(j.at("nodes"), "nodes");
        const auto coeffs = complex_list(j.at("denominator"), "denominator");
        const auto degree = j.at("N").get<std::size_t>();
        const auto& jb    = j.at("basis");
        PolyBasis basis;
        if (jb.at("type").get<std::string>() == "monomial")
        {
            basis = PolyBasis::monomial(complex_from(jb.at("center"), "basis.center"), degree);
        }
        else
        {
            basis = PolyBasis::chebyshev(complex_from(jb.at("a"), "basis.a"),
                                         complex_from(jb.at("b"), "basis.b"), degree);
        }
        const CMatrix snapshots =
            read_snapshots(json_path.parent_path() / j.at("snapshots").get<std::string>());
        if (snapshots.rows() != inner.dim() || std::size_t(snapshots.cols()) != nodes.size())
        {
            throw ConfigError("interpolant " + json_path.string() +
                              " does not match the configured model size");
        }
        CVector q(Eigen::Index(coeffs.size()));
        for (std::size_t l = 0; l < coeffs.size(); ++l)
        {
            q[Eigen::Index(l)] = coeffs[l];
        }
        return assemble(snapshots, inner, SampleSet(nodes), MriConfig{degree, basis}, q,
                        j.at("sigma_gap").get<Real>());
    }
    catch (const json::exception& e)
    {
        throw ConfigError("bad interpolant file " + json_path.string() + ": " + e.what());
    }
}

} // namespace mri::cli

#endif /* MRI_CLI_IO_HPP */
