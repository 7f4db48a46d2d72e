///
/// \file sampling.hpp
///
/// Parameter-domain geometry: disks and segments, their logarithmic
/// capacity and Green's potential, and sample-node generation.
///
#ifndef MRI_SAMPLING_HPP
#define MRI_SAMPLING_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <mri/types.hpp>

namespace mri
{

struct Disk
{
    Complex center;
    Real radius;
};

struct Segment
{
    Complex a;
    Complex b;
};

///
/// A compact parameter set: either a closed disk or a line segment.
///
class Region
{
public:
    using Variant = std::variant<Disk, Segment>;

    static Region disk(Complex center, Real radius)
    {
        if (!(radius > 0) || !std::isfinite(radius))
        {
            throw Error(ErrorKind::InvalidArgument,
                        "disk radius must be positive and finite");
        }
        return Region(Disk{center, radius});
    }

    static Region segment(Complex a, Complex b)
    {
        if (a == b)
        {
            throw Error(ErrorKind::InvalidArgument,
                        "segment endpoints must be distinct");
        }
        return Region(Segment{a, b});
    }

    bool is_disk() const noexcept
    {
        return std::holds_alternative<Disk>(m_shape);
    }

    bool is_segment() const noexcept
    {
        return std::holds_alternative<Segment>(m_shape);
    }

    const Disk& as_disk() const
    {
        return std::get<Disk>(m_shape);
    }

    const Segment& as_segment() const
    {
        return std::get<Segment>(m_shape);
    }

    const Variant& shape() const noexcept
    {
        return m_shape;
    }

    /// Disk center or segment midpoint.
    Complex center() const
    {
        if (is_disk())
        {
            return as_disk().center;
        }
        const auto& s = as_segment();
        return 0.5 * (s.a + s.b);
    }

    friend bool operator==(const Region& x, const Region& y)
    {
        if (x.is_disk() != y.is_disk())
        {
            return false;
        }
        if (x.is_disk())
        {
            return x.as_disk().center == y.as_disk().center &&
                   x.as_disk().radius == y.as_disk().radius;
        }
        return x.as_segment().a == y.as_segment().a &&
               x.as_segment().b == y.as_segment().b;
    }

private:
    explicit Region(Variant shape) : m_shape(std::move(shape)) {}

    Variant m_shape;
};

inline Real capacity(const Region& region)
{
    if (region.is_disk())
    {
        return region.as_disk().radius;
    }
    const auto& s = region.as_segment();
    return std::abs(s.b - s.a) / 4;
}

///
/// Green's potential: |phi_K(mu)| outside the region, the capacity on it.
///
/// For a segment, phi_K is the inverse Joukowski map of the normalized
/// coordinate z = (2 mu - a - b) / (b - a). The two roots z +- sqrt(z^2 - 1)
/// have moduli r and 1/r; the exterior branch is the one with modulus >= 1.
///
inline Real green_potential(const Region& region, Complex mu)
{
    const Real cap = capacity(region);
    if (region.is_disk())
    {
        const auto& d = region.as_disk();
        return std::max(std::abs(mu - d.center), d.radius);
    }
    const auto& s = region.as_segment();
    const Complex z = (2.0 * mu - s.a - s.b) / (s.b - s.a);
    const Complex w = std::sqrt(z * z - 1.0);
    const Real r1   = std::abs(z + w);
    const Real r2   = std::abs(z - w);
    return cap * std::max({r1, r2, Real(1)});
}

/// True if mu lies in the region (up to a relative tolerance on the potential).
inline bool contains(const Region& region, Complex mu, Real rtol = 1e-12)
{
    return green_potential(region, mu) <= capacity(region) * (1 + rtol);
}

enum class Provenance
{
    FejerDisk,
    FejerSegment,
    QuasiRandom,
    Custom,
};

inline const char* to_string(Provenance p)
{
    switch (p)
    {
    case Provenance::FejerDisk:
        return "fejer-disk";
    case Provenance::FejerSegment:
        return "fejer-segment";
    case Provenance::QuasiRandom:
        return "quasi-random";
    case Provenance::Custom:
        return "custom";
    }
    return "custom";
}

/// prod_j (mu - nodes[j])
inline Complex nodal_poly_eval(const std::vector<Complex>& nodes, Complex mu)
{
    Complex prod(1.0, 0.0);
    for (const auto& node : nodes)
    {
        prod *= (mu - node);
    }
    return prod;
}

/// omega'(mu_j) = prod_{k != j} (mu_j - mu_k), by direct product.
inline std::vector<Complex> nodal_derivatives(const std::vector<Complex>& nodes)
{
    const auto count = nodes.size();
    std::vector<Complex> out(count, Complex(1.0, 0.0));
    for (std::size_t j = 0; j < count; ++j)
    {
        for (std::size_t k = 0; k < count; ++k)
        {
            if (k != j)
            {
                out[j] *= (nodes[j] - nodes[k]);
            }
        }
    }
    return out;
}

///
/// Ordered set of distinct sample points with the derivative of the nodal
/// polynomial cached at each node.
///
class SampleSet
{
public:
    SampleSet() = default;

    /// Throws InvalidArgument if the list is empty or has repeated nodes.
    explicit SampleSet(std::vector<Complex> nodes,
                       Provenance provenance = Provenance::Custom)
        : m_nodes(std::move(nodes)), m_provenance(provenance)
    {
        if (m_nodes.empty())
        {
            throw Error(ErrorKind::InvalidArgument, "sample set is empty");
        }
        for (std::size_t j = 0; j < m_nodes.size(); ++j)
        {
            for (std::size_t k = j + 1; k < m_nodes.size(); ++k)
            {
                if (m_nodes[j] == m_nodes[k])
                {
                    throw Error(ErrorKind::InvalidArgument,
                                "sample nodes must be pairwise distinct");
                }
            }
        }
        m_omega_prime = nodal_derivatives(m_nodes);
    }

    std::size_t size() const noexcept
    {
        return m_nodes.size();
    }

    const std::vector<Complex>& nodes() const noexcept
    {
        return m_nodes;
    }

    const std::vector<Complex>& omega_prime() const noexcept
    {
        return m_omega_prime;
    }

    Complex operator[](std::size_t j) const
    {
        return m_nodes[j];
    }

    Provenance provenance() const noexcept
    {
        return m_provenance;
    }

    Complex nodal_poly(Complex mu) const
    {
        return nodal_poly_eval(m_nodes, mu);
    }

    Real min_pairwise_distance() const
    {
        Real best = std::numeric_limits<Real>::infinity();
        for (std::size_t j = 0; j < m_nodes.size(); ++j)
        {
            for (std::size_t k = j + 1; k < m_nodes.size(); ++k)
            {
                best = std::min(best, std::abs(m_nodes[j] - m_nodes[k]));
            }
        }
        return best;
    }

    /// Copy with one more node appended; the result is tagged Custom.
    SampleSet with_node(Complex mu) const
    {
        auto nodes = m_nodes;
        nodes.push_back(mu);
        return SampleSet(std::move(nodes), Provenance::Custom);
    }

private:
    std::vector<Complex> m_nodes;
    std::vector<Complex> m_omega_prime;
    Provenance m_provenance = Provenance::Custom;
};

inline Complex nodal_poly_eval(const SampleSet& samples, Complex mu)
{
    return samples.nodal_poly(mu);
}

///
/// Fejer points: roots of unity c + r e^{2 pi i j / S}, j = 1..S, for a disk;
/// first-kind Chebyshev nodes for a segment.
///
inline SampleSet fejer_nodes(const Region& region, std::size_t count)
{
    if (count == 0)
    {
        throw Error(ErrorKind::InvalidArgument, "node count must be >= 1");
    }
    constexpr Real pi = std::numbers::pi;
    std::vector<Complex> nodes;
    nodes.reserve(count);
    if (region.is_disk())
    {
        const auto& d = region.as_disk();
        for (std::size_t j = 1; j <= count; ++j)
        {
            const Real angle = 2 * pi * Real(j) / Real(count);
            nodes.push_back(d.center + d.radius * std::polar(Real(1), angle));
        }
        // j = S lands on angle 2 pi; pin it to exactly the real axis.
        nodes.back() = d.center + Complex(d.radius, 0);
        return SampleSet(std::move(nodes), Provenance::FejerDisk);
    }
    const auto& s      = region.as_segment();
    const Complex mid  = 0.5 * (s.a + s.b);
    const Complex half = 0.5 * (s.b - s.a);
    for (std::size_t k = 1; k <= count; ++k)
    {
        const Real x = std::cos(Real(2 * k - 1) * pi / Real(2 * count));
        // cos(pi/2) is not exactly zero in floating point
        nodes.push_back(mid + half * (2 * k - 1 == count ? Real(0) : x));
    }
    return SampleSet(std::move(nodes), Provenance::FejerSegment);
}

/// Radical inverse of index in the given base (van der Corput).
inline Real radical_inverse(std::uint64_t index, std::uint64_t base)
{
    Real inv_base = Real(1) / Real(base);
    Real factor   = inv_base;
    Real result   = 0;
    while (index > 0)
    {
        result += Real(index % base) * factor;
        index /= base;
        factor *= inv_base;
    }
    return result;
}

///
/// Halton points (bases 2 and 3), starting at sequence index skip + 1.
/// Disk: (radius, angle) = (r sqrt(x1), 2 pi x2) about the center.
/// Segment: a + (b - a) x1. Coincident points are skipped.
///
inline SampleSet quasi_random_nodes(const Region& region, std::size_t count,
                                    std::uint64_t skip = 0)
{
    if (count == 0)
    {
        throw Error(ErrorKind::InvalidArgument, "node count must be >= 1");
    }
    constexpr Real pi = std::numbers::pi;
    const Real scale  = std::abs(region.center()) + 2 * capacity(region);
    std::vector<Complex> nodes;
    nodes.reserve(count);
    std::uint64_t index = skip;
    while (nodes.size() < count)
    {
        ++index;
        const Real x1 = radical_inverse(index, 2);
        const Real x2 = radical_inverse(index, 3);
        Complex mu;
        if (region.is_disk())
        {
            const auto& d = region.as_disk();
            mu = d.center + std::polar(d.radius * std::sqrt(x1), 2 * pi * x2);
        }
        else
        {
            const auto& s = region.as_segment();
            mu            = s.a + (s.b - s.a) * x1;
        }
        bool duplicate = false;
        for (const auto& other : nodes)
        {
            if (std::abs(other - mu) <= 1e-14 * scale)
            {
                duplicate = true;
                break;
            }
        }
        if (!duplicate)
        {
            nodes.push_back(mu);
        }
    }
    return SampleSet(std::move(nodes), Provenance::QuasiRandom);
}

} // namespace mri

#endif /* MRI_SAMPLING_HPP */
