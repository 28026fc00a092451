// SPDX-License-Identifier: Apache-2.0

#include "oam/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace oam {

namespace {

UnitVector3 from_frame(const MeasurementKind& kind, const UnitVector3& m)
{
    return kind.is_direct() ? m : bloch_rotate_inverse(m, kind.beta);
}

bool coplanar(const HalfGreatCircle& a, const HalfGreatCircle& b, double tol)
{
    return norm(cross(a.normal().vec(), b.normal().vec())) < tol;
}

}  // namespace

HalfGreatCircle::HalfGreatCircle(const MeasurementKind& kind, double longitude)
    : kind_(kind), longitude_(wrap_2pi(longitude))
{
    const double c = std::cos(longitude_), s = std::sin(longitude_);
    normal_ = from_frame(kind_, UnitVector3::normalized(-s, c, 0.0));
    selector_ = from_frame(kind_, UnitVector3::normalized(c, s, 0.0));
}

std::array<UnitVector3, 2> HalfGreatCircle::poles() const
{
    return {from_frame(kind_, UnitVector3::normalized(0, 0, 1)), from_frame(kind_, UnitVector3::normalized(0, 0, -1))};
}

UnitVector3 HalfGreatCircle::to_measurement_frame(const UnitVector3& n) const
{
    return kind_.is_direct() ? n : bloch_rotate(n, kind_.beta);
}

bool HalfGreatCircle::contains(const UnitVector3& n, double tol) const
{
    const UnitVector3 m = to_measurement_frame(n);
    if (std::hypot(m.x(), m.y()) < 1e-9) return false;
    return std::abs(angle_difference(std::atan2(m.y(), m.x()), longitude_)) < tol;
}

HalfGreatCircle measurement_locus(const MeasurementKind& kind, double alpha)
{
    return HalfGreatCircle(kind, 2.0 * alpha);
}

UnitVector3 intersect_loci(const HalfGreatCircle& a, const HalfGreatCircle& b, double tol, double coplanar_tol)
{
    const Vec3 c = cross(a.normal().vec(), b.normal().vec());
    if (norm(c) < coplanar_tol) throw DegenerateOverlap("the two arcs lie on one great circle");
    const UnitVector3 p = UnitVector3::normalized(c);
    const bool plus = a.contains(p, tol) && b.contains(p, tol);
    const bool minus = a.contains(-p, tol) && b.contains(-p, tol);
    if (plus && minus) throw DegenerateOverlap("both intersection candidates lie on the two arcs");
    if (plus) return p;
    if (minus) return -p;
    throw NoIntersection("the two arcs do not meet");
}

namespace {

UnitVector3 nearest_on_arc(const HalfGreatCircle& arc, const UnitVector3& p)
{
    const Vec3& nv = arc.normal().vec();
    const double d = dot(nv, p.vec());
    const Vec3 in_plane{p.x() - d * nv.x, p.y() - d * nv.y, p.z() - d * nv.z};
    if (norm(in_plane) < 1e-12) return arc.selector();
    const UnitVector3 u = UnitVector3::normalized(in_plane);
    if (dot(u, arc.selector()) >= 0.0) return u;
    const auto ends = arc.poles();
    return dot(ends[0], p) >= dot(ends[1], p) ? ends[0] : ends[1];
}

}  // namespace

UnitVector3 closest_approach(const HalfGreatCircle& a, const HalfGreatCircle& b)
{
    double best = 10.0;
    UnitVector3 p, q;
    auto consider = [&](const UnitVector3& from, const HalfGreatCircle& onto) {
        const UnitVector3 to = nearest_on_arc(onto, from);
        const double d = spherical_distance(from, to);
        if (d < best) {
            best = d;
            p = from;
            q = to;
        }
    };
    for (const auto& end : a.poles()) consider(end, b);
    for (const auto& end : b.poles()) consider(end, a);
    return geodesic_midpoint(p, q);
}

UnitVector3 overlap_midpoint(const HalfGreatCircle& a, const HalfGreatCircle& b)
{
    const Vec3 s = a.selector().vec() + b.selector().vec();
    if (norm(s) < 1e-9) throw NoIntersection("coplanar arcs cover opposite halves");
    return UnitVector3::normalized(s);
}

std::string to_string(Branch b)
{
    switch (b) {
    case Branch::blind_spot: return "blind_spot";
    case Branch::narrow_triangle: return "narrow_triangle";
    case Branch::centroid: return "centroid";
    }
    return "unknown";
}

namespace {

struct Meeting {
    UnitVector3 point;
    bool overlap = false;
    bool closest = false;
};

Meeting meet(const HalfGreatCircle& a, const HalfGreatCircle& b, const EstimatorConfig& cfg)
{
    Meeting m;
    if (coplanar(a, b, std::sin(cfg.resolution))) {
        m.point = overlap_midpoint(a, b);
        m.overlap = true;
        return m;
    }
    try {
        m.point = intersect_loci(a, b, cfg.membership_tol, 0.0);
    } catch (const NoIntersection&) {
        m.point = closest_approach(a, b);
        m.closest = true;
    }
    return m;
}

void fill_errors(TriangleEstimate& est, const std::vector<UnitVector3>& spread,
                 const std::optional<PoincareState>& target, const EstimatorConfig& cfg)
{
    const PoincareState& s = est.state;
    double dt = 0.0, dp = 0.0;
    for (const auto& v : spread) {
        const PoincareState vs = bloch_to_state(v);
        dt = std::max(dt, std::abs(vs.theta() - s.theta()));
        dp = std::max(dp, std::abs(angle_difference(vs.phi(), s.phi())));
    }
    est.err_theta = dt;
    // inside the polar blind cap the longitude carries no usable spread
    const double cap = std::asin(cfg.blind_threshold);
    const bool reaches_pole = s.degenerate_phi() || s.theta() <= cap || s.theta() >= kPi - cap ||
                              s.theta() - dt <= cfg.resolution || s.theta() + dt >= kPi - cfg.resolution;
    if (reaches_pole)
        est.err_phi.reset();
    else
        est.err_phi = dp;

    if (target) {
        const UnitVector3 t = state_to_bloch(*target);
        const double f = fidelity(est.bloch, t);
        double df = 0.0;
        for (const auto& v : spread) df = std::max(df, std::abs(fidelity(v, t) - f));
        est.fidelity_vs_target = f;
        est.d_fidelity = df;
    }
}

}  // namespace

TriangleEstimate estimate_state(const std::array<MeasuredReading, 3>& readings,
                                const std::optional<PoincareState>& target, const EstimatorConfig& cfg)
{
    int directs = 0;
    for (const auto& r : readings) directs += r.kind.is_direct() ? 1 : 0;
    if (directs > 1) throw Error("at most one direct reading is allowed");

    std::array<bool, 3> blind{};
    int n_blind = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        blind[i] = readings[i].reading.visibility <= cfg.blind_threshold;
        n_blind += blind[i] ? 1 : 0;
    }
    if (n_blind >= 2) throw TooManyBlind(std::to_string(n_blind) + " of 3 images show no lobe structure");

    auto locus = [&](std::size_t i, double dalpha = 0.0) {
        return measurement_locus(readings[i].kind, readings[i].reading.alpha + dalpha);
    };

    TriangleEstimate est;
    if (n_blind == 1) {
        const auto gated = static_cast<std::size_t>(std::find(blind.begin(), blind.end(), true) - blind.begin());
        const std::size_t i = (gated + 1) % 3, j = (gated + 2) % 3;
        const Meeting m = meet(locus(i), locus(j), cfg);
        est.branch = Branch::blind_spot;
        est.blind_reading = static_cast<int>(gated);
        est.used_overlap = m.overlap;
        est.used_closest_approach = m.closest;
        est.bloch = m.point;
        est.vertices = {m.point, m.point, m.point};
        est.state = bloch_to_state(m.point);

        std::vector<UnitVector3> spread;
        const double u = cfg.alpha_uncertainty;
        for (const double si : {-u, u})
            for (const double sj : {-u, u}) spread.push_back(meet(locus(i, si), locus(j, sj), cfg).point);
        fill_errors(est, spread, target, cfg);
        return est;
    }

    const std::array<std::pair<std::size_t, std::size_t>, 3> pairs{{{0, 1}, {0, 2}, {1, 2}}};
    std::array<Meeting, 3> meetings;
    int overlapped = -1;
    for (std::size_t k = 0; k < 3; ++k) {
        meetings[k] = meet(locus(pairs[k].first), locus(pairs[k].second), cfg);
        est.vertices[k] = meetings[k].point;
        est.used_closest_approach |= meetings[k].closest;
        if (meetings[k].overlap) {
            est.used_overlap = true;
            overlapped = static_cast<int>(k);
        }
    }

    // sides[k] joins the two vertices other than k
    std::array<double, 3> sides{};
    for (std::size_t k = 0; k < 3; ++k)
        sides[k] = spherical_distance(est.vertices[(k + 1) % 3], est.vertices[(k + 2) % 3]);
    std::array<std::size_t, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sides[a] < sides[b]; });

    std::optional<std::size_t> narrow_side;
    if (overlapped >= 0)
        narrow_side = static_cast<std::size_t>(overlapped);
    else if (sides[order[0]] < cfg.narrow_ratio * sides[order[1]] && sides[order[1]] > cfg.resolution)
        narrow_side = order[0];

    if (narrow_side) {
        const std::size_t k = *narrow_side;
        est.branch = Branch::narrow_triangle;
        est.bloch = geodesic_midpoint(est.vertices[(k + 1) % 3], est.vertices[(k + 2) % 3]);
    } else {
        est.branch = Branch::centroid;
        est.bloch = UnitVector3::normalized(est.vertices[0].vec() + est.vertices[1].vec() + est.vertices[2].vec());
    }
    est.state = bloch_to_state(est.bloch);

    // a narrow triangle is bounded by its short side; the far vertex comes from nearly parallel loci
    std::vector<UnitVector3> spread;
    for (std::size_t k = 0; k < 3; ++k)
        if (narrow_side ? k != *narrow_side : static_cast<int>(k) != overlapped) spread.push_back(est.vertices[k]);
    fill_errors(est, spread, target, cfg);
    return est;
}

std::array<MeasuredReading, 3> acquire_readings(const MeasurementSource& source, const AnalysisOptions& opts)
{
    std::array<MeasuredReading, 3> out;
    const auto kinds = standard_kinds();
    for (std::size_t i = 0; i < 3; ++i) out[i] = {kinds[i], mode_orientation(source.image(kinds[i]), opts)};
    return out;
}

std::array<MeasuredReading, 3> perturb_readings(std::array<MeasuredReading, 3> readings, double sigma,
                                                std::uint64_t seed)
{
    if (!(sigma > 0.0)) return readings;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    for (auto& r : readings) {
        const double a = std::fmod(r.reading.alpha + noise(rng), kPi);
        r.reading.alpha = a < 0.0 ? a + kPi : a;
    }
    return readings;
}

CapGeometry visibility_threshold_cap(double threshold)
{
    const double cap = std::asin(threshold);
    return {cap, kTwoPi * (1.0 - std::cos(cap))};
}

}  // namespace oam
