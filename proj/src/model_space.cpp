#include "needlelab/model_space.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "needlelab/quadrature.hpp"

namespace needlelab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double wrap(double theta, double L) {
    double t = std::fmod(theta + 0.5 * L, L);
    if (t < 0.0) t += L;
    return t - 0.5 * L;
}
}  // namespace

std::string Region::describe() const {
    char buf[96];
    switch (kind) {
        case BallK:    std::snprintf(buf, sizeof(buf), "ball r=%.17g", r1); break;
        case AnnulusK: std::snprintf(buf, sizeof(buf), "annulus %.17g..%.17g", r0, r1); break;
        case BandK:    std::snprintf(buf, sizeof(buf), "band |u|<=%.17g", r1); break;
        case AllK:     std::snprintf(buf, sizeof(buf), "all"); break;
    }
    return buf;
}

double Chart::measure() const {
    if (dim == 0) return natoms;
    double m = hi0 - lo0;
    if (dim == 2) m *= (hi1 - lo1);
    return m;
}

// ---------------------------------------------------------------------------
// ModelSpace constructors

ModelSpace ModelSpace::space_form(int dim, double K) {
    if (dim != 2 && dim != 3)
        throw std::invalid_argument("space_form: catalog supports dim 2 and 3");
    if (dim == 3 && K != 0.0)
        throw std::invalid_argument("space_form: dim 3 catalog is flat only");
    ModelSpace s;
    s.kind_ = SpaceKind::SpaceForm;
    s.N_ = dim;
    s.K_ = K;
    return s;
}

ModelSpace ModelSpace::flat_cylinder(double L) {
    if (!(L > 0.0)) throw std::invalid_argument("flat_cylinder: L must be positive");
    ModelSpace s;
    s.kind_ = SpaceKind::FlatCylinder;
    s.N_ = 2.0;
    s.K_ = 0.0;
    s.L_ = L;
    return s;
}

ModelSpace ModelSpace::weighted_interval(Interval iv, Density1D weight, double N,
                                         double K) {
    ModelSpace s;
    s.kind_ = SpaceKind::WeightedInterval;
    s.N_ = N;
    s.K_ = K;
    s.interval_ = iv;
    s.weight_ = std::make_shared<Density1D>(std::move(weight));
    return s;
}

ModelSpace ModelSpace::weighted_half_line(Density1D weight, double N, double K) {
    ModelSpace s;
    s.kind_ = SpaceKind::WeightedHalfLine;
    s.N_ = N;
    s.K_ = K;
    s.interval_ = Interval(0.0, kInf);
    s.weight_ = std::make_shared<Density1D>(std::move(weight));
    return s;
}

ModelSpace ModelSpace::product_line(Interval iv, Density1D weight, double N,
                                    double broken_amp, double broken_freq) {
    ModelSpace s;
    s.kind_ = SpaceKind::ProductLine;
    s.N_ = N;
    s.K_ = 0.0;
    s.interval_ = iv;
    s.weight_ = std::make_shared<Density1D>(std::move(weight));
    s.broken_amp_ = broken_amp;
    s.broken_freq_ = broken_freq;
    return s;
}

ModelSpace ModelSpace::parse(const std::string& kind, double N, double K,
                             double param) {
    if (kind == "space_form") return space_form(static_cast<int>(N), K);
    if (kind == "flat_cylinder") return flat_cylinder(param);
    if (kind == "weighted_interval") {
        Interval iv(0.0, param > 0.0 ? param : 1.0);
        return weighted_interval(iv, Density1D::constant(iv, 1.0), N, K);
    }
    if (kind == "product_line") {
        Interval iv(0.0, param > 0.0 ? param : 1.0);
        return product_line(iv, Density1D::constant(iv, 1.0), N);
    }
    throw std::invalid_argument("unknown space kind: " + kind);
}

double ModelSpace::curv_radius() const {
    if (kind_ != SpaceKind::SpaceForm || K_ == 0.0)
        throw std::logic_error("curv_radius: flat or non space-form");
    return std::sqrt((N_ - 1.0) / std::abs(K_));
}

Point ModelSpace::base_point_default() const {
    Point p;
    switch (kind_) {
        case SpaceKind::SpaceForm:
            if (K_ > 0.0) p.c[2] = curv_radius();      // north pole (0,0,R)
            else if (K_ < 0.0) p.c[0] = curv_radius(); // hyperboloid apex (R,0,0)
            break;                                      // flat: origin
        case SpaceKind::FlatCylinder:
            break;                                      // (0, 0)
        case SpaceKind::WeightedInterval:
        case SpaceKind::WeightedHalfLine:
            p.c[0] = interval_.a;
            break;
        case SpaceKind::ProductLine:
            p.c[0] = 0.5 * (interval_.a + interval_.b);
            break;
    }
    return p;
}

// ---------------------------------------------------------------------------
// Distance

double ModelSpace::distance(const Point& x, const Point& y) const {
    switch (kind_) {
        case SpaceKind::SpaceForm: {
            const int n = static_cast<int>(N_);
            if (K_ == 0.0) {
                double q = 0.0;
                for (int i = 0; i < n; ++i) q += (x.c[i] - y.c[i]) * (x.c[i] - y.c[i]);
                return std::sqrt(q);
            }
            const double R = curv_radius();
            if (K_ > 0.0) {
                // robust near both tiny and antipodal separations
                double dq = 0.0, sq = 0.0;
                for (int i = 0; i <= n; ++i) {
                    dq += (x.c[i] - y.c[i]) * (x.c[i] - y.c[i]);
                    sq += (x.c[i] + y.c[i]) * (x.c[i] + y.c[i]);
                }
                const double chord = std::sqrt(dq), anti = std::sqrt(sq);
                if (chord <= anti)
                    return 2.0 * R * std::asin(std::min(1.0, chord / (2.0 * R)));
                return M_PI * R - 2.0 * R * std::asin(std::min(1.0, anti / (2.0 * R)));
            }
            // hyperboloid: Minkowski square of the difference is spacelike
            double q = -(x.c[0] - y.c[0]) * (x.c[0] - y.c[0]);
            for (int i = 1; i <= n; ++i) q += (x.c[i] - y.c[i]) * (x.c[i] - y.c[i]);
            const double u = std::max(0.0, q) / (2.0 * R * R);
            return R * std::log1p(u + std::sqrt(u * (u + 2.0)));
        }
        case SpaceKind::FlatCylinder:
            return std::hypot(wrap(x.c[0] - y.c[0], L_), x.c[1] - y.c[1]);
        case SpaceKind::WeightedInterval:
        case SpaceKind::WeightedHalfLine:
            return std::abs(x.c[0] - y.c[0]);
        case SpaceKind::ProductLine:
            return std::hypot(x.c[0] - y.c[0], x.c[1] - y.c[1]);
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Generating function u

double ModelSpace::u_value(const BaseDescriptor& base, const Point& x) const {
    switch (base.variant) {
        case BaseVariant::PointBase:
            return distance(base.point, x);
        case BaseVariant::Hyperplane:
            if (kind_ != SpaceKind::SpaceForm || K_ != 0.0)
                throw std::invalid_argument("hyperplane base needs a flat space form");
            return x.c[0];
        case BaseVariant::Equator: {
            if (kind_ != SpaceKind::SpaceForm || !(K_ > 0.0))
                throw std::invalid_argument("equator base needs K > 0");
            const double R = curv_radius();
            return R * std::asin(std::min(1.0, std::max(-1.0, x.c[2] / R)));
        }
        case BaseVariant::Generator:
            if (kind_ != SpaceKind::FlatCylinder)
                throw std::invalid_argument("generator base needs the cylinder");
            return wrap(x.c[0], L_);
        case BaseVariant::LevelPoint:
            return x.c[0] - base.level;
        case BaseVariant::Line:
            // exact Busemann limit of the catalog lines
            switch (kind_) {
                case SpaceKind::SpaceForm:
                    if (K_ != 0.0)
                        throw std::invalid_argument("line base needs a flat space form");
                    return -x.c[0];
                case SpaceKind::FlatCylinder:
                case SpaceKind::ProductLine:
                    return -x.c[1];
                default:
                    throw std::invalid_argument("line base unsupported for this kind");
            }
    }
    return 0.0;
}

Point ModelSpace::line_point(double t, double offset) const {
    Point g;
    switch (kind_) {
        case SpaceKind::SpaceForm:
            if (K_ != 0.0) throw std::invalid_argument("no line in a curved space form");
            g.c[0] = t;
            g.c[1] = offset;
            break;
        case SpaceKind::FlatCylinder:
            g.c[0] = wrap(offset, L_);
            g.c[1] = t;
            break;
        case SpaceKind::ProductLine:
            g.c[0] = offset;
            g.c[1] = t;
            break;
        default:
            throw std::invalid_argument("line base unsupported for this kind");
    }
    return g;
}

// ---------------------------------------------------------------------------
// Reference measure oracle

double ModelSpace::measure_oracle(const BaseDescriptor& base,
                                  const Region& region) const {
    auto ball = [&](double r) -> double {
        switch (kind_) {
            case SpaceKind::SpaceForm: {
                if (N_ == 3.0) return 4.0 * M_PI * r * r * r / 3.0;
                if (K_ == 0.0) return M_PI * r * r;
                const double R = curv_radius();
                if (K_ > 0.0) return 2.0 * M_PI * R * R * (1.0 - std::cos(std::min(r, M_PI * R) / R));
                return 2.0 * M_PI * R * R * (std::cosh(r / R) - 1.0);
            }
            case SpaceKind::FlatCylinder: {
                // universal-cover wrap formula
                const double m = std::min(r, 0.5 * L_);
                return 2.0 * (m * std::sqrt(r * r - m * m) + r * r * std::asin(m / r));
            }
            case SpaceKind::WeightedInterval:
            case SpaceKind::WeightedHalfLine: {
                const double p0 = base.point.c[0];
                const double lo = std::max(interval_.a, p0 - r);
                const double hi = std::min(std::min(interval_.b, p0 + r), p0 + r_max_);
                if (hi <= lo) return 0.0;
                return simpson([&](double x) { return weight_->value(x); }, lo, hi,
                               panels_for(hi - lo, 2048, 512));
            }
            case SpaceKind::ProductLine:
                throw std::invalid_argument("ball oracle unsupported for product line");
        }
        return 0.0;
    };

    auto band = [&](double c) -> double {
        switch (base.variant) {
            case BaseVariant::Hyperplane:
                return 2.0 * c * 2.0 * chart_halfwidth_;
            case BaseVariant::Equator: {
                const double R = curv_radius();
                return 4.0 * M_PI * R * R * std::sin(std::min(c, 0.5 * M_PI * R) / R);
            }
            case BaseVariant::Generator:
                return 2.0 * std::min(c, 0.5 * L_) * 2.0 * chart_halfwidth_;
            case BaseVariant::LevelPoint: {
                const double lo = std::max(interval_.a, base.level - c);
                const double hi = std::min(interval_.b, base.level + c);
                if (hi <= lo) return 0.0;
                return simpson([&](double x) { return weight_->value(x); }, lo, hi,
                               panels_for(hi - lo, 2048, 512));
            }
            case BaseVariant::Line:
                switch (kind_) {
                    case SpaceKind::SpaceForm:  // |b+| = |x| <= c strip
                        return 2.0 * c * 2.0 * chart_halfwidth_;
                    case SpaceKind::FlatCylinder:
                        return 2.0 * c * L_;
                    case SpaceKind::ProductLine: {
                        const double wmass =
                            simpson([&](double a) { return weight_->value(a); },
                                    interval_.a, interval_.b,
                                    panels_for(interval_.length(), 2048, 512));
                        if (broken_amp_ == 0.0) return 2.0 * c * wmass;
                        const double zint = simpson(
                            [&](double z) {
                                return 1.0 + broken_amp_ * std::sin(broken_freq_ * z);
                            },
                            -c, c, panels_for(2.0 * c, 2048, 512));
                        return wmass * zint;
                    }
                    default:
                        break;
                }
                throw std::invalid_argument("band oracle unsupported here");
            case BaseVariant::PointBase:
                if (kind_ == SpaceKind::FlatCylinder) return 2.0 * region.r1 * L_;
                throw std::invalid_argument("band oracle needs a level-set/line base");
        }
        return 0.0;
    };

    switch (region.kind) {
        case Region::BallK:    return ball(region.r1);
        case Region::AnnulusK: return ball(region.r1) - ball(region.r0);
        case Region::BandK:    return band(region.r1);
        case Region::AllK:
            switch (kind_) {
                case SpaceKind::SpaceForm:
                    if (K_ > 0.0) {
                        const double R = curv_radius();
                        return 4.0 * M_PI * R * R;
                    }
                    return ball(r_max_);
                case SpaceKind::FlatCylinder:
                    return ball(r_max_);
                case SpaceKind::WeightedInterval:
                    return weight_->mass();
                case SpaceKind::WeightedHalfLine:
                    return ball(r_max_);
                case SpaceKind::ProductLine:
                    return band(r_max_);
            }
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Cut locus

CutLocusDescription ModelSpace::cut_locus_description(const Point& p) const {
    CutLocusDescription out;
    switch (kind_) {
        case SpaceKind::SpaceForm:
            if (K_ > 0.0) {
                out.kind = CutLocusDescription::SinglePoint;
                const int n = static_cast<int>(N_);
                for (int i = 0; i <= n; ++i) out.point.c[i] = -p.c[i];
            } else {
                out.kind = CutLocusDescription::Empty;
            }
            break;
        case SpaceKind::FlatCylinder:
            out.kind = CutLocusDescription::GeneratorLine;
            out.line_theta = wrap(p.c[0] + 0.5 * L_, L_);
            break;
        default:
            out.kind = CutLocusDescription::Empty;
            break;
    }
    return out;
}

std::string ModelSpace::describe() const {
    char buf[160];
    switch (kind_) {
        case SpaceKind::SpaceForm:
            std::snprintf(buf, sizeof(buf), "space_form N=%g K=%.17g", N_, K_);
            break;
        case SpaceKind::FlatCylinder:
            std::snprintf(buf, sizeof(buf), "flat_cylinder L=%.17g", L_);
            break;
        case SpaceKind::WeightedInterval:
            std::snprintf(buf, sizeof(buf), "weighted_interval (%g,%g) N=%g K=%g",
                          interval_.a, interval_.b, N_, K_);
            break;
        case SpaceKind::WeightedHalfLine:
            std::snprintf(buf, sizeof(buf), "weighted_half_line N=%g K=%g", N_, K_);
            break;
        case SpaceKind::ProductLine:
            std::snprintf(buf, sizeof(buf), "product_line (%g,%g) N=%g broken=%g",
                          interval_.a, interval_.b, N_, broken_amp_);
            break;
    }
    return buf;
}

// ---------------------------------------------------------------------------
// PolarFactorization

PolarFactorization::PolarFactorization(const ModelSpace* sp, BaseDescriptor base)
    : sp_(sp), base_(base) {
    const SpaceKind k = sp->kind();
    switch (base.variant) {
        case BaseVariant::PointBase:
            // the curved space forms carry their tangent frame at the
            // default pole; other base points have no chart here
            if (k == SpaceKind::SpaceForm && sp->K() != 0.0 &&
                sp->distance(base.point, sp->base_point_default()) > 1e-9)
                throw std::invalid_argument(
                    "curved space forms support the default base point only");
            if (k == SpaceKind::SpaceForm && sp->N() == 2.0) {
                chart_ = {1, 1, 0.0, 2.0 * M_PI, 0.0, 1.0, true};
            } else if (k == SpaceKind::SpaceForm && sp->N() == 3.0) {
                chart_ = {2, 1, 0.0, 2.0 * M_PI, -1.0, 1.0, true};
            } else if (k == SpaceKind::FlatCylinder) {
                chart_ = {1, 1, 0.0, 2.0 * M_PI, 0.0, 1.0, true};
            } else if (k == SpaceKind::WeightedInterval) {
                const Interval& iv = sp->interval();
                const double p0 = base.point.c[0];
                const bool interior = p0 > iv.a + 1e-12 && p0 < iv.b - 1e-12;
                chart_ = {0, interior ? 2 : 1, 0.0, 1.0, 0.0, 1.0, false};
            } else if (k == SpaceKind::WeightedHalfLine) {
                if (std::abs(base.point.c[0]) > 1e-12)
                    throw std::invalid_argument("half line base point must be the origin");
                chart_ = {0, 1, 0.0, 1.0, 0.0, 1.0, false};
            } else {
                throw std::invalid_argument("unsupported (space, base) combination");
            }
            break;
        case BaseVariant::Hyperplane:
            if (k != SpaceKind::SpaceForm || sp->K() != 0.0 || sp->N() != 2.0)
                throw std::invalid_argument("unsupported (space, base) combination");
            chart_ = {1, 1, -sp->chart_halfwidth(), sp->chart_halfwidth(), 0.0, 1.0, false};
            break;
        case BaseVariant::Equator: {
            if (k != SpaceKind::SpaceForm || !(sp->K() > 0.0))
                throw std::invalid_argument("unsupported (space, base) combination");
            const double R = sp->curv_radius();
            chart_ = {1, 1, 0.0, 2.0 * M_PI * R, 0.0, 1.0, true};
            break;
        }
        case BaseVariant::Generator:
            if (k != SpaceKind::FlatCylinder)
                throw std::invalid_argument("unsupported (space, base) combination");
            chart_ = {1, 1, -sp->chart_halfwidth(), sp->chart_halfwidth(), 0.0, 1.0, false};
            break;
        case BaseVariant::LevelPoint:
            if (k != SpaceKind::WeightedInterval)
                throw std::invalid_argument("unsupported (space, base) combination");
            if (!sp->interval().contains(base.level))
                throw std::invalid_argument("level point outside the interval");
            chart_ = {0, 1, 0.0, 1.0, 0.0, 1.0, false};
            break;
        case BaseVariant::Line:
            if (k == SpaceKind::SpaceForm && sp->K() == 0.0 && sp->N() == 2.0) {
                chart_ = {1, 1, -sp->chart_halfwidth(), sp->chart_halfwidth(), 0.0, 1.0, false};
            } else if (k == SpaceKind::FlatCylinder) {
                chart_ = {1, 1, -0.5 * sp->circumference(), 0.5 * sp->circumference(),
                          0.0, 1.0, true};
            } else if (k == SpaceKind::ProductLine) {
                chart_ = {1, 1, sp->interval().a, sp->interval().b, 0.0, 1.0, false};
            } else {
                throw std::invalid_argument("unsupported (space, base) combination");
            }
            break;
    }
}

double PolarFactorization::u_hi(const double* alpha) const {
    switch (base_.variant) {
        case BaseVariant::PointBase:
            switch (sp_->kind()) {
                case SpaceKind::SpaceForm:
                    return sp_->K() > 0.0 ? M_PI * sp_->curv_radius() : kInf;
                case SpaceKind::FlatCylinder: {
                    const double s = std::abs(std::sin(alpha[0]));
                    return s < 1e-300 ? kInf : 0.5 * sp_->circumference() / s;
                }
                case SpaceKind::WeightedInterval: {
                    const double p0 = base_.point.c[0];
                    if (chart_.natoms == 1) return sp_->interval().b - p0;
                    return alpha[0] < 0.5 ? sp_->interval().b - p0 : p0 - sp_->interval().a;
                }
                case SpaceKind::WeightedHalfLine:
                    return kInf;
                default:
                    return kInf;
            }
        case BaseVariant::Hyperplane:
            return kInf;
        case BaseVariant::Equator:
            return 0.5 * M_PI * sp_->curv_radius();
        case BaseVariant::Generator:
            return 0.5 * sp_->circumference();
        case BaseVariant::LevelPoint:
            return sp_->interval().b - base_.level;
        case BaseVariant::Line:
            return kInf;
    }
    return kInf;
}

double PolarFactorization::u_lo(const double* alpha) const {
    switch (base_.variant) {
        case BaseVariant::PointBase:
            return 0.0;
        case BaseVariant::Hyperplane:
        case BaseVariant::Line:
            return -kInf;
        case BaseVariant::Equator:
            return -0.5 * M_PI * sp_->curv_radius();
        case BaseVariant::Generator:
            return -0.5 * sp_->circumference();
        case BaseVariant::LevelPoint:
            return sp_->interval().a - base_.level;
    }
    (void)alpha;
    return -kInf;
}

bool PolarFactorization::has_initial_point(const double* alpha) const {
    return std::isfinite(u_hi(alpha));
}

bool PolarFactorization::has_final_point(const double* alpha) const {
    return std::isfinite(u_lo(alpha));
}

double PolarFactorization::chart_scale() const { return chart_.measure(); }

double PolarFactorization::geometric_jacobian(double u) const {
    if (base_.variant != BaseVariant::PointBase || sp_->kind() != SpaceKind::SpaceForm)
        throw std::logic_error("geometric_jacobian: space-form point base only");
    const double kappa = sp_->K() / (sp_->N() - 1.0);
    return std::pow(s_kappa(kappa, u), sp_->N() - 1.0);
}

double PolarFactorization::jacobian(const double* alpha, double u) const {
    const double scale = chart_scale();
    switch (base_.variant) {
        case BaseVariant::PointBase:
            switch (sp_->kind()) {
                case SpaceKind::SpaceForm:
                    return scale * geometric_jacobian(u);
                case SpaceKind::FlatCylinder:
                    return scale * u;
                case SpaceKind::WeightedInterval: {
                    const double p0 = base_.point.c[0];
                    const double x = (chart_.natoms == 1 || alpha[0] < 0.5) ? p0 + u : p0 - u;
                    return scale * sp_->weight().value(x);
                }
                case SpaceKind::WeightedHalfLine:
                    return scale * sp_->weight().value(u);
                default:
                    return 0.0;
            }
        case BaseVariant::Hyperplane:
            return scale;
        case BaseVariant::Equator: {
            const double R = sp_->curv_radius();
            return scale * std::cos(u / R);
        }
        case BaseVariant::Generator:
            return scale;
        case BaseVariant::LevelPoint:
            return scale * sp_->weight().value(base_.level + u);
        case BaseVariant::Line:
            switch (sp_->kind()) {
                case SpaceKind::SpaceForm:
                case SpaceKind::FlatCylinder:
                    return scale;
                case SpaceKind::ProductLine: {
                    double j = scale * sp_->weight().value(alpha[0]);
                    if (sp_->broken_amp() != 0.0)
                        j *= 1.0 + sp_->broken_amp() *
                                       std::sin(sp_->broken_freq() * (-u));
                    return j;
                }
                default:
                    return 0.0;
            }
    }
    return 0.0;
}

Point PolarFactorization::point_at(const double* alpha, double u) const {
    Point pt;
    switch (base_.variant) {
        case BaseVariant::PointBase:
            switch (sp_->kind()) {
                case SpaceKind::SpaceForm: {
                    const Point& p = base_.point;
                    if (sp_->K() == 0.0) {
                        if (sp_->N() == 2.0) {
                            pt.c[0] = p.c[0] + u * std::cos(alpha[0]);
                            pt.c[1] = p.c[1] + u * std::sin(alpha[0]);
                        } else {
                            const double phi = alpha[0], c = alpha[1];
                            const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
                            pt.c[0] = p.c[0] + u * s * std::cos(phi);
                            pt.c[1] = p.c[1] + u * s * std::sin(phi);
                            pt.c[2] = p.c[2] + u * c;
                        }
                        return pt;
                    }
                    const double R = sp_->curv_radius();
                    // tangent frame at the default pole
                    const double v0 = std::cos(alpha[0]), v1 = std::sin(alpha[0]);
                    if (sp_->K() > 0.0) {
                        const double cs = std::cos(u / R), sn = std::sin(u / R);
                        pt.c[0] = R * sn * v0;
                        pt.c[1] = R * sn * v1;
                        pt.c[2] = cs * base_.point.c[2];
                        return pt;
                    }
                    const double ch = std::cosh(u / R), sh = std::sinh(u / R);
                    pt.c[0] = ch * base_.point.c[0];
                    pt.c[1] = R * sh * v0;
                    pt.c[2] = R * sh * v1;
                    return pt;
                }
                case SpaceKind::FlatCylinder: {
                    pt.c[0] = wrap(base_.point.c[0] + u * std::sin(alpha[0]),
                                   sp_->circumference());
                    pt.c[1] = base_.point.c[1] + u * std::cos(alpha[0]);
                    return pt;
                }
                case SpaceKind::WeightedInterval: {
                    const double p0 = base_.point.c[0];
                    pt.c[0] = (chart_.natoms == 1 || alpha[0] < 0.5) ? p0 + u : p0 - u;
                    return pt;
                }
                case SpaceKind::WeightedHalfLine:
                    pt.c[0] = u;
                    return pt;
                default:
                    return pt;
            }
        case BaseVariant::Hyperplane:
            pt.c[0] = u;
            pt.c[1] = alpha[0];
            return pt;
        case BaseVariant::Equator: {
            const double R = sp_->curv_radius();
            const double phi = alpha[0] / R;
            pt.c[0] = R * std::cos(u / R) * std::cos(phi);
            pt.c[1] = R * std::cos(u / R) * std::sin(phi);
            pt.c[2] = R * std::sin(u / R);
            return pt;
        }
        case BaseVariant::Generator:
            pt.c[0] = u;
            pt.c[1] = alpha[0];
            return pt;
        case BaseVariant::LevelPoint:
            pt.c[0] = base_.level + u;
            return pt;
        case BaseVariant::Line:
            switch (sp_->kind()) {
                case SpaceKind::SpaceForm:
                    pt.c[0] = -u;
                    pt.c[1] = alpha[0];
                    return pt;
                case SpaceKind::FlatCylinder:
                    pt.c[0] = wrap(alpha[0], sp_->circumference());
                    pt.c[1] = -u;
                    return pt;
                case SpaceKind::ProductLine:
                    pt.c[0] = alpha[0];
                    pt.c[1] = -u;
                    return pt;
                default:
                    return pt;
            }
    }
    return pt;
}

} // namespace needlelab
