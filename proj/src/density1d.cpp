#include "needlelab/density1d.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "needlelab/quadrature.hpp"

namespace needlelab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Interval::Interval(double a_, double b_) : a(a_), b(b_) {
    if (!(a < b)) throw std::invalid_argument("Interval: need a < b");
}
bool Interval::finite_a() const { return std::isfinite(a); }
bool Interval::finite_b() const { return std::isfinite(b); }

// ---------------------------------------------------------------------------
// Density1D construction

Density1D Density1D::constant(Interval iv, double c) {
    if (!(c > 0.0)) throw std::invalid_argument("constant density must be positive");
    Density1D d;
    d.iv_ = iv;
    d.form_ = DensityForm::Constant;
    d.amp_ = c;
    d.cache_mass();
    return d;
}

Density1D Density1D::power(Interval iv, double amp, double p, double x0, double sgn) {
    Density1D d;
    d.iv_ = iv;
    d.form_ = DensityForm::Power;
    d.amp_ = amp;
    d.p_ = p;
    d.x0_ = x0;
    d.sgn_ = sgn;
    if (sgn * (iv.a - x0) < -1e-15 && sgn * (iv.b - x0) < -1e-15)
        throw std::invalid_argument("power density: base negative on the interval");
    d.cache_mass();
    return d;
}

Density1D Density1D::sin_pow(Interval iv, double amp, double omega, double p, double x0) {
    Density1D d;
    d.iv_ = iv;
    d.form_ = DensityForm::SinPow;
    d.amp_ = amp;
    d.omega_ = omega;
    d.p_ = p;
    d.x0_ = x0;
    d.cache_mass();
    return d;
}

Density1D Density1D::cosh_pow(Interval iv, double amp, double omega, double p, double x0) {
    Density1D d;
    d.iv_ = iv;
    d.form_ = DensityForm::CoshPow;
    d.amp_ = amp;
    d.omega_ = omega;
    d.p_ = p;
    d.x0_ = x0;
    d.cache_mass();
    return d;
}

Density1D Density1D::sinh_pow(Interval iv, double amp, double omega, double p, double x0) {
    Density1D d;
    d.iv_ = iv;
    d.form_ = DensityForm::SinhPow;
    d.amp_ = amp;
    d.omega_ = omega;
    d.p_ = p;
    d.x0_ = x0;
    d.cache_mass();
    return d;
}

Density1D Density1D::exponential(Interval iv, double amp, double omega, double x0) {
    Density1D d;
    d.iv_ = iv;
    d.form_ = DensityForm::Exp;
    d.amp_ = amp;
    d.omega_ = omega;
    d.x0_ = x0;
    d.cache_mass();
    return d;
}

Density1D Density1D::s_kappa_pow(Interval iv, double amp, double kappa, double p,
                                 double x0, double sgn) {
    Density1D d;
    d.iv_ = iv;
    d.form_ = DensityForm::SKappaPow;
    d.amp_ = amp;
    d.kappa_ = kappa;
    d.p_ = p;
    d.x0_ = x0;
    d.sgn_ = sgn;
    d.cache_mass();
    return d;
}

Density1D Density1D::from_grid(Interval iv, std::vector<double> values) {
    if (!iv.finite()) throw std::invalid_argument("grid density needs a finite interval");
    if (values.size() < 4) throw std::invalid_argument("grid density needs >= 4 samples");
    Density1D d;
    d.iv_ = iv;
    d.form_ = DensityForm::Grid;
    d.log_values_.reserve(values.size());
    for (double v : values) {
        if (!(v > 0.0)) throw std::invalid_argument("grid density sample must be > 0");
        d.log_values_.push_back(std::log(v));
    }
    d.cache_mass();
    return d;
}

Density1D Density1D::log_perturbed(const Density1D& base,
                                   const std::vector<double>& coeffs) {
    if (!base.closed_form())
        throw std::invalid_argument("log_perturbed: base must be a closed form");
    Density1D d = base;
    d.pert_base_ = std::make_shared<Density1D>(base);
    d.pert_coeffs_ = coeffs;
    d.cache_mass();
    return d;
}

// ---------------------------------------------------------------------------
// Evaluation

double Density1D::log_value(double x) const {
    if (pert_base_) {
        const double D = iv_.length();
        double s = pert_base_->log_value(x);
        for (std::size_t k = 0; k < pert_coeffs_.size(); ++k)
            s += pert_coeffs_[k] * std::sin((k + 1) * M_PI * (x - iv_.a) / D);
        return s;
    }
    switch (form_) {
        case DensityForm::Constant:
            return std::log(amp_);
        case DensityForm::Power:
            return std::log(amp_) + p_ * std::log(sgn_ * (x - x0_));
        case DensityForm::SinPow:
            return std::log(amp_) + p_ * std::log(std::sin(omega_ * (x - x0_)));
        case DensityForm::CoshPow:
            return std::log(amp_) + p_ * std::log(std::cosh(omega_ * (x - x0_)));
        case DensityForm::SinhPow:
            return std::log(amp_) + p_ * std::log(std::sinh(omega_ * (x - x0_)));
        case DensityForm::Exp:
            return std::log(amp_) + omega_ * (x - x0_);
        case DensityForm::SKappaPow:
            return std::log(amp_) + p_ * std::log(s_kappa(kappa_, sgn_ * (x - x0_)));
        case DensityForm::Grid: {
            const std::size_t n = log_values_.size() - 1;
            const double step = iv_.length() / n;
            double u = (x - iv_.a) / step;
            // clamp queries to [a,b]; extrapolate nothing beyond the ends
            if (u <= 0.0) return log_values_.front();
            if (u >= static_cast<double>(n)) return log_values_.back();
            const std::size_t i = static_cast<std::size_t>(u);
            const double frac = u - i;
            return log_values_[i] * (1.0 - frac) + log_values_[i + 1] * frac;
        }
    }
    return 0.0;
}

double Density1D::value(double x) const {
    if (!pert_base_) {
        // direct formulas avoid exp(log(.)) noise for the common forms
        switch (form_) {
            case DensityForm::Constant: return amp_;
            case DensityForm::Power:    return amp_ * std::pow(sgn_ * (x - x0_), p_);
            case DensityForm::SinPow:   return amp_ * std::pow(std::sin(omega_ * (x - x0_)), p_);
            case DensityForm::CoshPow:  return amp_ * std::pow(std::cosh(omega_ * (x - x0_)), p_);
            case DensityForm::SinhPow:  return amp_ * std::pow(std::sinh(omega_ * (x - x0_)), p_);
            case DensityForm::Exp:      return amp_ * std::exp(omega_ * (x - x0_));
            case DensityForm::SKappaPow:
                return amp_ * std::pow(s_kappa(kappa_, sgn_ * (x - x0_)), p_);
            case DensityForm::Grid:     break;
        }
    }
    return std::exp(log_value(x));
}

double Density1D::log_deriv(double x) const {
    if (pert_base_) {
        const double D = iv_.length();
        double s = pert_base_->log_deriv(x);
        for (std::size_t k = 0; k < pert_coeffs_.size(); ++k) {
            const double w = (k + 1) * M_PI / D;
            s += pert_coeffs_[k] * w * std::cos((k + 1) * M_PI * (x - iv_.a) / D);
        }
        return s;
    }
    switch (form_) {
        case DensityForm::Constant:
            return 0.0;
        case DensityForm::Power:
            return p_ * sgn_ / (sgn_ * (x - x0_));
        case DensityForm::SinPow:
            return p_ * omega_ / std::tan(omega_ * (x - x0_));
        case DensityForm::CoshPow:
            return p_ * omega_ * std::tanh(omega_ * (x - x0_));
        case DensityForm::SinhPow:
            return p_ * omega_ / std::tanh(omega_ * (x - x0_));
        case DensityForm::Exp:
            return omega_;
        case DensityForm::SKappaPow:
            return p_ * sgn_ * s_ratio(kappa_, sgn_ * (x - x0_));
        case DensityForm::Grid: {
            const std::size_t n = log_values_.size() - 1;
            const double step = iv_.length() / n;
            if (!iv_.contains(x))
                throw std::domain_error("log_deriv: evaluation at or beyond an endpoint");
            const double u = (x - iv_.a) / step;
            const std::size_t near = static_cast<std::size_t>(u + 0.5);
            if (std::abs(u - near) < 1e-9 && near >= 1 && near <= n - 1) {
                // central differences at interior nodes, one-sided at the
                // first and last interior node (endpoint samples untrusted)
                if (near == 1) return (log_values_[2] - log_values_[1]) / step;
                if (near == n - 1)
                    return (log_values_[n - 1] - log_values_[n - 2]) / step;
                return (log_values_[near + 1] - log_values_[near - 1]) / (2.0 * step);
            }
            const std::size_t i = std::min(static_cast<std::size_t>(u), n - 1);
            return (log_values_[i + 1] - log_values_[i]) / step;
        }
    }
    return 0.0;
}

void Density1D::cache_mass() {
    if (!iv_.finite()) {
        mass_ = kInf;
        return;
    }
    if (form_ == DensityForm::Grid && !pert_base_) {
        // exact integral of the log-linear interpolant
        const std::size_t n = log_values_.size() - 1;
        const double step = iv_.length() / n;
        NeumaierSum s;
        for (std::size_t i = 0; i < n; ++i) {
            const double l0 = log_values_[i], l1 = log_values_[i + 1];
            const double m = (l1 - l0) / step;
            if (std::abs(m) * step < 1e-12)
                s.add(step * std::exp(0.5 * (l0 + l1)));
            else
                s.add((std::exp(l1) - std::exp(l0)) / m);
        }
        mass_ = s.value();
        return;
    }
    const int n = panels_for(iv_.length(), 1024, 512);
    mass_ = simpson([this](double x) { return value(x); }, iv_.a, iv_.b, n);
}

Density1D Density1D::normalized() const {
    if (!std::isfinite(mass_) || mass_ <= 0.0)
        throw std::invalid_argument("normalized: mass not finite and positive");
    Density1D d = *this;
    if (form_ == DensityForm::Grid && !pert_base_) {
        const double shift = std::log(mass_);
        for (double& l : d.log_values_) l -= shift;
    } else if (pert_base_) {
        d.pert_base_ = std::make_shared<Density1D>(*pert_base_);
        d.pert_base_->amp_ /= mass_;
        d.pert_base_->cache_mass();
    } else {
        d.amp_ /= mass_;
    }
    d.cache_mass();
    return d;
}

Density1D Density1D::precompose_affine(double slope, double shift,
                                       Interval new_iv) const {
    if (slope != 1.0 && slope != -1.0)
        throw std::invalid_argument("precompose_affine: slope must be +1 or -1");
    if (pert_base_)
        throw std::invalid_argument("precompose_affine: perturbed bases unsupported");
    Density1D d = *this;
    d.iv_ = new_iv;
    switch (form_) {
        case DensityForm::Constant:
            break;
        case DensityForm::Power:
        case DensityForm::SKappaPow:
            d.sgn_ = sgn_ * slope;
            d.x0_ = slope * (x0_ - shift);
            break;
        case DensityForm::SinPow:
        case DensityForm::CoshPow:
        case DensityForm::SinhPow:
        case DensityForm::Exp:
            d.omega_ = omega_ * slope;
            d.x0_ = slope * (x0_ - shift);
            break;
        case DensityForm::Grid: {
            // slope = -1 with matching length maps nodes onto nodes exactly
            const std::size_t n = log_values_.size();
            std::vector<double> lv(n);
            const bool exact_flip =
                slope == -1.0 && std::abs(new_iv.length() - iv_.length()) < 1e-12 &&
                std::abs(-new_iv.a + shift - iv_.b) < 1e-9;
            if (exact_flip) {
                for (std::size_t i = 0; i < n; ++i) lv[i] = log_values_[n - 1 - i];
            } else {
                for (std::size_t i = 0; i < n; ++i) {
                    const double t = new_iv.a + new_iv.length() * i / (n - 1);
                    lv[i] = log_value(slope * t + shift);
                }
            }
            d.log_values_ = std::move(lv);
            break;
        }
    }
    d.cache_mass();
    return d;
}

Density1D Density1D::scaled(double factor) const {
    if (!(factor > 0.0)) throw std::invalid_argument("scaled: factor must be > 0");
    Density1D d = *this;
    if (form_ == DensityForm::Grid && !pert_base_) {
        const double shift = std::log(factor);
        for (double& l : d.log_values_) l += shift;
    } else if (pert_base_) {
        d.pert_base_ = std::make_shared<Density1D>(*pert_base_);
        d.pert_base_->amp_ *= factor;
        d.pert_base_->cache_mass();
    } else {
        d.amp_ *= factor;
    }
    d.cache_mass();
    return d;
}

double Density1D::grid_step() const {
    if (form_ != DensityForm::Grid) return 0.0;
    return iv_.length() / (log_values_.size() - 1);
}

std::string Density1D::describe() const {
    const char* names[] = {"constant", "power",    "sin_pow", "cosh_pow",
                           "sinh_pow", "exp",      "s_kappa_pow", "custom_grid"};
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s%s on (%.17g, %.17g)",
                  names[static_cast<int>(form_)], pert_base_ ? "+log_perturbation" : "",
                  iv_.a, iv_.b);
    return buf;
}

// ---------------------------------------------------------------------------
// Catalog parsing

namespace {

double get_param(const std::string& spec, const char* key, double dflt,
                 bool required = false) {
    std::istringstream in(spec);
    std::string tok;
    in >> tok;  // skip name
    const std::string prefix = std::string(key) + "=";
    while (in >> tok) {
        if (tok.rfind(prefix, 0) == 0) return std::stod(tok.substr(prefix.size()));
    }
    if (required) throw std::invalid_argument(std::string("density spec: missing ") + key);
    return dflt;
}

} // namespace

Density1D Density1D::parse(const std::string& spec) {
    std::istringstream in(spec);
    std::string name;
    if (!(in >> name)) throw std::invalid_argument("empty density spec");
    const double a = get_param(spec, "a", 0.0, name != "custom_grid");
    const double b = get_param(spec, "b", 1.0, name != "custom_grid");
    const double amp = get_param(spec, "amp", 1.0);
    const double omega = get_param(spec, "omega", 1.0);
    const double p = get_param(spec, "p", 1.0);
    const double x0 = get_param(spec, "x0", 0.0);
    const double sgn = get_param(spec, "sgn", 1.0);
    if (name == "constant") return constant(Interval(a, b), amp);
    if (name == "power") return power(Interval(a, b), amp, p, x0, sgn);
    if (name == "sin_pow") return sin_pow(Interval(a, b), amp, omega, p, x0);
    if (name == "cosh_pow") return cosh_pow(Interval(a, b), amp, omega, p, x0);
    if (name == "sinh_pow") return sinh_pow(Interval(a, b), amp, omega, p, x0);
    if (name == "exp") return exponential(Interval(a, b), amp, omega, x0);
    if (name == "custom_grid") {
        std::istringstream in2(spec);
        std::string tok, path;
        in2 >> tok;
        while (in2 >> tok)
            if (tok.rfind("file=", 0) == 0) path = tok.substr(5);
        if (path.empty()) throw std::invalid_argument("custom_grid: missing file=");
        return load_grid_file(path);
    }
    throw std::invalid_argument("unknown density form: " + name);
}

Density1D Density1D::load_grid_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open grid file: " + path);
    std::vector<double> xs, hs;
    double x, h;
    while (in >> x >> h) {
        xs.push_back(x);
        hs.push_back(h);
    }
    if (xs.size() < 4) throw std::invalid_argument("grid file: need >= 4 rows");
    const double step = xs[1] - xs[0];
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (std::abs(xs[i] - xs[i - 1] - step) > 1e-9 * std::abs(step))
            throw std::invalid_argument("grid file: non-uniform x spacing");
    return from_grid(Interval(xs.front(), xs.back()), hs);
}

// ---------------------------------------------------------------------------
// Certification sweeps

std::string GridSpec::describe() const {
    char buf[120];
    std::snprintf(buf, sizeof(buf), "nx=%d nt=%d edge_frac=%g tol=%g", nx, nt,
                  edge_frac, tolerance);
    return buf;
}

namespace {

std::vector<double> interior_points(const Interval& iv, int n, double edge_frac) {
    const double D = iv.length();
    const double lo = iv.a + edge_frac * D, hi = iv.b - edge_frac * D;
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i)
        xs[i] = lo + (hi - lo) * i / (n - 1);
    return xs;
}

void require_positive_interval(const Density1D& h) {
    if (!(h.interval().length() > 0))
        throw std::invalid_argument("degenerate interval");
}

} // namespace

CheckReport check_mcp_density(const Density1D& h, const CurvatureDim& kd,
                              const GridSpec& grid) {
    require_positive_interval(h);
    if (!h.interval().finite())
        throw std::invalid_argument("check_mcp_density: finite interval required");
    CheckReport rep;
    rep.tolerance = grid.tolerance;
    rep.grid_spec = grid.describe();

    const auto xs = interior_points(h.interval(), grid.nx, grid.edge_frac);
    for (double x0 : xs) {
        const double h0 = h.value(x0);
        if (!(h0 > 0.0)) throw std::invalid_argument("non-positive sample");
        for (double x1 : xs) {
            const double theta = std::abs(x1 - x0);
            for (int k = 0; k <= grid.nt; ++k) {
                const double t = static_cast<double>(k) / grid.nt;
                const ExtReal sig = sigma_coeff(kd.K, kd.N - 1.0, 1.0 - t, theta);
                const double y = t * x1 + (1.0 - t) * x0;
                if (sig.is_infinite()) {
                    rep.record(-kInf, {x0, x1, t}, "sigma infinite: K theta^2 >= (N-1) pi^2");
                    continue;
                }
                const double rhs = std::pow(sig.value(), kd.N - 1.0) * h0;
                const double margin = (h.value(y) - rhs) / (h0 + kMarginFloor);
                rep.record(margin, {x0, x1, t});
            }
        }
    }
    rep.finalize();
    return rep;
}

CheckReport check_cd_density(const Density1D& h, const CurvatureDim& kd,
                             const GridSpec& grid) {
    require_positive_interval(h);
    if (!h.interval().finite())
        throw std::invalid_argument("check_cd_density: finite interval required");
    CheckReport rep;
    rep.tolerance = grid.tolerance;
    rep.grid_spec = grid.describe();

    const double inv = 1.0 / (kd.N - 1.0);
    const auto xs = interior_points(h.interval(), grid.nx, grid.edge_frac);
    std::vector<double> g(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) g[i] = std::exp(inv * h.log_value(xs[i]));

    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t j = 0; j < xs.size(); ++j) {
            if (i == j) continue;
            const double x0 = xs[i], x1 = xs[j];
            const double theta = std::abs(x1 - x0);
            for (int k = 1; k < grid.nt; ++k) {
                const double t = static_cast<double>(k) / grid.nt;
                const ExtReal s0 = sigma_coeff(kd.K, kd.N - 1.0, 1.0 - t, theta);
                const ExtReal s1 = sigma_coeff(kd.K, kd.N - 1.0, t, theta);
                const double y = (1.0 - t) * x0 + t * x1;
                if (s0.is_infinite() || s1.is_infinite()) {
                    rep.record(-kInf, {x0, x1, t}, "sigma infinite: K theta^2 >= (N-1) pi^2");
                    continue;
                }
                const double rhs = s0.value() * g[i] + s1.value() * g[j];
                const double lhs = std::exp(inv * h.log_value(y));
                rep.record(relative_margin(lhs, rhs), {x0, x1, t});
            }
        }
    }
    rep.finalize();
    return rep;
}

// ---------------------------------------------------------------------------
// Bounds

RatioBounds ratio_bounds(const Density1D& h, const CurvatureDim& kd, double x0,
                         double x1) {
    const Interval& iv = h.interval();
    if (!iv.finite()) throw std::invalid_argument("ratio_bounds: finite interval required");
    if (!(iv.a < x0 && x0 <= x1 && x1 < iv.b))
        throw std::domain_error("ratio_bounds: need a < x0 <= x1 < b");
    const double kappa = kd.kappa();
    const double pw = kd.N - 1.0;
    RatioBounds rb;
    rb.lower = std::pow(s_kappa(kappa, iv.b - x1) / s_kappa(kappa, iv.b - x0), pw);
    rb.upper = std::pow(s_kappa(kappa, x1 - iv.a) / s_kappa(kappa, x0 - iv.a), pw);
    rb.observed = h.value(x1) / h.value(x0);
    return rb;
}

LogDerivBounds log_derivative_bounds(const Density1D& h, const CurvatureDim& kd,
                                     double x) {
    const Interval& iv = h.interval();
    if (!(x > iv.a && x < iv.b))
        throw std::domain_error("log_derivative_bounds: evaluation at endpoint");
    const double kappa = kd.kappa();
    const double pw = kd.N - 1.0;
    LogDerivBounds lb;
    lb.upper = iv.finite_a() ? pw * s_ratio(kappa, x - iv.a)
                             : pw * s_ratio_missing_endpoint(kappa);
    lb.lower = iv.finite_b() ? -pw * s_ratio(kappa, iv.b - x)
                             : -pw * s_ratio_missing_endpoint(kappa);
    lb.observed = h.log_deriv(x);
    return lb;
}

namespace {

// sup-bound factor S of the diameter estimate: sup h <= S / (b-a).
double sup_factor(const CurvatureDim& kd, double D) {
    if (kd.K >= 0.0) return kd.N;
    const double denom = simpson(
        [&](double t) {
            const ExtReal s = sigma_coeff(kd.K, kd.N - 1.0, t, D);
            return std::pow(s.value(), kd.N - 1.0);
        },
        0.0, 1.0, 512);
    return 1.0 / denom;
}

} // namespace

SupBound sup_bound(const Density1D& h, const CurvatureDim& kd) {
    const Interval& iv = h.interval();
    if (!iv.finite()) throw std::invalid_argument("sup_bound: finite interval required");
    if (std::abs(h.mass() - 1.0) > 1e-8)
        throw std::invalid_argument("sup_bound: density not normalized to mass 1");
    SupBound sb;
    sb.bound = sup_factor(kd, iv.length()) / iv.length();
    sb.observed_sup = 0.0;
    const int n = 4000;
    for (int i = 0; i <= n; ++i) {
        const double x = iv.a + iv.length() * i / n;
        sb.observed_sup = std::max(sb.observed_sup, h.value(x));
    }
    return sb;
}

DerivativeL1 derivative_l1(const Density1D& h, const CurvatureDim& kd) {
    const Interval& iv = h.interval();
    if (!iv.finite()) throw std::invalid_argument("derivative_l1: finite interval required");
    if (std::abs(h.mass() - 1.0) > 1e-8)
        throw std::invalid_argument("derivative_l1: density not normalized to mass 1");
    const double D = iv.length();
    DerivativeL1 out;

    if (h.form() == DensityForm::Grid) {
        // exact total variation of the log-linear interpolant
        NeumaierSum s;
        const double step = h.grid_step();
        double prev = h.value(iv.a);
        for (double x = iv.a + step; x < iv.b + 0.5 * step; x += step) {
            const double cur = h.value(std::min(x, iv.b));
            s.add(std::abs(cur - prev));
            prev = cur;
        }
        out.integral = s.value();
    } else {
        const int n = panels_for(D, 2048, 2048);
        const double pad = 1e-9 * D;
        out.integral = simpson(
            [&](double x) {
                const double xc = std::min(std::max(x, iv.a + pad), iv.b - pad);
                return std::abs(h.deriv(xc));
            },
            iv.a + pad, iv.b - pad, n);
    }

    // Constant C^{(K,N)}_D assembled from the half-interval decomposition of
    // the proof: on each half |h'| <= (signed combination) + 2 (N-1) (s'/s) h,
    // integrated with sup h <= S/D.  For K > 0 the end pieces where h' has a
    // sign are bounded separately (the pi/2 split), leaving the middle where
    // both s-ratios are nonnegative.
    const double kappa = kd.kappa();
    const double S = sup_factor(kd, D);
    double c;
    if (kd.K <= 0.0) {
        const double dlogS = std::log(s_kappa(kappa, D) / s_kappa(kappa, 0.5 * D));
        c = 2.0 + 4.0 * (kd.N - 1.0) * dlogS;
    } else {
        const double P = M_PI / std::sqrt(kappa);
        const double u1 = std::min(D, 0.5 * P);
        const double dlogS = std::log(s_kappa(kappa, u1) / s_kappa(kappa, 0.5 * D));
        c = 4.0 + 4.0 * (kd.N - 1.0) * std::max(0.0, dlogS);
    }
    out.bound = S * c / D;
    return out;
}

Density1D log_convolve(const Density1D& h, double eps, int grid_nodes) {
    const Interval& iv = h.interval();
    if (!iv.finite()) throw std::invalid_argument("log_convolve: finite interval required");
    if (!(eps > 0.0 && eps < 0.5 * iv.length()))
        throw std::invalid_argument("log_convolve: eps too large for interval");
    const Interval shrunk(iv.a + eps, iv.b - eps);

    // psi(u) = (35/32)(1 - u^2)^3 on [-1,1]
    auto psi = [](double u) {
        const double w = 1.0 - u * u;
        return w > 0.0 ? (35.0 / 32.0) * w * w * w : 0.0;
    };

    std::vector<double> vals(grid_nodes + 1);
    for (int i = 0; i <= grid_nodes; ++i) {
        const double x = shrunk.a + shrunk.length() * i / grid_nodes;
        const double L = simpson(
            [&](double u) {
                const double w = psi(u);
                return w == 0.0 ? 0.0 : w * h.log_value(x - eps * u);
            },
            -1.0, 1.0, 256);
        vals[i] = std::exp(L);
    }
    return Density1D::from_grid(shrunk, vals);
}

RigidityWindow rigidity_window(double R, double N, double x0, double x1) {
    if (!(-R < x0 && x0 <= x1 && x1 < R))
        throw std::domain_error("rigidity_window: need -R < x0 <= x1 < R");
    RigidityWindow w;
    w.forced_lower = std::pow((R - x1) / (R - x0), N - 1.0);
    w.forced_upper = std::pow((x1 + R) / (x0 + R), N - 1.0);
    return w;
}

// ---------------------------------------------------------------------------
// Ray Bochner inequality

namespace {

double phi_square_integral(const Density1D& h, double x0, double dt) {
    if (h.form() == DensityForm::Grid) {
        // (log h)' is piecewise constant between nodes: integrate exactly
        const double step = h.grid_step();
        NeumaierSum s;
        double t = 0.0;
        while (t < dt - 1e-15) {
            const double x = x0 + t;
            const double cell_end =
                h.interval().a + (std::floor((x - h.interval().a) / step) + 1.0) * step;
            const double tn = std::min(dt, cell_end - x0);
            const double mid = x0 + 0.5 * (t + tn);
            const double phi = h.log_deriv(mid);
            s.add(phi * phi * (tn - t));
            t = tn;
        }
        return s.value();
    }
    const int n = panels_for(dt, 1024, 64);
    return simpson(
        [&](double s) {
            const double phi = h.log_deriv(x0 + s);
            return phi * phi;
        },
        0.0, dt, n);
}

} // namespace

CheckReport bochner_1d(const Density1D& h, const CurvatureDim& kd, double x,
                       double t, const GridSpec& grid) {
    const Interval& iv = h.interval();
    if (!iv.contains(x) || !iv.contains(x + t))
        throw std::domain_error("bochner_1d: endpoint evaluation");
    CheckReport rep;
    rep.tolerance = grid.tolerance;
    rep.grid_spec = grid.describe();

    const double x0 = t >= 0.0 ? x : x + t;
    const double dt = std::abs(t);
    const double lhs = -(h.log_deriv(x0 + dt) - h.log_deriv(x0));
    const double rhs =
        kd.K * dt + phi_square_integral(h, x0, dt) / (kd.N - 1.0);
    rep.record(relative_margin(lhs, rhs), {x, t});
    rep.finalize();
    return rep;
}

CheckReport bochner_1d_sweep(const Density1D& h, const CurvatureDim& kd,
                             const GridSpec& grid) {
    const Interval& iv = h.interval();
    CheckReport rep;
    rep.tolerance = grid.tolerance;
    rep.grid_spec = grid.describe();

    // (log h)' can blow up like 1/s at the endpoints (sin-type densities),
    // so the squared integrand needs a solid inset to stay quadrature-exact
    const auto xs = interior_points(iv, grid.nx, std::max(grid.edge_frac, 0.02));
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t j = i + 1; j < xs.size(); ++j) {
            const double x0 = xs[i], dt = xs[j] - xs[i];
            const double lhs = -(h.log_deriv(x0 + dt) - h.log_deriv(x0));
            const double rhs =
                kd.K * dt + phi_square_integral(h, x0, dt) / (kd.N - 1.0);
            rep.record(relative_margin(lhs, rhs), {x0, dt});
        }
    }
    rep.finalize();
    return rep;
}

EquivalenceReport bochner_implies_cd(const Density1D& h, const CurvatureDim& kd,
                                     const GridSpec& grid) {
    EquivalenceReport out;
    out.bochner = bochner_1d_sweep(h, kd, grid);
    out.cd = check_cd_density(h, kd, grid);
    out.agree = out.bochner.verdict == out.cd.verdict;
    return out;
}

} // namespace needlelab
