#include "delaylab/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include "delaylab/error.hpp"

namespace delaylab::numerics {
namespace {

// Kronrod nodes on [0,1] (symmetric); odd indices are the Gauss 7-point nodes.
constexpr std::array<double, 8> kXgk{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kWgk{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

constexpr std::array<double, 4> kWg{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gauss_kronrod(const ScalarFn& h, double a, double b, std::size_t& evals) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    auto sample = [&](double x) {
        const double v = h(x);
        ++evals;
        if (!std::isfinite(v)) {
            std::ostringstream os;
            os.precision(17);
            os << "non-finite integrand value at x = " << x;
            throw NumericsError(os.str());
        }
        return v;
    };

    const double fc = sample(center);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    double magnitude = std::abs(fc) * kWgk[7];
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double lo = sample(center - dx);
        const double hi = sample(center + dx);
        kronrod += kWgk[j] * (lo + hi);
        magnitude += kWgk[j] * (std::abs(lo) + std::abs(hi));
        if (j % 2 == 1) gauss += kWg[j / 2] * (lo + hi);
    }
    kronrod *= half;
    gauss *= half;
    magnitude *= std::abs(half);
    // the estimate never claims more than the rounding of the rule itself
    const double error = std::max(std::abs(kronrod - gauss),
                                  std::numeric_limits<double>::epsilon() * magnitude);
    return Segment{a, b, kronrod, error};
}

}  // namespace

QuadResult integrate(const ScalarFn& h, double a, double b, const QuadOptions& opts) {
    if (!std::isfinite(a) || !std::isfinite(b)) throw NumericsError("integration limits must be finite");
    if (a > b) {
        QuadResult r = integrate(h, b, a, opts);
        r.value = -r.value;
        return r;
    }
    QuadResult out;
    if (a == b) return out;

    std::priority_queue<Segment> work;
    work.push(gauss_kronrod(h, a, b, out.evaluations));
    double total = work.top().value;
    double error = work.top().error;

    auto converged = [&] { return error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total)); };

    while (!converged()) {
        if (work.size() >= opts.max_intervals) {
            const Segment& worst = work.top();
            std::ostringstream os;
            os.precision(17);
            os << "quadrature did not converge after " << work.size()
               << " subintervals; worst subinterval [" << worst.a << ", " << worst.b
               << "] with error estimate " << worst.error;
            throw NumericsError(os.str());
        }
        const Segment worst = work.top();
        work.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(worst.a < mid && mid < worst.b)) {
            throw NumericsError("quadrature subinterval collapsed to machine precision");
        }
        const Segment left = gauss_kronrod(h, worst.a, mid, out.evaluations);
        const Segment right = gauss_kronrod(h, mid, worst.b, out.evaluations);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        work.push(left);
        work.push(right);
    }

    // re-sum to shed the drift of the running updates
    total = 0.0;
    error = 0.0;
    std::vector<Segment> parts;
    parts.reserve(work.size());
    while (!work.empty()) {
        parts.push_back(work.top());
        work.pop();
    }
    std::sort(parts.begin(), parts.end(), [](const Segment& l, const Segment& r) { return l.a < r.a; });
    for (const auto& s : parts) {
        total += s.value;
        error += s.error;
    }
    out.value = total;
    out.abs_error_estimate = error;
    return out;
}

double find_root(const ScalarFn& F, double a, double b, const RootOptions& opts) {
    double fa = F(a);
    double fb = F(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (!std::isfinite(fa) || !std::isfinite(fb)) throw NumericsError("non-finite function value at bracket end");
    if ((fa > 0.0) == (fb > 0.0)) {
        std::ostringstream os;
        os.precision(17);
        os << "no sign change on [" << a << ", " << b << "]: F(a) = " << fa << ", F(b) = " << fb;
        throw NumericsError(os.str());
    }

    // b holds the best estimate, [b, c] brackets the root, a is the previous b.
    double c = a, fc = fa;
    double d = b - a, e = d;
    constexpr double kEps = std::numeric_limits<double>::epsilon();

    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol1 = 2.0 * kEps * std::abs(b) + 0.5 * opts.tol;
        const double m = 0.5 * (c - b);
        if (std::abs(m) <= tol1 || fb == 0.0) return b;

        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double p, q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                const double qa = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) {
                q = -q;
            } else {
                p = -p;
            }
            if (2.0 * p < std::min(3.0 * m * q - std::abs(tol1 * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol1) ? d : (m > 0.0 ? tol1 : -tol1);
        fb = F(b);
        if (!std::isfinite(fb)) throw NumericsError("non-finite function value inside bracket");
    }
    throw NumericsError("root finder exceeded " + std::to_string(opts.max_iterations) + " iterations");
}

}  // namespace delaylab::numerics
