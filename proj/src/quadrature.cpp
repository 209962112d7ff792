#include "gck/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace gck {

namespace {

// Abscissae and weights of the 10-point Gauss and 21-point Kronrod rules.
constexpr double wg[5] = {0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
                          0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
                          0.295524224714752870173892994651338};
constexpr double xgk[11] = {0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
                            0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
                            0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
                            0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
                            0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
                            0.0};
constexpr double wgk[11] = {0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
                            0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
                            0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
                            0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
                            0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
                            0.149445554002916905664936468389821};

struct Panel {
    double a, b, value, err;
    bool operator<(const Panel& o) const { return err < o.err; }
};

}  // namespace

QuadResult gauss_kronrod21(const Integrand& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double resg = 0.0;
    double resk = wgk[10] * fc;
    double resabs = std::fabs(resk);
    double fv1[10], fv2[10];
    for (int j = 0; j < 5; ++j) {
        int jtw = 2 * j + 1;
        double absc = half * xgk[jtw];
        double f1 = f(center - absc), f2 = f(center + absc);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        resg += wg[j] * (f1 + f2);
        resk += wgk[jtw] * (f1 + f2);
        resabs += wgk[jtw] * (std::fabs(f1) + std::fabs(f2));
    }
    for (int j = 0; j < 5; ++j) {
        int jtwm1 = 2 * j;
        double absc = half * xgk[jtwm1];
        double f1 = f(center - absc), f2 = f(center + absc);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        resk += wgk[jtwm1] * (f1 + f2);
        resabs += wgk[jtwm1] * (std::fabs(f1) + std::fabs(f2));
    }
    double reskh = resk * 0.5;
    double resasc = wgk[10] * std::fabs(fc - reskh);
    for (int j = 0; j < 10; ++j) resasc += wgk[j] * (std::fabs(fv1[j] - reskh) + std::fabs(fv2[j] - reskh));
    const double ah = std::fabs(half);
    resasc *= ah;
    resabs *= ah;
    double abserr = std::fabs((resk - resg) * half);
    if (resasc != 0.0 && abserr != 0.0) abserr = resasc * std::min(1.0, std::pow(200.0 * abserr / resasc, 1.5));
    const double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) abserr = std::max(eps * 50.0 * resabs, abserr);
    return {resk * half, abserr, 21, true};
}

QuadResult integrate(const Integrand& f, double a, double b, double abs_tol, double rel_tol, int max_panels) {
    if (a == b) return {0.0, 0.0, 0, true};
    QuadResult first = gauss_kronrod21(f, a, b);
    std::priority_queue<Panel> heap;
    heap.push({a, b, first.value, first.abs_error});
    double total = first.value, err = first.abs_error;
    int evals = first.evaluations;
    int panels = 1;
    while (err > std::max(abs_tol, rel_tol * std::fabs(total)) && panels < max_panels) {
        Panel p = heap.top();
        double mid = 0.5 * (p.a + p.b);
        if (!(mid > std::min(p.a, p.b) && mid < std::max(p.a, p.b))) break;
        heap.pop();
        QuadResult l = gauss_kronrod21(f, p.a, mid);
        QuadResult r = gauss_kronrod21(f, mid, p.b);
        evals += 42;
        total += l.value + r.value - p.value;
        err += l.abs_error + r.abs_error - p.err;
        heap.push({p.a, mid, l.value, l.abs_error});
        heap.push({mid, p.b, r.value, r.abs_error});
        ++panels;
    }
    // Re-sum to remove drift from the running updates.
    total = 0.0;
    err = 0.0;
    std::vector<Panel> all;
    all.reserve(heap.size());
    while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
    }
    std::sort(all.begin(), all.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
    for (const auto& p : all) {
        total += p.value;
        err += p.err;
    }
    bool ok = err <= std::max(abs_tol, rel_tol * std::fabs(total));
    return {total, err, evals, ok};
}

double wynn_epsilon(const std::vector<double>& s, double& err) {
    const std::size_t n = s.size();
    err = std::numeric_limits<double>::infinity();
    if (n == 0) return 0.0;
    if (n < 3) {
        if (n == 2) err = std::fabs(s[1] - s[0]);
        return s.back();
    }
    // e[k][j]: column k of the epsilon table; even columns hold estimates.
    std::vector<double> prev(n + 1, 0.0), cur(s.begin(), s.end());
    double best = s.back(), last_even = s.back();
    err = std::fabs(s[n - 1] - s[n - 2]);
    for (std::size_t k = 1; k < n; ++k) {
        std::vector<double> next(n - k);
        bool broke = false;
        for (std::size_t j = 0; j + k < n; ++j) {
            double diff = cur[j + 1] - cur[j];
            double base = k >= 2 ? prev[j + 1] : 0.0;
            if (diff == 0.0) {
                broke = true;
                break;
            }
            next[j] = base + 1.0 / diff;
        }
        if (broke) break;
        prev = cur;
        cur = next;
        if (k % 2 == 0 && !cur.empty()) {
            double est = cur.back();
            double e = std::fabs(est - last_even);
            if (std::isfinite(est)) {
                if (e <= err) {
                    err = e;
                    best = est;
                }
                last_even = est;
            }
        }
    }
    return best;
}

}  // namespace gck
