#include "flatcrit/criteria.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace flatcrit {

namespace {

double piece_integral(const EnvelopePiece& p, double lo, double hi) {
    // integral of b e^{-2t} + a e^{2t}
    auto anti = [&](double t) { return -0.5 * p.b * std::exp(-2 * t) + 0.5 * p.a * std::exp(2 * t); };
    return anti(hi) - anti(lo);
}

}  // namespace

double criterion_integral(const SystoleEnvelope& env) {
    return criterion_integral_to(env, env.horizon);
}

double criterion_integral_to(const SystoleEnvelope& env, double t) {
    double total = 0;
    for (const auto& p : env.pieces) {
        if (p.t0 >= t) break;
        total += piece_integral(p, p.t0, std::min(p.t1, t));
    }
    return total;
}

namespace {

// Maximize a smooth function over [lo, hi] by dense sampling plus local
// golden-section refinement. Report-style accuracy, not certified.
std::pair<double, double> maximize(const std::function<double(double)>& f, double lo, double hi) {
    const int n = 96;
    double best_t = lo, best = f(lo);
    for (int i = 1; i <= n; ++i) {
        double t = lo + (hi - lo) * i / n;
        double v = f(t);
        if (v > best) {
            best = v;
            best_t = t;
        }
    }
    double step = (hi - lo) / n;
    double a = std::max(lo, best_t - step), b = std::min(hi, best_t + step);
    for (int it = 0; it < 60; ++it) {
        double m1 = a + (b - a) * 0.381966, m2 = b - (b - a) * 0.381966;
        if (f(m1) < f(m2)) a = m1;
        else b = m2;
    }
    double t = 0.5 * (a + b);
    double v = f(t);
    if (v > best) return {t, v};
    return {best_t, best};
}

}  // namespace

GrowthConstant cheung_eskin_C(const SystoleEnvelope& env, double t0) {
    if (t0 < 1) throw Error("t0 must be at least 1");
    if (env.horizon < t0) throw Error("envelope horizon below t0");
    GrowthConstant out;
    out.value = -std::numeric_limits<double>::infinity();
    for (const auto& p : env.pieces) {
        double lo = std::max(p.t0, t0), hi = p.t1;
        if (lo >= hi) continue;
        auto f = [&](double t) { return -0.5 * std::log(p.value(t)) - 0.5 * std::log(t); };
        auto [t, v] = maximize(f, lo, hi);
        if (v > out.value) {
            out.value = v;
            out.argmax = t;
        }
    }
    double margin = std::min(0.25, 0.02 * (env.horizon - t0) + 1e-9);
    out.stable = out.argmax < env.horizon - margin;
    return out;
}

double log_law_stat(const SystoleEnvelope& env, double t0) {
    if (t0 <= 1) throw Error("t0 must exceed 1");
    if (env.horizon < t0) throw Error("envelope horizon below t0");
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& p : env.pieces) {
        double lo = std::max(p.t0, t0), hi = p.t1;
        if (lo >= hi) continue;
        auto f = [&](double t) { return -0.5 * std::log(p.value(t)) / std::log(t); };
        best = std::max(best, maximize(f, lo, hi).second);
    }
    return best;
}

MasurSmillieFit masur_smillie_check(const std::vector<std::pair<double, double>>& delta_diameter,
                                    double k0) {
    if (delta_diameter.empty()) throw Error("no samples");
    const double gate = std::sqrt(2.0 / 3.14159265358979323846);
    MasurSmillieFit fit;
    for (auto [delta, diam] : delta_diameter) {
        if (!(delta > 0) || !(diam > 0)) throw Error("samples must be positive");
        if (diam <= gate) continue;
        ++fit.gated;
        fit.k = std::max(fit.k, diam * delta);
        if (k0 > 0 && diam * delta > k0) ++fit.violations;
    }
    if (fit.gated == 0) throw Error("gate not met");
    return fit;
}

void ThicknessProfile::check() const {
    size_t n = t.size();
    if (n == 0) throw Error("empty profile");
    if (eps.size() != n || components.size() != n || sum_diameters.size() != n ||
        delta.size() != n)
        throw Error("profile columns differ in length");
    for (size_t i = 0; i < n; ++i) {
        if (i > 0 && !(t[i] > t[i - 1])) throw Error("profile grid not increasing");
        if (!(eps[i] > 0) || !(delta[i] > 0) || components[i] < 1 || !(sum_diameters[i] > 0))
            throw Error("profile entries must be positive");
    }
}

ThicknessProfile ThicknessProfile::from_csv(const std::string& text) {
    ThicknessProfile p;
    std::istringstream in(text);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            if (line.find("t") != std::string::npos && line.find("eps") != std::string::npos)
                continue;  // skip header row
        }
        std::istringstream row(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(row, cell, ',')) vals.push_back(std::stod(cell));
        if (vals.size() != 5) throw Error("profile rows need t,eps,C,sumD,delta");
        p.t.push_back(vals[0]);
        p.eps.push_back(vals[1]);
        p.components.push_back(static_cast<int>(vals[2]));
        p.sum_diameters.push_back(vals[3]);
        p.delta.push_back(vals[4]);
    }
    p.check();
    return p;
}

double thickness_criterion(const ThicknessProfile& profile) {
    profile.check();
    auto integrand = [&](size_t i) {
        double g = profile.sum_diameters[i] / (profile.eps[i] * profile.eps[i]) +
                   (profile.components[i] - 1) / profile.delta[i];
        return 1.0 / (g * g);
    };
    double total = 0;
    for (size_t i = 1; i < profile.t.size(); ++i)
        total += 0.5 * (integrand(i) + integrand(i - 1)) * (profile.t[i] - profile.t[i - 1]);
    return total;
}

}  // namespace flatcrit
