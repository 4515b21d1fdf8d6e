#include "flatcrit/veech.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace flatcrit {

namespace {

void check_unit_det(const Mat2d& m) {
    if (std::abs(m.det() - 1.0) > 1e-12) throw Error("non-unit determinant");
}

std::array<double, 2> act_on_i(const Mat2d& m) {
    // Moebius action on i: ((ac + bd) + i det) / (c^2 + d^2)
    double den = m.c * m.c + m.d * m.d;
    return {(m.a * m.c + m.b * m.d) / den, 1.0 / den};
}

// Enumerate reduced words in canonical (length, lexicographic) order.
// Letters are 1..n and -1..-n; immediate inverses are skipped.
template <typename M, typename Visit>
void word_ball(const std::vector<M>& gens, const std::vector<M>& invs, int word_bound,
               Visit&& visit) {
    struct Node {
        M mat;
        std::vector<int> word;
    };
    std::vector<Node> layer;
    layer.push_back({M{}, {}});
    visit(layer[0].mat, layer[0].word);
    size_t total = 1;
    int n = static_cast<int>(gens.size());
    for (int len = 1; len <= word_bound && n > 0; ++len) {
        std::vector<Node> next;
        for (const auto& node : layer) {
            for (int letter = 1; letter <= n; ++letter) {
                for (int sgn : {+1, -1}) {
                    int l = sgn * letter;
                    if (!node.word.empty() && node.word.back() == -l) continue;
                    Node child;
                    child.mat = node.mat.mul(sgn > 0 ? gens[letter - 1] : invs[letter - 1]);
                    child.word = node.word;
                    child.word.push_back(l);
                    visit(child.mat, child.word);
                    next.push_back(std::move(child));
                    if (++total > 2'000'000) throw Error("word ball too large");
                }
            }
        }
        layer = std::move(next);
    }
}

Mat2d invert(const Mat2d& m) {
    double det = m.det();
    return {m.d / det, -m.b / det, -m.c / det, m.a / det};
}

}  // namespace

double hyp_distance(const Mat2d& a, const Mat2d& b) {
    check_unit_det(a);
    check_unit_det(b);
    auto z = act_on_i(a);
    auto w = act_on_i(b);
    double dx = z[0] - w[0], dy = z[1] - w[1];
    double arg = 1.0 + (dx * dx + dy * dy) / (2.0 * z[1] * w[1]);
    return 0.5 * std::acosh(std::max(arg, 1.0));
}

double law_of_sines_bound(double epsilon, double t) {
    if (!(t > 0)) throw Error("t must be positive");
    if (epsilon < 0) throw Error("epsilon must be nonnegative");
    double v = std::sinh(2 * epsilon) / std::sinh(2 * t);
    return std::clamp(v, 0.0, 1.0);
}

std::vector<RecurrenceSample> recurrence_profile(const std::vector<Mat2d>& generators,
                                                 const std::vector<double>& times,
                                                 int word_bound) {
    for (const auto& g : generators) check_unit_det(g);
    if (word_bound < 0) throw Error("wordBound must be nonnegative");
    std::vector<Mat2d> invs;
    for (const auto& g : generators) invs.push_back(invert(g));

    std::vector<RecurrenceSample> out;
    for (double t : times) out.push_back({t, std::numeric_limits<double>::infinity(), {}});
    std::vector<Mat2d> gts;
    for (double t : times) gts.push_back(Mat2d::geodesic(t));

    word_ball(generators, invs, word_bound, [&](const Mat2d& w, const std::vector<int>& word) {
        for (size_t i = 0; i < times.size(); ++i) {
            double d = hyp_distance(gts[i], w);
            if (d < out[i].epsilon) {
                out[i].epsilon = d;
                out[i].best_word = word;
            }
        }
    });
    return out;
}

std::optional<double> is_periodic(const std::vector<Mat2d>& generators, int word_bound,
                                  double tol) {
    for (const auto& g : generators) check_unit_det(g);
    std::vector<Mat2d> invs;
    for (const auto& g : generators) invs.push_back(invert(g));
    std::optional<double> best;
    word_ball(generators, invs, word_bound, [&](const Mat2d& w, const std::vector<int>& word) {
        if (word.empty()) return;
        if (std::abs(w.b) > tol || std::abs(w.c) > tol) return;
        if (!(w.a > 0)) return;
        double s = std::abs(std::log(w.a));
        if (s <= 1e-14) return;
        if (!best || s < *best) best = s;
    });
    return best;
}

std::optional<double> is_periodic_exact(const std::vector<Mat2q>& generators, int word_bound) {
    for (const auto& g : generators)
        if (!(g.det() - QuadNum(1)).is_zero()) throw Error("non-unit determinant");
    std::vector<Mat2q> invs;
    for (const auto& g : generators) invs.push_back(g.inverse());
    std::optional<double> best;
    word_ball(generators, invs, word_bound, [&](const Mat2q& w, const std::vector<int>& word) {
        if (word.empty()) return;
        if (!w.b.is_zero() || !w.c.is_zero()) return;
        if (w.a.sign() <= 0) return;
        if ((w.a - QuadNum(1)).is_zero()) return;
        double s = std::abs(std::log(w.a.to_double()));
        if (!best || s < *best) best = s;
    });
    return best;
}

std::string recurrence_to_csv(const std::vector<RecurrenceSample>& samples) {
    std::ostringstream out;
    out << "t,epsilon,word\n";
    char buf[64];
    for (const auto& s : samples) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,", s.t, s.epsilon);
        out << buf;
        for (size_t i = 0; i < s.best_word.size(); ++i)
            out << (i ? " " : "") << s.best_word[i];
        out << "\n";
    }
    return out.str();
}

}  // namespace flatcrit
