#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "flatcrit/criteria.hpp"
#include "flatcrit/envelope.hpp"
#include "flatcrit/flow.hpp"
#include "flatcrit/saddle.hpp"
#include "flatcrit/surface_io.hpp"
#include "flatcrit/veech.hpp"

#include <memory>

namespace py = pybind11;
using namespace flatcrit;

namespace {

QuadNum parse_qn(const std::string& text) {
    auto q = QuadNum::parse(text);
    if (!q) throw Error("bad coordinate: " + text);
    return *q;
}

Vec2q parse_vec(const std::string& x, const std::string& y) {
    return {parse_qn(x), parse_qn(y)};
}

struct PySurface {
    std::shared_ptr<TranslationSurface> s;
    const TranslationSurface& ref() const { return *s; }
};

PySurface wrap(TranslationSurface s) {
    return {std::make_shared<TranslationSurface>(std::move(s))};
}

const char* status_name(TraceStatus st) {
    switch (st) {
        case TraceStatus::Completed:
        case TraceStatus::BudgetOnEdge: return "completed";
        case TraceStatus::HitSingularity: return "hitSingularity";
        case TraceStatus::Escaped: return "escaped";
    }
    return "unknown";
}

}  // namespace

PYBIND11_MODULE(_flatcrit, m) {
    m.doc() = "translation-surface ergodicity criteria toolkit";

    py::register_exception<Error>(m, "FlatcritError");

    py::class_<PySurface>(m, "Surface")
        .def_static("torus", [] { return wrap(make_square_torus()); })
        .def_static("regular_octagon", [] { return wrap(make_regular_octagon()); })
        .def_static("chamanara", [](int level) { return wrap(chamanara_surface(level)); })
        .def_static("from_text", [](const std::string& t) { return wrap(parse_surface(t)); })
        .def_static("load", [](const std::string& p) { return wrap(load_surface(p)); })
        .def("to_text", [](const PySurface& s) { return write_surface(s.ref()); })
        .def("validate", [](const PySurface& s) { return s.ref().validate().issues; })
        .def("area", [](const PySurface& s) { return s.ref().area(); })
        .def("area_exact", [](const PySurface& s) { return s.ref().area_exact().str(); })
        .def("num_polygons", [](const PySurface& s) { return s.ref().num_polygons(); })
        .def("has_boundary", [](const PySurface& s) { return s.ref().has_boundary(); })
        .def("cone_angles", [](const PySurface& s) {
            std::vector<std::pair<int, bool>> out;
            for (const auto& c : s.ref().cone_angles()) out.emplace_back(c.turns, c.boundary);
            return out;
        });

    m.def("enumerate_connections", [](const PySurface& s, double bound) {
        auto res = enumerate_saddle_connections(s.ref(), bound);
        std::vector<py::dict> out;
        for (const auto& sc : res.connections) {
            py::dict d;
            d["x"] = sc.holonomy.x.str();
            d["y"] = sc.holonomy.y.str();
            d["length"] = sc.length();
            d["start"] = sc.start_class;
            d["end"] = sc.end_class;
            out.push_back(d);
        }
        return out;
    });

    m.def("shortest_connection", [](const PySurface& s) {
        auto [len, sc] = shortest_saddle_connection(s.ref());
        return py::make_tuple(len, sc.holonomy.x.str(), sc.holonomy.y.str());
    });

    m.def(
        "systole_envelope",
        [](const PySurface& s, double horizon, const std::string& dx, const std::string& dy) {
            Vec2q dir = parse_vec(dx, dy);
            SystoleEnvelope env = dir.y.is_zero() && dir.x.sign() > 0
                                      ? systole_envelope(s.ref(), horizon)
                                      : systole_envelope_direction(s.ref(), horizon, dir);
            py::dict d;
            d["pieces"] = env.pieces.size();
            d["min_delta_prime"] = std::sqrt(env.min_value());
            d["criterion_integral"] = criterion_integral(env);
            auto ce = cheung_eskin_C(env, std::min(1.0, horizon));
            d["cheung_eskin_C"] = ce.value;
            d["cheung_eskin_stable"] = ce.stable;
            return d;
        },
        py::arg("surface"), py::arg("horizon"), py::arg("dx") = "1", py::arg("dy") = "0");

    m.def("thickness_criterion", [](const std::string& csv) {
        return thickness_criterion(ThicknessProfile::from_csv(csv));
    });

    m.def("hyp_distance", [](std::array<double, 4> a, std::array<double, 4> b) {
        return hyp_distance({a[0], a[1], a[2], a[3]}, {b[0], b[1], b[2], b[3]});
    });
    m.def("law_of_sines_bound", &law_of_sines_bound);

    m.def("verify_certificate", [](const PySurface& s, const std::string& cert_text) {
        auto cert = parse_certificate(cert_text, s.ref());
        auto rep = verify_affine_automorphism(s.ref(), cert);
        py::dict d;
        d["pass"] = rep.pass();
        d["failures"] = rep.failures;
        d["truncated"] = rep.truncated.size();
        return d;
    });

    m.def(
        "trace",
        [](const PySurface& s, int poly, const std::string& x, const std::string& y,
           const std::string& dx, const std::string& dy, double length) {
            auto traj = trace(s.ref(), poly, parse_vec(x, y), parse_vec(dx, dy), length, false);
            return py::make_tuple(status_name(traj.status), traj.length);
        },
        py::arg("surface"), py::arg("poly"), py::arg("x"), py::arg("y"), py::arg("dx"),
        py::arg("dy"), py::arg("length"));

    m.def("first_return_iet", [](const PySurface& s, int poly, int edge, const std::string& dx,
                                 const std::string& dy, double max_length) {
        auto iet = first_return_iet(s.ref(), {poly, edge}, parse_vec(dx, dy), max_length);
        return py::make_tuple(iet.lengths, iet.permutation);
    });

    m.def("birkhoff_strip_average",
          [](const PySurface& s, const std::string& dx, const std::string& dy, double a,
             double b, double horizon, int starts, std::uint64_t seed) {
              auto pts = random_starts(s.ref(), starts, seed);
              auto res = birkhoff_average(s.ref(), parse_vec(dx, dy), Observable::strip_x(a, b),
                                          horizon, pts);
              return py::make_tuple(res.averages, res.dispersion);
          });

    m.def("escape_mass", [](const PySurface& s, const std::string& dx, const std::string& dy,
                            double horizon, int samples, std::uint64_t seed) {
        return escape_mass_estimate(s.ref(), parse_vec(dx, dy), horizon, samples, seed);
    });
}
