#include <CLI11.hpp>

#include "flatcrit/criteria.hpp"
#include "flatcrit/envelope.hpp"
#include "flatcrit/flow.hpp"
#include "flatcrit/report.hpp"
#include "flatcrit/saddle.hpp"
#include "flatcrit/surface_io.hpp"
#include "flatcrit/veech.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace flatcrit;

namespace {

bool verbose() {
    const char* v = std::getenv("FLATCRIT_LOG");
    return v && *v && std::string(v) != "0";
}

void log_line(const std::string& s) {
    if (verbose()) std::cerr << "[flatcrit] " << s << "\n";
}

struct InputError : Error {
    using Error::Error;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

TranslationSurface load(const std::string& path, std::string& digest_bytes) {
    std::string text = slurp(path);
    digest_bytes += text;
    try {
        return parse_surface(text);
    } catch (const Error& e) {
        throw InputError(e.what());
    }
}

Vec2q parse_direction(const std::string& text) {
    auto comma = text.find(',');
    if (comma == std::string::npos) throw InputError("direction needs 'x,y'");
    auto x = QuadNum::parse(text.substr(0, comma));
    auto y = QuadNum::parse(text.substr(comma + 1));
    if (!x || !y) throw InputError("bad direction coordinate");
    Vec2q d{*x, *y};
    if (d.is_zero()) throw InputError("zero direction");
    return d;
}

std::pair<int, Vec2q> parse_point(const std::string& text) {
    std::string body = text;
    int poly = 0;
    auto colon = text.find(':');
    if (colon != std::string::npos) {
        poly = std::stoi(text.substr(0, colon));
        body = text.substr(colon + 1);
    }
    auto comma = body.find(',');
    if (comma == std::string::npos) throw InputError("point needs 'x,y'");
    auto x = QuadNum::parse(body.substr(0, comma));
    auto y = QuadNum::parse(body.substr(comma + 1));
    if (!x || !y) throw InputError("bad point coordinate");
    return {poly, {*x, *y}};
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write file: " + path);
    out << content;
}

void emit_report(RunReport& rep, const std::string& path, const std::string& digest_bytes) {
    rep.inputs_digest = fnv1a_hex(digest_bytes);
    write_file(path, report_to_json(rep));
    log_line("report written to " + path);
}

// ---------------------------------------------------------------- plotting

struct Series {
    std::vector<double> x, y;
};

std::string svg_polyline_plot(const Series& s, const std::string& xlabel,
                              const std::string& ylabel) {
    const int w = 800, h = 560, m = 60;
    double x0 = s.x.front(), x1 = s.x.back();
    double y0 = s.y[0], y1 = s.y[0];
    for (double v : s.y) {
        y0 = std::min(y0, v);
        y1 = std::max(y1, v);
    }
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
    auto px = [&](double x) { return m + (x - x0) / (x1 - x0) * (w - 2 * m); };
    auto py = [&](double y) { return h - m - (y - y0) / (y1 - y0) * (h - 2 * m); };
    char buf[192];
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
    out << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n", m,
                  h - m, w - m, h - m);
    out << buf;
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n", m, m, m,
                  h - m);
    out << buf;
    out << "<polyline fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < s.x.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.6f,%.6f ", px(s.x[i]), py(s.y[i]));
        out << buf;
    }
    out << "\"/>\n";
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%d\" y=\"%d\" font-size=\"14\" font-family=\"monospace\">%s</text>\n",
                  w / 2 - 20, h - 18, xlabel.c_str());
    out << buf;
    std::snprintf(
        buf, sizeof buf,
        "<text x=\"14\" y=\"%d\" font-size=\"14\" font-family=\"monospace\">%s</text>\n", m - 18,
        ylabel.c_str());
    out << buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%d\" y=\"%d\" font-size=\"11\" font-family=\"monospace\">x: %.6g "
                  ".. %.6g  y: %.6g .. %.6g</text>\n",
                  m, 24, x0, x1, y0, y1);
    out << buf;
    out << "</svg>\n";
    return out.str();
}

std::vector<std::vector<double>> read_csv(const std::string& text, int min_cols) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::vector<double>> rows;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        std::istringstream row(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(row, cell, ',')) {
            try {
                vals.push_back(std::stod(cell));
            } catch (...) {
                vals.push_back(0);
            }
        }
        if (static_cast<int>(vals.size()) < min_cols)
            throw InputError("csv row has too few columns");
        rows.push_back(vals);
    }
    if (rows.empty()) throw InputError("no rows");
    return rows;
}

std::string svg_histogram(const std::string& json_text) {
    // minimal parse of the histogram json emitted by equidist
    auto find_array = [&](const std::string& key) {
        auto pos = json_text.find("\"" + key + "\"");
        if (pos == std::string::npos) throw InputError("histogram json missing " + key);
        auto lb = json_text.find('[', pos);
        auto rb = json_text.find(']', lb);
        std::vector<double> vals;
        std::istringstream in(json_text.substr(lb + 1, rb - lb - 1));
        std::string cell;
        while (std::getline(in, cell, ',')) {
            if (!cell.empty()) vals.push_back(std::stod(cell));
        }
        return vals;
    };
    auto occupancy = find_array("occupancy");
    int bins = static_cast<int>(std::lround(std::sqrt(double(occupancy.size()))));
    if (bins * bins != static_cast<int>(occupancy.size()))
        throw InputError("histogram is not a square grid");
    double peak = 1e-300;
    for (double v : occupancy) peak = std::max(peak, v);
    const int w = 800, h = 560, m = 60;
    int cell = std::min((w - 2 * m) / bins, (h - 2 * m) / bins);
    std::ostringstream out;
    char buf[160];
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
    out << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
    for (int i = 0; i < bins; ++i)
        for (int j = 0; j < bins; ++j) {
            double v = occupancy[i * bins + j] / peak;
            int shade = static_cast<int>(255 - 215 * v);
            std::snprintf(buf, sizeof buf,
                          "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" "
                          "fill=\"rgb(%d,%d,255)\"/>\n",
                          m + i * cell, h - m - (j + 1) * cell, cell, cell, shade, shade);
            out << buf;
        }
    out << "</svg>\n";
    return out.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"flatcrit: translation-surface ergodicity criteria toolkit"};
    app.require_subcommand(1);

    std::string surface_path, out_path, report_path, cert_path, profile_path;
    std::string direction_text = "1,0", start_text, observable_text = "strip:0:0.5";
    std::string csv_path, kind, generators_text, times_text;
    double horizon = 5.0, t0 = 1.0, bound = 2.0, length = 10.0, time_budget = 100.0;
    int samples = 200, bins = 10, word_bound = 4, level = 3, threads = 1, starts_n = 10;
    std::uint64_t seed = 0;

    auto add_seed = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed, "random seed (required: runs must be citable)")
            ->required();
    };
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--report", report_path, "machine-readable report path");
        cmd->add_option("--threads", threads, "parallelism cap");
    };

    CLI::App* c_validate = app.add_subcommand("validate", "check a surface file");
    c_validate->add_option("--surface", surface_path)->required();
    add_common(c_validate);

    CLI::App* c_area = app.add_subcommand("area", "exact area of a surface");
    c_area->add_option("--surface", surface_path)->required();
    add_common(c_area);

    CLI::App* c_saddle = app.add_subcommand("saddle", "enumerate saddle connections");
    c_saddle->add_option("--surface", surface_path)->required();
    c_saddle->add_option("--bound", bound, "length bound")->required();
    c_saddle->add_option("--out", out_path, "csv output");
    add_common(c_saddle);

    CLI::App* c_curve = app.add_subcommand("systole-curve", "delta' along the geodesic flow");
    c_curve->add_option("--surface", surface_path)->required();
    c_curve->add_option("--T", horizon)->required();
    c_curve->add_option("--direction", direction_text, "flow direction (default horizontal)");
    c_curve->add_option("--samples", samples, "csv sample count");
    c_curve->add_option("--out", out_path, "csv output")->required();
    add_common(c_curve);

    CLI::App* c_criterion = app.add_subcommand("criterion", "integral of delta'^2 dt");
    c_criterion->add_option("--surface", surface_path)->required();
    c_criterion->add_option("--T", horizon)->required();
    c_criterion->add_option("--direction", direction_text);
    add_common(c_criterion);

    CLI::App* c_ce = app.add_subcommand("cheung-eskin", "excursion constant with slope 1/2");
    c_ce->add_option("--surface", surface_path)->required();
    c_ce->add_option("--T", horizon)->required();
    c_ce->add_option("--t0", t0, "window start (>= 1)");
    c_ce->add_option("--direction", direction_text);
    add_common(c_ce);

    CLI::App* c_thm12 = app.add_subcommand("thm12", "thickness-profile criterion");
    c_thm12->add_option("--profile", profile_path, "csv: t,eps,C,sumD,delta")->required();
    add_common(c_thm12);

    CLI::App* c_verify = app.add_subcommand("veech-verify", "verify an automorphism certificate");
    c_verify->add_option("--surface", surface_path)->required();
    c_verify->add_option("--cert", cert_path)->required();
    add_common(c_verify);

    CLI::App* c_rec = app.add_subcommand("recurrence", "distance to the word ball along g_t");
    c_rec->add_option("--generators", generators_text, "a,b,c,d;a,b,c,d;...")->required();
    c_rec->add_option("--times", times_text, "comma-separated times")->required();
    c_rec->add_option("--word-bound", word_bound);
    c_rec->add_option("--out", out_path, "csv output");
    add_common(c_rec);

    CLI::App* c_flow = app.add_subcommand("flow", "trace a straight-line trajectory");
    c_flow->add_option("--surface", surface_path)->required();
    c_flow->add_option("--start", start_text, "poly:x,y")->required();
    c_flow->add_option("--direction", direction_text);
    c_flow->add_option("--length", length);
    c_flow->add_option("--out", out_path, "csv output");
    add_common(c_flow);

    CLI::App* c_birkhoff = app.add_subcommand("birkhoff", "time averages over random starts");
    c_birkhoff->add_option("--surface", surface_path)->required();
    c_birkhoff->add_option("--direction", direction_text);
    c_birkhoff->add_option("--T", time_budget);
    c_birkhoff->add_option("--starts", starts_n, "number of random starts");
    c_birkhoff->add_option("--observable", observable_text,
                           "one | strip:a:b | stripy:a:b | cosx:k | sinx:k | cosy:k | siny:k");
    add_seed(c_birkhoff);
    add_common(c_birkhoff);

    CLI::App* c_eq = app.add_subcommand("equidist", "occupancy histogram discrepancy");
    c_eq->add_option("--surface", surface_path)->required();
    c_eq->add_option("--direction", direction_text);
    c_eq->add_option("--T", time_budget);
    c_eq->add_option("--bins", bins);
    c_eq->add_option("--out", out_path, "histogram json output");
    add_seed(c_eq);
    add_common(c_eq);

    CLI::App* c_cham = app.add_subcommand("chamanara", "emit a Chamanara truncation");
    c_cham->add_option("--level", level)->required();
    c_cham->add_option("--out", out_path, "surface file output")->required();
    add_common(c_cham);

    CLI::App* c_escape = app.add_subcommand("escape", "escaping-mass fraction");
    c_escape->add_option("--surface", surface_path)->required();
    c_escape->add_option("--direction", direction_text);
    c_escape->add_option("--T", time_budget);
    c_escape->add_option("--samples", samples);
    add_seed(c_escape);
    add_common(c_escape);

    CLI::App* c_plot = app.add_subcommand("plot", "deterministic svg plots");
    c_plot->add_option("--csv", csv_path, "input csv (or histogram json)")->required();
    c_plot->add_option("--kind", kind, "systole | recurrence | histogram")->required();
    c_plot->add_option("--out", out_path, "svg output")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    std::string digest_bytes;
    for (int i = 1; i < argc; ++i) digest_bytes += argv[i], digest_bytes += '\0';

    auto cmd_name = app.get_subcommands().front()->get_name();
    if (report_path.empty()) report_path = cmd_name + "-report.json";
    RunReport rep;
    rep.command = cmd_name;

    try {
        if (*c_validate) {
            TranslationSurface s = load(surface_path, digest_bytes);
            auto vr = s.validate();
            for (const auto& issue : vr.issues) rep.warnings.push_back(issue);
            rep.notes.emplace_back("valid", vr.ok() ? "true" : "false");
            std::cout << (vr.ok() ? "valid translation surface" : "INVALID") << "\n";
            for (const auto& issue : vr.issues) std::cout << "  " << issue << "\n";
            emit_report(rep, report_path, digest_bytes);
            return vr.ok() ? 0 : 2;
        }
        if (*c_area) {
            TranslationSurface s = load(surface_path, digest_bytes);
            QuadNum a = s.area_exact();
            rep.add("area", a.to_double(), "flat-area");
            rep.notes.emplace_back("area_exact", a.str());
            std::cout << "area = " << a.str() << " = " << format_double17(a.to_double())
                      << "\n";
            emit_report(rep, report_path, digest_bytes);
            return 0;
        }
        if (*c_saddle) {
            TranslationSurface s = load(surface_path, digest_bytes);
            auto res = enumerate_saddle_connections(s, bound);
            rep.add("count", res.connections.size(), "connections",
                    "length<=" + format_double17(bound));
            if (res.truncation_warning)
                rep.warnings.push_back("marked boundary limited the search");
            std::cout << res.connections.size() << " oriented saddle connections of length <= "
                      << bound << "\n";
            if (!out_path.empty()) write_file(out_path, connections_to_csv(res.connections));
            emit_report(rep, report_path, digest_bytes);
            return 0;
        }
        if (*c_curve || *c_criterion || *c_ce) {
            TranslationSurface s = load(surface_path, digest_bytes);
            Vec2q dir = parse_direction(direction_text);
            bool horizontal = dir.y.is_zero() && dir.x.sign() > 0;
            SystoleEnvelope env = horizontal ? systole_envelope(s, horizon)
                                             : systole_envelope_direction(s, horizon, dir);
            if (*c_curve) {
                write_file(out_path, envelope_to_csv(env, samples));
                rep.add("pieces", env.pieces.size(), "count", "T=" + format_double17(horizon));
                rep.add("min_delta_prime", std::sqrt(env.min_value()), "flat-length");
                std::cout << "envelope with " << env.pieces.size() << " pieces written to "
                          << out_path << "\n";
            } else if (*c_criterion) {
                double full = criterion_integral(env);
                double half = criterion_integral_to(env, horizon / 2);
                rep.add("integral", full, "flat-length^2 * time", "T=" + format_double17(horizon));
                rep.add("tail_growth", full - half, "flat-length^2 * time",
                        "T/2=" + format_double17(horizon / 2));
                std::cout << "integral of delta'^2 over [0, " << horizon
                          << "] = " << format_double17(full) << "\n";
                std::cout << "growth over the second half: " << format_double17(full - half)
                          << "\n";
            } else {
                auto c = cheung_eskin_C(env, t0);
                rep.add("C", c.value, "dimensionless",
                        "window=[" + format_double17(t0) + "," + format_double17(horizon) + "]");
                rep.add("argmax", c.argmax, "time");
                rep.notes.emplace_back("stable", c.stable ? "true" : "false");
                std::cout << "C = " << format_double17(c.value) << " attained at t = "
                          << format_double17(c.argmax) << (c.stable ? "" : "  (still growing)")
                          << "\n";
            }
            emit_report(rep, report_path, digest_bytes);
            return 0;
        }
        if (*c_thm12) {
            std::string text = slurp(profile_path);
            digest_bytes += text;
            auto prof = ThicknessProfile::from_csv(text);
            double full = thickness_criterion(prof);
            ThicknessProfile head = prof;
            size_t half = prof.t.size() / 2 + 1;
            head.t.resize(half);
            head.eps.resize(half);
            head.components.resize(half);
            head.sum_diameters.resize(half);
            head.delta.resize(half);
            double tail = full - thickness_criterion(head);
            const char* verdict = tail <= 0.05 * std::max(full, 1e-300) ? "converging" : "growing";
            rep.add("integral", full, "time", "horizon=" + format_double17(prof.t.back()));
            rep.add("tail", tail, "time");
            rep.notes.emplace_back("verdict", verdict);
            std::cout << "thickness criterion integral = " << format_double17(full) << "  ("
                      << verdict << ")\n";
            emit_report(rep, report_path, digest_bytes);
            return 0;
        }
        if (*c_verify) {
            TranslationSurface s = load(surface_path, digest_bytes);
            std::string text = slurp(cert_path);
            digest_bytes += text;
            AutomorphismCertificate cert;
            try {
                cert = parse_certificate(text, s);
            } catch (const Error& e) {
                throw InputError(e.what());
            }
            auto vr = verify_affine_automorphism(s, cert);
            rep.notes.emplace_back("pass", vr.pass() ? "true" : "false");
            rep.add("pieces", cert.pieces.size(), "count");
            rep.add("truncated_interfaces", vr.truncated.size(), "count");
            for (const auto& f : vr.failures) rep.warnings.push_back(f);
            std::cout << (vr.pass() ? "certificate verifies exactly" : "certificate FAILS")
                      << "\n";
            for (const auto& f : vr.failures) std::cout << "  " << f << "\n";
            if (!vr.truncated.empty())
                std::cout << "  " << vr.truncated.size()
                          << " interface(s) flagged truncated (marked boundary)\n";
            emit_report(rep, report_path, digest_bytes);
            return 0;
        }
        if (*c_rec) {
            std::vector<Mat2d> gens;
            std::istringstream gin(generators_text);
            std::string chunk;
            while (std::getline(gin, chunk, ';')) {
                std::istringstream cin2(chunk);
                std::string cell;
                std::vector<double> v;
                while (std::getline(cin2, cell, ',')) v.push_back(std::stod(cell));
                if (v.size() != 4) throw InputError("generator needs 4 entries a,b,c,d");
                gens.push_back({v[0], v[1], v[2], v[3]});
            }
            std::vector<double> times;
            std::istringstream tin(times_text);
            while (std::getline(tin, chunk, ',')) times.push_back(std::stod(chunk));
            auto prof = recurrence_profile(gens, times, word_bound);
            for (const auto& sm : prof)
                rep.add("epsilon", sm.epsilon, "hyperbolic-distance",
                        "t=" + format_double17(sm.t) + " wordBound=" + std::to_string(word_bound));
            if (!out_path.empty()) write_file(out_path, recurrence_to_csv(prof));
            for (const auto& sm : prof)
                std::cout << "t=" << format_double17(sm.t)
                          << "  epsilon=" << format_double17(sm.epsilon) << "\n";
            emit_report(rep, report_path, digest_bytes);
            return 0;
        }
        if (*c_flow) {
            TranslationSurface s = load(surface_path, digest_bytes);
            auto [poly, start] = parse_point(start_text);
            Vec2q dir = parse_direction(direction_text);
            auto traj = trace(s, poly, start, dir, length);
            const char* status = traj.status == TraceStatus::Completed ? "completed"
                                 : traj.status == TraceStatus::Escaped ? "escaped"
                                                                       : "hitSingularity";
            rep.notes.emplace_back("status", status);
            rep.add("length", traj.length, "flat-length",
                    "budget=" + format_double17(length));
            rep.add("segments", traj.segments.size(), "count");
            std::cout << "status = " << status << ", traced length = "
                      << format_double17(traj.length) << ", " << traj.segments.size()
                      << " segments\n";
            if (!out_path.empty()) write_file(out_path, trajectory_to_csv(traj));
            emit_report(rep, report_path, digest_bytes);
            return 0;
        }
        if (*c_birkhoff) {
            TranslationSurface s = load(surface_path, digest_bytes);
            Vec2q dir = parse_direction(direction_text);
            Observable obs;
            {
                std::istringstream oin(observable_text);
                std::string tag;
                std::getline(oin, tag, ':');
                std::string a, b;
                std::getline(oin, a, ':');
                std::getline(oin, b, ':');
                if (tag == "one") obs = Observable::one();
                else if (tag == "strip") obs = Observable::strip_x(std::stod(a), std::stod(b));
                else if (tag == "stripy") obs = Observable::strip_y(std::stod(a), std::stod(b));
                else if (tag == "cosx") obs = {ObservableKind::CosX, 0, 0, std::stoi(a)};
                else if (tag == "sinx") obs = {ObservableKind::SinX, 0, 0, std::stoi(a)};
                else if (tag == "cosy") obs = {ObservableKind::CosY, 0, 0, std::stoi(a)};
                else if (tag == "siny") obs = {ObservableKind::SinY, 0, 0, std::stoi(a)};
                else throw InputError("unknown observable " + tag);
            }
            auto starts = random_starts(s, starts_n, seed);
            auto res = birkhoff_average(s, dir, obs, time_budget, starts, threads);
            for (size_t i = 0; i < res.averages.size(); ++i)
                rep.add("average", res.averages[i], "dimensionless",
                        "start=" + std::to_string(i) + " T=" + format_double17(time_budget));
            rep.add("dispersion", res.dispersion, "dimensionless");
            rep.add("flagged", res.flagged.size(), "count");
            std::cout << "dispersion over " << starts_n
                      << " starts: " << format_double17(res.dispersion) << "\n";
            for (size_t i = 0; i < res.averages.size(); ++i)
                std::cout << "  start " << i << ": " << format_double17(res.averages[i]) << "\n";
            emit_report(rep, report_path, digest_bytes);
            return 0;
        }
        if (*c_eq) {
            TranslationSurface s = load(surface_path, digest_bytes);
            Vec2q dir = parse_direction(direction_text);
            auto start = random_starts(s, 1, seed)[0];
            auto res = equidistribution_test(s, dir, start.first, start.second, time_budget,
                                             bins);
            rep.add("discrepancy", res.discrepancy, "dimensionless",
                    "T=" + format_double17(time_budget) + " bins=" + std::to_string(bins));
            std::cout << "discrepancy = " << format_double17(res.discrepancy) << " over " << bins
                      << "x" << bins << " bins\n";
            if (!out_path.empty()) write_file(out_path, histogram_to_json(res));
            emit_report(rep, report_path, digest_bytes);
            return 0;
        }
        if (*c_cham) {
            auto s = chamanara_surface(level);
            save_surface(s, out_path);
            rep.add("level", level, "count");
            rep.add("area", s.area(), "flat-area");
            std::cout << "chamanara level " << level << " written to " << out_path << "\n";
            emit_report(rep, report_path, digest_bytes);
            return 0;
        }
        if (*c_escape) {
            TranslationSurface s = load(surface_path, digest_bytes);
            Vec2q dir = parse_direction(direction_text);
            double frac = escape_mass_estimate(s, dir, time_budget, samples, seed, threads);
            rep.add("escape_fraction", frac, "probability",
                    "T=" + format_double17(time_budget) + " samples=" + std::to_string(samples) +
                        " seed=" + std::to_string(seed));
            std::cout << "escape fraction = " << format_double17(frac) << "\n";
            emit_report(rep, report_path, digest_bytes);
            return 0;
        }
        if (*c_plot) {
            std::string text = slurp(csv_path);
            std::string svg;
            if (kind == "systole") {
                auto rows = read_csv(text, 2);
                Series sr;
                for (auto& r : rows) {
                    sr.x.push_back(r[0]);
                    sr.y.push_back(r[1]);
                }
                svg = svg_polyline_plot(sr, "t", "delta'");
            } else if (kind == "recurrence") {
                auto rows = read_csv(text, 2);
                Series sr;
                for (auto& r : rows) {
                    sr.x.push_back(r[0]);
                    sr.y.push_back(r[1]);
                }
                svg = svg_polyline_plot(sr, "t", "epsilon");
            } else if (kind == "histogram") {
                svg = svg_histogram(text);
            } else {
                throw InputError("unknown plot kind: " + kind);
            }
            write_file(out_path, svg);
            std::cout << "svg written to " << out_path << "\n";
            return 0;
        }
        std::cerr << "no subcommand\n";
        return 2;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
