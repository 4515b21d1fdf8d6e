#include "flatcrit/surface_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace flatcrit {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

Vec2q parse_vertex(const std::string& line, std::int64_t field_d, int lineno) {
    auto comma = line.find(',');
    if (comma == std::string::npos)
        throw Error("line " + std::to_string(lineno) + ": vertex needs 'x , y'");
    auto px = QuadNum::parse(line.substr(0, comma));
    auto py = QuadNum::parse(line.substr(comma + 1));
    if (!px || !py) throw Error("line " + std::to_string(lineno) + ": bad coordinate");
    for (const QuadNum* c : {&*px, &*py})
        if (c->d() != 0 && c->d() != field_d)
            throw Error("line " + std::to_string(lineno) + ": coordinate outside surface field");
    return {*px, *py};
}

std::pair<int, int> parse_edge_ref(const std::string& tok,
                                   const std::map<std::string, int>& poly_index, int lineno) {
    auto dotpos = tok.rfind('.');
    if (dotpos == std::string::npos)
        throw Error("line " + std::to_string(lineno) + ": edge reference needs 'poly.index'");
    std::string name = trim(tok.substr(0, dotpos));
    auto it = poly_index.find(name);
    if (it == poly_index.end())
        throw Error("line " + std::to_string(lineno) + ": unknown polygon '" + name + "'");
    int edge;
    try {
        edge = std::stoi(tok.substr(dotpos + 1));
    } catch (...) {
        throw Error("line " + std::to_string(lineno) + ": bad edge index");
    }
    return {it->second, edge};
}

}  // namespace

TranslationSurface parse_surface(const std::string& text) {
    SurfaceData data;
    std::map<std::string, int> poly_index;
    enum class Section { None, Field, Polygon, Gluing, Boundary } section = Section::None;

    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw Error("line " + std::to_string(lineno) + ": unterminated section header");
            std::string inner = trim(line.substr(1, line.size() - 2));
            if (inner == "field") section = Section::Field;
            else if (inner == "gluing") section = Section::Gluing;
            else if (inner == "boundary") section = Section::Boundary;
            else if (inner.rfind("polygon", 0) == 0) {
                std::string name = trim(inner.substr(7));
                if (name.empty()) name = "P" + std::to_string(data.polygons.size());
                if (poly_index.count(name))
                    throw Error("line " + std::to_string(lineno) + ": duplicate polygon '" +
                                name + "'");
                poly_index[name] = static_cast<int>(data.polygons.size());
                data.polygon_names.push_back(name);
                data.polygons.emplace_back();
                section = Section::Polygon;
            } else
                throw Error("line " + std::to_string(lineno) + ": unknown section '" + inner +
                            "'");
            continue;
        }
        switch (section) {
            case Section::Field: {
                auto eq = line.find('=');
                if (eq == std::string::npos)
                    throw Error("line " + std::to_string(lineno) + ": expected key = value");
                std::string key = trim(line.substr(0, eq));
                std::string val = trim(line.substr(eq + 1));
                if (key == "D") data.field_d = std::stoll(val);
                else if (key == "label") data.label = val;
                else
                    throw Error("line " + std::to_string(lineno) + ": unknown field key '" +
                                key + "'");
                break;
            }
            case Section::Polygon: {
                auto eq = line.find('=');
                if (eq == std::string::npos || trim(line.substr(0, eq)) != "v")
                    throw Error("line " + std::to_string(lineno) + ": expected 'v = x , y'");
                data.polygons.back().push_back(
                    parse_vertex(trim(line.substr(eq + 1)), data.field_d, lineno));
                break;
            }
            case Section::Gluing: {
                auto arrow = line.find("<->");
                if (arrow == std::string::npos)
                    throw Error("line " + std::to_string(lineno) + ": expected 'a.i <-> b.j'");
                auto lhs = parse_edge_ref(trim(line.substr(0, arrow)), poly_index, lineno);
                auto rhs = parse_edge_ref(trim(line.substr(arrow + 3)), poly_index, lineno);
                data.gluings.push_back({lhs.first, lhs.second, rhs.first, rhs.second});
                break;
            }
            case Section::Boundary: {
                data.boundary.push_back(parse_edge_ref(line, poly_index, lineno));
                break;
            }
            case Section::None:
                throw Error("line " + std::to_string(lineno) + ": content before any section");
        }
    }
    return TranslationSurface::build(data);
}

TranslationSurface load_surface(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open surface file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_surface(buf.str());
}

std::string write_surface(const TranslationSurface& s) {
    std::ostringstream out;
    out << "[field]\n";
    out << "D = " << s.field() << "\n";
    if (!s.label().empty()) out << "label = " << s.label() << "\n";
    for (int p = 0; p < s.num_polygons(); ++p) {
        out << "[polygon " << s.polygon_name(p) << "]\n";
        for (const auto& v : s.polygon(p))
            out << "v = " << v.x.str() << " , " << v.y.str() << "\n";
    }
    out << "[gluing]\n";
    for (int p = 0; p < s.num_polygons(); ++p)
        for (int e = 0; e < s.num_edges(p); ++e) {
            EdgeRef q = s.partner(p, e);
            if (q.valid() && (q.poly > p || (q.poly == p && q.edge > e)))
                out << s.polygon_name(p) << "." << e << " <-> " << s.polygon_name(q.poly) << "."
                    << q.edge << "\n";
        }
    bool any_boundary = false;
    for (int p = 0; p < s.num_polygons(); ++p)
        for (int e = 0; e < s.num_edges(p); ++e)
            if (s.edge_is_boundary(p, e)) any_boundary = true;
    if (any_boundary) {
        out << "[boundary]\n";
        for (int p = 0; p < s.num_polygons(); ++p)
            for (int e = 0; e < s.num_edges(p); ++e)
                if (s.edge_is_boundary(p, e))
                    out << s.polygon_name(p) << "." << e << "\n";
    }
    return out.str();
}

void save_surface(const TranslationSurface& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write surface file: " + path);
    out << write_surface(s);
}

}  // namespace flatcrit
