#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "hybridplan/hybrid.hpp"
#include "json.hpp"

namespace hybridplan::hybrid {

namespace {

using nlohmann::json;

std::string frame_key(const Witness& w, int f) {
  const auto c = w.frame.cluster_of_frame.find(f);
  if (c != w.frame.cluster_of_frame.end()) return "c" + std::to_string(w.sides[c->second].cluster_id);
  return "v" + std::to_string(w.frame.vertex_of_frame.at(f));
}

}  // namespace

std::string witness_to_json(const Witness& w) {
  json out;
  json rot = json::object();
  for (const auto& [f, r] : w.frame_rotation) rot[frame_key(w, f)] = r;
  out["frameRotation"] = rot;
  json clusters = json::array();
  for (std::size_t i = 0; i < w.orders.size(); ++i) {
    const ClusterOrder& o = w.orders[i];
    json c;
    c["id"] = o.cluster_id;
    c["sigma"] = o.sigma;
    json sides = json::object();
    json edges = json::object();
    for (int s = 0; s < o.sigma; ++s) {
      sides[std::to_string(s)] = o.side_vertices[s];
      edges[std::to_string(s)] = o.side_edges[s];
    }
    c["sideOrders"] = sides;
    c["sideEdges"] = edges;
    clusters.push_back(c);
  }
  out["clusters"] = clusters;
  json g;
  json vs = json::array();
  for (int v : w.expanded.graph.vertices()) vs.push_back({{"id", v}, {"label", w.expanded.label.at(v)}});
  json es = json::array();
  for (const auto& e : w.expanded.graph.edges()) es.push_back({{"id", e.id}, {"u", e.u}, {"v", e.v}});
  json er = json::object();
  for (const auto& [v, r] : w.expanded.rotation) er[std::to_string(v)] = r;
  g["vertices"] = vs;
  g["edges"] = es;
  g["rotation"] = er;
  out["expandedGraph"] = g;
  return out.dump(2) + "\n";
}

namespace {

struct Point {
  double x = 0;
  double y = 0;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

// Corners of the shape for a cluster; side k runs from corner k to k + 1.
std::vector<Point> corners(Point c, int sigma, double r) {
  if (sigma == 2) return {{c.x - r, c.y - r / 2}, {c.x + r, c.y - r / 2}, {c.x + r, c.y + r / 2}, {c.x - r, c.y + r / 2}};
  std::vector<Point> out;
  for (int j = 0; j < sigma; ++j) {
    const double a = -std::numbers::pi / 2 - std::numbers::pi / sigma + 2 * std::numbers::pi * j / sigma;
    out.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
  }
  return out;
}

std::pair<Point, Point> side_segment(const std::vector<Point>& cs, int sigma, int side) {
  if (sigma == 2) return side == 0 ? std::pair{cs[0], cs[1]} : std::pair{cs[2], cs[3]};
  return {cs[side], cs[(side + 1) % sigma]};
}

Point lerp(Point a, Point b, double t) { return {a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t}; }

}  // namespace

std::string render_svg(const Witness& w) {
  const auto& fv = w.frame.graph.vertices();
  const double n = static_cast<double>(fv.size());
  const double shape = 60;
  const double radius = fv.size() <= 1 ? 0 : std::max(2.2 * shape, shape * n / std::numbers::pi * 1.4);
  const double size = 2 * (radius + 2 * shape);
  const Point centre{size / 2, size / 2};
  std::map<int, Point> pos;
  for (std::size_t i = 0; i < fv.size(); ++i) {
    const double a = -std::numbers::pi / 2 + 2 * std::numbers::pi * static_cast<double>(i) / n;
    pos[fv[i]] = {centre.x + radius * std::cos(a), centre.y + radius * std::sin(a)};
  }
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(size) << "\" height=\"" << num(size)
      << "\" viewBox=\"0 0 " << num(size) << ' ' << num(size) << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // Attachment point of each edge end: (edge, input vertex) -> point.
  std::map<std::pair<int, int>, Point> attach;
  std::ostringstream shapes;
  for (std::size_t i = 0; i < w.sides.size(); ++i) {
    const ClusterSides& s = w.sides[i];
    const ClusterOrder& o = w.orders[i];
    const Point c = pos.at(w.frame.cluster_vertex(i));
    const auto cs = corners(c, s.sigma, shape);
    shapes << "<polygon points=\"";
    for (std::size_t j = 0; j < cs.size(); ++j) shapes << (j ? " " : "") << num(cs[j].x) << ',' << num(cs[j].y);
    shapes << "\" fill=\"#eef3fb\" stroke=\"#2b4c7e\" stroke-width=\"2\"/>\n";
    shapes << "<text x=\"" << num(c.x) << "\" y=\"" << num(c.y + 4) << "\" text-anchor=\"middle\" font-size=\"12\">C"
           << s.cluster_id << "</text>\n";
    for (int k = 0; k < s.sigma; ++k) {
      const auto [a, b] = side_segment(cs, s.sigma, k);
      const auto& verts = o.side_vertices[k];
      for (std::size_t j = 0; j < verts.size(); ++j) {
        const double t = (static_cast<double>(j) + 1) / (static_cast<double>(verts.size()) + 1);
        const Point p = lerp(a, b, t);
        const Point label = lerp(p, c, 0.18);
        shapes << "<text x=\"" << num(label.x) << "\" y=\"" << num(label.y + 3)
               << "\" text-anchor=\"middle\" font-size=\"9\" fill=\"#555\">" << verts[j] << "</text>\n";
        std::vector<int> mine;
        for (int e : o.side_edges[k]) {
          for (const auto& at : s.attachments) {
            if (at.edge == e && at.vertex == verts[j]) mine.push_back(e);
          }
        }
        const double spread = 4.0;
        for (std::size_t q = 0; q < mine.size(); ++q) {
          const double off = (static_cast<double>(q) - (static_cast<double>(mine.size()) - 1) / 2) * spread;
          const double len = std::hypot(b.x - a.x, b.y - a.y);
          attach[{mine[q], verts[j]}] = {p.x + (b.x - a.x) / len * off, p.y + (b.y - a.y) / len * off};
        }
      }
    }
  }
  for (const auto& [f, v] : w.frame.vertex_of_frame) {
    const Point p = pos.at(f);
    shapes << "<circle cx=\"" << num(p.x) << "\" cy=\"" << num(p.y)
           << "\" r=\"8\" fill=\"#fbeee0\" stroke=\"#7e4c2b\" stroke-width=\"2\"/>\n";
    shapes << "<text x=\"" << num(p.x) << "\" y=\"" << num(p.y + 3) << "\" text-anchor=\"middle\" font-size=\"9\">"
           << v << "</text>\n";
  }
  for (const auto& [e, o] : w.frame.origin) {
    const auto end = [&](int v) {
      const auto it = attach.find({e, v});
      return it != attach.end() ? it->second : pos.at(w.frame.frame_of_vertex.at(v));
    };
    const Point a = end(o.u);
    const Point b = end(o.v);
    svg << "<line x1=\"" << num(a.x) << "\" y1=\"" << num(a.y) << "\" x2=\"" << num(b.x) << "\" y2=\"" << num(b.y)
        << "\" stroke=\"#333\" stroke-width=\"1.2\"/>\n";
  }
  svg << shapes.str() << "</svg>\n";
  return svg.str();
}

}  // namespace hybridplan::hybrid
