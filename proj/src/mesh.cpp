#include "gammarod/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <numbers>
#include <unordered_map>
#include <unordered_set>

#include "gammarod/errors.hpp"

namespace gammarod {

double TriMesh::triangle_area(int t) const {
  const auto& tri = triangles[t];
  const Vec2 a = nodes[tri[1]] - nodes[tri[0]];
  const Vec2 b = nodes[tri[2]] - nodes[tri[0]];
  return 0.5 * (a.x() * b.y() - a.y() * b.x());
}

double TriMesh::total_area() const {
  double s = 0.0;
  for (int t = 0; t < static_cast<int>(triangles.size()); ++t) s += triangle_area(t);
  return s;
}

double TriMesh::max_edge() const {
  double m = 0.0;
  for (const auto& tri : triangles) {
    for (int i = 0; i < 3; ++i) m = std::max(m, (nodes[tri[i]] - nodes[tri[(i + 1) % 3]]).norm());
  }
  return m;
}

namespace {

double min_angle_of(const Vec2& a, const Vec2& b, const Vec2& c) {
  const Vec2 p[3] = {a, b, c};
  double m = std::numbers::pi;
  for (int i = 0; i < 3; ++i) {
    const Vec2 u = p[(i + 1) % 3] - p[i];
    const Vec2 v = p[(i + 2) % 3] - p[i];
    const double cosang = u.dot(v) / (u.norm() * v.norm());
    m = std::min(m, std::acos(std::clamp(cosang, -1.0, 1.0)));
  }
  return m;
}

}  // namespace

double TriMesh::min_angle() const {
  double m = std::numbers::pi;
  for (const auto& tri : triangles) {
    m = std::min(m, min_angle_of(nodes[tri[0]], nodes[tri[1]], nodes[tri[2]]));
  }
  return m;
}

namespace {

using Real = long double;

Real orient(const Vec2& a, const Vec2& b, const Vec2& p) {
  const Real adx = Real(a.x()) - p.x(), ady = Real(a.y()) - p.y();
  const Real bdx = Real(b.x()) - p.x(), bdy = Real(b.y()) - p.y();
  return adx * bdy - ady * bdx;
}

bool in_circle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& p) {
  const Real adx = Real(a.x()) - p.x(), ady = Real(a.y()) - p.y();
  const Real bdx = Real(b.x()) - p.x(), bdy = Real(b.y()) - p.y();
  const Real cdx = Real(c.x()) - p.x(), cdy = Real(c.y()) - p.y();
  const Real al = adx * adx + ady * ady;
  const Real bl = bdx * bdx + bdy * bdy;
  const Real cl = cdx * cdx + cdy * cdy;
  const Real t1 = al * (bdx * cdy - cdx * bdy);
  const Real t2 = bl * (cdx * ady - adx * cdy);
  const Real t3 = cl * (adx * bdy - bdx * ady);
  const Real det = t1 + t2 + t3;
  const Real perm = std::abs(t1) + std::abs(t2) + std::abs(t3);
  return det > 1e-17L * perm;
}

Vec2 circumcenter(const Vec2& a, const Vec2& b, const Vec2& c) {
  const Vec2 ba = b - a, ca = c - a;
  const double d = 2.0 * (ba.x() * ca.y() - ba.y() * ca.x());
  const double b2 = ba.squaredNorm(), c2 = ca.squaredNorm();
  return a + Vec2((ca.y() * b2 - ba.y() * c2) / d, (ba.x() * c2 - ca.x() * b2) / d);
}

std::uint64_t edge_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

class Delaunay {
 public:
  struct Tri {
    std::array<int, 3> v;
    bool alive;
  };

  Delaunay(const Vec2& lo, const Vec2& hi) {
    const Vec2 c = 0.5 * (lo + hi);
    const double r = 20.0 * std::max((hi - lo).norm(), 1e-300);
    pts_.push_back(c + Vec2(-r * std::sqrt(3.0), -r));
    pts_.push_back(c + Vec2(r * std::sqrt(3.0), -r));
    pts_.push_back(c + Vec2(0.0, 2.0 * r));
    add_tri(0, 1, 2);
  }

  const std::vector<Vec2>& points() const { return pts_; }
  const std::vector<Tri>& tris() const { return tris_; }

  int owner(int a, int b) const {
    auto it = edge_.find(edge_key(a, b));
    return it == edge_.end() ? -1 : it->second;
  }
  bool has_edge(int a, int b) const { return owner(a, b) >= 0 || owner(b, a) >= 0; }
  int apex(int t, int a, int b) const {
    for (int v : tris_[t].v) {
      if (v != a && v != b) return v;
    }
    return -1;
  }

  // Returns the new vertex id, or the id of a coincident existing vertex.
  int insert(const Vec2& p, std::vector<int>* created = nullptr) {
    const int t0 = locate(p);
    for (int v : tris_[t0].v) {
      if ((pts_[v] - p).norm() <= 1e-14 * (std::abs(p.x()) + std::abs(p.y()) + 1e-300)) return v;
    }
    const int id = static_cast<int>(pts_.size());
    pts_.push_back(p);

    std::vector<int> cavity{t0};
    std::unordered_set<int> in_cavity{t0};
    for (std::size_t k = 0; k < cavity.size(); ++k) {
      const auto v = tris_[cavity[k]].v;
      for (int i = 0; i < 3; ++i) {
        const int n = owner(v[(i + 1) % 3], v[i]);
        if (n < 0 || in_cavity.count(n)) continue;
        const auto& w = tris_[n].v;
        if (in_circle(pts_[w[0]], pts_[w[1]], pts_[w[2]], p)) {
          cavity.push_back(n);
          in_cavity.insert(n);
        }
      }
    }

    // Keep the cavity star-shaped with respect to p.
    std::vector<std::array<int, 2>> boundary;
    for (bool changed = true; changed;) {
      changed = false;
      boundary.clear();
      for (int t : cavity) {
        const auto v = tris_[t].v;
        for (int i = 0; i < 3; ++i) {
          const int a = v[i], b = v[(i + 1) % 3];
          const int n = owner(b, a);
          if (n >= 0 && in_cavity.count(n)) continue;
          if (t != t0 && orient(pts_[a], pts_[b], p) <= 0) {
            in_cavity.erase(t);
            cavity.erase(std::find(cavity.begin(), cavity.end(), t));
            changed = true;
            break;
          }
          boundary.push_back({a, b});
        }
        if (changed) break;
      }
    }

    for (int t : cavity) remove_tri(t);
    for (const auto& e : boundary) {
      const int t = add_tri(e[0], e[1], id);
      if (created) created->push_back(t);
    }
    return id;
  }

 private:
  int add_tri(int a, int b, int c) {
    int t;
    if (!free_.empty()) {
      t = free_.back();
      free_.pop_back();
      tris_[t] = {{a, b, c}, true};
    } else {
      t = static_cast<int>(tris_.size());
      tris_.push_back({{a, b, c}, true});
    }
    edge_[edge_key(a, b)] = t;
    edge_[edge_key(b, c)] = t;
    edge_[edge_key(c, a)] = t;
    last_ = t;
    return t;
  }

  void remove_tri(int t) {
    const auto v = tris_[t].v;
    for (int i = 0; i < 3; ++i) {
      auto it = edge_.find(edge_key(v[i], v[(i + 1) % 3]));
      if (it != edge_.end() && it->second == t) edge_.erase(it);
    }
    tris_[t].alive = false;
    free_.push_back(t);
  }

  bool contains(int t, const Vec2& p) const {
    const auto& v = tris_[t].v;
    for (int i = 0; i < 3; ++i) {
      if (orient(pts_[v[i]], pts_[v[(i + 1) % 3]], p) < 0) return false;
    }
    return true;
  }

  int locate(const Vec2& p) const {
    int t = tris_[last_].alive ? last_ : -1;
    if (t < 0) {
      for (int k = 0; k < static_cast<int>(tris_.size()); ++k) {
        if (tris_[k].alive) {
          t = k;
          break;
        }
      }
    }
    const int max_steps = 4 * static_cast<int>(tris_.size()) + 16;
    int start = 0;
    for (int step = 0; step < max_steps; ++step) {
      const auto& v = tris_[t].v;
      int next = -1;
      for (int j = 0; j < 3; ++j) {
        const int i = (start + j) % 3;
        if (orient(pts_[v[i]], pts_[v[(i + 1) % 3]], p) < 0) {
          next = owner(v[(i + 1) % 3], v[i]);
          break;
        }
      }
      if (next < 0) {
        if (contains(t, p)) return t;
        break;
      }
      t = next;
      start = (start + 1) % 3;
    }
    for (int k = 0; k < static_cast<int>(tris_.size()); ++k) {
      if (tris_[k].alive && contains(k, p)) return k;
    }
    throw MeshError("point location failed");
  }

  std::vector<Vec2> pts_;
  std::vector<Tri> tris_;
  std::vector<int> free_;
  std::unordered_map<std::uint64_t, int> edge_;
  int last_ = 0;
};

struct Segment {
  int a, b;
};

class Refiner {
 public:
  Refiner(const PolygonSection& poly, double target, const MeshOptions& opts)
      : poly_(poly), target_(target), opts_(opts), dt_(bbox_lo(poly), bbox_hi(poly)) {}

  TriMesh run() {
    const auto& v = poly_.vertices();
    const int nv = static_cast<int>(v.size());
    std::vector<int> ids(nv);
    for (int i = 0; i < nv; ++i) {
      ids[i] = dt_.insert(v[i]);
      mark_input(ids[i]);
    }
    // Boundary splitting.
    for (int i = 0; i < nv; ++i) {
      const Vec2& p = v[i];
      const Vec2& q = v[(i + 1) % nv];
      const int pieces = std::max(1, static_cast<int>(std::ceil((q - p).norm() / target_ - 1e-9)));
      int prev = ids[i];
      for (int k = 1; k < pieces; ++k) {
        const int id = dt_.insert(p + (q - p) * (static_cast<double>(k) / pieces));
        segs_.push_back({prev, id});
        prev = id;
      }
      segs_.push_back({prev, ids[(i + 1) % nv]});
    }
    // Interior hexagonal lattice.
    const Vec2 lo = bbox_lo(poly_), hi = bbox_hi(poly_);
    const double dy = target_ * std::sqrt(3.0) / 2.0;
    int row = 0;
    for (double y = lo.y() + 0.5 * dy; y < hi.y(); y += dy, ++row) {
      const double x0 = lo.x() + (row % 2 ? 0.5 * target_ : 0.0);
      for (double x = x0; x < hi.x(); x += target_) {
        const Vec2 p(x, y);
        if (poly_.contains(p) && poly_.distance_to_boundary(p) >= 0.5 * target_) {
          dt_.insert(p);
        }
      }
    }

    recover_segments();

    std::deque<int> work;
    for (int t = 0; t < static_cast<int>(dt_.tris().size()); ++t) work.push_back(t);
    while (!work.empty()) {
      const int t = work.front();
      work.pop_front();
      if (t >= static_cast<int>(dt_.tris().size()) || !dt_.tris()[t].alive) continue;
      const auto tri = dt_.tris()[t].v;
      if (!is_interior(tri) || !is_bad(tri)) continue;
      const auto& P = dt_.points();
      const Vec2 c = circumcenter(P[tri[0]], P[tri[1]], P[tri[2]]);
      std::vector<int> hit;
      for (int s = 0; s < static_cast<int>(segs_.size()); ++s) {
        if (point_encroaches(c, segs_[s])) hit.push_back(s);
      }
      std::vector<int> created;
      if (!hit.empty()) {
        // Split from the back so indices stay valid.
        for (auto it = hit.rbegin(); it != hit.rend(); ++it) split_segment(*it, &created);
        recover_segments(&created);
      } else {
        count_insertion();
        const int id = dt_.insert(c, &created);
        std::vector<int> enc;
        for (int s = 0; s < static_cast<int>(segs_.size()); ++s) {
          if (vertex_encroaches(id, segs_[s])) enc.push_back(s);
        }
        for (auto it = enc.rbegin(); it != enc.rend(); ++it) split_segment(*it, &created);
        recover_segments(&created);
      }
      for (int n : created) work.push_back(n);
      work.push_back(t);
    }
    return extract();
  }

 private:
  static Vec2 bbox_lo(const PolygonSection& poly) {
    Vec2 lo = poly.vertices()[0];
    for (const auto& v : poly.vertices()) lo = lo.cwiseMin(v);
    return lo;
  }
  static Vec2 bbox_hi(const PolygonSection& poly) {
    Vec2 hi = poly.vertices()[0];
    for (const auto& v : poly.vertices()) hi = hi.cwiseMax(v);
    return hi;
  }

  void mark_input(int id) {
    if (static_cast<int>(input_.size()) <= id) input_.resize(id + 1, false);
    input_[id] = true;
  }
  bool is_input(int id) const { return id < static_cast<int>(input_.size()) && input_[id]; }

  void count_insertion() {
    if (++insertions_ > opts_.max_insertions) {
      throw RefinementError("mesh refinement did not terminate within the insertion limit");
    }
  }

  bool point_encroaches(const Vec2& p, const Segment& s) const {
    const auto& P = dt_.points();
    return (P[s.a] - p).dot(P[s.b] - p) < -1e-12 * (P[s.a] - P[s.b]).squaredNorm();
  }
  bool vertex_encroaches(int v, const Segment& s) const {
    if (v == s.a || v == s.b) return false;
    return point_encroaches(dt_.points()[v], s);
  }

  bool encroached(const Segment& s) const {
    const int t1 = dt_.owner(s.a, s.b);
    const int t2 = dt_.owner(s.b, s.a);
    if (t1 < 0 && t2 < 0) return true;
    for (int t : {t1, t2}) {
      if (t < 0) continue;
      if (vertex_encroaches(dt_.apex(t, s.a, s.b), s)) return true;
    }
    return false;
  }

  void split_segment(int s, std::vector<int>* created) {
    count_insertion();
    const Segment seg = segs_[s];
    const auto& P = dt_.points();
    const Vec2 a = P[seg.a], b = P[seg.b];
    const double len = (b - a).norm();
    double frac = 0.5;
    // Concentric shells around input vertices keep small input angles from
    // cascading.
    if (is_input(seg.a) != is_input(seg.b)) {
      const double d = std::exp2(std::round(std::log2(0.5 * len)));
      frac = is_input(seg.a) ? d / len : 1.0 - d / len;
    }
    const int m = dt_.insert(a + frac * (b - a), created);
    if (m == seg.a || m == seg.b) throw RefinementError("segment too short to split");
    segs_[s] = {seg.a, m};
    segs_.push_back({m, seg.b});
  }

  void recover_segments(std::vector<int>* created = nullptr) {
    for (bool any = true; any;) {
      any = false;
      for (int s = 0; s < static_cast<int>(segs_.size()); ++s) {
        if (encroached(segs_[s])) {
          split_segment(s, created);
          any = true;
        }
      }
    }
  }

  bool is_interior(const std::array<int, 3>& tri) const {
    if (tri[0] < 3 || tri[1] < 3 || tri[2] < 3) return false;
    const auto& P = dt_.points();
    return poly_.contains((P[tri[0]] + P[tri[1]] + P[tri[2]]) / 3.0);
  }

  bool is_bad(const std::array<int, 3>& tri) const {
    const auto& P = dt_.points();
    double emax = 0.0;
    for (int i = 0; i < 3; ++i) emax = std::max(emax, (P[tri[i]] - P[tri[(i + 1) % 3]]).norm());
    if (emax > opts_.max_edge_factor * target_) return true;
    return min_angle_of(P[tri[0]], P[tri[1]], P[tri[2]]) <
           opts_.min_angle_deg * std::numbers::pi / 180.0;
  }

  TriMesh extract() const {
    TriMesh mesh;
    const auto& P = dt_.points();
    std::vector<int> remap(P.size(), -1);
    for (const auto& t : dt_.tris()) {
      if (!t.alive || !is_interior(t.v)) continue;
      std::array<int, 3> tri;
      for (int i = 0; i < 3; ++i) {
        int& r = remap[t.v[i]];
        if (r < 0) {
          r = static_cast<int>(mesh.nodes.size());
          mesh.nodes.push_back(P[t.v[i]]);
        }
        tri[i] = r;
      }
      mesh.triangles.push_back(tri);
    }
    std::unordered_map<std::uint64_t, int> count;
    for (const auto& tri : mesh.triangles) {
      for (int i = 0; i < 3; ++i) ++count[edge_key(tri[i], tri[(i + 1) % 3])];
    }
    for (const auto& tri : mesh.triangles) {
      for (int i = 0; i < 3; ++i) {
        const int a = tri[i], b = tri[(i + 1) % 3];
        if (!count.count(edge_key(b, a))) mesh.boundary_edges.push_back({a, b});
      }
    }
    return mesh;
  }

  const PolygonSection& poly_;
  double target_;
  MeshOptions opts_;
  Delaunay dt_;
  std::vector<Segment> segs_;
  std::vector<bool> input_;
  int insertions_ = 0;
};

}  // namespace

TriMesh triangulate(const PolygonSection& poly, double target_edge_length,
                    const MeshOptions& opts) {
  if (!(target_edge_length > 0)) throw RefinementError("target edge length must be positive");
  if (target_edge_length > poly.diameter()) {
    throw RefinementError("target edge length exceeds the section diameter");
  }
  const auto& v = poly.vertices();
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 u = v[(i + n - 1) % n] - v[i];
    const Vec2 w = v[(i + 1) % n] - v[i];
    const double ang = std::atan2(w.x() * u.y() - w.y() * u.x(), w.dot(u));
    const double interior = ang < 0 ? ang + 2.0 * std::numbers::pi : ang;
    if (interior < opts.min_angle_deg * std::numbers::pi / 180.0) {
      throw RefinementError("polygon corner sharper than the minimum mesh angle");
    }
  }
  Refiner refiner(poly, target_edge_length, opts);
  return refiner.run();
}

}  // namespace gammarod
