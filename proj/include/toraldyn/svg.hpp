#pragma once

// SVG figures of the torus constructions.
//
// The picture is the unit square [0,1)^2 with the y axis pointing up.  Every
// frame-aligned region is drawn as one polygon per lattice translate that
// touches the square, clipped to the square; coordinates are evaluated
// through 128-bit interval arithmetic and printed in unit coordinates.
// Rendering is presentation only: the exact data always travels in the JSON
// artifacts, and key elements carry their exact coordinates in data-*
// attributes alongside the rounded ones.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "toraldyn/fractal.hpp"
#include "toraldyn/interval.hpp"
#include "toraldyn/witness.hpp"

namespace toraldyn {

inline constexpr mpfr_prec_t kRenderPrec = 128;

template <class K>
double render_double(const K& x) {
  return MpfrInterval::eval(x, kRenderPrec).mid_double();
}

inline std::string exact_string(const Rational& q) { return q.get_str(); }

inline std::string exact_string(const QuadExt& x) {
  if (x.d() == 0 || sgn(x.b()) == 0) return x.a().get_str();
  return "(" + x.a().get_str() + ")+(" + x.b().get_str() + ")*sqrt(" +
         std::to_string(x.d()) + ")";
}

inline std::string exact_string(const TowerExt& x) {
  const long e = squarefree_core(x.d1() * x.d2());
  return "(" + x.c00().get_str() + ")+(" + x.c01().get_str() + ")*sqrt(" +
         std::to_string(x.d1()) + ")+(" + x.c10().get_str() + ")*sqrt(" +
         std::to_string(x.d2()) + ")+(" + x.c11().get_str() + ")*sqrt(" +
         std::to_string(e) + ")";
}

struct SvgOptions {
  int size_px = 800;
  bool draw_box = true;
  bool draw_tubes = true;
  bool draw_segment = true;
  bool draw_probes = true;
  bool draw_witness = true;
  long orbit_dots = 12;        // forward probe-map iterates of the witness
  long polygon_budget = 50000; // per layer; exceeding it is an error
};

namespace detail {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

struct Quad4 {
  double x[4], y[4];
};

// Separating-axis overlap test between a translated parallelogram and the
// unit square, used only to prune the emitted polygons.
inline bool touches_unit_square(const Quad4& q, double kx, double ky) {
  double xs[4], ys[4];
  for (int i = 0; i < 4; ++i) {
    xs[i] = q.x[i] - kx;
    ys[i] = q.y[i] - ky;
  }
  auto axis_separates = [&](double ax, double ay) {
    double qlo = 1e300, qhi = -1e300;
    for (int i = 0; i < 4; ++i) {
      const double p = ax * xs[i] + ay * ys[i];
      if (p < qlo) qlo = p;
      if (p > qhi) qhi = p;
    }
    double slo = 0, shi = 0;
    for (const double px : {0.0, 1.0})
      for (const double py : {0.0, 1.0}) {
        const double p = ax * px + ay * py;
        if (p < slo) slo = p;
        if (p > shi) shi = p;
      }
    return qhi < slo || shi < qlo;
  };
  if (axis_separates(1, 0) || axis_separates(0, 1)) return false;
  for (const int i : {0, 1}) {
    const double ex = xs[i + 1] - xs[i], ey = ys[i + 1] - ys[i];
    if (axis_separates(-ey, ex)) return false;
  }
  return true;
}

}  // namespace detail

class SvgBuilder {
 public:
  explicit SvgBuilder(SvgOptions opt = {}) : opt_(opt) {}

  // Box and its backward tubes, anchored at the (torus) base point.
  void add_box_layers(const BoxB& box, long depth, const RatVec2& base = {}) {
    static const char* kPalette[] = {"#aec7e8", "#98df8a", "#c5b0d5", "#ffbb78",
                                     "#9edae5", "#dbdb8d", "#f7b6d2", "#c49c94"};
    if (opt_.draw_box) {
      std::string layer;
      emit_rect_polygons(layer, box.frame, box.rect(), base,
                         "fill=\"#1f77b4\" fill-opacity=\"0.9\"");
      layers_.emplace_back("box", std::move(layer));
    }
    if (!opt_.draw_tubes) return;
    for (long n = 0; n <= depth; ++n) {
      std::string layer;
      const std::string style = std::string("fill=\"") + kPalette[n % 8] +
                                "\" fill-opacity=\"0.45\" stroke=\"#444444\" "
                                "stroke-width=\"0.0008\"";
      emit_rect_polygons(layer, box.frame, box.tube_rect(n), base, style);
      layers_.emplace_back("tube-" + std::to_string(n), std::move(layer));
    }
  }

  // The tube-free segment, drawn as one line per touching translate.
  void add_segment(const BoxB& box, const FoundSegment& seg, const RatVec2& base = {}) {
    if (!opt_.draw_segment) return;
    const Vec2<QuadExt> a = box.frame.from_frame({seg.u0, seg.w.lo});
    const Vec2<QuadExt> b = box.frame.from_frame({seg.u0, seg.w.hi});
    const double bx = render_double(base.x), by = render_double(base.y);
    const double x0 = render_double(a.x) + bx, y0 = render_double(a.y) + by;
    const double x1 = render_double(b.x) + bx, y1 = render_double(b.y) + by;
    std::string layer;
    for_touching_translates({{x0, x1, x1, x0}, {y0, y1, y1, y0}}, [&](long kx, long ky) {
      layer += "<line x1=\"" + detail::fmt(x0 - kx) + "\" y1=\"" +
               detail::fmt(y0 - ky) + "\" x2=\"" + detail::fmt(x1 - kx) +
               "\" y2=\"" + detail::fmt(y1 - ky) +
               "\" stroke=\"#d62728\" stroke-width=\"0.003\" data-u0=\"" +
               exact_string(seg.u0) + "\" data-w-lo=\"" + exact_string(seg.w.lo) +
               "\" data-w-hi=\"" + exact_string(seg.w.hi) + "\"/>\n";
    });
    layers_.emplace_back("segment", std::move(layer));
  }

  template <class K>
  void add_probes(const std::vector<DenseProbe>& probes, const Frame<K>& fS) {
    if (!opt_.draw_probes || probes.empty()) return;
    std::string layer;
    for (const DenseProbe& p : probes)
      emit_rect_polygons(layer, fS, probe_rect(p, fS), RatVec2{},
                         "fill=\"#ff7f0e\" fill-opacity=\"0.35\" stroke=\"#ff7f0e\" "
                         "stroke-width=\"0.0015\"");
    layers_.emplace_back("probes", std::move(layer));
  }

  template <class K>
  void add_witness(const Vec2<K>& point, const IntMat2& probe_work) {
    if (!opt_.draw_witness) return;
    std::string layer;
    Vec2<K> x = reduce_mod1_pt(point);
    for (long j = 1; j <= opt_.orbit_dots; ++j) {
      x = reduce_mod1_pt(probe_work.apply(x));
      const double op = 0.75 * (1.0 - static_cast<double>(j) / (opt_.orbit_dots + 1));
      layer += "<circle cx=\"" + detail::fmt(render_double(x.x)) + "\" cy=\"" +
               detail::fmt(render_double(x.y)) +
               "\" r=\"0.0035\" fill=\"#2ca02c\" fill-opacity=\"" +
               detail::fmt(op) + "\"/>\n";
    }
    const Vec2<K> w = reduce_mod1_pt(point);
    layer += "<circle cx=\"" + detail::fmt(render_double(w.x)) + "\" cy=\"" +
             detail::fmt(render_double(w.y)) +
             "\" r=\"0.006\" fill=\"#d62728\" stroke=\"#000000\" "
             "stroke-width=\"0.001\" data-x=\"" + exact_string(w.x) +
             "\" data-y=\"" + exact_string(w.y) + "\"/>\n";
    layers_.emplace_back("witness", std::move(layer));
  }

  std::string str() const {
    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
           std::to_string(opt_.size_px) + "\" height=\"" +
           std::to_string(opt_.size_px) + "\" viewBox=\"0 0 1 1\">\n";
    out += "<defs><clipPath id=\"unit\"><rect x=\"0\" y=\"0\" width=\"1\" "
           "height=\"1\"/></clipPath></defs>\n";
    out += "<g transform=\"translate(0,1) scale(1,-1)\" clip-path=\"url(#unit)\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"1\" height=\"1\" fill=\"#ffffff\" "
           "stroke=\"#222222\" stroke-width=\"0.002\"/>\n";
    for (const auto& [id, body] : layers_)
      out += "<g id=\"" + id + "\">\n" + body + "</g>\n";
    out += "</g>\n</svg>\n";
    return out;
  }

 private:
  template <class F>
  void for_touching_translates(const detail::Quad4& q, F&& emit) const {
    double xlo = q.x[0], xhi = q.x[0], ylo = q.y[0], yhi = q.y[0];
    for (int i = 1; i < 4; ++i) {
      xlo = std::min(xlo, q.x[i]);
      xhi = std::max(xhi, q.x[i]);
      ylo = std::min(ylo, q.y[i]);
      yhi = std::max(yhi, q.y[i]);
    }
    long emitted = 0;
    for (long kx = static_cast<long>(std::floor(xlo)) - 1;
         kx <= static_cast<long>(std::floor(xhi)) + 1; ++kx)
      for (long ky = static_cast<long>(std::floor(ylo)) - 1;
           ky <= static_cast<long>(std::floor(yhi)) + 1; ++ky) {
        if (!detail::touches_unit_square(q, static_cast<double>(kx),
                                         static_cast<double>(ky)))
          continue;
        if (++emitted > opt_.polygon_budget)
          throw std::length_error("figure exceeds the polygon budget; lower the depth");
        emit(kx, ky);
      }
  }

  template <class K>
  void emit_rect_polygons(std::string& layer, const Frame<K>& f,
                          const FrameRect<K>& r, const RatVec2& base,
                          const std::string& style) const {
    const Vec2<K> c[4] = {f.from_frame({r.u.lo, r.w.lo}), f.from_frame({r.u.hi, r.w.lo}),
                          f.from_frame({r.u.hi, r.w.hi}), f.from_frame({r.u.lo, r.w.hi})};
    const double bx = render_double(base.x), by = render_double(base.y);
    detail::Quad4 q;
    for (int i = 0; i < 4; ++i) {
      q.x[i] = render_double(c[i].x) + bx;
      q.y[i] = render_double(c[i].y) + by;
    }
    for_touching_translates(q, [&](long kx, long ky) {
      layer += "<polygon points=\"";
      for (int i = 0; i < 4; ++i) {
        if (i) layer += " ";
        layer += detail::fmt(q.x[i] - kx) + "," + detail::fmt(q.y[i] - ky);
      }
      layer += "\" " + style + "/>\n";
    });
  }

  SvgOptions opt_;
  std::vector<std::pair<std::string, std::string>> layers_;
};

}  // namespace toraldyn
