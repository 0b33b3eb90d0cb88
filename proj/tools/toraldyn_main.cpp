// Command-line driver: builds the constructions, writes JSON artifacts with
// replayable certificates, re-verifies artifacts, and renders SVG figures.

#include <CLI11.hpp>

#include <cctype>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "toraldyn/json_io.hpp"
#include "toraldyn/svg.hpp"

namespace td = toraldyn;
using td::Json;

namespace {

// ---------------------------------------------------------------------------
// Argument parsing helpers.

td::Rational parse_rat(const std::string& s) {
  td::Rational q;
  if (q.set_str(s, 10) != 0)
    throw CLI::ValidationError("'" + s + "' is not a rational number");
  q.canonicalize();
  return q;
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      parts.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

td::IntMat2 parse_matrix(const std::string& s) {
  const auto p = split_commas(s);
  if (p.size() != 4)
    throw CLI::ValidationError("matrix must be four integers a,b,c,d");
  td::Integer e[4];
  for (int i = 0; i < 4; ++i)
    if (e[i].set_str(p[i], 10) != 0)
      throw CLI::ValidationError("'" + p[i] + "' is not an integer");
  return {e[0], e[1], e[2], e[3]};
}

td::RatVec2 parse_point(const std::string& s) {
  const auto p = split_commas(s);
  if (p.size() != 2)
    throw CLI::ValidationError("point must be two rationals x,y");
  return {parse_rat(p[0]), parse_rat(p[1])};
}

// ---------------------------------------------------------------------------
// Artifact I/O.

std::string resolve_out(const std::string& given, const std::string& fallback) {
  if (!given.empty()) return given;
  if (const char* dir = std::getenv("TORALDYN_OUT_DIR"); dir != nullptr && *dir != '\0')
    return std::string(dir) + "/" + fallback;
  return fallback;
}

void write_artifact(const std::string& path, const std::string& kind, Json payload,
                    long wall_ms) {
  const Json env = td::make_envelope(kind, std::move(payload), wall_ms);
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << env.dump(2) << "\n";
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
  std::cout << "wrote " << path << "\n";
}

Json load_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  return Json::parse(f);
}

// Loads a box artifact (or any artifact embedding a box certificate) and
// returns the verified certificate.  Every downstream command re-verifies the
// box before trusting it.
td::BoxCertificate load_box_certificate(const std::string& path) {
  const Json env = load_json(path);
  const td::BoxCertificate cert =
      td::box_certificate_from(env.at("payload").at("box_certificate"));
  std::string why;
  if (!td::verify_certificate(cert, &why))
    throw std::runtime_error("box artifact fails verification: " + why);
  return cert;
}

template <class K>
std::string approx(const K& x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g",
                td::MpfrInterval::eval(x, 128).mid_double());
  return buf;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  long ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - start)
        .count();
  }
};

// ---------------------------------------------------------------------------
// Subcommand state.

struct AnalyzeArgs {
  std::string matrix, out;
};
struct BuildBoxArgs {
  std::string matrix, y0, out;
  std::string u_max = "1/10", w_max = "1/10", bx_cap = "1/50";
};
struct OverlapArgs {
  std::string box, out;
  long max_depth = 10;
};
struct SegmentArgs {
  std::string box, out;
  long depth = 10;
  std::string center = "0,0", radius = "1/20";
};
struct WitnessArgs {
  std::string box, s_matrix, out;
  std::vector<std::string> probes;
  long view_depth = 10, avoid_depth = 200, grid = 8, horizon = 5000;
  std::string center = "0,0", radius = "1/20", base = "0,0";
};
struct VerifyArgs {
  std::string in;
};
struct RenderArgs {
  std::string box, segment, witness, out;
  long depth = 3;
  long orbit_dots = 12;
  int size = 800;
  bool no_tubes = false, no_box = false;
};

int run_analyze(const AnalyzeArgs& a) {
  Timer t;
  const td::IntMat2 M = parse_matrix(a.matrix);
  const Json payload = td::analysis_payload(M);
  std::cout << "det " << payload.at("det").get<long>() << ", trace "
            << payload.at("trace").get<std::string>() << ", field core d = "
            << payload.at("discriminant_core").get<long>() << "\n"
            << "lambda+ = " << payload.at("lambda_plus").at("dec").get<std::string>()
            << "\nlambda- = " << payload.at("lambda_minus").at("dec").get<std::string>()
            << "\nslope-  = " << payload.at("slope_minus").at("dec").get<std::string>()
            << "\n";
  write_artifact(resolve_out(a.out, "analysis.json"), "analysis", payload, t.ms());
  return 0;
}

int run_build_box(const BuildBoxArgs& a) {
  Timer t;
  const td::IntMat2 M = parse_matrix(a.matrix);
  const auto [box, cert] = td::build_box(M, parse_point(a.y0), parse_rat(a.u_max),
                                         parse_rat(a.w_max), parse_rat(a.bx_cap));
  std::string why;
  if (!td::verify_certificate(cert, &why))
    throw std::runtime_error("constructed certificate fails verification: " + why);
  if (!td::box_avoids_all_approaches(box))
    throw std::runtime_error("box does not avoid every approach segment");
  std::cout << "box: u ~ " << approx(box.u_len) << ", w = "
            << box.w_len.a().get_str() << ", orbit " << cert.orbit.size()
            << " points, " << cert.retained.size() << " retained pieces\n";
  write_artifact(resolve_out(a.out, "box.json"), "box", td::box_payload(cert), t.ms());
  return 0;
}

int run_verify_overlaps(const OverlapArgs& a) {
  Timer t;
  const td::BoxCertificate cert = load_box_certificate(a.box);
  const td::BoxB box = td::box_from_certificate(cert);
  const td::OverlapScanReport rep = td::scan_no_proper_overlap(box, a.max_depth);
  Json payload = td::box_payload(cert);
  payload["inputs"]["max_depth"] = a.max_depth;
  payload["scan"] = td::overlap_scan_json(rep);
  std::cout << "scanned " << rep.pairs_checked << " tube pairs to depth "
            << rep.max_depth << ": " << rep.region_count << " regions, "
            << rep.proper_count << " proper, " << rep.spot_checks
            << " point spot-checks\n";
  write_artifact(resolve_out(a.out, "overlaps.json"), "overlap-scan", payload, t.ms());
  if (!rep.no_proper_overlaps || !rep.tubes_embedded) {
    std::cerr << "error: proper overlap or non-embedded tube found\n";
    return 1;
  }
  return 0;
}

int run_find_segment(const SegmentArgs& a) {
  Timer t;
  const td::BoxCertificate cert = load_box_certificate(a.box);
  const td::BoxB box = td::box_from_certificate(cert);
  const td::FractalView view = td::make_fractal_view(box, a.depth);
  const td::RatVec2 center = parse_point(a.center);
  const td::FoundSegment seg = td::find_segment(view, center, parse_rat(a.radius));
  std::string why;
  if (!td::verify_segment_free(view, seg, &why))
    throw std::runtime_error("found segment fails re-verification: " + why);
  Json payload = td::box_payload(cert);
  payload["inputs"]["depth"] = a.depth;
  payload["inputs"]["center"] = td::ratvec_json(center);
  payload["inputs"]["radius"] = td::rat_json(seg.radius);
  payload["segment"] = td::segment_json(seg);
  std::cout << "segment at u0 ~ " << approx(seg.u0)
            << ", length ~ " << approx(seg.w.width())
            << ", certified to depth " << seg.certified_depth << " ("
            << td::to_string(seg.source) << ")\n";
  write_artifact(resolve_out(a.out, "segment.json"), "segment", payload, t.ms());
  return 0;
}

template <class K>
int run_witness_typed(const WitnessArgs& a, const td::BoxCertificate& cert,
                      const td::BoxB& box, const td::IntMat2& S) {
  Timer t;
  std::vector<td::DenseProbe> probes;
  for (const std::string& entry : a.probes) {
    const auto p = split_commas(entry);
    if (p.size() != 3)
      throw CLI::ValidationError("probe must be cx,cy,ell");
    probes.push_back(td::make_probe(S, {parse_rat(p[0]), parse_rat(p[1])},
                                    std::stol(p[2])));
  }
  td::WitnessOptions opt;
  opt.view_depth = a.view_depth;
  opt.center = parse_point(a.center);
  opt.radius = parse_rat(a.radius);
  opt.avoid_depth = a.avoid_depth;
  opt.grid = a.grid;
  opt.horizon = a.horizon;
  opt.base = parse_point(a.base);
  const td::WitnessReport<K> rep = td::make_witness<K>(box, S, probes, opt);
  std::cout << "witness = (" << approx(rep.point.x) << ", "
            << approx(rep.point.y) << ")\n"
            << "avoids the box for " << rep.avoidance.depth << " iterates; ";
  if (rep.probes.empty())
    std::cout << "no probes requested";
  else
    std::cout << "visits all " << rep.probes.size() << " probes within "
              << a.horizon << " steps";
  std::cout << "; " << rep.density.cells_visited << "/"
            << rep.density.grid * rep.density.grid << " grid cells seen\n";
  write_artifact(resolve_out(a.out, "witness.json"), "witness",
                 td::witness_payload(cert, S, rep, opt), t.ms());
  return 0;
}

int run_witness(const WitnessArgs& a) {
  const td::BoxCertificate cert = load_box_certificate(a.box);
  const td::BoxB box = td::box_from_certificate(cert);
  const td::IntMat2 S = parse_matrix(a.s_matrix);
  const td::PositivizedAuto SP = td::positivize(S);
  if (td::compositum(box.aut.D, SP.work.D).degenerate())
    return run_witness_typed<td::QuadExt>(a, cert, box, S);
  return run_witness_typed<td::TowerExt>(a, cert, box, S);
}

int run_verify(const VerifyArgs& a) {
  const Json env = load_json(a.in);
  const td::VerifyOutcome out = td::verify_envelope(env);
  for (const std::string& n : out.notes) std::cout << n << "\n";
  std::cout << (out.ok ? "VERIFIED" : "FAILED") << " " << a.in << "\n";
  return out.ok ? 0 : 1;
}

int run_render(const RenderArgs& a) {
  const td::BoxCertificate cert = load_box_certificate(a.box);
  const td::BoxB box = td::box_from_certificate(cert);
  td::SvgOptions sopt;
  sopt.size_px = a.size;
  sopt.draw_box = !a.no_box;
  sopt.draw_tubes = !a.no_tubes;
  sopt.orbit_dots = a.orbit_dots;
  td::SvgBuilder svg(sopt);

  td::RatVec2 base{};
  std::optional<Json> wit;
  if (!a.witness.empty()) {
    wit = load_json(a.witness);
    base = td::ratvec_from(wit->at("payload").at("base"));
  }
  svg.add_box_layers(box, a.depth, base);
  if (!a.segment.empty()) {
    const Json env = load_json(a.segment);
    svg.add_segment(box, td::segment_from(env.at("payload").at("segment")), base);
  }
  if (wit) {
    const Json& payload = *wit;
    const Json& pl = payload.at("payload");
    svg.add_segment(box, td::segment_from(pl.at("segment")), base);
    const td::IntMat2 SW = td::mat_from(pl.at("s_work_matrix"));
    const std::string scalar = pl.at("scalar").get<std::string>();
    const td::FieldTag tag{pl.at("tag").at("d1").get<long>(),
                           pl.at("tag").at("d2").get<long>()};
    std::vector<td::DenseProbe> probes;
    for (const Json& pj : pl.at("inputs").at("probes"))
      probes.push_back(td::make_probe(td::mat_from(pl.at("inputs").at("s_matrix")),
                                      td::ratvec_from(pj.at("center")),
                                      pj.at("ell").get<long>()));
    if (scalar == "quad") {
      const auto fS = td::eigenframe<td::QuadExt>(td::analyze(SW), tag);
      svg.add_probes(probes, fS);
      svg.add_witness(td::vec_from<td::QuadExt>(pl.at("point")), SW);
    } else {
      const auto fS = td::eigenframe<td::TowerExt>(td::analyze(SW), tag);
      svg.add_probes(probes, fS);
      svg.add_witness(td::vec_from<td::TowerExt>(pl.at("point")), SW);
    }
  }
  const std::string path = resolve_out(a.out, "figure.svg");
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << svg.str();
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
  std::cout << "wrote " << path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact toolkit for hyperbolic toral constructions: boxes avoided "
               "by one automorphism's orbit while another equidistributes"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a TOML file");
  app.set_version_flag("--version", std::string(td::kToolVersion));

  AnalyzeArgs an;
  auto* c_an = app.add_subcommand("analyze", "Spectral data of an integer matrix");
  c_an->add_option("--matrix", an.matrix, "Entries a,b,c,d of [[a,b],[c,d]]")->required();
  c_an->add_option("--out", an.out, "Output JSON path");

  BuildBoxArgs bb;
  auto* c_bb = app.add_subcommand("build-box", "Build an orbit-avoiding box with certificate");
  c_bb->add_option("--matrix", bb.matrix, "Entries a,b,c,d of [[a,b],[c,d]]")->required();
  c_bb->add_option("--y0", bb.y0, "Rational periodic point x,y")->required();
  c_bb->add_option("--u-max", bb.u_max, "Expanding-side length cap");
  c_bb->add_option("--w-max", bb.w_max, "Contracting-side length cap");
  c_bb->add_option("--bx-cap", bb.bx_cap, "Overall box-extent cap");
  c_bb->add_option("--out", bb.out, "Output JSON path");

  OverlapArgs ov;
  auto* c_ov = app.add_subcommand("verify-overlaps",
                                  "Classify all backward-tube overlaps up to a depth");
  c_ov->add_option("--box", ov.box, "Box artifact JSON")->required();
  c_ov->add_option("--max-depth", ov.max_depth, "Largest tube depth");
  c_ov->add_option("--out", ov.out, "Output JSON path");

  SegmentArgs se;
  auto* c_se = app.add_subcommand("find-segment",
                                  "Find a contracting-direction segment clear of all tubes");
  c_se->add_option("--box", se.box, "Box artifact JSON")->required();
  c_se->add_option("--depth", se.depth, "Certified tube depth");
  c_se->add_option("--center", se.center, "Search ball center x,y");
  c_se->add_option("--radius", se.radius, "Search ball radius");
  c_se->add_option("--out", se.out, "Output JSON path");

  WitnessArgs wi;
  auto* c_wi = app.add_subcommand("witness",
                                  "Produce a point avoiding the box whose probe-map orbit "
                                  "visits every requested cell");
  c_wi->add_option("--box", wi.box, "Box artifact JSON")->required();
  c_wi->add_option("--s-matrix", wi.s_matrix, "Probe automorphism entries a,b,c,d")->required();
  c_wi->add_option("--probe", wi.probes, "Probe as cx,cy,ell (repeatable)");
  c_wi->add_option("--view-depth", wi.view_depth, "Tube depth for the segment search");
  c_wi->add_option("--center", wi.center, "Segment search center x,y (base-relative)");
  c_wi->add_option("--radius", wi.radius, "Segment search ball radius");
  c_wi->add_option("--avoid-depth", wi.avoid_depth, "Iterates certified to avoid the box");
  c_wi->add_option("--grid", wi.grid, "Density grid subdivisions per side");
  c_wi->add_option("--horizon", wi.horizon, "Probe-visit and density walk horizon");
  c_wi->add_option("--base", wi.base, "Fixed point anchoring the box x,y");
  c_wi->add_option("--out", wi.out, "Output JSON path");

  VerifyArgs ve;
  auto* c_ve = app.add_subcommand("verify", "Replay and check an artifact");
  c_ve->add_option("--in", ve.in, "Artifact JSON path")->required();

  RenderArgs re;
  auto* c_re = app.add_subcommand("render", "Draw box, tubes, segment, and witness as SVG");
  c_re->add_option("--box", re.box, "Box artifact JSON")->required();
  c_re->add_option("--segment", re.segment, "Segment artifact JSON");
  c_re->add_option("--witness", re.witness, "Witness artifact JSON");
  c_re->add_option("--depth", re.depth, "Deepest tube layer to draw");
  c_re->add_option("--orbit-dots", re.orbit_dots, "Forward orbit dots for the witness");
  c_re->add_option("--size", re.size, "Image size in pixels");
  c_re->add_flag("--no-tubes", re.no_tubes, "Skip the tube layers");
  c_re->add_flag("--no-box", re.no_box, "Skip the box layer");
  c_re->add_option("--out", re.out, "Output SVG path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_an->parsed()) return run_analyze(an);
    if (c_bb->parsed()) return run_build_box(bb);
    if (c_ov->parsed()) return run_verify_overlaps(ov);
    if (c_se->parsed()) return run_find_segment(se);
    if (c_wi->parsed()) return run_witness(wi);
    if (c_ve->parsed()) return run_verify(ve);
    if (c_re->parsed()) return run_render(re);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
