#pragma once

// Exact JSON persistence for certificates, and replay verification.
//
// Every exact value is stored as a decimal string (rationals as "p/q",
// field elements as their rational coordinates); quadratic and tower
// elements additionally carry a 40-significant-digit decimal companion
// under "dec" for human readers, regenerated on write and ignored on read.
// Round trip is exact: parsing an artifact and serializing it again yields
// the identical document.
//
// Artifacts are wrapped in an envelope recording the tool version, the kind
// of payload, a hash of the payload's "inputs" object, and wall-clock time.
// verify_envelope replays an artifact's claims: it re-derives the cheap
// deterministic enumerations, re-checks every stated inequality and
// identity, and never re-runs any search or selection heuristic.  Its
// verdict is a pure function of the document.

#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "toraldyn/fractal.hpp"
#include "toraldyn/interval.hpp"
#include "toraldyn/tubes.hpp"
#include "toraldyn/witness.hpp"

namespace toraldyn {

using Json = nlohmann::json;

inline constexpr const char* kToolName = "toraldyn";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kEnvelopeFormat = 1;
inline constexpr int kReportDigits = 40;     // decimal companions in artifacts
inline constexpr mpfr_prec_t kReportPrec = 256;

class ArtifactError : public std::runtime_error {
 public:
  explicit ArtifactError(const std::string& w) : std::runtime_error(w) {}
};

// ---------------------------------------------------------------------------
// Exact scalar encoding.

inline std::string decimal_of(const QuadExt& x) {
  return MpfrInterval::eval(x, kReportPrec).mid_decimal(kReportDigits);
}
inline std::string decimal_of(const TowerExt& x) {
  return MpfrInterval::eval(x, kReportPrec).mid_decimal(kReportDigits);
}
inline std::string decimal_of(const Rational& x) {
  return MpfrInterval::eval(x, kReportPrec).mid_decimal(kReportDigits);
}

inline Json rat_json(const Rational& q) { return q.get_str(); }

inline Rational rat_from(const Json& j) {
  if (!j.is_string()) throw ArtifactError("rational field is not a string");
  Rational q;
  if (q.set_str(j.get<std::string>(), 10) != 0)
    throw ArtifactError("unparsable rational '" + j.get<std::string>() + "'");
  q.canonicalize();
  return q;
}

inline Json int_json(const Integer& n) { return n.get_str(); }

inline Integer int_from(const Json& j) {
  if (!j.is_string()) throw ArtifactError("integer field is not a string");
  Integer n;
  if (n.set_str(j.get<std::string>(), 10) != 0)
    throw ArtifactError("unparsable integer '" + j.get<std::string>() + "'");
  return n;
}

inline Json scalar_json(const QuadExt& x) {
  return Json{{"a", rat_json(x.a())},
              {"b", rat_json(x.b())},
              {"d", x.d()},
              {"dec", decimal_of(x)}};
}

inline Json scalar_json(const TowerExt& x) {
  return Json{{"c00", rat_json(x.c00())}, {"c01", rat_json(x.c01())},
              {"c10", rat_json(x.c10())}, {"c11", rat_json(x.c11())},
              {"d1", x.d1()},             {"d2", x.d2()},
              {"dec", decimal_of(x)}};
}

template <class K>
K scalar_from(const Json& j);

template <>
inline QuadExt scalar_from<QuadExt>(const Json& j) {
  return QuadExt(rat_from(j.at("a")), rat_from(j.at("b")), j.at("d").get<long>());
}

template <>
inline TowerExt scalar_from<TowerExt>(const Json& j) {
  return TowerExt(rat_from(j.at("c00")), rat_from(j.at("c01")),
                  rat_from(j.at("c10")), rat_from(j.at("c11")),
                  j.at("d1").get<long>(), j.at("d2").get<long>());
}

// ---------------------------------------------------------------------------
// Small composites.

inline Json ratvec_json(const RatVec2& p) {
  return Json{{"x", rat_json(p.x)}, {"y", rat_json(p.y)}};
}
inline RatVec2 ratvec_from(const Json& j) {
  return {rat_from(j.at("x")), rat_from(j.at("y"))};
}

inline Json intvec_json(const IntVec2& k) {
  return Json{{"x", int_json(k.x)}, {"y", int_json(k.y)}};
}
inline IntVec2 intvec_from(const Json& j) {
  return {int_from(j.at("x")), int_from(j.at("y"))};
}

inline Json mat_json(const IntMat2& m) {
  return Json::array({int_json(m.m00), int_json(m.m01), int_json(m.m10), int_json(m.m11)});
}
inline IntMat2 mat_from(const Json& j) {
  if (!j.is_array() || j.size() != 4) throw ArtifactError("matrix is not a 4-array");
  return {int_from(j[0]), int_from(j[1]), int_from(j[2]), int_from(j[3])};
}

template <class K>
Json vec_json(const Vec2<K>& p) {
  return Json{{"x", scalar_json(p.x)}, {"y", scalar_json(p.y)}};
}
template <class K>
Vec2<K> vec_from(const Json& j) {
  return {scalar_from<K>(j.at("x")), scalar_from<K>(j.at("y"))};
}

template <class K>
Json interval_json(const KInterval<K>& iv) {
  return Json{{"lo", scalar_json(iv.lo)},
              {"hi", scalar_json(iv.hi)},
              {"lo_open", iv.lo_open},
              {"hi_open", iv.hi_open}};
}
template <class K>
KInterval<K> interval_from(const Json& j) {
  return {scalar_from<K>(j.at("lo")), scalar_from<K>(j.at("hi")),
          j.at("lo_open").get<bool>(), j.at("hi_open").get<bool>()};
}

template <class K>
Json rect_json(const FrameRect<K>& r) {
  return Json{{"u", interval_json(r.u)}, {"w", interval_json(r.w)}};
}
template <class K>
FrameRect<K> rect_from(const Json& j) {
  return {interval_from<K>(j.at("u")), interval_from<K>(j.at("w"))};
}

// ---------------------------------------------------------------------------
// Box certificate.

inline const char* to_string(AvoidVerdict v) {
  switch (v) {
    case AvoidVerdict::SelectedFace: return "selected-face";
    case AvoidVerdict::OutsideStrip: return "outside-strip";
    case AvoidVerdict::Below: return "below";
    case AvoidVerdict::Above: return "above";
  }
  return "?";
}

inline AvoidVerdict avoid_verdict_from(const std::string& s) {
  if (s == "selected-face") return AvoidVerdict::SelectedFace;
  if (s == "outside-strip") return AvoidVerdict::OutsideStrip;
  if (s == "below") return AvoidVerdict::Below;
  if (s == "above") return AvoidVerdict::Above;
  throw ArtifactError("unknown avoidance verdict '" + s + "'");
}

inline Json piece_json(const PieceRecord& pc) {
  return Json{{"n", pc.n},
              {"k", intvec_json(pc.k)},
              {"u0", scalar_json(pc.u0)},
              {"c", scalar_json(pc.c)}};
}
inline PieceRecord piece_from(const Json& j) {
  PieceRecord pc;
  pc.n = j.at("n").get<long>();
  pc.k = intvec_from(j.at("k"));
  pc.u0 = scalar_from<QuadExt>(j.at("u0"));
  pc.c = scalar_from<QuadExt>(j.at("c"));
  return pc;
}

inline Json alpha_json(const AlphaRecord& r) {
  Json pieces = Json::array();
  for (const PieceRecord& pc : r.pieces) pieces.push_back(piece_json(pc));
  return Json{{"n", r.n},
              {"alpha", scalar_json(r.alpha)},
              {"window", rat_json(r.window)},
              {"hit", piece_json(r.hit)},
              {"pieces", std::move(pieces)}};
}
inline AlphaRecord alpha_from(const Json& j) {
  AlphaRecord r;
  r.n = j.at("n").get<long>();
  r.alpha = scalar_from<QuadExt>(j.at("alpha"));
  r.window = rat_from(j.at("window"));
  r.hit = piece_from(j.at("hit"));
  for (const Json& p : j.at("pieces")) r.pieces.push_back(piece_from(p));
  return r;
}

inline Json box_certificate_json(const BoxCertificate& cert) {
  Json orbit = Json::array();
  for (const RatVec2& p : cert.orbit) orbit.push_back(ratvec_json(p));
  Json alphas = Json::array();
  for (const AlphaRecord& r : cert.alphas) alphas.push_back(alpha_json(r));
  Json retained = Json::array();
  for (const PieceRecord& pc : cert.retained) retained.push_back(piece_json(pc));
  Json argmins = Json::array();
  for (size_t i : cert.argmin_ids) argmins.push_back(i);
  Json verdicts = Json::array();
  for (AvoidVerdict v : cert.verdicts) verdicts.push_back(to_string(v));
  return Json{{"matrix", mat_json(cert.matrix)},
              {"exponent", cert.exponent},
              {"y0", ratvec_json(cert.y0)},
              {"u_max", rat_json(cert.u_max)},
              {"w_max", rat_json(cert.w_max)},
              {"bx_cap", rat_json(cert.bx_cap)},
              {"y0_interior", cert.y0_interior},
              {"orbit", std::move(orbit)},
              {"alphas", std::move(alphas)},
              {"alpha_min", scalar_json(cert.alpha_min)},
              {"retained", std::move(retained)},
              {"argmin_ids", std::move(argmins)},
              {"unique_min_index", cert.unique_min_index},
              {"approach_enters", cert.approach_enters},
              {"eta", scalar_json(cert.eta)},
              {"alpha_star", scalar_json(cert.alpha_star)},
              {"selected_id", cert.selected_id},
              {"u_sel", scalar_json(cert.u_sel)},
              {"h", scalar_json(cert.h)},
              {"verdicts", std::move(verdicts)}};
}

inline BoxCertificate box_certificate_from(const Json& j) {
  BoxCertificate cert;
  cert.matrix = mat_from(j.at("matrix"));
  cert.exponent = j.at("exponent").get<int>();
  cert.y0 = ratvec_from(j.at("y0"));
  cert.u_max = rat_from(j.at("u_max"));
  cert.w_max = rat_from(j.at("w_max"));
  cert.bx_cap = rat_from(j.at("bx_cap"));
  cert.y0_interior = j.at("y0_interior").get<bool>();
  for (const Json& p : j.at("orbit")) cert.orbit.push_back(ratvec_from(p));
  for (const Json& a : j.at("alphas")) cert.alphas.push_back(alpha_from(a));
  cert.alpha_min = scalar_from<QuadExt>(j.at("alpha_min"));
  for (const Json& p : j.at("retained")) cert.retained.push_back(piece_from(p));
  for (const Json& i : j.at("argmin_ids")) cert.argmin_ids.push_back(i.get<size_t>());
  cert.unique_min_index = j.at("unique_min_index").get<bool>();
  cert.approach_enters = j.at("approach_enters").get<bool>();
  cert.eta = scalar_from<QuadExt>(j.at("eta"));
  cert.alpha_star = scalar_from<QuadExt>(j.at("alpha_star"));
  cert.selected_id = j.at("selected_id").get<size_t>();
  cert.u_sel = scalar_from<QuadExt>(j.at("u_sel"));
  cert.h = scalar_from<QuadExt>(j.at("h"));
  for (const Json& v : j.at("verdicts"))
    cert.verdicts.push_back(avoid_verdict_from(v.get<std::string>()));
  return cert;
}

// ---------------------------------------------------------------------------
// Analysis payload.

inline Json analysis_payload(const IntMat2& M) {
  const ToralAuto A = analyze(M);
  const PositivizedAuto P = positivize(M);
  return Json{{"inputs", Json{{"matrix", mat_json(M)}}},
              {"det", A.det},
              {"trace", int_json(A.trace)},
              {"discriminant_core", A.D},
              {"lambda_plus", scalar_json(A.lambda_plus)},
              {"lambda_minus", scalar_json(A.lambda_minus)},
              {"slope_plus", scalar_json(A.slope_plus)},
              {"slope_minus", scalar_json(A.slope_minus)},
              {"positivized_exponent", P.exponent},
              {"work_matrix", mat_json(P.work.M)}};
}

// ---------------------------------------------------------------------------
// Box payload.

inline Json box_inputs_json(const BoxCertificate& c) {
  return Json{{"matrix", mat_json(c.matrix)},
              {"y0", ratvec_json(c.y0)},
              {"u_max", rat_json(c.u_max)},
              {"w_max", rat_json(c.w_max)},
              {"bx_cap", rat_json(c.bx_cap)}};
}

inline Json box_payload(const BoxCertificate& cert) {
  return Json{{"inputs", Json{{"box", box_inputs_json(cert)}}},
              {"box_certificate", box_certificate_json(cert)}};
}

// ---------------------------------------------------------------------------
// Overlap-scan payload pieces.

inline OverlapVerdict overlap_verdict_from(const std::string& s) {
  if (s == "not-intersecting") return OverlapVerdict::NotIntersecting;
  if (s == "improper") return OverlapVerdict::Improper;
  if (s == "proper-at-start") return OverlapVerdict::ProperAtStart;
  if (s == "proper-at-end") return OverlapVerdict::ProperAtEnd;
  throw ArtifactError("unknown overlap verdict '" + s + "'");
}

inline Json overlap_region_json(const OverlapRegion& reg) {
  return Json{{"offset", intvec_json(reg.offset)},
              {"delta", vec_json(reg.delta)},
              {"region", rect_json(reg.region)},
              {"verdict", to_string(reg.verdict)}};
}
inline OverlapRegion overlap_region_from(const Json& j) {
  OverlapRegion reg;
  reg.offset = intvec_from(j.at("offset"));
  reg.delta = vec_from<QuadExt>(j.at("delta"));
  reg.region = rect_from<QuadExt>(j.at("region"));
  reg.verdict = overlap_verdict_from(j.at("verdict").get<std::string>());
  return reg;
}

inline Json overlap_scan_json(const OverlapScanReport& rep) {
  Json pairs = Json::array();
  for (const PairOverlapReport& pr : rep.pairs) {
    Json regions = Json::array();
    for (const OverlapRegion& reg : pr.regions) regions.push_back(overlap_region_json(reg));
    pairs.push_back(Json{{"old_depth", pr.old_depth},
                         {"new_depth", pr.new_depth},
                         {"regions", std::move(regions)}});
  }
  return Json{{"max_depth", rep.max_depth},
              {"tubes_embedded", rep.tubes_embedded},
              {"pairs_checked", rep.pairs_checked},
              {"region_count", rep.region_count},
              {"proper_count", rep.proper_count},
              {"spot_checks", rep.spot_checks},
              {"no_proper_overlaps", rep.no_proper_overlaps},
              {"pairs", std::move(pairs)}};
}

inline OverlapScanReport overlap_scan_from(const Json& j) {
  OverlapScanReport rep;
  rep.max_depth = j.at("max_depth").get<long>();
  rep.tubes_embedded = j.at("tubes_embedded").get<bool>();
  rep.pairs_checked = j.at("pairs_checked").get<long>();
  rep.region_count = j.at("region_count").get<long>();
  rep.proper_count = j.at("proper_count").get<long>();
  rep.spot_checks = j.at("spot_checks").get<long>();
  rep.no_proper_overlaps = j.at("no_proper_overlaps").get<bool>();
  for (const Json& p : j.at("pairs")) {
    PairOverlapReport pr;
    pr.old_depth = p.at("old_depth").get<long>();
    pr.new_depth = p.at("new_depth").get<long>();
    for (const Json& r : p.at("regions")) pr.regions.push_back(overlap_region_from(r));
    rep.pairs.push_back(std::move(pr));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Segment payload pieces.

inline SegmentSource segment_source_from(const std::string& s) {
  if (s == "start-face") return SegmentSource::StartFace;
  if (s == "end-face") return SegmentSource::EndFace;
  if (s == "window-clear") return SegmentSource::WindowClear;
  throw ArtifactError("unknown segment source '" + s + "'");
}

inline Json segment_json(const FoundSegment& seg) {
  Json steps = Json::array();
  for (const SegmentStep& st : seg.steps)
    steps.push_back(Json{{"first_tube", st.first_tube},
                         {"case", std::string(1, st.case_tag)},
                         {"next_tube", st.next_tube}});
  return Json{{"u0", scalar_json(seg.u0)},
              {"w", interval_json(seg.w)},
              {"certified_depth", seg.certified_depth},
              {"source", to_string(seg.source)},
              {"source_tube", seg.source_tube},
              {"source_offset", intvec_json(seg.source_offset)},
              {"trimmed", seg.trimmed},
              {"steps", std::move(steps)},
              {"window", rect_json(seg.window)},
              {"center", ratvec_json(seg.center)},
              {"radius", rat_json(seg.radius)}};
}

inline FoundSegment segment_from(const Json& j) {
  FoundSegment seg;
  seg.u0 = scalar_from<QuadExt>(j.at("u0"));
  seg.w = interval_from<QuadExt>(j.at("w"));
  seg.certified_depth = j.at("certified_depth").get<long>();
  seg.source = segment_source_from(j.at("source").get<std::string>());
  seg.source_tube = j.at("source_tube").get<long>();
  seg.source_offset = intvec_from(j.at("source_offset"));
  seg.trimmed = j.at("trimmed").get<bool>();
  for (const Json& st : j.at("steps")) {
    const std::string tag = st.at("case").get<std::string>();
    if (tag.size() != 1) throw ArtifactError("segment step case must be one character");
    seg.steps.push_back({st.at("first_tube").get<long>(), tag[0],
                         st.at("next_tube").get<long>()});
  }
  seg.window = rect_from<QuadExt>(j.at("window"));
  seg.center = ratvec_from(j.at("center"));
  seg.radius = rat_from(j.at("radius"));
  return seg;
}

// ---------------------------------------------------------------------------
// Witness payload pieces.

inline Json probe_json(const DenseProbe& p) {
  return Json{{"work_matrix", mat_json(p.aut.work.M)},
              {"exponent", p.aut.exponent},
              {"center", ratvec_json(p.center)},
              {"ell", p.ell},
              {"period", p.period},
              {"half", rat_json(p.half)}};
}

inline Json density_json(const DensityReport& d) {
  Json cells = Json::array();
  for (size_t i = 0; i < d.cells.size(); ++i)
    cells.push_back(Json::array({d.cells[i].first, d.cells[i].second, d.first_seen[i]}));
  return Json{{"grid", d.grid},
              {"horizon", d.horizon},
              {"steps_walked", d.steps_walked},
              {"cells_visited", d.cells_visited},
              {"first_full_cover", d.first_full_cover},
              {"cells", std::move(cells)}};
}

inline DensityReport density_from(const Json& j) {
  DensityReport d;
  d.grid = j.at("grid").get<long>();
  d.horizon = j.at("horizon").get<long>();
  d.steps_walked = j.at("steps_walked").get<long>();
  d.cells_visited = j.at("cells_visited").get<long>();
  d.first_full_cover = j.at("first_full_cover").get<long>();
  for (const Json& c : j.at("cells")) {
    if (!c.is_array() || c.size() != 3) throw ArtifactError("density cell must be a 3-array");
    d.cells.emplace_back(c[0].get<long>(), c[1].get<long>());
    d.first_seen.push_back(c[2].get<long>());
  }
  return d;
}

inline Json clearance_side_json(const ClearanceSide& s) {
  return Json{{"bounded", s.bounded},
              {"gap", scalar_json(s.gap)},
              {"tube", s.tube},
              {"offset", intvec_json(s.offset)}};
}
inline ClearanceSide clearance_side_from(const Json& j) {
  ClearanceSide s;
  s.bounded = j.at("bounded").get<bool>();
  s.gap = scalar_from<QuadExt>(j.at("gap"));
  s.tube = j.at("tube").get<long>();
  s.offset = intvec_from(j.at("offset"));
  return s;
}

inline Json clearance_json(const ClearanceReport& c) {
  return Json{{"search_radius", rat_json(c.search_radius)},
              {"minus_side", clearance_side_json(c.minus_side)},
              {"plus_side", clearance_side_json(c.plus_side)},
              {"thickening", scalar_json(c.thickening)}};
}
inline ClearanceReport clearance_from(const Json& j) {
  ClearanceReport c;
  c.search_radius = rat_from(j.at("search_radius"));
  c.minus_side = clearance_side_from(j.at("minus_side"));
  c.plus_side = clearance_side_from(j.at("plus_side"));
  c.thickening = scalar_from<QuadExt>(j.at("thickening"));
  return c;
}

template <class K>
const char* scalar_kind();
template <>
inline const char* scalar_kind<QuadExt>() { return "quad"; }
template <>
inline const char* scalar_kind<TowerExt>() { return "tower"; }

template <class K>
Json witness_payload(const BoxCertificate& box_cert, const IntMat2& S,
                     const WitnessReport<K>& rep, const WitnessOptions& opt) {
  Json probe_inputs = Json::array();
  Json probes_full = Json::array();
  for (const DenseProbe& p : rep.probes) {
    probe_inputs.push_back(Json{{"center", ratvec_json(p.center)}, {"ell", p.ell}});
    probes_full.push_back(probe_json(p));
  }
  Json visits = Json::array();
  for (const WitnessVisit& v : rep.visits)
    visits.push_back(Json{{"probe", v.probe}, {"iterate", v.iterate},
                          {"reverified", v.reverified}});
  const Json inputs{{"box", box_inputs_json(box_cert)},
                    {"s_matrix", mat_json(S)},
                    {"probes", probe_inputs},
                    {"options", Json{{"view_depth", opt.view_depth},
                                     {"center", ratvec_json(opt.center)},
                                     {"radius", rat_json(opt.radius)},
                                     {"avoid_depth", opt.avoid_depth},
                                     {"grid", opt.grid},
                                     {"horizon", opt.horizon},
                                     {"base", ratvec_json(opt.base)}}}};
  return Json{{"inputs", inputs},
              {"scalar", scalar_kind<K>()},
              {"tag", Json{{"d1", rep.tag.d1}, {"d2", rep.tag.d2}}},
              {"box_certificate", box_certificate_json(box_cert)},
              {"s_exponent", rep.target.exponent},
              {"s_work_matrix", mat_json(rep.target.work.M)},
              {"probes_full", std::move(probes_full)},
              {"segment", segment_json(rep.segment)},
              {"base", ratvec_json(rep.base)},
              {"anchor_probe", rep.anchor_probe},
              {"anchor_candidate", rep.anchor_candidate},
              {"crossings_found", rep.cut.crossings.size()},
              {"cut", Json{{"offset", intvec_json(rep.cut.offset)},
                           {"t", scalar_json(rep.cut.t)},
                           {"s", scalar_json(rep.cut.s)},
                           {"ladder", rep.cut.ladder},
                           {"minimal_ladder", rep.cut.minimal_ladder},
                           {"rounds", rep.cut.rounds},
                           {"visit_iterate", rep.cut.visit_iterate}}},
              {"point", vec_json(rep.point)},
              {"s_param", scalar_json(rep.s_param)},
              {"visits", std::move(visits)},
              {"avoidance", Json{{"depth", rep.avoidance.depth}, {"ok", rep.avoidance.ok}}},
              {"density", density_json(rep.density)},
              {"clearance", clearance_json(rep.clearance)}};
}

// ---------------------------------------------------------------------------
// Envelope.

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string input_hash_of(const Json& payload) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx",
                static_cast<unsigned long long>(fnv1a64(payload.at("inputs").dump())));
  return buf;
}

inline Json make_envelope(const std::string& kind, Json payload, long wall_ms) {
  Json env{{"tool", kToolName},
           {"format", kEnvelopeFormat},
           {"version", kToolVersion},
           {"kind", kind},
           {"input_hash", input_hash_of(payload)},
           {"wall_ms", wall_ms},
           {"payload", std::move(payload)}};
  return env;
}

// ---------------------------------------------------------------------------
// Replay verification.

struct VerifyOutcome {
  bool ok = true;
  std::vector<std::string> notes;

  void fail(const std::string& what) {
    ok = false;
    notes.push_back("FAIL: " + what);
  }
  void pass(const std::string& what) { notes.push_back("ok: " + what); }
};

namespace detail {

inline void verify_analysis(const Json& payload, VerifyOutcome& out) {
  const IntMat2 M = mat_from(payload.at("inputs").at("matrix"));
  const ToralAuto A = analyze(M);
  const PositivizedAuto P = positivize(M);
  bool same = payload.at("det").get<long>() == A.det &&
              int_from(payload.at("trace")) == A.trace &&
              payload.at("discriminant_core").get<long>() == A.D &&
              scalar_from<QuadExt>(payload.at("lambda_plus")) == A.lambda_plus &&
              scalar_from<QuadExt>(payload.at("lambda_minus")) == A.lambda_minus &&
              scalar_from<QuadExt>(payload.at("slope_plus")) == A.slope_plus &&
              scalar_from<QuadExt>(payload.at("slope_minus")) == A.slope_minus &&
              payload.at("positivized_exponent").get<int>() == P.exponent &&
              mat_from(payload.at("work_matrix")) == P.work.M;
  if (same)
    out.pass("spectral data replayed exactly");
  else
    out.fail("stored spectral data differs from replay");
}

inline bool verify_box_payload(const Json& payload, VerifyOutcome& out, BoxB* box_out) {
  const BoxCertificate cert = box_certificate_from(payload.at("box_certificate"));
  const Json& in = payload.at("inputs").at("box");
  if (!(mat_from(in.at("matrix")) == cert.matrix) ||
      !(reduce_mod1(ratvec_from(in.at("y0"))) == reduce_mod1(cert.y0)) ||
      rat_from(in.at("u_max")) != cert.u_max ||
      rat_from(in.at("w_max")) != cert.w_max ||
      rat_from(in.at("bx_cap")) != cert.bx_cap) {
    out.fail("certificate does not describe the stated inputs");
    return false;
  }
  std::string why;
  if (!verify_certificate(cert, &why)) {
    out.fail("box certificate replay: " + why);
    return false;
  }
  out.pass("box certificate replayed (" + std::to_string(cert.orbit.size()) +
           " orbit points, " + std::to_string(cert.retained.size()) + " pieces)");
  BoxB box = box_from_certificate(cert);
  if (!box_avoids_all_approaches(box)) {
    out.fail("box does not avoid every approach segment");
    return false;
  }
  out.pass("box avoids all approach segments");
  if (box_out) *box_out = std::move(box);
  return true;
}

inline void verify_overlap_scan(const Json& payload, VerifyOutcome& out) {
  BoxB box;
  if (!verify_box_payload(payload, out, &box)) return;
  const OverlapScanReport rep = overlap_scan_from(payload.at("scan"));
  if (rep.max_depth != payload.at("inputs").at("max_depth").get<long>()) {
    out.fail("scan depth differs from the stated input");
    return;
  }
  long pairs = 0, regions = 0, proper = 0;
  for (const PairOverlapReport& pr : rep.pairs) {
    ++pairs;
    std::vector<OverlapRegion> fresh;
    try {
      fresh = tube_overlap_regions(box, pr.old_depth, pr.new_depth);
    } catch (const std::exception& e) {
      out.fail("region enumeration replay threw: " + std::string(e.what()));
      return;
    }
    if (fresh.size() != pr.regions.size()) {
      out.fail("region count mismatch for pair (" + std::to_string(pr.old_depth) +
               "," + std::to_string(pr.new_depth) + ")");
      return;
    }
    const QuadExt u_old = box.tube_rect(pr.old_depth).u.hi;
    const QuadExt u_new = box.tube_rect(pr.new_depth).u.hi;
    for (size_t i = 0; i < fresh.size(); ++i) {
      const OverlapRegion& a = pr.regions[i];
      const OverlapRegion& b = fresh[i];
      ++regions;
      if (is_proper(a.verdict)) ++proper;
      if (!(a.offset == b.offset) || !(a.delta == b.delta) ||
          a.verdict != offset_verdict(a.delta.x, u_old, u_new)) {
        out.fail("stored region disagrees with replay for pair (" +
                 std::to_string(pr.old_depth) + "," + std::to_string(pr.new_depth) + ")");
        return;
      }
    }
  }
  const long want_pairs = rep.max_depth * (rep.max_depth + 1) / 2;
  if (pairs != rep.pairs_checked || pairs != want_pairs ||
      regions != rep.region_count || proper != rep.proper_count ||
      rep.no_proper_overlaps != (proper == 0)) {
    out.fail("scan counters are inconsistent with the stored regions");
    return;
  }
  out.pass("overlap regions replayed for " + std::to_string(pairs) + " pairs (" +
           std::to_string(regions) + " regions, " + std::to_string(proper) + " proper)");
  if (!rep.no_proper_overlaps) out.fail("scan records a proper overlap");
}

inline void verify_segment_payload(const Json& payload, VerifyOutcome& out) {
  BoxB box;
  if (!verify_box_payload(payload, out, &box)) return;
  const FoundSegment seg = segment_from(payload.at("segment"));
  const Json& in = payload.at("inputs");
  if (seg.certified_depth != in.at("depth").get<long>() ||
      seg.center != ratvec_from(in.at("center")) ||
      seg.radius != rat_from(in.at("radius"))) {
    out.fail("segment does not describe the stated inputs");
    return;
  }
  const FractalView view = make_fractal_view(box, seg.certified_depth);
  if (!membership(view, seg.center).in_fractal) {
    out.fail("segment center is not in the depth-certified complement");
    return;
  }
  if (seg.w.empty()) {
    out.fail("segment interval is empty");
    return;
  }
  if (!verify_segment_free(view, seg)) {
    out.fail("segment is not disjoint from every tube");
    return;
  }
  out.pass("segment re-verified free of tubes 0.." + std::to_string(seg.certified_depth));
}

template <class K>
void verify_witness_payload(const Json& payload, VerifyOutcome& out) {
  BoxB box;
  if (!verify_box_payload(payload, out, &box)) return;
  const Json& in = payload.at("inputs");

  const IntMat2 S = mat_from(in.at("s_matrix"));
  const PositivizedAuto SP = positivize(S);
  if (SP.exponent != payload.at("s_exponent").get<int>() ||
      !(SP.work.M == mat_from(payload.at("s_work_matrix")))) {
    out.fail("probing automorphism differs from replay");
    return;
  }
  if (!contracting_transversal(box.aut, SP.work)) {
    out.fail("contracting directions are not transversal");
    return;
  }
  const FieldTag tag = compositum(box.aut.D, SP.work.D);
  if (tag.d1 != payload.at("tag").at("d1").get<long>() ||
      tag.d2 != payload.at("tag").at("d2").get<long>() ||
      std::string(scalar_kind<K>()) != payload.at("scalar").get<std::string>()) {
    out.fail("field tag differs from replay");
    return;
  }

  std::vector<DenseProbe> probes;
  const Json& pin = in.at("probes");
  const Json& pfull = payload.at("probes_full");
  if (pin.size() != pfull.size()) {
    out.fail("probe list sizes differ");
    return;
  }
  for (size_t i = 0; i < pfull.size(); ++i) {
    const DenseProbe fresh = make_probe(S, ratvec_from(pin[i].at("center")),
                                        pin[i].at("ell").get<long>());
    const Json& st = pfull[i];
    if (!(mat_from(st.at("work_matrix")) == fresh.aut.work.M) ||
        st.at("exponent").get<int>() != fresh.aut.exponent ||
        ratvec_from(st.at("center")) != fresh.center ||
        st.at("ell").get<long>() != fresh.ell ||
        st.at("period").get<long>() != fresh.period ||
        rat_from(st.at("half")) != fresh.half) {
      out.fail("stored probe " + std::to_string(i) + " differs from replay");
      return;
    }
    probes.push_back(fresh);
  }
  if (!probes.empty())
    out.pass("probes replayed (" + std::to_string(probes.size()) + ")");

  const FoundSegment seg = segment_from(payload.at("segment"));
  const FractalView view = make_fractal_view(box, seg.certified_depth);
  if (!verify_segment_free(view, seg)) {
    out.fail("segment is not disjoint from every tube");
    return;
  }
  out.pass("segment re-verified free of tubes 0.." + std::to_string(seg.certified_depth));

  const RatVec2 base = ratvec_from(payload.at("base"));
  if (apply_mod1(box.aut.M, reduce_mod1(base)) != reduce_mod1(base)) {
    out.fail("base point is not fixed by the box map");
    return;
  }

  // Incidence: the witness lies on the found segment at the stated parameter
  // and on the anchor probe's contracting leaf at the stated parameter.
  const Vec2<K> point = vec_from<K>(payload.at("point"));
  const K s_param = scalar_from<K>(payload.at("s_param"));
  const K u0 = promote_quad<K>(seg.u0, tag);
  const K s0T = promote_quad<K>(box.aut.slope_plus, tag);
  const K s1T = promote_quad<K>(box.aut.slope_minus, tag);
  const Vec2<K> on_segment = reduce_mod1_pt(
      Vec2<K>{K(base.x) + u0 + s_param, K(base.y) + u0 * s0T + s_param * s1T});
  if (!(point == on_segment)) {
    out.fail("witness does not lie on the stated segment parameter");
    return;
  }
  const KInterval<K> window{promote_quad<K>(seg.w.lo, tag), promote_quad<K>(seg.w.hi, tag),
                            seg.w.lo_open, seg.w.hi_open};
  if (!window.contains(s_param)) {
    out.fail("segment parameter lies outside the segment interval");
    return;
  }
  if (!probes.empty()) {
    const size_t ap = payload.at("anchor_probe").get<size_t>();
    if (ap >= probes.size()) {
      out.fail("anchor probe index out of range");
      return;
    }
    const K t = scalar_from<K>(payload.at("cut").at("t"));
    const K s1S = promote_quad<K>(SP.work.slope_minus, tag);
    const Vec2<K> on_leaf = reduce_mod1_pt(Vec2<K>{K(probes[ap].center.x) + t,
                                                   K(probes[ap].center.y) + t * s1S});
    if (!(point == on_leaf)) {
      out.fail("witness does not lie on the stated leaf parameter");
      return;
    }
    out.pass("witness incidence identities hold exactly");
  } else {
    out.pass("witness segment incidence holds exactly");
  }

  // Probe visits, by fresh exact iteration.
  for (const Json& v : payload.at("visits")) {
    const size_t pi = v.at("probe").get<size_t>();
    const long it = v.at("iterate").get<long>();
    if (pi >= probes.size() || !v.at("reverified").get<bool>() ||
        !reverify_probe_visit(point, probes[pi], tag, it)) {
      out.fail("stored probe visit fails fresh iteration");
      return;
    }
  }
  if (payload.at("visits").size() != probes.size()) {
    out.fail("visit list does not cover every probe");
    return;
  }
  if (!probes.empty())
    out.pass("probe visits re-verified (" +
             std::to_string(payload.at("visits").size()) + ")");

  // Avoidance, by fresh exact iteration of the base-relative point.
  const Json& av = payload.at("avoidance");
  if (!av.at("ok").get<bool>()) {
    out.fail("avoidance certificate is marked failed");
    return;
  }
  const Vec2<K> xi{point.x - K(base.x), point.y - K(base.y)};
  try {
    certify_avoidance(xi, box, tag, av.at("depth").get<long>());
  } catch (const AvoidanceFailed& e) {
    out.fail("avoidance replay enters the box at iterate " + std::to_string(e.step()));
    return;
  }
  out.pass("avoidance replayed to depth " + std::to_string(av.at("depth").get<long>()));

  // Density cells: recompute each first-visit iterate with one matrix power.
  const DensityReport den = density_from(payload.at("density"));
  if (den.cells.size() != den.first_seen.size() ||
      den.cells_visited != static_cast<long>(den.cells.size()) ||
      den.steps_walked > den.horizon ||
      (den.first_full_cover < 0 && den.steps_walked != den.horizon) ||
      (den.first_full_cover >= 0 &&
       (den.cells_visited != den.grid * den.grid ||
        den.steps_walked != den.first_full_cover))) {
    out.fail("density report is internally inconsistent");
    return;
  }
  const K gk{Rational(den.grid)};
  for (size_t i = 0; i < den.cells.size(); ++i) {
    const long j = den.first_seen[i];
    if (j < 0 || j > den.steps_walked) {
      out.fail("density first-visit iterate out of range");
      return;
    }
    const Vec2<K> xj = reduce_mod1_pt(
        SP.work.M.pow(static_cast<unsigned>(j)).apply(point));
    if (floor_of(xj.x * gk).get_si() != den.cells[i].first ||
        floor_of(xj.y * gk).get_si() != den.cells[i].second) {
      out.fail("density cell " + std::to_string(i) + " fails fresh iteration");
      return;
    }
  }
  if (den.horizon > 0)
    out.pass("density cells re-verified (" + std::to_string(den.cells.size()) +
             " of " + std::to_string(den.grid * den.grid) + ")");

  // Clearance arithmetic.
  const ClearanceReport cl = clearance_from(payload.at("clearance"));
  const QuadExt smaller =
      (cl.minus_side.gap < cl.plus_side.gap) ? cl.minus_side.gap : cl.plus_side.gap;
  if (cl.minus_side.gap.sign() < 0 || cl.plus_side.gap.sign() < 0 ||
      cl.thickening * QuadExt(2) != smaller) {
    out.fail("clearance report is internally inconsistent");
    return;
  }
  out.pass("clearance arithmetic consistent");
}

}  // namespace detail

inline VerifyOutcome verify_envelope(const Json& env) {
  VerifyOutcome out;
  try {
    if (env.at("tool").get<std::string>() != kToolName)
      out.fail("artifact was not produced by this tool");
    if (env.at("format").get<int>() != kEnvelopeFormat)
      out.fail("unknown envelope format");
    const Json& payload = env.at("payload");
    const std::string stored_hash = env.at("input_hash").get<std::string>();
    if (stored_hash != input_hash_of(payload))
      out.fail("input hash mismatch (inputs were altered)");
    else
      out.pass("input hash matches");
    if (!out.ok) return out;

    const std::string kind = env.at("kind").get<std::string>();
    if (kind == "analysis") {
      detail::verify_analysis(payload, out);
    } else if (kind == "box") {
      detail::verify_box_payload(payload, out, nullptr);
    } else if (kind == "overlap-scan") {
      detail::verify_overlap_scan(payload, out);
    } else if (kind == "segment") {
      detail::verify_segment_payload(payload, out);
    } else if (kind == "witness") {
      const std::string scalar = payload.at("scalar").get<std::string>();
      if (scalar == "quad")
        detail::verify_witness_payload<QuadExt>(payload, out);
      else if (scalar == "tower")
        detail::verify_witness_payload<TowerExt>(payload, out);
      else
        out.fail("unknown scalar kind '" + scalar + "'");
    } else {
      out.fail("unknown artifact kind '" + kind + "'");
    }
  } catch (const std::exception& e) {
    out.fail(std::string("malformed artifact: ") + e.what());
  }
  return out;
}

}  // namespace toraldyn
