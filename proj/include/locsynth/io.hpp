//
// Copyright 2026 The locsynth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// File formats.
//
//   Points CSV   header `lon,lat`, one point per row, degrees.
//   Road graph   {"nodes": [{"id", "lon", "lat"}],
//                 "edges": [{"id", "node_ids": [...],
//                            "polyline": [[lon, lat], ...]}]}
//                polyline is optional and defaults to the node sequence.
//   OOB          JSON array of rings, each a list of [lon, lat].
//   Regions      JSON array of {"id", "polygon": [[lon, lat], ...],
//                "noisy_count"}; true counts are never written.

#ifndef LOCSYNTH_IO_HPP_
#define LOCSYNTH_IO_HPP_

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"
#include "locsynth/error.hpp"
#include "locsynth/evaluation.hpp"
#include "locsynth/geometry.hpp"
#include "locsynth/partition.hpp"
#include "locsynth/roadnet.hpp"

namespace locsynth {

using Json = nlohmann::json;

namespace internal {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Json read_json(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

inline LonLat lonlat_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw InputError(where + ": expected [lon, lat]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace internal

inline std::vector<LonLat> parse_points_csv(std::string_view text,
                                            const std::string& name) {
  std::vector<LonLat> out;
  size_t line_no = 0;
  bool header_seen = false;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = internal::trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (!header_seen) {
      if (line != "lon,lat") {
        throw InputError(name + ":" + std::to_string(line_no) +
                         ": expected header 'lon,lat'");
      }
      header_seen = true;
      continue;
    }
    const size_t comma = line.find(',');
    LonLat ll;
    if (comma == std::string_view::npos ||
        line.find(',', comma + 1) != std::string_view::npos ||
        !internal::parse_double(line.substr(0, comma), ll.lon) ||
        !internal::parse_double(line.substr(comma + 1), ll.lat)) {
      throw InputError(name + ":" + std::to_string(line_no) +
                       ": malformed row '" + std::string(line) + "'");
    }
    out.push_back(ll);
  }
  if (!header_seen) throw InputError(name + ": empty file");
  return out;
}

inline std::vector<LonLat> read_points_csv(const std::string& path) {
  return parse_points_csv(internal::read_file(path), path);
}

inline std::string format_degrees(double v) {
  char buf[64];
  const int n = std::snprintf(buf, sizeof(buf), "%.8f", v);
  return std::string(buf, static_cast<size_t>(n));
}

// Shortest "%g"-style rendering, used for JSON keys such as radii.
inline std::string format_number(double v) {
  char buf[64];
  const int n = std::snprintf(buf, sizeof(buf), "%.10g", v);
  return std::string(buf, static_cast<size_t>(n));
}

inline void write_points_csv(const std::string& path,
                             std::span<const Point2> points,
                             const Projection& projection) {
  std::string out = "lon,lat\n";
  out.reserve(points.size() * 28 + 8);
  for (const Point2& p : points) {
    const LonLat ll = projection.unproject(p);
    out += format_degrees(ll.lon);
    out += ',';
    out += format_degrees(ll.lat);
    out += '\n';
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write '" + path + "'");
  f << out;
}

// Road graph in degrees, before projection.
struct RawGraph {
  struct Node {
    int64_t id;
    LonLat position;
  };
  struct Link {
    int64_t id;
    std::vector<int64_t> node_ids;
    std::vector<LonLat> polyline;
  };
  std::vector<Node> nodes;
  std::vector<Link> edges;

  std::vector<LonLat> all_positions() const {
    std::vector<LonLat> out;
    for (const Node& n : nodes) out.push_back(n.position);
    for (const Link& e : edges) {
      out.insert(out.end(), e.polyline.begin(), e.polyline.end());
    }
    return out;
  }
};

inline RawGraph parse_graph_json(const Json& j, const std::string& name) {
  RawGraph g;
  try {
    if (!j.is_object() || !j.contains("nodes") || !j.contains("edges")) {
      throw InputError(name + ": expected an object with nodes and edges");
    }
    for (const Json& n : j.at("nodes")) {
      g.nodes.push_back({n.at("id").get<int64_t>(),
                         {n.at("lon").get<double>(), n.at("lat").get<double>()}});
    }
    for (const Json& e : j.at("edges")) {
      RawGraph::Link link;
      link.id = e.at("id").get<int64_t>();
      link.node_ids = e.at("node_ids").get<std::vector<int64_t>>();
      if (e.contains("polyline") && !e.at("polyline").is_null()) {
        for (const Json& v : e.at("polyline")) {
          link.polyline.push_back(internal::lonlat_from_json(
              v, name + ": edge " + std::to_string(link.id)));
        }
      }
      g.edges.push_back(std::move(link));
    }
  } catch (const Json::exception& e) {
    throw InputError(name + ": " + e.what());
  }
  return g;
}

inline RawGraph read_graph_json(const std::string& path) {
  return parse_graph_json(internal::read_json(path), path);
}

inline RoadGraph project_graph(const RawGraph& raw, const Projection& proj) {
  std::vector<RoadNode> nodes;
  nodes.reserve(raw.nodes.size());
  for (const auto& n : raw.nodes) {
    nodes.push_back({n.id, proj.project(n.position)});
  }
  std::vector<Edge> edges;
  edges.reserve(raw.edges.size());
  for (const auto& e : raw.edges) {
    std::vector<Point2> line;
    if (!e.polyline.empty()) {
      for (const LonLat& ll : e.polyline) line.push_back(proj.project(ll));
    } else {
      for (int64_t nid : e.node_ids) {
        const auto it = std::find_if(raw.nodes.begin(), raw.nodes.end(),
                                     [&](const auto& n) { return n.id == nid; });
        if (it == raw.nodes.end()) {
          throw InputError("edge " + std::to_string(e.id) +
                           " references unknown node " + std::to_string(nid));
        }
        line.push_back(proj.project(it->position));
      }
    }
    edges.push_back(Edge::make(e.id, e.node_ids, std::move(line)));
  }
  return RoadGraph(std::move(nodes), std::move(edges));
}

inline Json graph_to_json(const RoadGraph& g, const Projection& proj) {
  Json nodes = Json::array();
  for (const RoadNode& n : g.nodes()) {
    const LonLat ll = proj.unproject(n.position);
    nodes.push_back({{"id", n.id}, {"lon", ll.lon}, {"lat", ll.lat}});
  }
  Json edges = Json::array();
  for (const Edge& e : g.edges()) {
    Json line = Json::array();
    for (const Point2& p : e.polyline) {
      const LonLat ll = proj.unproject(p);
      line.push_back({ll.lon, ll.lat});
    }
    edges.push_back({{"id", e.id}, {"node_ids", e.node_ids}, {"polyline", line}});
  }
  return {{"nodes", nodes}, {"edges", edges}};
}

inline std::vector<std::vector<LonLat>> parse_oob_json(const Json& j,
                                                       const std::string& name) {
  if (!j.is_array()) throw InputError(name + ": expected an array of rings");
  std::vector<std::vector<LonLat>> rings;
  for (size_t r = 0; r < j.size(); ++r) {
    const std::string where = name + ": ring " + std::to_string(r);
    if (!j[r].is_array() || j[r].size() < 3) {
      throw InputError(where + ": needs at least 3 vertices");
    }
    std::vector<LonLat> ring;
    for (const Json& v : j[r]) ring.push_back(internal::lonlat_from_json(v, where));
    rings.push_back(std::move(ring));
  }
  return rings;
}

inline std::vector<std::vector<LonLat>> read_oob_json(const std::string& path) {
  return parse_oob_json(internal::read_json(path), path);
}

// Projects rings and orients them counterclockwise.
inline std::vector<Polygon> project_rings(
    const std::vector<std::vector<LonLat>>& rings, const Projection& proj) {
  std::vector<Polygon> out;
  for (const auto& ring : rings) {
    Polygon p;
    for (const LonLat& ll : ring) p.vertices.push_back(proj.project(ll));
    if (p.size() > 1 && p.vertices.front() == p.vertices.back()) {
      p.vertices.pop_back();
    }
    if (signed_area(p) < 0.0) std::reverse(p.vertices.begin(), p.vertices.end());
    out.push_back(std::move(p));
  }
  return out;
}

inline Json regions_to_json(const RegionSet& set, const Projection& proj) {
  Json arr = Json::array();
  for (const Region& r : set.regions) {
    Json ring = Json::array();
    for (const Point2& v : r.polygon.vertices) {
      const LonLat ll = proj.unproject(v);
      ring.push_back({ll.lon, ll.lat});
    }
    arr.push_back({{"id", r.id}, {"polygon", ring}, {"noisy_count", r.noisy_count}});
  }
  return arr;
}

inline Json report_to_json(const MetricReport& rep, bool include_runtime) {
  Json j;
  j["nce"] = rep.nce;
  j["medd"] = rep.medd ? Json(*rep.medd) : Json(nullptr);
  Json mae = Json::object();
  for (const auto& [r, v] : rep.range_mae) mae[format_number(r)] = v;
  j["range_mae"] = mae;
  Json hs = Json::object();
  for (const auto& [g, v] : rep.hotspot_sdc) hs[std::to_string(g)] = v;
  j["hotspot_sdc"] = hs;
  Json fl = Json::object();
  for (const auto& [k, v] : rep.flq_sdc) fl[k] = v;
  j["flq_sdc"] = fl;
  if (include_runtime) j["runtime_seconds"] = rep.runtime_seconds;
  return j;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write '" + path + "'");
  f << text;
}

}  // namespace locsynth

#endif  // LOCSYNTH_IO_HPP_
