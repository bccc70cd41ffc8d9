#include "streamk/simulate.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <stdexcept>

#include "streamk/decompose.hpp"

namespace streamk {

const char* event_kind_name(EventKind kind) {
  switch (kind) {
    case EventKind::Mac: return "mac";
    case EventKind::FixupWait: return "fixup_wait";
    case EventKind::FixupReduce: return "fixup_reduce";
  }
  return "?";
}

Timeline simulate(const WorkAssignment& assignment, index_t p,
                  const std::optional<CostParams>& params) {
  if (p < 1) throw std::invalid_argument("simulate: p must be >= 1");
  Timeline timeline;
  timeline.p = p;

  const index_t ipt = assignment.grid.iters_per_tile;
  const auto peers = fixup_peers_of(assignment);
  // Partials each tile owner folds in.
  std::vector<index_t> reduce_count(assignment.ranges.size(), 0);
  for (const auto& tile_peers : peers) {
    if (tile_peers.size() > 1) {
      reduce_count[static_cast<std::size_t>(tile_peers.front())] +=
          static_cast<index_t>(tile_peers.size()) - 1;
    }
  }

  std::vector<double> free_at(static_cast<std::size_t>(p), 0.0);
  for (const CtaRange& r : assignment.ranges) {
    // Earliest-free core, lowest index on ties.
    std::size_t core = 0;
    for (std::size_t i = 1; i < free_at.size(); ++i) {
      if (free_at[i] < free_at[core]) core = i;
    }
    const double len = static_cast<double>(r.length());
    const bool emits_partial = !r.empty() && (r.iter_begin % ipt) != 0;
    double mac_dur = len;
    if (params && !r.empty()) {
      mac_dur = params->a + params->c * len + (emits_partial ? params->b : 0.0);
    }
    const double start = free_at[core];
    const index_t tile_idx = r.empty() ? 0 : r.iter_begin / ipt;
    timeline.events.push_back({static_cast<index_t>(core), r.cta_id, EventKind::Mac, start,
                               start + mac_dur, tile_idx});
    double cursor = start + mac_dur;
    const index_t reductions = reduce_count[static_cast<std::size_t>(r.cta_id)];
    if (params && reductions > 0) {
      const double dur = params->d * static_cast<double>(reductions);
      timeline.events.push_back({static_cast<index_t>(core), r.cta_id,
                                 EventKind::FixupReduce, cursor, cursor + dur, tile_idx});
      cursor += dur;
    }
    free_at[core] = cursor;
    timeline.makespan = std::max(timeline.makespan, cursor);
  }
  return timeline;
}

double utilization(const Timeline& timeline) {
  if (timeline.events.empty() || timeline.makespan <= 0.0) {
    throw std::invalid_argument("utilization: empty timeline");
  }
  double mac_total = 0.0;
  for (const auto& e : timeline.events) {
    if (e.kind == EventKind::Mac) mac_total += e.end - e.start;
  }
  return mac_total / (static_cast<double>(timeline.p) * timeline.makespan);
}

index_t tile_processing_skew(const WorkAssignment& assignment) {
  std::set<index_t> offsets;
  for (const CtaRange& r : assignment.ranges) {
    if (!r.empty()) offsets.insert(r.iter_begin % assignment.grid.iters_per_tile);
  }
  return static_cast<index_t>(offsets.size());
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

constexpr const char* kPalette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2",
                                    "#59a14f", "#edc948", "#b07aa1", "#ff9da7",
                                    "#9c755f", "#bab0ac"};
constexpr int kPaletteSize = 10;

}  // namespace

void render_gantt(const Timeline& timeline, std::ostream& out) {
  const double chart_w = 720.0;
  const double row_h = 26.0;
  const double gap = 6.0;
  const double left = 64.0;
  const double top = 16.0;
  const double height = top + static_cast<double>(timeline.p) * (row_h + gap) + 32.0;
  const double width = left + chart_w + 16.0;
  const double scale = timeline.makespan > 0.0 ? chart_w / timeline.makespan : 1.0;

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << fmt(width)
      << "\" height=\"" << fmt(height) << "\">\n";
  out << "  <defs>\n"
      << "    <pattern id=\"hatch\" width=\"6\" height=\"6\" patternTransform=\"rotate(45)\""
      << " patternUnits=\"userSpaceOnUse\">\n"
      << "      <line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"#444444\" stroke-width=\"2\"/>\n"
      << "    </pattern>\n"
      << "  </defs>\n";
  for (index_t core = 0; core < timeline.p; ++core) {
    const double y = top + static_cast<double>(core) * (row_h + gap);
    out << "  <text x=\"4\" y=\"" << fmt(y + row_h * 0.7)
        << "\" font-family=\"monospace\" font-size=\"12\">core " << core << "</text>\n";
    out << "  <rect x=\"" << fmt(left) << "\" y=\"" << fmt(y) << "\" width=\"" << fmt(chart_w)
        << "\" height=\"" << fmt(row_h) << "\" fill=\"#f2f2f2\"/>\n";
  }
  for (const auto& e : timeline.events) {
    if (e.end <= e.start) continue;
    const double y = top + static_cast<double>(e.core_id) * (row_h + gap);
    const double x = left + e.start * scale;
    const double w = (e.end - e.start) * scale;
    const char* color = kPalette[e.tile_idx % kPaletteSize];
    out << "  <rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\"" << fmt(w)
        << "\" height=\"" << fmt(row_h) << "\" fill=\"" << color
        << "\" stroke=\"#333333\" stroke-width=\"0.5\"/>\n";
    if (e.kind != EventKind::Mac) {
      out << "  <rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\"" << fmt(w)
          << "\" height=\"" << fmt(row_h) << "\" fill=\"url(#hatch)\"/>\n";
    }
  }
  const double axis_y = top + static_cast<double>(timeline.p) * (row_h + gap) + 8.0;
  out << "  <line x1=\"" << fmt(left) << "\" y1=\"" << fmt(axis_y) << "\" x2=\""
      << fmt(left + chart_w) << "\" y2=\"" << fmt(axis_y)
      << "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
  out << "  <text x=\"" << fmt(left) << "\" y=\"" << fmt(axis_y + 14.0)
      << "\" font-family=\"monospace\" font-size=\"12\">0</text>\n";
  out << "  <text x=\"" << fmt(left + chart_w - 40.0) << "\" y=\"" << fmt(axis_y + 14.0)
      << "\" font-family=\"monospace\" font-size=\"12\">" << fmt(timeline.makespan)
      << "</text>\n";
  out << "</svg>\n";
}

void render_gantt_file(const Timeline& timeline, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write SVG file: " + path);
  render_gantt(timeline, out);
}

void write_timeline_csv(const Timeline& timeline, std::ostream& out) {
  out << "core_id,cta_id,kind,start,end\n";
  for (const auto& e : timeline.events) {
    out << e.core_id << ',' << e.cta_id << ',' << event_kind_name(e.kind) << ','
        << fmt(e.start) << ',' << fmt(e.end) << '\n';
  }
}

}  // namespace streamk
