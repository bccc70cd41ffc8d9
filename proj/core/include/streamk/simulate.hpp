#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "streamk/costmodel.hpp"
#include "streamk/types.hpp"

namespace streamk {

enum class EventKind { Mac, FixupWait, FixupReduce };

const char* event_kind_name(EventKind kind);

struct TimelineEvent {
  index_t core_id = 0;
  index_t cta_id = 0;
  EventKind kind = EventKind::Mac;
  double start = 0.0;
  double end = 0.0;
  index_t tile_idx = 0;  // first tile touched; drives Gantt coloring
};

/// Idealized schedule of an assignment on an abstract p-core machine.
struct Timeline {
  index_t p = 1;
  std::vector<TimelineEvent> events;
  double makespan = 0.0;
};

/// Greedy list scheduling: CTAs dispatched in cta_id order, each to the
/// earliest-free core. Without params, durations are unit cost (one time unit
/// per MAC iteration) and fixup waits are zero-duration. With params, a CTA's
/// mac event costs a + c*len (+ b when it emits a partial) and tile owners
/// append a fixup_reduce event of d per reduced peer.
Timeline simulate(const WorkAssignment& assignment, index_t p,
                  const std::optional<CostParams>& params = std::nullopt);

/// Sum of mac event durations / (p * makespan).
double utilization(const Timeline& timeline);

/// Distinct starting k-offsets (local iteration) among nonempty CTAs:
/// the tile-processing skew surfaced as a metric.
index_t tile_processing_skew(const WorkAssignment& assignment);

/// Deterministic SVG Gantt chart: one row per core, one rectangle per event,
/// color-keyed by tile index, fixup events hatched. Byte-identical output for
/// identical inputs.
void render_gantt(const Timeline& timeline, std::ostream& out);
void render_gantt_file(const Timeline& timeline, const std::string& path);

/// CSV dump: core_id, cta_id, kind, start, end.
void write_timeline_csv(const Timeline& timeline, std::ostream& out);

}  // namespace streamk
