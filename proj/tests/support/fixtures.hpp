#pragma once

// Small fixed datasets for rendering and API tests.

#include <string>

#include "hetviz/ingest.hpp"
#include "hetviz/viewlayout.hpp"

namespace hetviz::testing {

/// Teaching-assistant style table: four nominal attributes and a rating.
inline const char* kTaCsv =
    "native,course,semester,size,rating\n"
    "yes,c23,summer,large,3\n"
    "no,c15,summer,small,3\n"
    "yes,c23,regular,large,3\n"
    "no,c5,regular,small,1\n"
    "no,c7,regular,medium,1\n"
    "no,c23,regular,medium,2\n"
    "no,c9,regular,large,2\n"
    "yes,c23,summer,small,3\n"
    "no,c15,regular,medium,1\n"
    "no,c5,regular,large,2\n"
    "no,c5,regular,large,2\n"
    "yes,c9,regular,?,3\n"
    "no,c7,summer,small,1\n"
    "no,c15,regular,medium,2\n";

inline Dataset ta_dataset() {
  return apply_scheme(parse_csv(kTaCsv), {{}, std::string("rating"), ScaleKind::Nominal});
}

/// Reference layouts of the TA table against "rating" with neighbour edges.
struct TaView {
  Dataset ds;
  ViewConfig config;
  std::vector<AxisLayout> layouts;
  std::vector<EdgeBundle> edges;
};

inline TaView ta_view(bool join) {
  TaView v{ta_dataset(), {}, {}, {}};
  v.config.reference = "rating";
  const auto ref = v.ds.index_of("rating");
  for (std::size_t c = 0; c < v.ds.num_attributes(); ++c) {
    if (c == ref) continue;
    auto l = reference_layout(v.ds, c, ref);
    v.layouts.push_back(join ? join_nondominant(l) : l);
  }
  for (std::size_t i = 0; i + 1 < v.layouts.size(); ++i)
    v.edges.push_back(edge_weights(v.ds, v.layouts[i], v.layouts[i + 1]));
  return v;
}

} // namespace hetviz::testing
