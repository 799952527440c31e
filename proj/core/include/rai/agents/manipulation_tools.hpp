#pragma once

#include "rai/toolkit/tool.hpp"

namespace rai::agents {

// Tools for the tabletop arm, backed by the manip and scene/objects services:
//   describe_scene()                 one line per object
//   pick_object(object_id)
//   place_object_at(x, y)
//   place_object_on(object_id)
// Failed manipulations come back as ERROR "<CODE>: <message>".
toolkit::Tool describe_scene_tool();
toolkit::Tool pick_object_tool();
toolkit::Tool place_object_at_tool();
toolkit::Tool place_object_on_tool();

// The four tools above plus get_distance_to_objects and query_identity.
toolkit::ToolRegistry manipulation_registry();

}  // namespace rai::agents
