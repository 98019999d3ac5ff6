#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "polyseq/metrics.hpp"
#include "polyseq/mesh.hpp"
#include "polyseq/planner.hpp"
#include "polyseq/reward.hpp"
#include "polyseq/tps.hpp"

namespace polyseq {

using Json = nlohmann::ordered_json;

/// {vertices: [[x, y], ...], faces: [[i, j, k, ...], ...]}; edges are derived
/// on load. Doubles are written in shortest round-trip form, so a reload is
/// bit-exact.
Json mesh_to_json(const Mesh2D& mesh);
Mesh2D mesh_from_json(const Json& j);

/// {kind, target, params}; params holds {t} for splits, {offset: [x, y]} for
/// extrusions and is empty otherwise.
Json topo_to_json(const TopoAction& a);
TopoAction topo_from_json(const Json& j);

Json geom_to_json(const GeomAction& g);
GeomAction geom_from_json(const Json& j);

Json reward_to_json(const RewardBreakdown& r);
RewardBreakdown reward_from_json(const Json& j);

Json metrics_to_json(const MetricsReport& m);

/// {affine: [[a00, a01, a02], [a10, a11, a12]], displacement: [[dx, dy], ...]}.
Json tps_to_json(const TpsParams& p);
TpsParams tps_from_json(const Json& j);

/// {initial, steps: [{topo, geom, reward}], final, config_echo, seed}.
Json sequence_to_json(const ConstructionSequence& seq, const Json& config_echo, std::uint64_t seed);
ConstructionSequence sequence_from_json(const Json& j);

/// Pretty-printed with a trailing newline. Throws std::runtime_error on I/O
/// failure.
void write_json(const Json& j, const std::filesystem::path& path);
Json read_json(const std::filesystem::path& path);

}  // namespace polyseq
