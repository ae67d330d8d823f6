#pragma once

#include <optional>
#include <string>

#include "concord/cones.hpp"
#include "concord/linalg.hpp"
#include "concord/measures.hpp"
#include "concord/renegar.hpp"
#include "concord/types.hpp"

namespace concord {

// On-disk problem description. Parsing is strict: unknown fields and
// inconsistent dimensions are rejected with the offending field named.
struct InstanceFile {
    int version = 1;
    Index n = 0;
    ConePtr cone;
    std::string subspace_kind;  // "basis" | "image_of" | "kernel_of"
    Mat subspace_raw;           // as written in the file (row-major blocks)
    Subspace subspace{Mat::Identity(2, 1)};
    NormPair norms = NormPair::l2_l2();
    std::optional<LinearMap> map;
};

InstanceFile parse_instance(const std::string& json_text);
InstanceFile load_instance(const std::string& path);

// Canonical serialization; gen -> parse -> serialize is idempotent.
std::string serialize_instance(const InstanceFile& inst);

// Deterministic random instance (orthant | soc | psd | polyhedral2d).
InstanceFile generate_instance(Index n, Index m, const std::string& cone_tag, uint64_t seed,
                               const std::string& primal_tag = "l2",
                               const std::string& tri_tag = "l2", bool with_map = false);

// FNV-1a 64-bit digest, hex encoded.
std::string digest_hex(const std::string& bytes);

NormSpec norm_from_tag(const std::string& tag, const ConePtr& cone);
std::string tag_from_norm(const NormSpec& spec);

}  // namespace concord
