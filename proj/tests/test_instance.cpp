#include <doctest.h>

#include "concord/instance.hpp"

using namespace concord;

namespace {

const char* kSample = R"({
  "version": 1,
  "n": 3,
  "cone": {"kind": "orthant"},
  "subspace": {"basis": [[1.0, 1.0, 0.0]]},
  "norms": {"primal": "l1", "tri": "linf"}
})";

}  // namespace

TEST_CASE("parsing resolves the subspace and norms") {
    InstanceFile inst = parse_instance(kSample);
    CHECK(inst.n == 3);
    CHECK(inst.cone->kind() == Cone::Kind::Orthant);
    CHECK(inst.subspace.dim() == 1);
    CHECK(inst.subspace.contains((Vec(3) << 1, 1, 0).finished()));
    CHECK(inst.norms.primal.kind == NormSpec::Kind::L1);
    CHECK(inst.norms.tri.kind == NormSpec::Kind::LInf);
    CHECK_FALSE(inst.map.has_value());
}

TEST_CASE("unknown fields are rejected with the offending name") {
    std::string bad = kSample;
    bad.insert(bad.rfind('}') - 1, ",\n  \"extra\": 1\n");
    try {
        parse_instance(bad);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("extra") != std::string::npos);
    }
}

TEST_CASE("dimension inconsistencies name the field") {
    std::string bad = R"({
      "version": 1,
      "n": 3,
      "cone": {"kind": "orthant"},
      "subspace": {"basis": [[1.0, 1.0]]},
      "norms": {"primal": "l1", "tri": "linf"}
    })";
    try {
        parse_instance(bad);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("subspace.basis") != std::string::npos);
    }
}

TEST_CASE("kernel_of and image_of resolve to the same line") {
    std::string img = R"({
      "version": 1, "n": 2,
      "cone": {"kind": "orthant"},
      "subspace": {"image_of": [[2.0], [1.0]]},
      "norms": {"primal": "l2", "tri": "l2"}
    })";
    std::string ker = R"({
      "version": 1, "n": 2,
      "cone": {"kind": "orthant"},
      "subspace": {"kernel_of": [[1.0, -2.0]]},
      "norms": {"primal": "l2", "tri": "l2"}
    })";
    InstanceFile a = parse_instance(img), b = parse_instance(ker);
    CHECK(a.subspace.equals(b.subspace, 1e-9));
}

TEST_CASE("cone variants parse and reject malformed specs") {
    std::string psd = R"({
      "version": 1, "n": 3,
      "cone": {"kind": "psd", "k": 2},
      "subspace": {"basis": [[1.0, 0.0, 1.0]]},
      "norms": {"primal": "l2", "tri": "induced_e"}
    })";
    InstanceFile inst = parse_instance(psd);
    CHECK(inst.cone->kind() == Cone::Kind::Psd);
    CHECK(inst.norms.tri.cone == inst.cone);

    std::string rot = R"({
      "version": 1, "n": 2,
      "cone": {"kind": "polyhedral2d", "phi": 0.5235987755982988},
      "subspace": {"basis": [[0.0, 1.0]]},
      "norms": {"primal": "l2", "tri": "l2"}
    })";
    CHECK(parse_instance(rot).cone->kind() == Cone::Kind::Rotated2D);

    std::string prod = R"({
      "version": 1, "n": 5,
      "cone": {"kind": "product", "parts": [{"kind": "orthant", "n": 2}, {"kind": "soc", "n": 3}]},
      "subspace": {"basis": [[1.0, 0.0, 1.0, 0.0, 0.0]]},
      "norms": {"primal": "l2", "tri": "l2"}
    })";
    CHECK(parse_instance(prod).cone->kind() == Cone::Kind::Product);

    CHECK_THROWS_AS(parse_instance(R"({"version": 1, "n": 2,
        "cone": {"kind": "psd"},
        "subspace": {"basis": [[1.0, 0.0]]},
        "norms": {"primal": "l2", "tri": "l2"}})"),
                    ParseError);
}

TEST_CASE("gen -> parse -> serialize is idempotent and seed-deterministic") {
    InstanceFile a = generate_instance(4, 2, "orthant", 7);
    std::string s1 = serialize_instance(a);
    InstanceFile b = parse_instance(s1);
    std::string s2 = serialize_instance(b);
    CHECK(s1 == s2);

    InstanceFile c = generate_instance(4, 2, "orthant", 7);
    CHECK(serialize_instance(c) == s1);  // byte-identical for equal seeds
    InstanceFile d = generate_instance(4, 2, "orthant", 8);
    CHECK(serialize_instance(d) != s1);
}

TEST_CASE("digest is stable and content-sensitive") {
    CHECK(digest_hex("abc") == digest_hex("abc"));
    CHECK(digest_hex("abc") != digest_hex("abd"));
    CHECK(digest_hex("abc").size() == 16);
}

TEST_CASE("map block round-trips") {
    InstanceFile a = generate_instance(3, 1, "orthant", 5, "l2", "l2", true);
    REQUIRE(a.map);
    std::string s = serialize_instance(a);
    InstanceFile b = parse_instance(s);
    REQUIRE(b.map);
    CHECK((a.map->matrix - b.map->matrix).cwiseAbs().maxCoeff() == 0.0);
    CHECK(serialize_instance(b) == s);
}
