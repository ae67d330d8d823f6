#include "concord/instance.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace concord {

using ordered_json = nlohmann::ordered_json;

namespace {

void expect_keys(const ordered_json& obj, const std::string& where,
                 std::initializer_list<const char*> required,
                 std::initializer_list<const char*> optional = {}) {
    for (const char* k : required)
        if (!obj.contains(k)) throw ParseError(where + ": missing field '" + k + "'");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : required) known = known || it.key() == k;
        for (const char* k : optional) known = known || it.key() == k;
        if (!known) throw ParseError(where + ": unknown field '" + it.key() + "'");
    }
}

Mat parse_matrix(const ordered_json& rows, const std::string& where) {
    if (!rows.is_array() || rows.empty())
        throw ParseError(where + ": expected a nonempty array of rows");
    const Index nr = static_cast<Index>(rows.size());
    const Index nc = static_cast<Index>(rows[0].size());
    Mat m(nr, nc);
    for (Index i = 0; i < nr; ++i) {
        if (static_cast<Index>(rows[static_cast<size_t>(i)].size()) != nc)
            throw ParseError(where + ": ragged rows");
        for (Index j = 0; j < nc; ++j)
            m(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)].get<double>();
    }
    return m;
}

ordered_json matrix_rows(const Mat& m) {
    ordered_json rows = ordered_json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

ConePtr parse_cone(const ordered_json& spec, Index ambient, const std::string& where) {
    expect_keys(spec, where, {"kind"}, {"k", "phi", "n", "parts"});
    std::string kind = spec.at("kind").get<std::string>();
    if (kind == "orthant") {
        Index n = spec.contains("n") ? spec.at("n").get<Index>() : ambient;
        return Cone::orthant(n);
    }
    if (kind == "soc") {
        Index n = spec.contains("n") ? spec.at("n").get<Index>() : ambient;
        return Cone::second_order(n);
    }
    if (kind == "psd") {
        if (!spec.contains("k")) throw ParseError(where + ": psd needs field 'k'");
        return Cone::psd(spec.at("k").get<Index>());
    }
    if (kind == "polyhedral2d") {
        if (!spec.contains("phi")) throw ParseError(where + ": polyhedral2d needs field 'phi'");
        return Cone::rotated2d(spec.at("phi").get<double>());
    }
    if (kind == "product") {
        if (!spec.contains("parts")) throw ParseError(where + ": product needs field 'parts'");
        std::vector<ConePtr> parts;
        for (size_t i = 0; i < spec.at("parts").size(); ++i)
            parts.push_back(parse_cone(spec.at("parts")[i], 0, where + ".parts"));
        return Cone::product(std::move(parts));
    }
    throw ParseError(where + ": unknown cone kind '" + kind + "'");
}

ordered_json cone_json(const ConePtr& k) {
    ordered_json out;
    switch (k->kind()) {
        case Cone::Kind::Orthant:
            out["kind"] = "orthant";
            break;
        case Cone::Kind::SecondOrder:
            out["kind"] = "soc";
            break;
        case Cone::Kind::Psd:
            out["kind"] = "psd";
            out["k"] = k->psd_side();
            break;
        case Cone::Kind::Rotated2D:
            out["kind"] = "polyhedral2d";
            out["phi"] = k->phi();
            break;
        case Cone::Kind::Product: {
            out["kind"] = "product";
            ordered_json parts = ordered_json::array();
            for (const auto& p : k->parts()) {
                ordered_json pj = cone_json(p);
                if (p->kind() == Cone::Kind::Orthant || p->kind() == Cone::Kind::SecondOrder)
                    pj["n"] = p->ambient_dim();
                parts.push_back(pj);
            }
            out["parts"] = parts;
            break;
        }
    }
    return out;
}

}  // namespace

NormSpec norm_from_tag(const std::string& tag, const ConePtr& cone) {
    if (tag == "l1") return NormSpec::l1();
    if (tag == "l2") return NormSpec::l2();
    if (tag == "linf") return NormSpec::linf();
    if (tag == "induced_e") return NormSpec::induced_e(cone);
    if (tag == "induced_e_dual") return NormSpec::induced_e_dual(cone);
    throw ParseError("norms: unknown tag '" + tag + "'");
}

std::string tag_from_norm(const NormSpec& spec) {
    switch (spec.kind) {
        case NormSpec::Kind::L1: return "l1";
        case NormSpec::Kind::L2: return "l2";
        case NormSpec::Kind::LInf: return "linf";
        case NormSpec::Kind::InducedE: return "induced_e";
        case NormSpec::Kind::InducedEDual: return "induced_e_dual";
    }
    return "?";
}

InstanceFile parse_instance(const std::string& json_text) {
    ordered_json j;
    try {
        j = ordered_json::parse(json_text);
    } catch (const std::exception& e) {
        throw ParseError(std::string("instance: invalid JSON: ") + e.what());
    }
    expect_keys(j, "instance", {"version", "n", "cone", "subspace", "norms"}, {"map"});

    InstanceFile inst;
    inst.version = j.at("version").get<int>();
    if (inst.version != 1) throw ParseError("version: only version 1 is supported");
    inst.n = j.at("n").get<Index>();
    if (inst.n < 2) throw ParseError("n: ambient dimension must be at least 2");
    inst.cone = parse_cone(j.at("cone"), inst.n, "cone");
    if (inst.cone->ambient_dim() != inst.n)
        throw ParseError("cone: ambient dimension disagrees with 'n'");

    const ordered_json& sub = j.at("subspace");
    expect_keys(sub, "subspace", {}, {"basis", "image_of", "kernel_of"});
    if (sub.size() != 1) throw ParseError("subspace: exactly one of basis/image_of/kernel_of");
    if (sub.contains("basis")) {
        inst.subspace_kind = "basis";
        inst.subspace_raw = parse_matrix(sub.at("basis"), "subspace.basis");
        if (inst.subspace_raw.cols() != inst.n)
            throw ParseError("subspace.basis: vectors must have length n");
        inst.subspace = orthonormal_basis(Mat(inst.subspace_raw.transpose()));
    } else if (sub.contains("image_of")) {
        inst.subspace_kind = "image_of";
        inst.subspace_raw = parse_matrix(sub.at("image_of"), "subspace.image_of");
        if (inst.subspace_raw.rows() != inst.n)
            throw ParseError("subspace.image_of: matrix must have n rows");
        inst.subspace = orthonormal_basis(inst.subspace_raw);
    } else if (sub.contains("kernel_of")) {
        inst.subspace_kind = "kernel_of";
        inst.subspace_raw = parse_matrix(sub.at("kernel_of"), "subspace.kernel_of");
        if (inst.subspace_raw.cols() != inst.n)
            throw ParseError("subspace.kernel_of: matrix must have n columns");
        Mat ker = kernel_basis(inst.subspace_raw);
        if (ker.cols() == 0) throw ParseError("subspace.kernel_of: trivial kernel");
        inst.subspace = Subspace(ker);
    } else {
        throw ParseError("subspace: one of basis/image_of/kernel_of required");
    }

    const ordered_json& norms = j.at("norms");
    expect_keys(norms, "norms", {"primal", "tri"});
    inst.norms.primal = norm_from_tag(norms.at("primal").get<std::string>(), inst.cone);
    inst.norms.tri = norm_from_tag(norms.at("tri").get<std::string>(), inst.cone);

    if (j.contains("map")) {
        const ordered_json& mp = j.at("map");
        expect_keys(mp, "map", {"matrix"}, {"domain_norm"});
        Mat a = parse_matrix(mp.at("matrix"), "map.matrix");
        if (a.rows() != inst.n) throw ParseError("map.matrix: must have n rows");
        std::string dn = mp.contains("domain_norm") ? mp.at("domain_norm").get<std::string>() : "l2";
        inst.map = LinearMap{a, norm_from_tag(dn, nullptr), inst.norms};
    }
    return inst;
}

InstanceFile load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open instance file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_instance(ss.str());
}

std::string serialize_instance(const InstanceFile& inst) {
    ordered_json j;
    j["version"] = inst.version;
    j["n"] = inst.n;
    j["cone"] = cone_json(inst.cone);
    ordered_json sub;
    sub[inst.subspace_kind] = matrix_rows(inst.subspace_raw);
    j["subspace"] = sub;
    j["norms"]["primal"] = tag_from_norm(inst.norms.primal);
    j["norms"]["tri"] = tag_from_norm(inst.norms.tri);
    if (inst.map) {
        j["map"]["matrix"] = matrix_rows(inst.map->matrix);
        j["map"]["domain_norm"] = tag_from_norm(inst.map->domain_norm);
    }
    return j.dump(2) + "\n";
}

InstanceFile generate_instance(Index n, Index m, const std::string& cone_tag, uint64_t seed,
                               const std::string& primal_tag, const std::string& tri_tag,
                               bool with_map) {
    InstanceFile inst;
    inst.n = n;
    if (cone_tag == "orthant") inst.cone = Cone::orthant(n);
    else if (cone_tag == "soc") inst.cone = Cone::second_order(n);
    else if (cone_tag == "psd") {
        Index k = 1;
        while (k * (k + 1) / 2 < n) ++k;
        if (k * (k + 1) / 2 != n) throw ParseError("gen: n is not a triangular number for psd");
        inst.cone = Cone::psd(k);
    } else if (cone_tag == "polyhedral2d") {
        inst.cone = Cone::rotated2d(M_PI / 6);
    } else {
        throw ParseError("gen: unknown cone tag '" + cone_tag + "'");
    }

    std::mt19937_64 rng(seed);
    Subspace s = random_subspace(n, m, rng);
    inst.subspace = s;
    inst.subspace_kind = "basis";
    inst.subspace_raw = s.basis().transpose();
    inst.norms.primal = norm_from_tag(primal_tag, inst.cone);
    inst.norms.tri = norm_from_tag(tri_tag, inst.cone);
    if (with_map) {
        std::normal_distribution<double> g(0.0, 1.0);
        Mat a(n, m);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < m; ++j) a(i, j) = g(rng);
        inst.map = LinearMap{a, NormSpec::l2(), inst.norms};
    }
    return inst;
}

std::string digest_hex(const std::string& bytes) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace concord
