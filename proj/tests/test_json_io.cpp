#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cforge/json_io.hpp"

using namespace cforge;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const PipelineResult& pipe43() {
    static PipelineResult pr = full_pipeline(4, 3);
    return pr;
}

}  // namespace

TEST_CASE("field, group, module, and cocycle artifacts round-trip") {
    const PipelineResult& pr = pipe43();
    const GroupTable& L = pr.psl->group;

    Field f = make_field(2, 2);
    Field f2 = field_from_json(field_to_json(f));
    CHECK(f2->order() == 4);
    CHECK(f2->modulus() == f->modulus());

    Json gj = group_to_json(L, 4, 3);
    GroupTable L2 = group_from_json(gj);
    REQUIRE(L2.size() == L.size());
    for (uint32_t i = 0; i < L.size(); ++i) CHECK(L2.perm(i).img == L.perm(i).img);

    // a table whose element order is not the canonical enumeration is refused
    Json tampered = gj;
    std::swap(tampered["elements"][5], tampered["elements"][6]);
    CHECK_THROWS_AS(group_from_json(tampered), error);

    Json mj = module_to_json(pr.dec->V);
    ModuleRep V2 = module_from_json(L, mj);
    REQUIRE(V2.dim() == pr.dec->V.dim());
    for (uint32_t g = 0; g < L.size(); g += 13) CHECK(V2.action(g) == pr.dec->V.action(g));

    Json cj = cocycle_to_json(*pr.tau_v, 4);
    // entries are sorted by (g, h) with zero values omitted
    int64_t prev = -1;
    for (const auto& e : cj["entries"]) {
        int64_t key = e[0].get<int64_t>() * L.size() + e[1].get<int64_t>();
        CHECK(key > prev);
        prev = key;
        bool nonzero = false;
        for (const auto& v : e[2]) nonzero = nonzero || v.get<int>() != 0;
        CHECK(nonzero);
    }
    Cocycle2 tau2 = cocycle_from_json(cj, L.size());
    CHECK(tau2 == *pr.tau_v);
}

TEST_CASE("automorphism records round-trip") {
    const PipelineResult& pr = pipe43();
    const ExtGroup& E = pr.E;
    uint32_t n = E.base().size(), d = E.dim();

    H1Report r1 = h1(pr.dec->V);
    AutRecord shift = z1_shift(E, r1.z1_basis[0]);
    AutRecord shift2 = aut_record_from_json(aut_record_to_json(shift), E.p(), n, d);
    CHECK(shift2.kind == AutRecord::Kind::shift);
    CHECK(shift2.delta.v == shift.delta.v);

    auto pairs = pgl_frobenius_pairs(*pr.psl, *pr.dec);
    LiftResult lr = scalar_adjusted_lift(E, pairs[0].nu, pairs[0].mu);
    AutRecord lift2 = aut_record_from_json(aut_record_to_json(lr.record), E.p(), n, d);
    CHECK(lift2.nu == lr.record.nu);
    CHECK(lift2.mu == lr.record.mu);
    CHECK(lift2.phi.v == lr.record.phi.v);

    AutRecord comp = compose_records(shift, lr.record);
    AutRecord comp2 = aut_record_from_json(aut_record_to_json(comp), E.p(), n, d);
    REQUIRE(comp2.parts.size() == 2);
    SplitMix64 rng{11};
    for (int t = 0; t < 300; ++t) {
        ExtElement x = E.element_at(rng.below(E.size()));
        CHECK(apply_aut(E, comp2, x) == apply_aut(E, comp, x));
    }

    ScalarIso iso = scalar_isomorphism(E, 2);
    AutRecord sc = aut_record_from_json(aut_record_to_json(iso.record), E.p(), n, d);
    CHECK(sc.kind == AutRecord::Kind::scalar);
    CHECK(sc.scalar == 2);
}

TEST_CASE("extension bundles are deterministic and reload to the same group") {
    const PipelineResult& pr = pipe43();
    namespace fs = std::filesystem;
    fs::path dir = fs::path("json_roundtrip_tmp");
    fs::create_directories(dir);

    std::string out1 = (dir / "ext_a.json").string();
    std::string out2 = (dir / "ext_b.json").string();
    write_extension_bundle(out1, pr);
    BundlePaths p1 = bundle_paths(out1), p2 = bundle_paths(out2);
    std::string head1 = slurp(p1.head), group1 = slurp(p1.group), module1 = slurp(p1.module),
                tau1 = slurp(p1.tau);

    // a second run with the same output path is byte-identical
    write_extension_bundle(out1, pr);
    CHECK(slurp(p1.head) == head1);
    CHECK(slurp(p1.group) == group1);
    CHECK(slurp(p1.module) == module1);
    CHECK(slurp(p1.tau) == tau1);

    // payload files do not depend on the chosen output name at all
    write_extension_bundle(out2, pr);
    CHECK(slurp(p2.group) == group1);
    CHECK(slurp(p2.module) == module1);
    CHECK(slurp(p2.tau) == tau1);

    LoadedExtension le = load_extension_bundle(out1);
    CHECK(le.q == 4);
    CHECK(le.p == 3);
    CHECK(le.E.size() == 4860);
    CHECK(*le.tau == *pr.tau_v);

    // law agreement between the loaded and in-memory extensions
    SplitMix64 rng{5};
    for (int t = 0; t < 500; ++t) {
        ExtElement a = pr.E.element_at(rng.below(pr.E.size()));
        ExtElement b = pr.E.element_at(rng.below(pr.E.size()));
        CHECK(le.E.mul(a, b) == pr.E.mul(a, b));
    }

    // tampering with the recorded order is caught on load
    Json head = read_json_file(out1);
    head["order"] = 4861;
    write_json_file(out1, head);
    CHECK_THROWS_AS(load_extension_bundle(out1), error);
}
