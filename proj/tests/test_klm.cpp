#include <gtest/gtest.h>

#include <cmath>

#include "support/test_support.hpp"

using namespace ixcomplex;

namespace {

Expression E(const char* text) { return parse_expr(text); }

KlmExpression klm(std::initializer_list<std::pair<KlmOperator, const char*>> entries) {
    KlmExpression k;
    for (const auto& [op, text] : entries) k.add(op, E(text));
    return k;
}

Binding v1_klm_binding(std::int64_t a = 5) { return {{"m", 6}, {"r", 4}, {"t", 7}, {"d", 6}, {"s", 5}, {"a", a}}; }
Binding v2_klm_binding() { return {{"m", 6}, {"r", 4}, {"t", 7}, {"d", 6}, {"s", 5}, {"o", 5}}; }

}  // namespace

TEST(KlmModel, Defaults) {
    const KlmModel m;
    EXPECT_DOUBLE_EQ(m.unit_time(KlmOperator::M), 1.5);
    EXPECT_DOUBLE_EQ(m.unit_time(KlmOperator::K), 0.23);
    EXPECT_DOUBLE_EQ(m.unit_time(KlmOperator::R), 1.2);
    EXPECT_NEAR(m.point_click(), 1.73, 1e-12);
    EXPECT_NEAR(m.glance(), 0.4, 1e-12);
}

TEST(KlmModel, CompositesFollowPrimitives) {
    KlmModel::Primitives p;
    p.m = 2.0;
    p.p = 0.2;
    const KlmModel m(p);
    EXPECT_NEAR(m.point_click(), 2.23, 1e-12);
    EXPECT_NEAR(m.glance(), 0.5, 1e-12);
    p.k = 0;
    EXPECT_THROW(KlmModel{p}, ValidationError);
}

TEST(KlmModel, FromJson) {
    const KlmModel m = KlmModel::from_json(nlohmann::json{{"M", 1.0}, {"C_click", 0.5}});
    EXPECT_NEAR(m.point_click(), 1.5, 1e-12);
    EXPECT_NEAR(m.glance(), 0.4, 1e-12);
    EXPECT_THROW(KlmModel::from_json(nlohmann::json{{"Q", 1.0}}), ValidationError);
    EXPECT_THROW(KlmModel::from_json(nlohmann::json{{"M", "slow"}}), ValidationError);
    EXPECT_THROW(KlmModel::from_json(nlohmann::json{{"M", -1}}), ValidationError);
    EXPECT_THROW(KlmModel::from_json(nlohmann::json::array()), ValidationError);
}

TEST(ActionMapping, DefaultAndJson) {
    const ActionMapping d = default_action_mapping();
    EXPECT_EQ(d.at(ActionKind::think), std::vector<KlmOperator>{KlmOperator::Glance});
    EXPECT_EQ(d.at(ActionKind::enter), std::vector<KlmOperator>{KlmOperator::PointClick});
    EXPECT_EQ(d.at(ActionKind::click), std::vector<KlmOperator>{KlmOperator::PointClick});
    EXPECT_FALSE(d.count(ActionKind::scroll));
    EXPECT_FALSE(d.count(ActionKind::external));

    const nlohmann::json j = nlohmann::json::parse(ixtest::read_text(ixtest::concept_path("default_mapping.json")));
    EXPECT_EQ(mapping_from_json(j), d);

    const ActionMapping custom =
        mapping_from_json(nlohmann::json{{"Scroll", {"M", "K", "K"}}, {"Click", {"P", "C_click"}}});
    EXPECT_EQ(custom.at(ActionKind::scroll), (std::vector<KlmOperator>{KlmOperator::M, KlmOperator::K, KlmOperator::K}));
    EXPECT_THROW(mapping_from_json(nlohmann::json{{"Hover", {"M"}}}), Error);
    EXPECT_THROW(mapping_from_json(nlohmann::json{{"Click", {"C"}}}), Error);
}

TEST(KlmFromConcept, V1StepOne) {
    const InteractionConcept c = ixtest::load_v1();
    EXPECT_EQ(klm_from_step(c.steps[0], default_action_mapping()),
              klm({{KlmOperator::Glance, "m"}, {KlmOperator::PointClick, "2"}}));
}

// Per-step formulas listed alongside the published KLM derivation of V1.
TEST(KlmFromConcept, DefaultMappingMatchesPublishedSteps) {
    const InteractionConcept c = ixtest::load_v1();
    const char* published[] = {
        "m*Q + T + T",         "a*(r*Q + T + T)", "a*(t*Q + T + T)", "a*(d*Q + T + T)", "a*(s*Q + T + T)",
        "a*Q",                 "(a - 1)*(Q + T)", "T + T",           "Q + T",
    };
    for (std::size_t i = 0; i < 9; ++i) {
        const KlmExpression derived = klm_from_step(c.steps[i], default_action_mapping());
        if (i == 6) {
            EXPECT_NE(derived, klm_parse(published[i])) << "step 7";
            EXPECT_EQ(derived, klm({{KlmOperator::PointClick, "3*a - 3"}}));
        } else {
            EXPECT_EQ(derived, klm_parse(published[i])) << "step " << i + 1;
        }
    }
}

TEST(KlmFromConcept, Errors) {
    const InteractionConcept c = parse_concept("concept \"x\"\nvar n\nstep \"list\" { T: 1; S: n }\n");
    try {
        klm_from_concept(c, default_action_mapping());
        FAIL();
    } catch (const UnmappedActionError& e) {
        EXPECT_EQ(e.kind(), ActionKind::scroll);
        EXPECT_NE(std::string(e.what()).find("list"), std::string::npos);
    }
    InteractionConcept empty;
    EXPECT_TRUE(klm_from_concept(empty, default_action_mapping()).is_empty());
}

TEST(KlmParse, PublishedForms) {
    EXPECT_EQ(klm_parse(ixtest::v1_published_klm),
              klm({{KlmOperator::Glance, "m + a*(r + t + d + s + 2)"}, {KlmOperator::PointClick, "8*a + 4"}}));
    EXPECT_EQ(klm_parse(ixtest::v2_published_klm),
              klm({{KlmOperator::Glance, "m + r + t + d + s + o + 2"}, {KlmOperator::PointClick, "9"}}));
    EXPECT_TRUE(klm_parse("0*Q").is_empty());
    EXPECT_EQ(klm_parse("Q*m + M*2 - M"), klm({{KlmOperator::Glance, "m"}, {KlmOperator::M, "1"}}));
}

TEST(KlmParse, Errors) {
    EXPECT_THROW(klm_parse("m + Q"), SyntaxError);
    EXPECT_THROW(klm_parse("Q*T"), SyntaxError);
    EXPECT_THROW(klm_parse("3*C"), SyntaxError);
    EXPECT_THROW(klm_parse("3*Hover"), SyntaxError);
    EXPECT_THROW(klm_parse("(Q + "), SyntaxError);
    EXPECT_THROW(klm_parse(""), SyntaxError);
}

TEST(KlmTime, PublishedInstantiations) {
    const KlmModel m;
    EXPECT_NEAR(klm_time(klm_parse(ixtest::v1_published_klm), m, v1_klm_binding()), 126.52, 1e-9);
    EXPECT_NEAR(klm_time(klm_parse(ixtest::v2_published_klm), m, v2_klm_binding()), 29.57, 1e-9);
    EXPECT_EQ(klm_time(KlmExpression{}, m, Binding{}), 0.0);
    EXPECT_THROW(klm_time(klm_parse("q*Q"), m, Binding{}), UnboundVariableError);
    EXPECT_THROW(klm_time(klm_parse("(a - 2)*Q"), m, Binding{{"a", 1}}), NegativeCountError);
}

// Table of KLM execution times and speeds for one to five attempts in V1
// and for V2; IS counts are the published normalized function values.
TEST(KlmTime, PublishedSpeedTable) {
    const KlmModel m;
    const KlmExpression v1 = klm_parse(ixtest::v1_published_klm);
    const Expression is = E(ixtest::v1_published_is);
    struct Row {
        std::int64_t a, is;
        const char* seconds;
        const char* speed;
    };
    const Row rows[] = {{1, 43, "32.76", "1.31"},
                        {2, 75, "56.20", "1.33"},
                        {3, 107, "79.64", "1.34"},
                        {4, 139, "103.08", "1.35"},
                        {5, 171, "126.52", "1.35"}};
    for (const auto& r : rows) {
        Binding b = ixtest::v1_binding();
        b.set("a", r.a);
        EXPECT_EQ(eval(is, b), r.is);
        const double t = klm_time(v1, m, v1_klm_binding(r.a));
        EXPECT_EQ(fixed2(t), r.seconds);
        EXPECT_EQ(fixed2(klm_speed(r.is, t)), r.speed);
    }
    EXPECT_EQ(fixed2(klm_speed(46, klm_time(klm_parse(ixtest::v2_published_klm), m, v2_klm_binding()))), "1.56");
}

TEST(KlmSpeed, Examples) {
    EXPECT_EQ(fixed2(klm_speed(171, 126.52)), "1.35");
    EXPECT_EQ(fixed2(klm_speed(46, 29.57)), "1.56");
    EXPECT_EQ(klm_speed(0, 3.0), 0.0);
    EXPECT_THROW(klm_speed(5, 0.0), Error);
    EXPECT_THROW(klm_speed(5, -1.0), Error);
    EXPECT_THROW(klm_speed(-1, 1.0), Error);
}

TEST(KlmProperty, MonotoneInUnitTimes) {
    ixtest::Gen gen(41);
    const KlmExpression k = klm_parse("(m + 2)*Q + 3*T + a*K + M + 2*P + R + C_click + S_saccade + E_mental");
    const Binding b = {{"m", 3}, {"a", 2}};
    const KlmModel base;
    const double t0 = klm_time(k, base, b);
    for (int field = 0; field < 7; ++field) {
        KlmModel::Primitives p;
        double* slots[] = {&p.k, &p.m, &p.c_click, &p.s_saccade, &p.p, &p.r, &p.e_mental};
        *slots[field] += 0.01 * gen.uniform(1, 50);
        EXPECT_GT(klm_time(k, KlmModel(p), b), t0) << field;
    }
}

TEST(KlmProperty, ConceptTimeIsSumOfStepTimes) {
    ixtest::Gen gen(42);
    ActionMapping map = default_action_mapping();
    map[ActionKind::scroll] = {KlmOperator::M, KlmOperator::K};
    map[ActionKind::external] = {KlmOperator::R};
    const KlmModel model;
    int checked = 0;
    for (int i = 0; i < 300; ++i) {
        const InteractionConcept c = gen.make_concept();
        const Binding b = gen.binding(c, 4);
        try {
            const double whole = klm_time(klm_from_concept(c, map), model, b);
            double parts = 0;
            for (const auto& s : c.steps) parts += klm_time(klm_from_step(s, map), model, b);
            EXPECT_NEAR(whole, parts, 1e-9 * std::max(1.0, std::abs(whole)));
            ++checked;
        } catch (const NegativeCountError&) {
        }
    }
    EXPECT_GT(checked, 150);
}
