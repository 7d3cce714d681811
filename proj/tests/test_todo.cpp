#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace sagents;

namespace {

ErrorCode code_of(const std::string& todo) {
    try {
        parse_todo(todo);
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error for " << todo;
    return ErrorCode::InvalidParams;
}

}  // namespace

TEST(Todo, WorkedExamples) {
    for (const auto& [line, expected] : fixtures::grammar_examples()) {
        const auto got = parse_todo(line);
        EXPECT_EQ(got, expected) << line << " -> " << got.to_json().dump();
        EXPECT_EQ(parse_todo(render(got)), got);
    }
}

TEST(Todo, Errors) {
    EXPECT_EQ(code_of("dance 5 times"), ErrorCode::UnknownVerb);
    EXPECT_EQ(code_of("build walls"), ErrorCode::MissingPosition);
    EXPECT_EQ(code_of("move to the tree"), ErrorCode::MissingPosition);
    EXPECT_EQ(code_of(""), ErrorCode::MalformedTodo);
    EXPECT_EQ(code_of("mine"), ErrorCode::MalformedTodo);
    EXPECT_EQ(code_of("give 3 logs"), ErrorCode::MalformedTodo);
    EXPECT_EQ(code_of("inform workerA"), ErrorCode::MalformedTodo);
}

TEST(Todo, VerbFormsAndCase) {
    EXPECT_EQ(parse_todo("Mines 3 Logs.").verb, Verb::Mine);
    EXPECT_EQ(parse_todo("Mines 3 Logs.").item, "log");
    EXPECT_EQ(parse_todo("craft a crafting_table").quantity, 1);
    EXPECT_EQ(verb_from_word("SMELTED"), Verb::Smelt);
    EXPECT_FALSE(verb_from_word("move"));
    const auto g = parse_todo("give 2 logs to workerB");
    EXPECT_EQ(g.verb, Verb::Give);
    EXPECT_EQ(g.recipient, AgentId("WorkerB"));
    EXPECT_EQ(g.quantity, 2);
    const auto m = parse_todo("instruct workerC, move to (1,-2,3)");
    EXPECT_TRUE(m.is_delegate());
    EXPECT_EQ(m.position, (Position{1, -2, 3}));
}

TEST(Todo, EnumeratedRoundTrip) {
    const std::vector<Verb> verbs{Verb::Mine, Verb::Craft, Verb::Smelt, Verb::Kill, Verb::Cook,
                                  Verb::Equip, Verb::Build, Verb::Give, Verb::MoveTo};
    int checked = 0;
    for (Verb v : verbs)
        for (int delegate = 0; delegate < 2; ++delegate)
            for (int q = 0; q < 2; ++q)
                for (int p = 0; p < 2; ++p)
                    for (const auto& item : fixtures::fuzz_items()) {
                        AgentAction a;
                        a.verb = v;
                        if (delegate) {
                            a.kind = AgentAction::Kind::Delegate;
                            a.target = AgentId("workerA");
                        }
                        if (v == Verb::MoveTo) {
                            if (!p || q || item != "log") continue;
                        } else {
                            a.item = item;
                            if (q) {
                                a.quantity = 12;
                                a.item = singular_item(item);
                            }
                        }
                        if (p || v == Verb::Build) a.position = Position{-3, 70, 8};
                        if (v == Verb::Give) a.recipient = AgentId("leader");
                        EXPECT_EQ(parse_todo(render(a)), a) << render(a);
                        ++checked;
                    }
    EXPECT_GT(checked, 500);
}

TEST(Todo, FuzzRoundTrip) {
    SplitMix64 rng(17);
    for (int i = 0; i < 2000; ++i) {
        const auto a = fixtures::random_action(rng);
        const auto text = render(a);
        ASSERT_EQ(parse_todo(text), a) << text;
    }
}

TEST(Todo, SingularItem) {
    EXPECT_EQ(singular_item("Stones"), "stone");
    EXPECT_EQ(singular_item("glass"), "glass");
    EXPECT_EQ(singular_item("woods"), "wood");
}
