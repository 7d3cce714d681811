#include <regex>

#include "sagents/backends.hpp"

namespace sagents {

namespace {

const char* kMonitor = R"(You check how far a Minecraft task has got.
Read the [Conversation] and the [Chest information] and decide whether [Task to be inquired] is finished.

Rules:
1. Judge only from what the conversation and the chest say.
2. Either source alone is enough evidence when it mentions the task.
3. A player announcing "I'll start the task ..." means the work is under way: status unknown.
4. Silence, or only "Got it!", means the work has not begun: status unknown.
5. "I have succeeded the task ..." means done: status success.
6. "I have failed the task ..." means it broke: status fail.
7. If a player claims success but a later inventory report from that player lacks the items, the claim is wrong: status fail.
8. Chest contents that already cover the requested amount mean success.

Response format:
Task result judgment: <one or two sentences naming the line that decided it>
Final task status: <exactly one of success, fail, unknown>

[Task to be inquired]:
```{task}```
[Conversation]:
{conversation}
[Chest information]: {chest}
)";

const char* kTaskRoot = R"(You are {name}, the leader of a Minecraft team. You never gather or build yourself; you hand out work.
Your workers: {employees}.

Steps:
1. Update what each worker holds from the [Conversation] and the [Previous inventory of employers]. Newer messages win.
2. With no previous plan, write one. With a previous plan, keep it unless the conversation gives a reason to change it.
3. Split the plan into stages. In each stage a worker gets one job, stated with item, amount and, for building, the exact coordinates.
4. Building goes foundation, then walls, then roof.
5. When a worker finishes early, give it part of the work that is still open.
6. Name the stage to run now and who asked for the work.

Response format:
Current inventory of employers: <one line per worker>
Objective: <the goal in one line>
Analysis: <short reasoning>
Long term plan:
Stage 1: <title>
    <Worker> <job>.
The task at hand:
<the stage to run now, copied from the plan, or None>
Informer is <the player who asked for the work>

[Conversation]:
{conversation}
[Previous long-term plan]:
{previous_plan}
[Previous inventory of employers]:
{beliefs}
[Progress of the current stage]: {progress}
)";

const char* kTaskLeaf = R"(You are {name}, a Minecraft worker. You do every job yourself.

Steps:
1. Read the [Conversation] and your inventory and work out what you were asked to do.
2. With no previous plan, write one. With a previous plan, keep it unless the conversation gives a reason to change it.
3. Respect the tech tree: logs by hand, stone needs a wooden pickaxe, iron needs a stone pickaxe. Gather logs, craft planks and sticks, a crafting table, then the pickaxe, and equip it.
4. If a stage failed because it ran out of time, run the same stage again.
5. Name the stage to run now and who asked for the work.

Response format:
Objective: <the goal in one line>
Analysis: <short reasoning>
Long term plan:
Stage 1: <title>
    {name} <job>.
The task at hand:
<the stage to run now, copied from the plan, or None>
Informer is <the player who asked for the work>

[Conversation]:
{conversation}
[Previous long-term plan]:
{previous_plan}
[Inventory]: {inventory}
[Progress of the current stage]: {progress}
)";

const char* kAction = R"(You are {name}. Turn the [Current task] into a TODO list.

Each entry follows one of these shapes:
- Mine [quantity] [block] (at [position])
- Craft [quantity] [item]
- Smelt [quantity] [item]
- Equip [item]
- Build [part] at [position]
- Give [quantity] [item] to [player]
- Move to [position]
{example}
Answer with a JSON array of strings and nothing else; it must load with a strict JSON parser.

[Current task]:
{task}
)";

const char* kActionRootExample = R"(Work for someone else is written as "inform [player] to [entry]".
Example:
Current task: WorkerA mines 25 woods. WorkerB mines 15 stones.
TODO list: ["inform WorkerA to mine 25 woods", "inform WorkerB to mine 15 stones"]
)";

const char* kActionLeafExample = R"(Only list work you do yourself.
Example:
Current task: WorkerA mine 25 woods.
TODO list: ["mine 25 woods"]
)";

}  // namespace

const PromptTemplate& prompt_template(std::string_view id) {
    static const std::map<std::string, PromptTemplate, std::less<>> templates{
        {"monitor", {"monitor", kMonitor}},
        {"task_root", {"task_root", kTaskRoot}},
        {"task_leaf", {"task_leaf", kTaskLeaf}},
        {"action", {"action", kAction}},
        {"action_root_example", {"action_root_example", kActionRootExample}},
        {"action_leaf_example", {"action_leaf_example", kActionLeafExample}},
    };
    auto it = templates.find(id);
    if (it == templates.end()) throw Error(ErrorCode::InvalidParams, "unknown template " + std::string(id));
    return it->second;
}

std::vector<std::string> template_slots(const PromptTemplate& t) {
    static const std::regex slot(R"(\{([a-z_]+)\})");
    std::vector<std::string> out;
    for (auto it = std::sregex_iterator(t.body.begin(), t.body.end(), slot); it != std::sregex_iterator(); ++it) {
        const std::string name = (*it).str(1);
        if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
    }
    return out;
}

std::string render_prompt(const PromptTemplate& t, const std::map<std::string, std::string>& slots) {
    static const std::regex slot(R"(\{([a-z_]+)\})");
    std::string out;
    std::size_t last = 0;
    for (auto it = std::sregex_iterator(t.body.begin(), t.body.end(), slot); it != std::sregex_iterator(); ++it) {
        const auto& m = *it;
        auto v = slots.find(m.str(1));
        if (v == slots.end()) throw Error(ErrorCode::UnboundSlot, t.id + ": {" + m.str(1) + "}");
        out.append(t.body, last, static_cast<std::size_t>(m.position(0)) - last);
        out += v->second;
        last = static_cast<std::size_t>(m.position(0) + m.length(0));
    }
    out.append(t.body, last, std::string::npos);
    return out;
}

}  // namespace sagents
