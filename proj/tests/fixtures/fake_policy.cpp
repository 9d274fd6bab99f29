// SPDX-License-Identifier: Apache-2.0
// Scripted stand-in for an external policy process. Usage: fake_policy MODE
//   good     synthesize the all-zero configuration, then select it
//   garbage  answer every message with a line that is not JSON
//   invalid  keep inspecting a kernel that does not exist
//   silent   read forever, never answer
//   exit     quit straight after the task message
#include <iostream>
#include <string>

#include <json.hpp>

using nlohmann::json;

namespace {

void send(const json& action) {
    std::cout << json{{"type", "action"}, {"action", action}}.dump() << std::endl;
}

} // namespace

int main(int argc, char** argv) {
    const std::string mode = argc > 1 ? argv[1] : "good";
    std::string line;
    if (!std::getline(std::cin, line)) {
        return 1;
    }
    const auto task = json::parse(line);
    json choice = json::object();
    for (const auto& k : task.at("design_summary").at("kernels")) {
        choice[k.at("id").get<std::string>()] = 0;
    }

    if (mode == "exit") {
        return 0;
    }
    if (mode == "good") {
        send({{"synthesize", {{"choice", choice}}}});
        if (!std::getline(std::cin, line) || json::parse(line).at("type") != "observation") {
            return 1;
        }
        send({{"select", {{"choice", choice}}}});
        std::getline(std::cin, line);
        return 0;
    }
    for (;;) {
        if (mode == "garbage") {
            std::cout << "I think we should pick A:0" << std::endl;
        } else if (mode == "invalid") {
            send({{"inspect", {{"kernel", "no_such_kernel"}}}});
        }
        if (!std::getline(std::cin, line)) {
            return 0;
        }
    }
}
