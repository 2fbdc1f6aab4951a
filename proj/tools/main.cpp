#include <iostream>

#include "tool_commands.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return ntw::cli::run(args, std::cout, std::cerr);
}
