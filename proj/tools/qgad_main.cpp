#include <string>
#include <vector>

#include "qgad/cli/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return qgad::cli::run(std::move(args));
}
