#include <string>
#include <vector>

#include "dars/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return dars::cli::run(args);
}
