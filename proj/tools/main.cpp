#include <string>
#include <vector>

#include "diqkd/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return diqkd::cli::run(args);
}
